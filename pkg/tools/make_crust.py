"""Generate the bundled crust table (data/crust.csv).

Pressure comes from the analytic representation of the unified SLy
equation of state by Haensel & Potekhin, A&A 428, 191 (2004), Eq. (14),
evaluated over the crust range only.  The baryon density follows from the
zero-temperature first law integrated along the same curve,

    d ln n_b = d eps / (eps + P),

anchored at the low-density end with an energy per baryon of 930.412 MeV
(the 56Fe mass per nucleon), so the shipped rows satisfy the thermodynamic
identity to the accuracy of the row spacing by construction.

Run from the repository root:  python tools/make_crust.py
"""

import numpy as np
from scipy.integrate import cumulative_trapezoid

# Haensel & Potekhin (2004) fit coefficients for SLy, Eq. (14)
A = [6.22, 6.121, 0.005925, 0.16326, 6.48, 11.4971, 19.105, 0.8938,
     6.54, 11.4950, -22.775, 1.5707, 4.3, 14.08, 27.80, -1.653, 1.50, 14.67]

ERG_CM3_PER_MEV_FM3 = 1.602176634e33   # 1 MeV/fm^3 in erg/cm^3 (= dyn/cm^2)
G_CM3_PER_MEV_FM3 = 1.78266192e12      # 1 MeV/fm^3 in g/cm^3 (rho = eps/c^2)
E_PER_BARYON_SURFACE = 930.412         # MeV, 56Fe mass per nucleon

XI_MIN = np.log10(1.7e6)               # g/cm^3; outermost shipped layer
XI_MAX = np.log10(0.11 * 939.0 * G_CM3_PER_MEV_FM3)  # past any junction window
N_FINE = 16001                         # first-law integration grid
STRIDE = 16                            # shipped rows: every STRIDE-th point


def zeta(xi):
    """log10 P [dyn/cm^2] as a function of log10 rho [g/cm^3]."""
    xi = np.asarray(xi, dtype=float)

    def f0(x):
        return 1.0 / (np.exp(np.clip(x, -500.0, 500.0)) + 1.0)

    return ((A[0] + A[1] * xi + A[2] * xi**3) / (1.0 + A[3] * xi)
            * f0(A[4] * (xi - A[5]))
            + (A[6] + A[7] * xi) * f0(A[8] * (A[9] - xi))
            + (A[10] + A[11] * xi) * f0(A[12] * (A[13] - xi))
            + (A[14] + A[15] * xi) * f0(A[16] * (A[17] - xi)))


def main():
    xi = np.linspace(XI_MIN, XI_MAX, N_FINE)
    eps = 10.0**xi / G_CM3_PER_MEV_FM3              # MeV/fm^3
    prs = 10.0**zeta(xi) / ERG_CM3_PER_MEV_FM3      # MeV/fm^3
    if np.any(np.diff(prs) <= 0.0):
        raise RuntimeError("fit is non-monotone on the crust range")

    # first law: ln n_b = integral deps/(eps+P), in d ln(eps)
    lneps = np.log(eps)
    integrand = eps / (eps + prs)
    lnn = cumulative_trapezoid(integrand, lneps, initial=0.0)
    n_b = (eps[0] / E_PER_BARYON_SURFACE) * np.exp(lnn)

    sel = np.arange(0, N_FINE, STRIDE)
    rows = np.column_stack([n_b[sel], eps[sel], prs[sel]])
    with open("src/dmans/data/crust.csv", "w") as fh:
        fh.write("# crust table: SLy (Haensel & Potekhin 2004 analytic fit),"
                 " baryon density from first-law integration\n")
        fh.write("rho_b_fm3,energy_density_MeV_fm3,pressure_MeV_fm3,cs2,segment\n")
        for n, e, p in rows:
            fh.write(f"{n:.10e},{e:.10e},{p:.10e},,crust\n")
    print(f"wrote {len(rows)} rows, n_b {n_b[sel][0]:.3e}..{n_b[sel][-1]:.3e} fm^-3")


if __name__ == "__main__":
    main()
