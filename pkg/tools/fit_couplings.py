"""Invert mean-field couplings from nuclear-matter characteristics.

Given (rho_sat, E_sat, M*/M, K, J, L) plus a chosen zeta0 and the meson
masses, the scalar-sector potential values (V, V', V'') at the saturation
field are determined and mapped linearly onto (g_sigma, kappa3, kappa4);
the omega coupling follows in closed form from W = M + E_sat - E*_F, and
(g_rho, lambda_omega) from a 2D solve on (J, L).

Used to regenerate bundled parameter files for models whose original
publications quote couplings in different conventions or only their
nuclear-matter characteristics (see data/README.md), and to calibrate the
NITR set against its published global neutron-star properties.
"""

import numpy as np
from scipy import optimize

import sys
sys.path.insert(0, "src")

from dmans.constants import HBARC
from dmans.fermi import energy_density, fermi_momentum, pressure, scalar_density
from dmans.rmf import RMFParameterSet, saturation_properties

HC3 = HBARC**3


def invert(rho0, E0, mstar_frac, K, J, L, zeta0, m_sigma, m_omega=782.5,
           m_rho=763.0, M_N=939.0, name="fit"):
    rho = rho0 * HC3
    kf = fermi_momentum(0.5 * rho)
    mstar = mstar_frac * M_N
    phi = M_N - mstar
    efs = np.hypot(kf, mstar)

    # vector sector: eps + P = rho * E*_F + rho * W at saturation
    W = M_N + E0 - efs
    if W <= 0:
        raise ValueError("inconsistent inputs: W <= 0")
    g_omega2 = (m_omega**2 * W + zeta0 * W**3 / 6.0) / rho
    p_kin = 2.0 * pressure(kf, mstar)
    e_kin = 2.0 * energy_density(kf, mstar)
    ns = 2.0 * scalar_density(kf, mstar)
    v_omega = 0.5 * m_omega**2 * W**2 / g_omega2 + zeta0 * W**4 / (24.0 * g_omega2)
    V = p_kin + v_omega          # P = 0 at saturation
    Vp = ns                      # sigma field equation

    def params_for(Vpp):
        A = np.array([[0.5 * phi**2, phi**3 / 6.0, phi**4 / 24.0],
                      [phi, 0.5 * phi**2, phi**3 / 6.0],
                      [1.0, phi, 0.5 * phi**2]])
        x = np.linalg.solve(A, [V, Vp, Vpp])
        C, x2, x3 = x
        if C <= 0:
            raise ValueError("negative sigma stiffness")
        return RMFParameterSet(
            m_sigma=m_sigma, m_omega=m_omega, m_rho=m_rho,
            g_sigma=m_sigma / np.sqrt(C), g_omega=np.sqrt(g_omega2),
            g_rho=1.0, kappa3=x2 * M_N / C, kappa4=x3 * M_N**2 / C,
            zeta0=zeta0, lambda_omega=0.0, M_N=M_N, model_name=name)

    window = (max(rho0 - 0.05, 0.06), rho0 + 0.06)

    def k_gap(Vpp):
        sat = saturation_properties(params_for(Vpp), window=window)
        return sat.K_sat - K

    # guarded secant on V'' (K is smooth and increasing in V'')
    v0 = m_sigma**2 / 80.0
    a, fa = v0, k_gap(v0)
    b = v0 * (1.1 if fa < 0 else 0.9)
    fb = k_gap(b)
    for _ in range(60):
        if abs(fb) < 1e-6:
            break
        step = -fb * (b - a) / (fb - fa)
        step = np.clip(step, -0.3 * b, 0.3 * b)
        a, fa = b, fb
        b = b + step
        fb = k_gap(b)
    Vpp = b
    p = params_for(Vpp)

    # isovector sector
    def jl_gap(x):
        g_rho, lam = x
        q = RMFParameterSet(m_sigma=p.m_sigma, m_omega=p.m_omega, m_rho=m_rho,
                            g_sigma=p.g_sigma, g_omega=p.g_omega,
                            g_rho=abs(g_rho), kappa3=p.kappa3, kappa4=p.kappa4,
                            zeta0=zeta0, lambda_omega=lam, M_N=M_N,
                            model_name=name)
        sat = saturation_properties(q, window=window)
        return [sat.J_sat - J, sat.L_sat - L]

    sol = optimize.root(jl_gap, [10.0, 0.02], method="hybr",
                        options={"xtol": 1e-10})
    g_rho, lam = abs(sol.x[0]), sol.x[1]
    final = RMFParameterSet(m_sigma=p.m_sigma, m_omega=p.m_omega, m_rho=m_rho,
                            g_sigma=p.g_sigma, g_omega=p.g_omega, g_rho=g_rho,
                            kappa3=p.kappa3, kappa4=p.kappa4, zeta0=zeta0,
                            lambda_omega=lam, M_N=M_N, model_name=name)
    return final


def report(p):
    sat = saturation_properties(p)
    print(f"{p.model_name}: g_s={p.g_sigma:.5f} g_w={p.g_omega:.5f} "
          f"g_r={p.g_rho:.5f} k3={p.kappa3:.5f} k4={p.kappa4:.5f} "
          f"z0={p.zeta0:.5f} Lw={p.lambda_omega:.6f}")
    print(f"   rho0={sat.rho_sat:.4f} E0={sat.E_sat:.3f} K={sat.K_sat:.2f} "
          f"J={sat.J_sat:.2f} L={sat.L_sat:.2f}")
    return sat


if __name__ == "__main__":
    # self-test: NL3 characteristics should return NL3-like couplings
    nl3 = invert(0.148, -16.24, 0.595, 271.5, 37.4, 118.5,
                 zeta0=0.0, m_sigma=508.194, m_omega=782.501, m_rho=763.0,
                 name="NL3-check")
    report(nl3)
