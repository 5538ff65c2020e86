"""TOV stellar structure on an EOS table, in geometrized units (km).

Masses are carried in km internally (G = c = 1) and reported in solar
masses; pressures and energy densities convert from MeV/fm^3 with the
project-wide constant.  The metric potential nu is defined by
ds^2 = -e^{2 nu} dt^2 + ..., matched to the exterior Schwarzschild value
e^{2 nu(R)} = 1 - 2M/R at the surface.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .constants import MEVFM3_TO_KM2, MSUN_KM

_4PI = 4.0 * math.pi
R_START = 0.01   # km; series expansion covers (0, R_START]
R_LIMIT = 150.0  # km; EOS exhausted if no surface found by here


class TOVError(Exception):
    pass


@dataclass
class StellarSolution:
    """One equilibrium star and its interior profile."""

    rho_c: float                 # fm^-3
    M: float                     # solar masses
    R: float                     # km
    C: float                     # GM/Rc^2
    profile: dict                # arrays: r, m, P, eps, nu (km / geometric)
    P_cut: float                 # surface pressure, MeV/fm^3
    Lambda: float = None         # filled by perturbations.tidal_deformability
    f_kHz: float = None          # filled by perturbations.fmode_frequency
    _dense: object = field(default=None, repr=False)
    _eos: object = field(default=None, repr=False)

    def interior(self, r):
        """(m, P, nu) in geometric units at radius r (vectorized)."""
        m, P, nu = self._dense(r)
        return m, P, nu


@dataclass
class MRCurve:
    """Mass-radius sequence ordered by central density."""

    stars: list
    M_max: float
    R_at_Mmax: float
    rho_c_at_Mmax: float
    model_name: str = ""
    dm_kf: float = 0.0

    @property
    def masses(self):
        return np.array([s.M for s in self.stars])

    @property
    def radii(self):
        return np.array([s.R for s in self.stars])

    @property
    def rho_cs(self):
        return np.array([s.rho_c for s in self.stars])

    def stable(self):
        """Stars on the stable branch (up to and including the peak)."""
        m = self.masses
        k = int(np.argmax(m))
        return self.stars[:k + 1]


def _geo_interp(eos):
    """Fast eps(P) in geometric units: the table's monotone log-log
    interpolant resampled on a dense grid and evaluated with np.interp."""
    fast = getattr(eos, "_fast_geo", None)
    if fast is None:
        logP = np.linspace(math.log(eos.P[0]), math.log(eos.P[-1]), 4096)
        logeps = np.log(eos.eps_of_P(np.exp(logP)))
        fast = (logP + math.log(MEVFM3_TO_KM2), logeps + math.log(MEVFM3_TO_KM2))
        eos._fast_geo = fast
    lp, le = fast

    def eps_of_P(P_geo):
        return np.exp(np.interp(np.log(P_geo), lp, le))

    return eps_of_P


def tov_integrate(eos, rho_c, rtol=1e-8, P_cut=None):
    """Integrate the TOV equations for central density rho_c [fm^-3].

    The surface is the radius where the pressure falls to P_cut (the
    table minimum by default, which for DM-admixed tables includes the
    DM pressure floor).
    """
    if not (eos.rho[0] < rho_c <= eos.rho[-1]):
        raise TOVError(f"rho_c = {rho_c} outside EOS range")
    if P_cut is None:
        P_cut = eos.P[0]
    Pc = float(eos.P_of_rho(rho_c))
    pcut_geo = P_cut * MEVFM3_TO_KM2
    pc = Pc * MEVFM3_TO_KM2
    if pc <= pcut_geo:
        raise TOVError("central pressure at or below the surface cutoff")
    eps_of_P = _geo_interp(eos)
    ec = eps_of_P(pc)

    def rhs(r, y):
        m, P, nu = y
        if P <= pcut_geo:
            return [0.0, 0.0, 0.0]
        eps = eps_of_P(P)
        dnu = (m + _4PI * r**3 * P) / (r * (r - 2.0 * m))
        return [_4PI * r**2 * eps, -(eps + P) * dnu, dnu]

    def surface(r, y):
        return y[1] - pcut_geo
    surface.terminal = True
    surface.direction = -1

    r0 = R_START
    m0 = _4PI / 3.0 * ec * r0**3
    p0 = pc - (2.0 * math.pi / 3.0) * (ec + pc) * (ec + 3.0 * pc) * r0**2
    nu0 = (2.0 * math.pi / 3.0) * (ec + 3.0 * pc) * r0**2
    sol = solve_ivp(rhs, (r0, R_LIMIT), [m0, p0, nu0], method="RK45",
                    rtol=rtol, atol=[1e-10, pcut_geo * 1e-3, 1e-10],
                    events=surface, dense_output=True)
    if sol.status != 1:
        raise TOVError("EOS range exhausted before reaching the surface")

    R = float(sol.t_events[0][0])
    mR = float(sol.y_events[0][0][0])
    nuR = float(sol.y_events[0][0][2])
    C = mR / R
    if C >= 4.0 / 9.0:
        raise TOVError("Buchdahl bound violated")
    shift = 0.5 * math.log(1.0 - 2.0 * C) - nuR

    dense = sol.sol

    def interior(r):
        m, P, nu = dense(np.minimum(r, R))
        return m, P, nu + shift

    rs = np.linspace(r0, R, 512)
    m_arr, P_arr, nu_arr = interior(rs)
    P_mev = P_arr / MEVFM3_TO_KM2
    eps_arr = eos.eps_of_P(np.clip(P_mev, eos.P[0], eos.P[-1])) * MEVFM3_TO_KM2
    profile = {"r": rs, "m": m_arr / MSUN_KM, "P": P_mev,
               "eps": eps_arr / MEVFM3_TO_KM2, "nu": nu_arr}
    return StellarSolution(rho_c=rho_c, M=mR / MSUN_KM, R=R, C=C,
                           profile=profile, P_cut=P_cut,
                           _dense=interior, _eos=eos)


def _golden_max(f, a, b, tol):
    """Golden-section maximizer on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def mr_curve(eos, rho_c_grid=None, rtol=1e-8):
    """Mass-radius curve over a central-density grid plus a refined peak.

    M_max is located by golden-section refinement around the grid argmax.
    """
    if rho_c_grid is None:
        lo = max(0.2, eos.rho[0] * 1.0001)
        hi = min(1.2, eos.rho[-1])
        rho_c_grid = np.geomspace(lo, hi, 120)
    rho_c_grid = np.asarray(rho_c_grid, dtype=float)
    stars = [tov_integrate(eos, rc, rtol=rtol) for rc in rho_c_grid]
    masses = np.array([s.M for s in stars])
    k = int(np.argmax(masses))

    cache = {}

    def mass_at(rc):
        if rc not in cache:
            cache[rc] = tov_integrate(eos, rc, rtol=rtol)
        return cache[rc].M

    a = rho_c_grid[max(k - 1, 0)]
    b = rho_c_grid[min(k + 1, len(rho_c_grid) - 1)]
    if a == b:
        rc_peak, m_peak = rho_c_grid[k], masses[k]
    else:
        rc_peak, m_peak = _golden_max(mass_at, a, b, tol=1e-5 * rho_c_grid[k])
    peak = cache.get(rc_peak) or tov_integrate(eos, rc_peak, rtol=rtol)
    return MRCurve(stars=stars, M_max=peak.M, R_at_Mmax=peak.R,
                   rho_c_at_Mmax=rc_peak, model_name=eos.model_name,
                   dm_kf=eos.dm_kf)


def star_at_mass(curve, M_target, eos=None, rtol=1e-8, mass_tol=1e-4):
    """Star of mass M_target on the stable branch, by bisection on rho_c."""
    stable = curve.stable()
    masses = np.array([s.M for s in stable])
    if M_target > curve.M_max + mass_tol:
        raise TOVError(f"target mass {M_target} above M_max = {curve.M_max}")
    if abs(M_target - curve.M_max) <= mass_tol:
        rc = curve.rho_c_at_Mmax
        eos = eos or stable[-1]._eos
        return tov_integrate(eos, rc, rtol=rtol)
    eos = eos or stable[-1]._eos
    rho_cs = np.array([s.rho_c for s in stable])
    k = int(np.searchsorted(masses, M_target))
    lo = rho_cs[max(k - 1, 0)]
    hi = rho_cs[k] if k < len(rho_cs) else curve.rho_c_at_Mmax

    def f(rc):
        return tov_integrate(eos, rc, rtol=rtol).M - M_target

    rc = brentq(f, lo, hi, xtol=1e-10, rtol=1e-12)
    star = tov_integrate(eos, rc, rtol=rtol)
    if abs(star.M - M_target) > mass_tol:
        raise TOVError("bisection did not reach the mass tolerance")
    return star
