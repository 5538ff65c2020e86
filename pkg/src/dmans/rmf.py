"""Nucleonic equation of state from a relativistic mean-field model.

The model couples nucleons to sigma, omega and rho meson mean fields with
cubic/quartic sigma self-interactions, a quartic omega term and an
omega-rho cross coupling.  Scaled field amplitudes are used throughout:

    Phi = g_sigma * sigma,   W = g_omega * omega_0,   R = g_rho * rho_03,

all in MeV, so the effective nucleon mass is M* = M_N - Phi and the nucleon
chemical potentials are

    mu_n = sqrt(kf_n^2 + M*^2) + W - R/2
    mu_p = sqrt(kf_p^2 + M*^2) + W + R/2.

The isovector density convention is rho_3 = rho_p - rho_n.  Beta-equilibrated
matter includes electrons and muons; charge neutrality is built into the
solver parametrization and therefore holds to machine precision.

Internally all meson-field algebra is done in natural MeV units; the public
API takes baryon densities in fm^-3 and returns energy densities and
pressures in MeV/fm^3.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .constants import HBARC, M_ELECTRON, M_MUON
from .fermi import (energy_density, fermi_momentum, number_density, pressure,
                    scalar_density)

HC3 = HBARC**3

FIELD_TOL = 1.0e-10  # relative residual demanded of every accepted state


class RMFError(Exception):
    """Base class for mean-field solver failures."""


class NonConvergence(RMFError):
    """Nonlinear solve failed; usually a bad seed or unphysical density."""


class UnphysicalState(RMFError):
    """Effective mass dropped to zero or densities left the supported range."""


@dataclass
class RMFParameterSet:
    """Coupling constants and masses of one mean-field model (MeV units)."""

    m_sigma: float
    m_omega: float
    m_rho: float
    g_sigma: float
    g_omega: float
    g_rho: float
    kappa3: float
    kappa4: float
    zeta0: float
    lambda_omega: float
    M_N: float = 939.0
    model_name: str = "unnamed"

    def __post_init__(self):
        for name in ("m_sigma", "m_omega", "m_rho", "M_N"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("g_sigma", "g_omega", "g_rho"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_file(cls, path):
        """Load a parameter set from a flat key=value text file."""
        kv = _read_keyvalue(path)
        return cls(
            m_sigma=float(kv["m_sigma"]),
            m_omega=float(kv["m_omega"]),
            m_rho=float(kv["m_rho"]),
            g_sigma=float(kv["g_sigma"]),
            g_omega=float(kv["g_omega"]),
            g_rho=float(kv["g_rho"]),
            kappa3=float(kv["kappa3"]),
            kappa4=float(kv["kappa4"]),
            zeta0=float(kv["zeta0"]),
            lambda_omega=float(kv["lambda_omega"]),
            M_N=float(kv.get("M_N", 939.0)),
            model_name=kv.get("model_name", "unnamed"),
        )


@dataclass
class MeanFieldState:
    """Converged meson fields and Fermi momenta at one baryon density."""

    Phi: float          # MeV
    W: float            # MeV
    R: float            # MeV
    kf_n: float         # MeV
    kf_p: float         # MeV
    kf_e: float         # MeV
    kf_mu: float        # MeV
    rho_b: float        # fm^-3
    rho_3: float        # fm^-3, rho_p - rho_n
    mode: str = "beta_equilibrium"

    def effective_mass(self, params):
        return params.M_N - self.Phi


@dataclass
class SaturationProperties:
    """Symmetric nuclear matter characteristics at the saturation point."""

    rho_sat: float      # fm^-3
    E_sat: float        # MeV, binding energy per nucleon
    K_sat: float        # MeV, incompressibility
    J_sat: float        # MeV, symmetry energy
    L_sat: float        # MeV, symmetry-energy slope


def _read_keyvalue(path):
    kv = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            kv[key.strip()] = value.strip()
    return kv


# ---------------------------------------------------------------------------
# meson-field algebra (all MeV^n units)

def _sigma_source_lhs(phi, p):
    """d V_sigma / d Phi for the cubic+quartic sigma potential."""
    c = p.m_sigma**2 / p.g_sigma**2
    return c * phi * (1.0 + 0.5 * p.kappa3 * phi / p.M_N
                      + p.kappa4 * phi**2 / (6.0 * p.M_N**2))


def _sigma_potential(phi, p):
    c = p.m_sigma**2 / p.g_sigma**2
    return c * (0.5 * phi**2 + p.kappa3 * phi**3 / (6.0 * p.M_N)
                + p.kappa4 * phi**4 / (24.0 * p.M_N**2))


def _omega_lhs(w, r, p):
    return (p.m_omega**2 / p.g_omega**2) * w \
        + (p.zeta0 / 6.0) * w**3 / p.g_omega**2 \
        + 2.0 * p.lambda_omega * r**2 * w


def _rho_lhs(w, r, p):
    return (p.m_rho**2 / p.g_rho**2) * r + 2.0 * p.lambda_omega * w**2 * r


def _lepton_kf(mu_e):
    """Electron and muon Fermi momenta for a common lepton chemical potential."""
    kf_e = math.sqrt(mu_e**2 - M_ELECTRON**2) if mu_e > M_ELECTRON else 0.0
    kf_mu = math.sqrt(mu_e**2 - M_MUON**2) if mu_e > M_MUON else 0.0
    return kf_e, kf_mu


def _residuals_beta(x, rho, p):
    """Scaled residuals of the coupled field + beta-equilibrium system.

    Unknowns are (Phi, W, R, mu_e); rho is the baryon density in MeV^3.
    Charge neutrality fixes kf_p from mu_e, so it is satisfied identically.
    """
    phi, w, r, mu_e = x
    mstar = p.M_N - phi
    if mstar <= 0.0 or mu_e < 0.0:
        return np.array([1e3, 1e3, 1e3, 1e3])
    kf_e, kf_mu = _lepton_kf(mu_e)
    rho_p = number_density(kf_e) + number_density(kf_mu)
    rho_n = rho - rho_p
    if rho_n <= 0.0:
        return np.array([1e3, 1e3, 1e3, 1e3])
    kf_p = fermi_momentum(rho_p) if rho_p > 0.0 else 0.0
    kf_n = fermi_momentum(rho_n)
    rho_3 = rho_p - rho_n

    ns = scalar_density(kf_n, mstar) + scalar_density(kf_p, mstar)
    mu_n = math.hypot(kf_n, mstar) + w - 0.5 * r
    mu_p = math.hypot(kf_p, mstar) + w + 0.5 * r

    s_scale = max(abs(ns), p.m_sigma**2 / p.g_sigma**2 * p.M_N * 1e-3)
    r_scale = max(abs(0.5 * rho_3), 1e-3 * rho)
    return np.array([
        (_sigma_source_lhs(phi, p) - ns) / s_scale,
        (_omega_lhs(w, r, p) - rho) / rho,
        (_rho_lhs(w, r, p) - 0.5 * rho_3) / r_scale,
        (mu_n - mu_p - mu_e) / mu_n,
    ])


def _residuals_fixed_kf(x, kf_n, kf_p, p):
    """Residuals of the three field equations at given Fermi momenta."""
    phi, w, r = x
    mstar = p.M_N - phi
    if mstar <= 0.0:
        return np.array([1e3, 1e3, 1e3])
    rho = number_density(kf_n) + number_density(kf_p)
    rho_3 = number_density(kf_p) - number_density(kf_n)
    ns = scalar_density(kf_n, mstar) + scalar_density(kf_p, mstar)
    s_scale = max(abs(ns), p.m_sigma**2 / p.g_sigma**2 * p.M_N * 1e-3)
    r_scale = max(abs(0.5 * rho_3), 1e-3 * rho)
    return np.array([
        (_sigma_source_lhs(phi, p) - ns) / s_scale,
        (_omega_lhs(w, r, p) - rho) / rho,
        (_rho_lhs(w, r, p) - 0.5 * rho_3) / r_scale,
    ])


def _cold_seed(rho, p, mode):
    """Crude field estimates used when no neighbouring solution is known."""
    phi0 = min(p.g_sigma**2 * rho / p.m_sigma**2, 0.55 * p.M_N)
    w0 = p.g_omega**2 * rho / p.m_omega**2
    w0 = min(w0, 0.45 * p.M_N)
    if mode == "beta_equilibrium":
        kf = fermi_momentum(0.03 * rho)
        mu_e0 = math.hypot(kf, M_ELECTRON)
        return np.array([phi0, w0, -0.02 * p.g_rho**2 * rho / p.m_rho**2, mu_e0])
    return np.array([phi0, w0, 0.0])


def _solve(fun, x0, args):
    sol = optimize.root(fun, x0, args=args, method="hybr",
                        options={"xtol": 1e-13, "maxfev": 4000})
    res = fun(sol.x, *args)
    if np.max(np.abs(res)) > FIELD_TOL:
        raise NonConvergence(
            f"field equations did not converge (max residual {np.max(np.abs(res)):.2e})")
    return sol.x


def solve_fields(rho_b, params, mode="beta_equilibrium", t=None, seed=None,
                 _depth=0):
    """Solve the static mean-field equations at baryon density rho_b [fm^-3].

    Parameters
    ----------
    rho_b : float
        Baryon density in fm^-3 (> 0).
    params : RMFParameterSet
    mode : str
        One of 'beta_equilibrium', 'symmetric', 'pure_neutron',
        'fixed_asymmetry'.  The last requires the asymmetry t.
    t : float, optional
        Asymmetry (rho_n - rho_p)/rho_b for mode='fixed_asymmetry'.
    seed : array, optional
        Warm-start unknowns from a neighbouring density (continuation).

    Returns
    -------
    MeanFieldState
    """
    if rho_b <= 0.0:
        raise ValueError("rho_b must be positive")
    rho = rho_b * HC3  # MeV^3

    if mode == "beta_equilibrium":
        x0 = seed if seed is not None else _cold_seed(rho, params, mode)
        try:
            x = _solve(_residuals_beta, x0, (rho, params))
        except NonConvergence:
            x = _continuation_rescue(rho_b, params, mode, t, _depth)
        phi, w, r, mu_e = x
        kf_e, kf_mu = _lepton_kf(mu_e)
        rho_p = number_density(kf_e) + number_density(kf_mu)
        kf_p = fermi_momentum(rho_p) if rho_p > 0.0 else 0.0
        kf_n = fermi_momentum(rho - rho_p)
        state = MeanFieldState(phi, w, r, kf_n, kf_p, kf_e, kf_mu,
                               rho_b, (rho_p - (rho - rho_p)) / HC3, mode)
    else:
        if mode == "symmetric":
            asym = 0.0
        elif mode == "pure_neutron":
            asym = 1.0
        elif mode == "fixed_asymmetry":
            if t is None:
                raise ValueError("fixed_asymmetry mode requires t")
            asym = float(t)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        rho_n = 0.5 * (1.0 + asym) * rho
        rho_p = 0.5 * (1.0 - asym) * rho
        kf_n = fermi_momentum(rho_n) if rho_n > 0.0 else 0.0
        kf_p = fermi_momentum(rho_p) if rho_p > 0.0 else 0.0
        x0 = seed if seed is not None else _cold_seed(rho, params, mode)
        try:
            x = _solve(_residuals_fixed_kf, x0, (kf_n, kf_p, params))
        except NonConvergence:
            x = _continuation_rescue(rho_b, params, mode, t, _depth)
        phi, w, r = x
        state = MeanFieldState(phi, w, r, kf_n, kf_p, 0.0, 0.0,
                               rho_b, (rho_p - rho_n) / HC3, mode)

    if state.effective_mass(params) <= 0.0:
        raise UnphysicalState("effective nucleon mass <= 0")
    return state


def _continuation_rescue(rho_b, params, mode, t, depth):
    """Re-seed a failed solve by a density ladder up from rho_b / 2."""
    if depth >= 6:
        raise NonConvergence(f"continuation rescue failed at rho_b = {rho_b}")
    state = solve_fields(0.5 * rho_b, params, mode, t=t, _depth=depth + 1)
    asym = {"symmetric": 0.0, "pure_neutron": 1.0}.get(
        mode, t if t is not None else 0.0)
    x = None
    for rb in np.geomspace(0.5 * rho_b, rho_b, 9)[1:]:
        rho = rb * HC3
        if mode == "beta_equilibrium":
            if x is None:
                mu_e = math.hypot(state.kf_e, M_ELECTRON)
                x = np.array([state.Phi, state.W, state.R, mu_e])
            x = _solve(_residuals_beta, x, (rho, params))
        else:
            if x is None:
                x = np.array([state.Phi, state.W, state.R])
            rho_n = 0.5 * (1.0 + asym) * rho
            rho_p = 0.5 * (1.0 - asym) * rho
            kf_n = fermi_momentum(rho_n) if rho_n > 0.0 else 0.0
            kf_p = fermi_momentum(rho_p) if rho_p > 0.0 else 0.0
            x = _solve(_residuals_fixed_kf, x, (kf_n, kf_p, params))
    return x


def field_residuals(state, params):
    """Relative field-equation (and beta/charge) residuals of a state."""
    if state.mode == "beta_equilibrium":
        mu_e = math.hypot(state.kf_e, M_ELECTRON)
        x = np.array([state.Phi, state.W, state.R, mu_e])
        return _residuals_beta(x, state.rho_b * HC3, params)
    x = np.array([state.Phi, state.W, state.R])
    return _residuals_fixed_kf(x, state.kf_n, state.kf_p, params)


def chemical_potentials(state, params):
    """(mu_n, mu_p, mu_e) of a converged state, in MeV."""
    mstar = state.effective_mass(params)
    mu_n = math.hypot(state.kf_n, mstar) + state.W - 0.5 * state.R
    mu_p = math.hypot(state.kf_p, mstar) + state.W + 0.5 * state.R
    mu_e = math.hypot(state.kf_e, M_ELECTRON) if state.kf_e > 0.0 else 0.0
    return mu_n, mu_p, mu_e


def eos_point(state, params):
    """Energy density and pressure [MeV/fm^3] of a converged state.

    Includes the lepton gas whenever the state carries lepton Fermi momenta.
    """
    p = params
    mstar = state.effective_mass(p)
    rho = state.rho_b * HC3
    rho_3 = state.rho_3 * HC3

    e_kin = energy_density(state.kf_n, mstar) + energy_density(state.kf_p, mstar)
    p_kin = pressure(state.kf_n, mstar) + pressure(state.kf_p, mstar)

    w, r = state.W, state.R
    e_mes = (_sigma_potential(state.Phi, p)
             - 0.5 * (p.m_omega**2 / p.g_omega**2) * w**2
             - (p.zeta0 / 24.0) * w**4 / p.g_omega**2
             - 0.5 * (p.m_rho**2 / p.g_rho**2) * r**2
             - p.lambda_omega * r**2 * w**2)
    p_mes = (-_sigma_potential(state.Phi, p)
             + 0.5 * (p.m_omega**2 / p.g_omega**2) * w**2
             + (p.zeta0 / 24.0) * w**4 / p.g_omega**2
             + 0.5 * (p.m_rho**2 / p.g_rho**2) * r**2
             + p.lambda_omega * r**2 * w**2)

    e_lep = energy_density(state.kf_e, M_ELECTRON) + energy_density(state.kf_mu, M_MUON)
    p_lep = pressure(state.kf_e, M_ELECTRON) + pressure(state.kf_mu, M_MUON)

    eps = e_kin + rho * w + 0.5 * rho_3 * r + e_mes + e_lep
    prs = p_kin + p_mes + p_lep
    return eps / HC3, prs / HC3


def build_core_table(params, rho_grid=None, validate=True):
    """Beta-equilibrated core EOS on a density grid (default 400 log points).

    Rows are solved with continuation seeding from the previous density.
    Returns an eos.EOSTable tagged 'core'.
    """
    from .eos import EOSTable, sound_speed

    if rho_grid is None:
        rho_grid = np.geomspace(0.04, 1.2, 400)
    rho_grid = np.asarray(rho_grid, dtype=float)
    if rho_grid.ndim != 1 or np.any(np.diff(rho_grid) <= 0.0):
        raise ValueError("rho_grid must be strictly increasing")
    if rho_grid[0] < 0.04:
        raise ValueError("core table grid must start at or above 0.04 fm^-3")

    eps = np.empty_like(rho_grid)
    prs = np.empty_like(rho_grid)
    seed = None
    for i, rb in enumerate(rho_grid):
        state = solve_fields(rb, params, "beta_equilibrium", seed=seed)
        if validate and np.max(np.abs(field_residuals(state, params))) > FIELD_TOL:
            raise NonConvergence(f"residual check failed at row {i}")
        eps[i], prs[i] = eos_point(state, params)
        mu_e = math.hypot(state.kf_e, M_ELECTRON)
        seed = np.array([state.Phi, state.W, state.R, mu_e])

    if np.any(np.diff(prs) <= 0.0) or np.any(np.diff(eps) <= 0.0):
        raise RMFError("core table is not strictly monotone")
    table = EOSTable(rho_grid, eps, prs,
                     segments=np.array(["core"] * len(rho_grid)),
                     model_name=params.model_name)
    return sound_speed(table)


def _binding_energy(rho_b, params, mode="symmetric", t=None, seed=None):
    state = solve_fields(rho_b, params, mode, t=t, seed=seed)
    eps, _ = eos_point(state, params)
    return eps / rho_b - params.M_N


def _symmetric_pressure(rho_b, params):
    state = solve_fields(rho_b, params, "symmetric")
    _, prs = eos_point(state, params)
    return prs


def _d2_richardson(f, x, h):
    """Richardson-extrapolated central second derivative."""
    def d2(step):
        return (f(x + step) - 2.0 * f(x) + f(x - step)) / step**2
    return (4.0 * d2(0.5 * h) - d2(h)) / 3.0


def _d1_richardson(f, x, h):
    def d1(step):
        return (f(x + step) - f(x - step)) / (2.0 * step)
    return (4.0 * d1(0.5 * h) - d1(h)) / 3.0


def symmetry_energy(rho_b, params, dt=0.02):
    """J(rho) = (1/2) d^2(E/A)/dt^2 at t=0, by Richardson-extrapolated FD."""
    def ea(t):
        return _binding_energy(rho_b, params, "fixed_asymmetry", t=t)
    return 0.5 * _d2_richardson(ea, 0.0, dt)


def saturation_properties(params, window=(0.10, 0.22)):
    """Locate the symmetric-matter saturation point and its characteristics.

    rho_sat is the root of the symmetric-matter pressure inside the search
    window; E_sat, K, J, L follow from finite differences of the binding
    energy per nucleon.  Raises RMFError when no saturation point exists
    in the window.
    """
    lo, hi = window
    grid = np.linspace(lo, hi, 13)
    pvals = [_symmetric_pressure(rb, params) for rb in grid]
    signs = np.sign(pvals)
    crossings = np.nonzero(np.diff(signs) != 0.0)[0]
    if len(crossings) == 0:
        raise RMFError(f"no saturation point in [{lo}, {hi}] fm^-3")
    i = crossings[0]
    rho_sat = optimize.brentq(lambda rb: _symmetric_pressure(rb, params),
                              grid[i], grid[i + 1], xtol=1e-12, rtol=1e-14)

    def ea(rb):
        return _binding_energy(rb, params, "symmetric")

    e_sat = ea(rho_sat)
    h = 0.01 * rho_sat
    k_sat = 9.0 * rho_sat**2 * _d2_richardson(ea, rho_sat, h)
    j_sat = symmetry_energy(rho_sat, params)
    l_sat = 3.0 * rho_sat * _d1_richardson(
        lambda rb: symmetry_energy(rb, params), rho_sat, h)
    return SaturationProperties(rho_sat, e_sat, k_sat, j_sat, l_sat)
