"""Dark-matter Fermi-gas sector: Higgs-portal neutralino gas at fixed Fermi
momentum.

The DM candidate is a relativistic Fermi gas of mass M_chi whose effective
mass is reduced by the mean Higgs field it sources itself:

    M_chi* = M_chi - y*h0,      h0 = (y / M_h^2) * n_s(kf, M_chi*),

with n_s the scalar density.  Momenta and masses are kept in GeV; energy
density and pressure convert to MeV/fm^3 at the interface.  The nucleon-Higgs
Yukawa term is carried in the parameter set (f, v) but is not fed back into
the nucleon sector: the admixture is additive.
"""

from dataclasses import dataclass

from .constants import GEV4_TO_MEVFM3
from .fermi import energy_density, pressure, scalar_density

HIGGS_TOL = 1.0e-12


class DMError(Exception):
    pass


@dataclass
class DMParameterSet:
    """Higgs-portal DM couplings; masses in GeV."""

    M_chi: float = 200.0   # neutralino mass
    M_h: float = 125.0     # Higgs mass
    y: float = 0.07        # DM-Higgs coupling
    f: float = 0.35        # proton-Higgs form factor
    v: float = 246.0       # Higgs vacuum expectation value

    def __post_init__(self):
        if self.M_chi <= 0.0 or self.M_h <= 0.0 or self.v <= 0.0:
            raise ValueError("M_chi, M_h and v must be positive")
        if not (0.0 <= self.y < 1.0 and 0.0 <= self.f < 1.0):
            raise ValueError("couplings y, f must lie in [0, 1)")

    @classmethod
    def from_file(cls, path):
        from .rmf import _read_keyvalue
        kv = _read_keyvalue(path)
        return cls(M_chi=float(kv["M_chi_GeV"]), M_h=float(kv["M_h_GeV"]),
                   y=float(kv["y"]), f=float(kv["f"]), v=float(kv["v_GeV"]))


@dataclass
class DMState:
    """Solved DM gas at one Fermi momentum (GeV fields, MeV/fm^3 EOS)."""

    kf_dm: float        # GeV
    h0: float           # GeV
    M_chi_star: float   # GeV
    eps_dm: float       # MeV/fm^3
    P_dm: float         # MeV/fm^3


def solve_higgs(kf_dm, params, max_iter=200):
    """Fixed point of the Higgs mean field sourced by the DM scalar density.

    Converges to relative residual <= 1e-12; for the weak couplings of
    interest the iteration contracts in a couple of steps.
    """
    if kf_dm < 0.0:
        raise ValueError("kf_dm must be >= 0")
    p = params
    if kf_dm == 0.0 or p.y == 0.0:
        eps, prs = _eos_from_fields(kf_dm, 0.0, p)
        return DMState(kf_dm, 0.0, p.M_chi, eps, prs)

    h0 = 0.0
    for _ in range(max_iter):
        mstar = p.M_chi - p.y * h0
        if mstar <= 0.0:
            raise DMError("DM effective mass collapsed")
        h0_new = p.y * scalar_density(kf_dm, mstar) / p.M_h**2
        if abs(h0_new - h0) <= HIGGS_TOL * max(abs(h0_new), 1e-300):
            h0 = h0_new
            break
        h0 = h0_new
    else:
        raise DMError("Higgs fixed point did not converge")
    eps, prs = _eos_from_fields(kf_dm, h0, p)
    return DMState(kf_dm, h0, p.M_chi - p.y * h0, eps, prs)


def _eos_from_fields(kf_dm, h0, params):
    mstar = params.M_chi - params.y * h0
    higgs = 0.5 * params.M_h**2 * h0**2
    eps = (energy_density(kf_dm, mstar) + higgs) * GEV4_TO_MEVFM3
    prs = (pressure(kf_dm, mstar) - higgs) * GEV4_TO_MEVFM3
    return eps, prs


def dm_eos_point(kf_dm, params):
    """(eps_DM, P_DM) in MeV/fm^3 at DM Fermi momentum kf_dm [GeV]."""
    state = solve_higgs(kf_dm, params)
    return state.eps_dm, state.P_dm
