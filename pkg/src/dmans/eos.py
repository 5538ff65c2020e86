"""Equation-of-state tables: crust+core assembly, DM admixture, sound speed,
and monotone log-log interpolation for the stellar-structure solvers.
"""

import io
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

CSV_HEADER = "rho_b_fm3,energy_density_MeV_fm3,pressure_MeV_fm3,cs2,segment"


class EOSError(Exception):
    pass


class MonotonicityError(EOSError):
    pass


class CausalityError(EOSError):
    def __init__(self, row, cs2):
        self.row = row
        self.cs2 = cs2
        super().__init__(f"cs^2 = {cs2:.6f} >= 1 in core segment at row {row}")


@dataclass
class EOSTable:
    """Monotone (rho_b, eps, P) samples with per-row crust/core tags.

    rho in fm^-3, eps and P in MeV/fm^3, cs2 dimensionless (NaN when not yet
    computed).  Tables are treated as immutable; operations return new ones.
    """

    rho: np.ndarray
    eps: np.ndarray
    P: np.ndarray
    cs2: np.ndarray = None
    segments: np.ndarray = None
    dm_kf: float = 0.0
    model_name: str = ""

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.eps = np.asarray(self.eps, dtype=float)
        self.P = np.asarray(self.P, dtype=float)
        if self.cs2 is None:
            self.cs2 = np.full_like(self.rho, np.nan)
        else:
            self.cs2 = np.asarray(self.cs2, dtype=float)
        if self.segments is None:
            self.segments = np.array(["core"] * len(self.rho))
        else:
            self.segments = np.asarray(self.segments)
        self.validate()
        self._eps_of_logP = None
        self._rho_of_logP = None
        self._P_of_logrho = None

    def __len__(self):
        return len(self.rho)

    def validate(self):
        for name, arr in (("rho", self.rho), ("eps", self.eps), ("P", self.P)):
            if np.any(np.diff(arr) <= 0.0):
                bad = int(np.nonzero(np.diff(arr) <= 0.0)[0][0])
                raise MonotonicityError(f"{name} not strictly increasing at row {bad}")
        if np.any(self.P <= 0.0) or np.any(self.eps <= 0.0):
            raise EOSError("eps and P must be positive")

    # -- interpolation -----------------------------------------------------

    def _build(self):
        logP = np.log(self.P)
        self._eps_of_logP = PchipInterpolator(logP, np.log(self.eps))
        self._rho_of_logP = PchipInterpolator(logP, np.log(self.rho))
        self._P_of_logrho = PchipInterpolator(np.log(self.rho), logP)

    def eps_of_P(self, P):
        if self._eps_of_logP is None:
            self._build()
        return np.exp(self._eps_of_logP(np.log(P)))

    def rho_of_P(self, P):
        if self._rho_of_logP is None:
            self._build()
        return np.exp(self._rho_of_logP(np.log(P)))

    def P_of_rho(self, rho):
        if self._P_of_logrho is None:
            self._build()
        return np.exp(self._P_of_logrho(np.log(rho)))

    def deps_dP(self, P):
        """d eps / d P from the monotone interpolant (1/cs^2 along the table)."""
        if self._eps_of_logP is None:
            self._build()
        logP = np.log(P)
        dlog = self._eps_of_logP.derivative()(logP)
        return dlog * np.exp(self._eps_of_logP(logP)) / P

    # -- serialization -----------------------------------------------------

    def to_csv(self, path, stamp=None):
        with open(path, "w") as fh:
            fh.write(self.to_csv_text(stamp))

    def to_csv_text(self, stamp=None):
        buf = io.StringIO()
        if stamp:
            buf.write(f"# {stamp}\n")
        buf.write(CSV_HEADER + "\n")
        for i in range(len(self)):
            cs = "" if np.isnan(self.cs2[i]) else f"{self.cs2[i]:.10e}"
            buf.write(f"{self.rho[i]:.10e},{self.eps[i]:.10e},"
                      f"{self.P[i]:.10e},{cs},{self.segments[i]}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, path, model_name="", dm_kf=0.0):
        rho, eps, prs, cs2, seg = [], [], [], [], []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or line.startswith("rho_b_fm3"):
                    continue
                parts = line.split(",")
                rho.append(float(parts[0]))
                eps.append(float(parts[1]))
                prs.append(float(parts[2]))
                cs2.append(float(parts[3]) if parts[3] else np.nan)
                seg.append(parts[4] if len(parts) > 4 and parts[4] else "core")
        return cls(np.array(rho), np.array(eps), np.array(prs),
                   np.array(cs2), np.array(seg), dm_kf=dm_kf,
                   model_name=model_name)


def sound_speed(table, check_causality=False):
    """Fill cs2 = dP/deps by centered differences (one-sided at the ends).

    With check_causality=True a core row with cs2 >= 1 raises CausalityError
    carrying the row index.
    """
    eps, P = table.eps, table.P
    cs2 = np.empty_like(P)
    cs2[1:-1] = (P[2:] - P[:-2]) / (eps[2:] - eps[:-2])
    cs2[0] = (P[1] - P[0]) / (eps[1] - eps[0])
    cs2[-1] = (P[-1] - P[-2]) / (eps[-1] - eps[-2])
    out = EOSTable(table.rho, eps, P, cs2, table.segments,
                   table.dm_kf, table.model_name)
    if check_causality:
        core = np.nonzero(out.segments == "core")[0]
        bad = core[out.cs2[core] >= 1.0]
        if len(bad):
            raise CausalityError(int(bad[0]), float(out.cs2[bad[0]]))
    return out


def attach_crust(core, crust, window=(0.01, 0.08)):
    """Join a crust table below a core table at the lowest density in the
    window where the core pressure exceeds the crust pressure.

    Crust rows survive below the junction, core rows at and above it.
    """
    lo = max(window[0], core.rho[0], crust.rho[0])
    hi = min(window[1], core.rho[-1], crust.rho[-1])
    if lo >= hi:
        raise EOSError("junction window not covered by both tables")

    def gap(rho):
        return core.P_of_rho(rho) - crust.P_of_rho(rho)

    if gap(lo) >= 0.0:
        rho_j = lo
    else:
        grid = np.linspace(lo, hi, 256)
        vals = np.array([gap(r) for r in grid])
        idx = np.nonzero((vals[:-1] < 0.0) & (vals[1:] >= 0.0))[0]
        if len(idx) == 0:
            raise EOSError("no crust-core pressure crossing in window")
        from scipy.optimize import brentq
        rho_j = brentq(gap, grid[idx[0]], grid[idx[0] + 1], xtol=1e-12)

    kc = np.searchsorted(crust.rho, rho_j)
    kk = np.searchsorted(core.rho, rho_j)
    # trim trailing crust rows that overlap the first core row in eps or P
    # (patched crusts need not agree with the core's eps(rho) at the percent
    # level; the junction is defined by the pressure crossing)
    while kc > 0 and (crust.eps[kc - 1] >= core.eps[kk]
                      or crust.P[kc - 1] >= core.P[kk]):
        kc -= 1
    rho = np.concatenate([crust.rho[:kc], core.rho[kk:]])
    eps = np.concatenate([crust.eps[:kc], core.eps[kk:]])
    prs = np.concatenate([crust.P[:kc], core.P[kk:]])
    seg = np.concatenate([np.array(["crust"] * kc),
                          np.array(["core"] * (len(core) - kk))])
    try:
        table = EOSTable(rho, eps, prs, None, seg,
                         core.dm_kf, core.model_name)
    except MonotonicityError as exc:
        raise MonotonicityError(f"crust-core join not monotone: {exc}") from exc
    out = sound_speed(table)
    out.junction_rho = rho_j
    return out


def admix_dm(base, dm):
    """Add the constant DM (eps, P) offset of a solved DMState to every row.

    Rows whose admixed values would break strict monotonicity are dropped
    with a warning.  A kf_dm = 0 state returns an identical table.
    """
    if dm.kf_dm == 0.0:
        return EOSTable(base.rho, base.eps, base.P, base.cs2,
                        base.segments, 0.0, base.model_name)
    eps = base.eps + dm.eps_dm
    prs = base.P + dm.P_dm
    keep = np.ones(len(base), dtype=bool)
    for i in range(1, len(base)):
        prev = np.nonzero(keep[:i])[0]
        j = prev[-1]
        if eps[i] <= eps[j] or prs[i] <= prs[j]:
            keep[i] = False
    if not keep.all():
        warnings.warn(f"admix_dm dropped {int((~keep).sum())} non-monotone rows")
    table = EOSTable(base.rho[keep], eps[keep], prs[keep], None,
                     base.segments[keep], dm.kf_dm, base.model_name)
    return sound_speed(table)


def interpolate(table, P_query):
    """Monotone log-log interpolation: returns (epsilon, rho_b) at P_query.

    P_query must lie inside the tabulated pressure range.
    """
    P_query = np.asarray(P_query, dtype=float)
    if np.any(P_query < table.P[0]) or np.any(P_query > table.P[-1]):
        raise EOSError("pressure query outside table range")
    return table.eps_of_P(P_query), table.rho_of_P(P_query)


def load_crust(path=None):
    """Bundled (or explicit) crust table."""
    if path is None:
        import os
        from pathlib import Path
        base = os.environ.get("DMANS_DATA_DIR")
        root = Path(base) if base else Path(__file__).parent / "data"
        path = root / "crust.csv"
    return EOSTable.from_csv(str(path), model_name="crust")
