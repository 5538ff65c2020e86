"""Empirical and universal relations: least-squares fits, relative
deviations, GW170817 propagation to canonical compactness / f-mode
frequency, and the frequency contour over the mass-radius plane.

Fit kinds and their abscissa transforms:

    C_of_logLambda        C       = sum a_n (log10 Lambda)^n,  quartic
    omegabar_of_logLambda omegaـb = sum b_n (log10 Lambda)^n,  quartic
    C_of_omegabar         C       = sum c_n omega_b^n,          quartic
    f_of_sqrtdensity      f [kHz] = a + b sqrt(Mbar/Rbar^3)

with Mbar = M / 1.4 Msun and Rbar = R / 10 km, and omega_b = G M omega / c^3.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .constants import MSUN_KM, MSUN_S

KIND_ORDER = {
    "C_of_logLambda": 5,
    "omegabar_of_logLambda": 5,
    "C_of_omegabar": 5,
    "f_of_sqrtdensity": 2,
}

# GW170817 canonical tidal deformability: central, lower, upper
GW170817_LAMBDA = (190.0, 70.0, 580.0)


class RelationError(Exception):
    pass


@dataclass
class PolyFit:
    kind: str
    coeffs: np.ndarray
    chi2_reduced: float
    n_points: int
    dm_kf: float = 0.0
    t_min: float = None    # fitted support on the transformed abscissa
    t_max: float = None


@dataclass
class CanonicalEstimate:
    quantity: str          # 'C_1p4' or 'f_1p4_kHz'
    central: float
    lower: float
    upper: float


def _transform(kind, x):
    x = np.asarray(x, dtype=float)
    if kind in ("C_of_logLambda", "omegabar_of_logLambda"):
        return np.log10(x)
    if kind == "C_of_omegabar":
        return x
    if kind == "f_of_sqrtdensity":
        return np.sqrt(x)
    raise RelationError(f"unknown fit kind {kind!r}")


def avg_density_ratio(M, R):
    """Mbar/Rbar^3 with Mbar = M/1.4 Msun, Rbar = R/10 km."""
    M = np.asarray(M, dtype=float)
    R = np.asarray(R, dtype=float)
    return (M / 1.4) / (R / 10.0) ** 3


def fit_relation(kind, samples, dm_kf=0.0):
    """Ordinary least squares of y on the kind's transformed abscissa.

    samples: sequence of (x_raw, y_raw) pairs; x_raw is Lambda for the
    log-Lambda kinds, omega_bar for C_of_omegabar, and Mbar/Rbar^3 for
    f_of_sqrtdensity.
    """
    order = KIND_ORDER[kind]
    xy = np.asarray(samples, dtype=float)
    if xy.ndim != 2 or xy.shape[0] <= order:
        raise RelationError("need more samples than coefficients")
    t = _transform(kind, xy[:, 0])
    y = xy[:, 1]
    A = np.vander(t, order, increasing=True)
    coeffs, res, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < order:
        raise RelationError("rank-deficient normal equations")
    rss = float(np.sum((y - A @ coeffs) ** 2))
    return PolyFit(kind=kind, coeffs=coeffs,
                   chi2_reduced=rss / (len(y) - order),
                   n_points=len(y), dm_kf=dm_kf,
                   t_min=float(t.min()), t_max=float(t.max()))


def eval_relation(fit, x):
    """Evaluate the fitted polynomial at raw abscissa x.

    Queries outside the fitted support are flagged with a warning but
    still evaluated.
    """
    t = _transform(fit.kind, x)
    if fit.t_min is not None and np.any((t < fit.t_min) | (t > fit.t_max)):
        warnings.warn(f"{fit.kind} evaluated outside the fitted support")
    return np.polynomial.polynomial.polyval(t, fit.coeffs)


def relative_deviation(fit, samples):
    """|y - fit| / fit for every sample."""
    xy = np.asarray(samples, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yfit = eval_relation(fit, xy[:, 0])
    if np.any(yfit == 0.0):
        bad = int(np.nonzero(yfit == 0.0)[0][0])
        raise RelationError(f"fit value is zero at sample {bad}")
    return np.abs(xy[:, 1] - yfit) / np.abs(yfit)


def omega_bar_to_f_khz(omega_bar, M):
    """f [kHz] of a normalized frequency omega_bar at stellar mass M [Msun]."""
    return omega_bar / (2.0 * math.pi * MSUN_S * M) / 1000.0


def propagate_gw170817(fit, lambda_interval=GW170817_LAMBDA, M_ref=1.4):
    """Canonical estimate from the GW170817 Lambda_1.4 interval.

    Evaluates the fit at the interval's central/lower/upper Lambda and,
    for the omega_bar kind, converts to a frequency at M_ref.
    """
    if fit.kind not in ("C_of_logLambda", "omegabar_of_logLambda"):
        raise RelationError("propagation needs a Lambda-based fit")
    central, lo, hi = lambda_interval
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        vals = [float(eval_relation(fit, x)) for x in (central, lo, hi)]
    if fit.kind == "omegabar_of_logLambda":
        vals = [omega_bar_to_f_khz(v, M_ref) for v in vals]
        quantity = "f_1p4_kHz"
    else:
        quantity = "C_1p4"
    c, vlo, vhi = vals
    return CanonicalEstimate(quantity=quantity, central=c,
                             lower=min(vlo, vhi), upper=max(vlo, vhi))


def invert_c_of_omegabar(fit, C):
    """omega_bar with fit(omega_bar) = C on the fitted monotone branch.

    Returns NaN when C is outside the invertible range.
    """
    if fit.kind != "C_of_omegabar":
        raise RelationError("inversion needs a C_of_omegabar fit")
    lo, hi = fit.t_min, fit.t_max

    def g(t):
        return float(np.polynomial.polynomial.polyval(t, fit.coeffs)) - C

    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0) == (ghi > 0):
        return float("nan")
    return brentq(g, lo, hi, xtol=1e-14, rtol=1e-15)


def fmode_contour(fit_c_omegabar, M_grid, R_grid):
    """f-mode frequency [kHz] over the (M, R) plane via the C-omega_bar fit.

    Cells whose compactness falls outside the fit's invertible branch are
    NaN.  Returns an array of shape (len(M_grid), len(R_grid)).
    """
    M_grid = np.asarray(M_grid, dtype=float)
    R_grid = np.asarray(R_grid, dtype=float)
    if np.any(M_grid <= 0.0) or np.any(R_grid <= 0.0):
        raise RelationError("grids must be positive")
    out = np.full((len(M_grid), len(R_grid)), np.nan)
    for i, M in enumerate(M_grid):
        for j, R in enumerate(R_grid):
            C = MSUN_KM * M / R
            ob = invert_c_of_omegabar(fit_c_omegabar, C)
            if not math.isnan(ob):
                out[i, j] = omega_bar_to_f_khz(ob, M)
    return out
