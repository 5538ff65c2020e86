"""Tidal deformability (quadrupole Love number) and Cowling f-mode
frequencies on a TOV background.

Tidal sector: the logarithmic metric-perturbation variable y(r) obeys the
standard first-order Riccati-type equation with y(0) = l = 2; k2 follows
from the closed-form quadrupole Love formula in (C, y_R).  Density
discontinuities (detected as near-vertical eps jumps at fixed pressure)
correct y by -4 pi r^3 delta_eps / m; the same correction applies at the
surface of self-bound configurations.

Oscillation sector: the two coupled Cowling fluid equations for the
radial/tangential displacement amplitudes (W, V),

    W' = (deps/dP) [w^2 r^2 e^{L-2p} V + p' W] - l(l+1) e^{L} V
    V' = 2 p' V - e^{L} W / r^2,

with e^{L} = (1 - 2m/r)^{-1/2} and p the metric potential of ds^2 =
-e^{2p} dt^2 + ..., regular center behaviour W ~ r^{l+1}, V ~ -r^l/l and
vanishing Lagrangian pressure perturbation at the surface,

    w^2 e^{L-2p} V(R) + p'(R) W(R)/R^2 = 0.

The eigenfrequency is found by scanning the boundary residual and
bisecting on w^2.  Propagation uses a midpoint exponential (Magnus)
integrator on a pressure-refined radial mesh, which is robust against the
steep density gradients of the low-density crust.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_KM_S, MEVFM3_TO_KM2, MSUN_KM

_4PI = 4.0 * math.pi


class PerturbationError(Exception):
    pass


@dataclass
class TidalResult:
    k2: float
    Lambda: float
    y_R: float


@dataclass
class FModeResult:
    f: float            # kHz
    omega: float        # rad/s
    omega_bar: float    # G M omega / c^3
    node_count: int


# ---------------------------------------------------------------------------
# tidal deformability

def love_k2(C, y):
    """Quadrupole Love number from compactness and surface log-derivative.

    Small-C guard: below C = 1e-3 the formula is replaced by its Newtonian
    limit (2 - y) / (2 (y + 3)), which it approaches continuously.
    """
    if C < 1e-3:
        return (2.0 - y) / (2.0 * (y + 3.0))
    l2C = math.log1p(-2.0 * C)
    num = (8.0 / 5.0) * C**5 * (1.0 - 2.0 * C)**2 * (2.0 + 2.0 * C * (y - 1.0) - y)
    den = (2.0 * C * (6.0 - 3.0 * y + 3.0 * C * (5.0 * y - 8.0))
           + 4.0 * C**3 * (13.0 - 11.0 * y + C * (3.0 * y - 2.0)
                           + 2.0 * C**2 * (1.0 + y))
           + 3.0 * (1.0 - 2.0 * C)**2 * (2.0 - y + 2.0 * C * (y - 1.0)) * l2C)
    return num / den


def _eps_discontinuities(table, threshold=0.01):
    """Rows where eps jumps by > threshold at nearly constant pressure.

    Smooth tables never trigger this: the criterion requires the local
    d(ln eps)/d(ln P) to be an order of magnitude above unity.
    """
    out = []
    deps = np.diff(table.eps) / (0.5 * (table.eps[1:] + table.eps[:-1]))
    dP = np.diff(table.P) / (0.5 * (table.P[1:] + table.P[:-1]))
    for i in range(len(deps)):
        if deps[i] > threshold and dP[i] < 0.1 * deps[i]:
            P_d = math.sqrt(table.P[i] * table.P[i + 1])
            out.append((P_d * MEVFM3_TO_KM2,
                        (table.eps[i + 1] - table.eps[i]) * MEVFM3_TO_KM2))
    return out


def _tidal_coeffs(star, eos, rs):
    """Vectorized y-equation coefficients: dy/dr = (-y^2 - F y + Q)/r."""
    kgeo = MEVFM3_TO_KM2
    m, P, nu = star.interior(rs)
    P = np.maximum(P, star.P_cut * kgeo)
    eps = eos.eps_of_P(P / kgeo) * kgeo
    dedp = eos.deps_dP(np.maximum(P / kgeo, eos.P[0]))
    e2l = 1.0 / (1.0 - 2.0 * m / rs)
    dnu = (m + _4PI * rs**3 * P) / (rs * (rs - 2.0 * m))
    Q = (6.0 * e2l
         - _4PI * rs**2 * e2l * (5.0 * eps + 9.0 * P + (eps + P) * dedp)
         + 4.0 * rs**2 * dnu**2)
    F = 1.0 + e2l * (2.0 * m / rs + _4PI * rs**2 * (P - eps))
    return F, Q


def tidal_deformability(star, eos, rtol=None, mesh=None,
                        surface_threshold=0.5, disc_threshold=0.01):
    """Dimensionless tidal deformability of a solved star.

    Integrates y(r) with classical RK4 on a pressure-refined mesh with
    precomputed coefficients; tabulated density discontinuities correct y
    by -4 pi r^3 delta_eps / m.  The same correction applies at the
    surface only when the surface energy density exceeds surface_threshold
    times the star's mean density, i.e. for genuinely self-bound
    configurations (incompressible stars, bare quark-like surfaces).  The
    residual energy-density floor of a DM-admixed table is treated as the
    fluid simply ending there, the usual additive single-fluid
    convention.  Returns TidalResult with
    Lambda = (2/3) k2 C^-5 exactly.  rtol is accepted for interface
    symmetry with the adaptive solvers but the fixed mesh already resolves
    every pressure scale height.
    """
    table = eos
    kgeo = MEVFM3_TO_KM2
    R = star.R
    Mgeo = star.M * MSUN_KM
    rs = mesh if mesh is not None else _mode_mesh(star)
    r0 = rs[0]

    Pc = float(star.interior(r0)[1])
    # split the integration at any tabulated density discontinuity
    discs = []
    for P_d, d_eps in _eps_discontinuities(table, threshold=disc_threshold):
        if star.P_cut * kgeo < P_d < Pc:
            r_d = _radius_at_pressure(star, P_d, r0, R)
            discs.append((r_d, d_eps))
    discs.sort()
    for r_d, _ in discs:
        rs = np.sort(np.append(rs, r_d))

    mids = 0.5 * (rs[:-1] + rs[1:])
    F_n, Q_n = _tidal_coeffs(star, table, rs)
    F_m, Q_m = _tidal_coeffs(star, table, mids)

    # center series for the initial value
    epsc = float(table.eps_of_P(Pc / kgeo)) * kgeo
    dedpc = float(table.deps_dP(max(Pc / kgeo, table.P[0])))
    q0 = 5.0 * epsc + 9.0 * Pc + (epsc + Pc) * dedpc
    y = 2.0 - (4.0 * math.pi / 7.0) * q0 * r0**2

    h = np.diff(rs)
    idisc = 0
    for i in range(len(h)):
        hi = h[i]
        r_n, r_m, r_p = rs[i], mids[i], rs[i + 1]
        k1 = (-y * y - F_n[i] * y + Q_n[i]) / r_n
        y2 = y + 0.5 * hi * k1
        k2 = (-y2 * y2 - F_m[i] * y2 + Q_m[i]) / r_m
        y3 = y + 0.5 * hi * k2
        k3 = (-y3 * y3 - F_m[i] * y3 + Q_m[i]) / r_m
        y4 = y + hi * k3
        k4 = (-y4 * y4 - F_n[i + 1] * y4 + Q_n[i + 1]) / r_p
        y = y + hi * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        while idisc < len(discs) and rs[i + 1] >= discs[idisc][0]:
            r_d, d_eps = discs[idisc]
            m_d = float(star.interior(r_d)[0])
            y = y - _4PI * r_d**3 * d_eps / m_d
            idisc += 1
    y_R = y

    # a self-bound surface acts as a density discontinuity against vacuum
    eps_s = float(table.eps_of_P(star.P_cut)) * kgeo
    eps_mean = 3.0 * Mgeo / (_4PI * R**3)
    if eps_s > surface_threshold * eps_mean:
        y_R = y_R - _4PI * R**3 * eps_s / Mgeo

    k2 = love_k2(star.C, y_R)
    Lam = (2.0 / 3.0) * k2 / star.C**5
    if not np.isfinite(Lam):
        raise PerturbationError("non-finite tidal deformability")
    return TidalResult(k2=k2, Lambda=Lam, y_R=y_R)


def _radius_at_pressure(star, P_geo, r_lo, r_hi):
    from scipy.optimize import brentq

    def f(r):
        return float(star.interior(r)[1]) - P_geo

    return brentq(f, r_lo, r_hi, xtol=1e-12)


# ---------------------------------------------------------------------------
# Cowling f-mode

def _mode_mesh(star, max_dlnP=0.04, n_base=768):
    """Radial mesh refined so that ln P changes slowly per step."""
    r0 = star.profile["r"][0]
    R = star.R
    rs = np.linspace(r0, R, n_base)
    for _ in range(40):
        P = np.maximum(star.interior(rs)[1], star.P_cut * MEVFM3_TO_KM2 * (1.0 + 1e-12))
        dln = np.abs(np.diff(np.log(P)))
        bad = np.nonzero(dln > max_dlnP)[0]
        if len(bad) == 0:
            break
        mids = 0.5 * (rs[bad] + rs[bad + 1])
        rs = np.sort(np.concatenate([rs, mids]))
    return rs


class _CowlingOperator:
    """Precomputed midpoint coefficients of the linear (W, V) system."""

    def __init__(self, star, eos, l=2):
        self.l = l
        self.star = star
        kgeo = MEVFM3_TO_KM2
        rs = _mode_mesh(star)
        rm = 0.5 * (rs[:-1] + rs[1:])
        m, P, nu = star.interior(rm)
        P = np.maximum(P, star.P_cut * kgeo)
        dedp = eos.deps_dP(np.maximum(P / kgeo, eos.P[0]))
        el = 1.0 / np.sqrt(1.0 - 2.0 * m / rm)
        dphi = (m + _4PI * rm**3 * P) / (rm * (rm - 2.0 * m))
        self.rs = rs
        self.h = np.diff(rs)
        self.a00 = dedp * dphi
        self.a01_0 = -l * (l + 1.0) * el
        self.a01_1 = dedp * rm**2 * el * np.exp(-2.0 * nu)
        self.a10 = -el / rm**2
        self.a11 = 2.0 * dphi
        # surface factors for the boundary residual:
        # e^{L-2p}(R) = (1-2C)^{-3/2} and p'(R)/R^2
        C = star.C
        Rs = star.R
        Mg = star.M * MSUN_KM
        Pcut = star.P_cut * kgeo
        self.bc_v = (1.0 - 2.0 * C) ** -1.5
        self.bc_w = (Mg + _4PI * Rs**3 * Pcut) / (Rs * (Rs - 2.0 * Mg)) / Rs**2
        self.R = Rs

    def _step_matrices(self, w2):
        """Midpoint exponential propagators of every mesh interval (n,2,2)."""
        h = self.h
        a, d = self.a00, self.a11
        b = self.a01_0 + w2 * self.a01_1
        c = self.a10
        t = 0.5 * (a + d)
        da = 0.5 * (a - d)
        disc = da * da + b * c
        x2 = disc * h * h
        s_abs = np.sqrt(np.abs(disc))
        sh_arg = s_abs * h
        with np.errstate(invalid="ignore", divide="ignore"):
            ch = np.where(x2 > 0.0, np.cosh(sh_arg), np.cos(sh_arg))
            sh = np.where(x2 > 0.0, np.sinh(sh_arg), np.sin(sh_arg)) / s_abs
        series = np.abs(x2) < 1e-8
        if np.any(series):
            ch = np.where(series, 1.0 + 0.5 * x2, ch)
            sh = np.where(series, h * (1.0 + x2 / 6.0), sh)
        et = np.exp(t * h)
        M = np.empty((len(h), 2, 2))
        M[:, 0, 0] = et * (ch + da * sh)
        M[:, 0, 1] = et * (b * sh)
        M[:, 1, 0] = et * (c * sh)
        M[:, 1, 1] = et * (ch - da * sh)
        return M

    def residual(self, omega_geo, count_nodes=False):
        """Boundary residual of the surface Lagrangian pressure perturbation.

        Returns (raw, scale[, nodes]): raw is the residual, scale the
        magnitude of its two terms (raw/scale is bounded by 1); zeros of
        raw in omega are the mode frequencies.
        """
        w2 = omega_geo**2
        l = self.l
        r0 = self.rs[0]
        z = np.array([r0 ** (l + 1), -(r0 ** l) / l])
        M = self._step_matrices(w2)
        if count_nodes:
            nodes = 0
            prev_sign = 1.0
            for i in range(len(M)):
                z = M[i] @ z
                if z[0] != 0.0:
                    sign = 1.0 if z[0] > 0 else -1.0
                    if sign != prev_sign:
                        nodes += 1
                    prev_sign = sign
            W, V = z
        else:
            # pairwise product reduction of the ordered matrix chain
            while len(M) > 1:
                if len(M) % 2 == 1:
                    tail, body = M[-1:], M[:-1]
                    M = np.concatenate([np.matmul(body[1::2], body[0::2]), tail])
                else:
                    M = np.matmul(M[1::2], M[0::2])
            W, V = M[0] @ z
        t1 = w2 * self.bc_v * V
        t2 = self.bc_w * W
        scale = abs(t1) + abs(t2)
        if count_nodes:
            return t1 + t2, scale, nodes
        return t1 + t2, scale


def fmode_frequency(star, eos, l=2, window=(0.5, 4.5), scan_step=0.05,
                    f_guess=None):
    """Lowest zero-node Cowling oscillation mode of a solved star.

    Scans the boundary residual over the frequency window (kHz), brackets
    the lowest sign change, then bisects on omega^2 to 1e-10 relative.
    A warm-start guess narrows the scan; the full window is the fallback.
    """
    op = _CowlingOperator(star, eos, l=l)
    # omega in geometric km^-1 per kHz of frequency
    w_per_khz = 2.0 * math.pi * 1000.0 / C_KM_S

    def chi_of_f(f_khz):
        return op.residual(f_khz * w_per_khz)[0]

    step = scan_step
    for attempt in range(3):
        bracket, scan_max = _scan_bracket(chi_of_f, window, step, f_guess)
        if bracket is None:
            raise PerturbationError(
                f"no boundary-residual sign change in {window} kHz")
        f_lo, f_hi = bracket
        w2_lo = (f_lo * w_per_khz) ** 2
        w2_hi = (f_hi * w_per_khz) ** 2
        chi_lo = op.residual(math.sqrt(w2_lo))[0]
        chi_hi = op.residual(math.sqrt(w2_hi))[0]
        # bisection on the residual sign to 1e-10 relative in omega^2
        while (w2_hi - w2_lo) > 1e-10 * w2_hi:
            w2_mid = 0.5 * (w2_lo + w2_hi)
            chi_mid = op.residual(math.sqrt(w2_mid))[0]
            if (chi_mid > 0) == (chi_lo > 0):
                w2_lo, chi_lo = w2_mid, chi_mid
            else:
                w2_hi, chi_hi = w2_mid, chi_mid
        # regula-falsi polish: the raw residual is locally linear in omega^2
        for _ in range(12):
            denom = chi_hi - chi_lo
            if denom == 0.0:
                break
            w2_new = w2_lo - chi_lo * (w2_hi - w2_lo) / denom
            w2_new = min(max(w2_new, w2_lo), w2_hi)
            chi_new = op.residual(math.sqrt(w2_new))[0]
            if chi_new == 0.0:
                w2_lo = w2_hi = w2_new
                break
            if (chi_new > 0) == (chi_lo > 0):
                w2_lo, chi_lo = w2_new, chi_new
            else:
                w2_hi, chi_hi = w2_new, chi_new
        wgeo = math.sqrt(0.5 * (w2_lo + w2_hi))
        chi, _, nodes = op.residual(wgeo, count_nodes=True)
        if nodes == 0:
            if abs(chi) > 1e-8 * scan_max:
                raise PerturbationError("boundary residual did not converge")
            omega = wgeo * C_KM_S                 # rad/s
            f_khz = omega / (2.0 * math.pi * 1000.0)
            omega_bar = star.M * MSUN_KM * wgeo
            return FModeResult(f=f_khz, omega=omega, omega_bar=omega_bar,
                               node_count=nodes)
        # nodal root: a lower mode was missed, refine the scan
        step *= 0.5
        f_guess = None
    raise PerturbationError("could not isolate a zero-node mode")


def _scan_bracket(chi_of_f, window, step, f_guess):
    """First sign-change bracket of chi(f); also the scan max |chi|."""
    if f_guess is not None:
        lo = max(window[0], f_guess - 0.3)
        hi = min(window[1], f_guess + 0.3)
        res = _scan_range(chi_of_f, lo, hi, step)
        if res[0] is not None:
            return res
    return _scan_range(chi_of_f, window[0], window[1], step)


def _scan_range(chi_of_f, lo, hi, step):
    n = max(int(round((hi - lo) / step)) + 1, 2)
    fs = np.linspace(lo, hi, n)
    chi_prev = chi_of_f(fs[0])
    scan_max = abs(chi_prev)
    bracket = None
    for f in fs[1:]:
        chi = chi_of_f(f)
        scan_max = max(scan_max, abs(chi))
        if bracket is None and (chi > 0) != (chi_prev > 0):
            bracket = (f - (fs[1] - fs[0]), f)
        chi_prev = chi
    return bracket, scan_max
