"""Tidal and f-mode tests: incompressible Love limit, discontinuity
detection, eigenmode bracketing consistency."""

import math

import numpy as np
import pytest

from dmans.constants import C_KM_S, MEVFM3_TO_KM2, MSUN_KM
from dmans.eos import EOSTable
from dmans.perturbations import (_CowlingOperator, _eps_discontinuities,
                                 fmode_frequency, love_k2,
                                 tidal_deformability)
from dmans.tov import tov_integrate

from test_tov import _interior_solution, _uniform_density_table


def test_love_number_algebraic_identity():
    # Lambda = (2/3) k2 C^-5 at (k2, C) = (0.09, 0.16)
    lam = (2.0 / 3.0) * 0.09 * 0.16 ** -5
    assert lam == pytest.approx(572.2045898, rel=1e-9)


def _incompressible_star(C, eps0=500.0):
    eps0_geo = eps0 * MEVFM3_TO_KM2
    R, M, P_of_r = _interior_solution(eps0_geo, C)
    Pc = P_of_r(0.0) / MEVFM3_TO_KM2
    table = _uniform_density_table(eps0, Pc * 1.0000001)
    star = tov_integrate(table, float(table.rho_of_P(Pc)), rtol=1e-10)
    return star, table


def test_incompressible_love_limit():
    # Newtonian limit attained within 1% at C = 1e-3
    star, table = _incompressible_star(1e-3)
    td = tidal_deformability(star, table)
    assert td.k2 == pytest.approx(0.75, rel=1e-2)
    # exact relativistic value at C = 0.005 (independent analytic
    # integration of y on the closed-form background gives 0.72878)
    star5, table5 = _incompressible_star(0.005)
    td5 = tidal_deformability(star5, table5)
    assert td5.k2 == pytest.approx(0.72878, rel=1e-3)
    assert td5.Lambda == pytest.approx((2.0 / 3.0) * td5.k2 / star5.C**5,
                                       rel=1e-14)


def test_small_c_guard_continuity():
    for y in (-1.0, 0.3, 1.5):
        below = love_k2(0.99e-3, y)
        above = love_k2(1.01e-3, y)
        assert below == pytest.approx(above, rel=2e-2)
    # Newtonian incompressible value at the guard
    assert love_k2(5e-4, -1.0) == pytest.approx(0.75, rel=1e-12)


def test_discontinuity_detector():
    # smooth table: nothing detected
    rho = np.geomspace(0.01, 1.0, 200)
    eps = 939.0 * rho + 100.0 * rho**2
    P = 100.0 * rho**2
    smooth = EOSTable(rho, eps, P)
    assert _eps_discontinuities(smooth) == []
    # a 10% eps jump at nearly constant pressure: insert a row pair
    k = 100
    rho2 = np.insert(rho, k, rho[k] * (1.0 - 1e-9))
    eps2 = np.insert(1.10 * eps, k, eps[k])[: len(rho2)]
    eps2[:k] = eps[:k]
    P2 = np.insert(P, k, P[k] * (1.0 - 1e-9))
    jumpy = EOSTable(rho2, eps2, P2)
    discs = _eps_discontinuities(jumpy)
    assert len(discs) == 1
    P_d, d_eps = discs[0]
    assert d_eps == pytest.approx(0.10 * eps[k] * MEVFM3_TO_KM2, rel=1e-6)
    assert P_d == pytest.approx(P[k] * MEVFM3_TO_KM2, rel=1e-6)


def test_fmode_anchor_and_nodes(nitr_i_star14, nitr_i_table):
    fm = fmode_frequency(nitr_i_star14, nitr_i_table)
    assert fm.node_count == 0
    assert fm.omega == pytest.approx(2.0 * math.pi * fm.f * 1000.0, rel=1e-12)
    omega_geo = fm.omega / (C_KM_S * 1000.0) * 1000.0
    assert fm.omega_bar == pytest.approx(
        nitr_i_star14.M * MSUN_KM * omega_geo, rel=1e-12)


def test_fmode_bisection_vs_fine_scan(nitr_i_star14, nitr_i_table):
    """1 Hz scan and the bisection locate the same root within 2 Hz."""
    fm = fmode_frequency(nitr_i_star14, nitr_i_table)
    op = _CowlingOperator(nitr_i_star14, nitr_i_table)
    w_per_khz = 2.0 * math.pi * 1000.0 / C_KM_S
    fs = np.arange(fm.f - 0.005, fm.f + 0.005, 0.001)  # 1 Hz steps
    prev = op.residual(fs[0] * w_per_khz)[0]
    crossing = None
    for f in fs[1:]:
        cur = op.residual(f * w_per_khz)[0]
        if (cur > 0) != (prev > 0):
            crossing = f - 0.0005
            break
        prev = cur
    assert crossing is not None
    assert abs(crossing - fm.f) <= 0.002


def test_fmode_converged_residual_small(nitr_i_star14, nitr_i_table):
    fm = fmode_frequency(nitr_i_star14, nitr_i_table)
    op = _CowlingOperator(nitr_i_star14, nitr_i_table)
    w_per_khz = 2.0 * math.pi * 1000.0 / C_KM_S
    scan = [abs(op.residual(f * w_per_khz)[0])
            for f in np.arange(0.5, 4.51, 0.05)]
    chi = abs(op.residual(fm.f * w_per_khz)[0])
    assert chi <= 1e-8 * max(scan)


def test_mesh_convergence(nitr_i_star14, nitr_i_table):
    """Halving the mesh spacing leaves the frequency stable to ~Hz."""
    from dmans import perturbations as pert
    fm = fmode_frequency(nitr_i_star14, nitr_i_table)
    orig = pert._mode_mesh

    def finer(star, max_dlnP=0.04, n_base=768):
        return orig(star, max_dlnP=max_dlnP / 2.0, n_base=2 * n_base)

    pert._mode_mesh = finer
    try:
        fm2 = fmode_frequency(nitr_i_star14, nitr_i_table)
    finally:
        pert._mode_mesh = orig
    assert abs(fm2.f - fm.f) < 0.005


def test_tidal_lambda_definition(nitr_i_star14, nitr_i_table):
    td = tidal_deformability(nitr_i_star14, nitr_i_table)
    assert td.Lambda == pytest.approx(
        (2.0 / 3.0) * td.k2 / nitr_i_star14.C**5, rel=1e-14)
    assert 0.0 < td.k2 < 1.0
