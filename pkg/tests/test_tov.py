"""Stellar-structure tests: uniform-density analytic oracle, refinement
convergence, peak location, mass bisection."""

import math

import numpy as np
import pytest

from dmans.constants import MEVFM3_TO_KM2, MSUN_KM
from dmans.eos import EOSTable
from dmans.tov import TOVError, star_at_mass, tov_integrate


def _uniform_density_table(eps0, P_top, n=400):
    """Nearly-incompressible table: eps varies by 1e-9 across the range."""
    P = np.geomspace(P_top * 1e-9, P_top, n)
    eps = eps0 * (1.0 + 1e-9 * np.linspace(0.0, 1.0, n))
    return EOSTable(P.copy(), eps, P)   # rho column = P (exact node map)


def _interior_solution(eps0_geo, C):
    """Closed-form uniform-density (interior Schwarzschild) star."""
    R = math.sqrt(3.0 * C / (8.0 * math.pi * eps0_geo) * 2.0)
    M = C * R

    def P_of_r(r):
        a = math.sqrt(1.0 - 2.0 * C * (r / R) ** 2)
        b = math.sqrt(1.0 - 2.0 * C)
        return eps0_geo * (a - b) / (3.0 * b - a)

    return R, M, P_of_r


@pytest.mark.parametrize("C", [0.05, 0.15, 0.25])
def test_uniform_density_oracle(C):
    eps0 = 500.0  # MeV/fm^3
    eps0_geo = eps0 * MEVFM3_TO_KM2
    R, M, P_of_r = _interior_solution(eps0_geo, C)
    Pc = P_of_r(0.0) / MEVFM3_TO_KM2
    table = _uniform_density_table(eps0, Pc * 1.0000001)
    star = tov_integrate(table, float(table.rho_of_P(Pc)), rtol=1e-10)
    assert star.R == pytest.approx(R, rel=1e-6)
    assert star.M * MSUN_KM == pytest.approx(M, rel=1e-6)
    for frac in (0.2, 0.5, 0.8):
        r = frac * R
        P_num = float(star.interior(r)[1])
        assert P_num == pytest.approx(P_of_r(r), rel=1e-6)
    # surface matching of the metric potential
    nu_R = float(star.interior(star.R)[2])
    assert abs(math.exp(2.0 * nu_R) / (1.0 - 2.0 * star.C) - 1.0) <= 1e-10


def test_refinement_convergence(nitr_i_table):
    a = tov_integrate(nitr_i_table, 0.55, rtol=1e-8).M
    b = tov_integrate(nitr_i_table, 0.55, rtol=5e-9).M
    assert abs(a - b) < 1e-7


def test_curve_shape_and_peak(nitr_i_curve):
    assert len(nitr_i_curve.stars) >= 50
    stable = nitr_i_curve.stable()
    masses = np.array([s.M for s in stable])
    assert np.all(np.diff(masses) > 0.0)
    for s in nitr_i_curve.stars:
        assert 0.0 < s.C < 4.0 / 9.0


def test_peak_golden_section_vs_dense_scan(nitr_i_table, nitr_i_curve):
    k = int(np.argmax([s.M for s in nitr_i_curve.stars]))
    lo = nitr_i_curve.stars[max(k - 1, 0)].rho_c
    hi = nitr_i_curve.stars[min(k + 1, len(nitr_i_curve.stars) - 1)].rho_c
    dense = np.linspace(lo, hi, 41)  # 10x the local grid resolution
    m_dense = max(tov_integrate(nitr_i_table, rc).M for rc in dense)
    assert abs(nitr_i_curve.M_max - m_dense) <= 1e-3


def test_star_at_mass(nitr_i_curve, nitr_i_table):
    peak = star_at_mass(nitr_i_curve, nitr_i_curve.M_max, eos=nitr_i_table)
    assert peak.M == pytest.approx(nitr_i_curve.M_max, abs=1e-4)
    s = star_at_mass(nitr_i_curve, 1.4, eos=nitr_i_table)
    assert abs(s.M - 1.4) <= 1e-4
    with pytest.raises(TOVError):
        star_at_mass(nitr_i_curve, nitr_i_curve.M_max + 0.2, eos=nitr_i_table)


def test_central_pressure_guard(nitr_i_table):
    with pytest.raises(TOVError):
        tov_integrate(nitr_i_table, nitr_i_table.rho[0])     # at the cutoff
    with pytest.raises(TOVError):
        tov_integrate(nitr_i_table, nitr_i_table.rho[-1] * 2.0)  # off range
