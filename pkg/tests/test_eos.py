"""EOS table assembly: crust joining, DM admixture, sound speed,
interpolation."""

import warnings

import numpy as np
import pytest
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from dmans.dm import solve_higgs
from dmans.eos import (CausalityError, EOSError, EOSTable, MonotonicityError,
                       admix_dm, attach_crust, interpolate, sound_speed)


def _polytrope_table(rho):
    rho = np.asarray(rho)
    eps = 939.0 * rho + 80.0 * rho**2
    P = 80.0 * rho**2
    return eps, P


def test_attach_identical_tables_is_identity():
    rho = np.geomspace(1e-4, 0.2, 300)
    eps, P = _polytrope_table(rho)
    crust_sel = rho <= 0.12
    core_sel = rho >= 0.04
    crust = EOSTable(rho[crust_sel], eps[crust_sel], P[crust_sel],
                     segments=np.array(["crust"] * crust_sel.sum()))
    core = EOSTable(rho[core_sel], eps[core_sel], P[core_sel])
    uni = attach_crust(core, crust)
    # junction at the window's lower edge (clipped by core coverage)
    k = (uni.segments == "crust").sum()
    assert uni.rho[k] == pytest.approx(core.rho[0])
    assert np.allclose(np.concatenate([uni.rho]), np.unique(uni.rho))
    joined = np.concatenate([crust.rho[crust.rho < uni.rho[k]],
                             core.rho])
    assert np.allclose(uni.rho, joined)
    assert np.all(np.diff(uni.P) > 0)


def test_junction_bisection_vs_dense_scan(nitr_i_core, crust):
    uni = attach_crust(nitr_i_core, crust)
    rho_j = uni.junction_rho
    # dense-grid scan oracle for the lowest pressure crossing
    grid = np.linspace(max(0.01, nitr_i_core.rho[0]), 0.08, 20001)
    gap = nitr_i_core.P_of_rho(grid) - crust.P_of_rho(grid)
    if gap[0] >= 0.0:
        oracle = grid[0]
    else:
        oracle = grid[np.nonzero(gap >= 0.0)[0][0]]
    cell = grid[1] - grid[0]
    assert abs(rho_j - oracle) <= cell


def test_admix_zero_identity(nitr_i_table, dm_defaults):
    out = admix_dm(nitr_i_table, solve_higgs(0.0, dm_defaults))
    assert np.array_equal(out.rho, nitr_i_table.rho)
    assert np.array_equal(out.eps, nitr_i_table.eps)
    assert np.array_equal(out.P, nitr_i_table.P)
    assert out.dm_kf == 0.0


def test_admix_offsets_every_row(nitr_i_table, dm_defaults):
    dm = solve_higgs(0.03, dm_defaults)
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # no rows should be dropped
        out = admix_dm(nitr_i_table, dm)
    assert len(out) == len(nitr_i_table)
    assert np.allclose(out.eps - nitr_i_table.eps, dm.eps_dm)
    assert np.allclose(out.P - nitr_i_table.P, dm.P_dm)


def test_downstream_softening(nitr_i_core, crust, dm_defaults):
    from dmans.tov import mr_curve
    base = attach_crust(nitr_i_core, crust)
    admixed = attach_crust(admix_dm(nitr_i_core, solve_higgs(0.03, dm_defaults)),
                           crust)
    grid = np.geomspace(0.25, 1.1, 50)
    m0 = mr_curve(base, grid).M_max
    m3 = mr_curve(admixed, grid).M_max
    assert m3 < m0


def test_sound_speed_linear_table():
    eps = np.linspace(10.0, 100.0, 40)
    P = 0.3 * eps - 2.0
    table = EOSTable(np.linspace(0.01, 0.5, 40), eps, P)
    out = sound_speed(table)
    assert np.allclose(out.cs2, 0.3, rtol=1e-12)


def test_sound_speed_peak_location(nitr_i_table):
    core = nitr_i_table.segments == "core"
    rho = nitr_i_table.rho[core]
    cs2 = nitr_i_table.cs2[core]
    k = int(np.argmax(cs2))
    assert 0.6 <= rho[k] <= 1.05          # peak near 0.8 fm^-3
    assert cs2[-1] < cs2[k]               # slight decrease beyond the peak
    assert np.all(cs2 < 1.0)


def test_sound_speed_spline_oracle(nitr_i_table):
    core = nitr_i_table.segments == "core"
    eps = nitr_i_table.eps[core]
    P = nitr_i_table.P[core]
    spline = CubicSpline(eps, P).derivative()(eps[1:-1])
    assert np.max(np.abs(spline - nitr_i_table.cs2[core][1:-1])) <= 5e-3


def test_causality_error_reports_row():
    eps = np.linspace(10.0, 100.0, 20)
    P = 1.2 * eps - 5.0  # superluminal slope
    table = EOSTable(np.linspace(0.01, 0.5, 20), eps, P)
    with pytest.raises(CausalityError) as err:
        sound_speed(table, check_causality=True)
    assert err.value.row == 0


def test_interpolation_nodes_and_roundtrip(nitr_i_table):
    t = nitr_i_table
    # exact at nodes
    eps, rho = interpolate(t, t.P[100])
    assert eps == pytest.approx(t.eps[100], rel=1e-14)
    assert rho == pytest.approx(t.rho[100], rel=1e-14)
    # midpoint queries bracketed by the neighbouring nodes
    pm = np.sqrt(t.P[100] * t.P[101])
    eps_m, rho_m = interpolate(t, pm)
    assert t.eps[100] < eps_m < t.eps[101]
    assert t.rho[100] < rho_m < t.rho[101]
    # round trip eps(P(eps)) via monotone inversion of the same interpolant
    rng = np.random.default_rng(42)
    ps = np.exp(rng.uniform(np.log(t.P[0]), np.log(t.P[-1]), 100))
    eps_q = t.eps_of_P(ps)
    for p_true, e in zip(ps, eps_q):
        p_back = brentq(lambda p: t.eps_of_P(p) - e, t.P[0], t.P[-1],
                        xtol=1e-300, rtol=1e-15)
        assert abs(p_back - p_true) / p_true <= 1e-10
    with pytest.raises(EOSError):
        interpolate(t, t.P[-1] * 2.0)


def test_ordering_preserved_under_admixture(crust, dm_defaults):
    from dmans.rmf import RMFParameterSet, build_core_table
    from dmans.workbench import resolve_model
    grid = np.geomspace(0.04, 1.0, 120)
    stiff = build_core_table(
        RMFParameterSet.from_file(resolve_model("nitr_i")), grid)
    soft = build_core_table(
        RMFParameterSet.from_file(resolve_model("fsugarnet")), grid)
    dm = solve_higgs(0.03, dm_defaults)
    stiff_dm, soft_dm = admix_dm(stiff, dm), admix_dm(soft, dm)

    def p_at(table, eps):
        return np.interp(eps, table.eps, table.P)

    eps_grid = np.linspace(500.0, 900.0, 50)
    assert np.all(p_at(stiff, eps_grid) > p_at(soft, eps_grid))
    assert np.all(p_at(stiff_dm, eps_grid + dm.eps_dm)
                  > p_at(soft_dm, eps_grid + dm.eps_dm))


def test_monotonicity_validation():
    with pytest.raises(MonotonicityError):
        EOSTable(np.array([1.0, 2.0, 1.5]), np.array([1.0, 2.0, 3.0]),
                 np.array([1.0, 2.0, 3.0]))


def test_csv_roundtrip(tmp_path, nitr_i_table):
    path = tmp_path / "eos.csv"
    nitr_i_table.to_csv(path, stamp="test")
    back = EOSTable.from_csv(path)
    assert np.allclose(back.rho, nitr_i_table.rho, rtol=1e-9)
    assert np.allclose(back.P, nitr_i_table.P, rtol=1e-9)
    assert list(back.segments) == list(nitr_i_table.segments)


def test_crust_identity_and_causality(crust):
    d_eps = (crust.eps[2:] - crust.eps[:-2]) / (crust.rho[2:] - crust.rho[:-2])
    mu = (crust.eps[1:-1] + crust.P[1:-1]) / crust.rho[1:-1]
    assert np.max(np.abs(d_eps / mu - 1.0)) <= 1e-4
    cs2 = np.diff(crust.P) / np.diff(crust.eps)
    assert np.all(cs2 > 0.0) and np.all(cs2 < 1.0)
