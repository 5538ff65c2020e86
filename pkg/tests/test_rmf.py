"""Mean-field solver and saturation-property tests, including the
independent nested-bisection oracle for beta equilibrium."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from dmans.constants import HBARC, M_ELECTRON, M_MUON
from dmans.fermi import fermi_momentum, number_density, scalar_density
from dmans.rmf import (FIELD_TOL, RMFError, RMFParameterSet, _omega_lhs,
                       _sigma_source_lhs, _symmetric_pressure,
                       build_core_table, chemical_potentials, eos_point,
                       field_residuals, saturation_properties, solve_fields,
                       symmetry_energy)
from dmans.workbench import BUNDLED_MODELS, resolve_model

HC3 = HBARC**3


def test_vacuum_limit(nitr_i_params):
    state = solve_fields(1e-6, nitr_i_params, "symmetric")
    assert abs(state.Phi) < 1e-3 * nitr_i_params.M_N
    assert abs(state.W) < 1e-3 * nitr_i_params.M_N
    assert state.effective_mass(nitr_i_params) / nitr_i_params.M_N > 0.999


def test_field_residuals_at_solution(nitr_i_params):
    for rho in (0.08, 0.151, 0.4, 1.0):
        state = solve_fields(rho, nitr_i_params, "beta_equilibrium")
        res = field_residuals(state, nitr_i_params)
        assert np.max(np.abs(res)) <= FIELD_TOL


def test_charge_neutrality_and_beta(nitr_i_params):
    state = solve_fields(0.3, nitr_i_params, "beta_equilibrium")
    rho_p = number_density(state.kf_p)
    rho_l = number_density(state.kf_e) + number_density(state.kf_mu)
    assert abs(rho_p - rho_l) <= 1e-10 * rho_p
    mu_n, mu_p, mu_e = chemical_potentials(state, nitr_i_params)
    assert abs(mu_n - mu_p - mu_e) <= 1e-10 * mu_n


def _oracle_beta_point(rho_b, p):
    """Independent nested-bisection solve: outer bisection on the proton
    fraction, inner brentq on Phi, fixed-point on (W, R)."""
    rho = rho_b * HC3

    def fields_for(xp):
        kf_p = fermi_momentum(xp * rho) if xp > 0 else 0.0
        kf_n = fermi_momentum((1.0 - xp) * rho)
        rho_3 = (2.0 * xp - 1.0) * rho

        def sigma_res(phi):
            mstar = p.M_N - phi
            ns = scalar_density(kf_n, mstar) + scalar_density(kf_p, mstar)
            return _sigma_source_lhs(phi, p) - ns

        phi = brentq(sigma_res, 1e-12, p.M_N - 1e-6, xtol=1e-14)
        w = p.g_omega**2 * rho / p.m_omega**2
        r = 0.0
        for _ in range(200):
            w_new = brentq(lambda x: _omega_lhs(x, r, p) - rho,
                           0.0, 2.0 * p.M_N, xtol=1e-15)
            r_new = 0.5 * rho_3 / (p.m_rho**2 / p.g_rho**2
                                   + 2.0 * p.lambda_omega * w_new**2)
            if abs(w_new - w) < 1e-14 * p.M_N and abs(r_new - r) < 1e-14 * p.M_N:
                w, r = w_new, r_new
                break
            w, r = w_new, r_new
        return phi, w, r, kf_n, kf_p

    def beta_res(xp):
        phi, w, r, kf_n, kf_p = fields_for(xp)
        mstar = p.M_N - phi
        mu_n = math.hypot(kf_n, mstar) + w - 0.5 * r
        mu_p = math.hypot(kf_p, mstar) + w + 0.5 * r
        mu_e = mu_n - mu_p
        if mu_e <= M_ELECTRON:
            return -1.0
        rho_l = number_density(math.sqrt(mu_e**2 - M_ELECTRON**2))
        if mu_e > M_MUON:
            rho_l += number_density(math.sqrt(mu_e**2 - M_MUON**2))
        return rho_l - xp * rho

    xp = brentq(beta_res, 1e-6, 0.5, xtol=1e-15)
    phi, w, r, kf_n, kf_p = fields_for(xp)
    mstar = p.M_N - phi
    mu_e = (math.hypot(kf_n, mstar) - 0.5 * r) - (math.hypot(kf_p, mstar)
                                                  + 0.5 * r)
    kf_e = math.sqrt(max(mu_e**2 - M_ELECTRON**2, 0.0))
    kf_mu = math.sqrt(max(mu_e**2 - M_MUON**2, 0.0))
    from dmans.rmf import MeanFieldState
    return MeanFieldState(phi, w, r, kf_n, kf_p, kf_e, kf_mu, rho_b,
                          (number_density(kf_p) - number_density(kf_n)) / HC3)


def test_nested_bisection_oracle(nitr_i_params):
    state = solve_fields(0.30, nitr_i_params, "beta_equilibrium")
    oracle = _oracle_beta_point(0.30, nitr_i_params)
    eps, prs = eos_point(state, nitr_i_params)
    eps_o, prs_o = eos_point(oracle, nitr_i_params)
    assert abs(eps - eps_o) / eps_o <= 1e-8
    assert abs(prs - prs_o) / prs_o <= 1e-8


def test_thermodynamic_identity_point(nitr_i_params):
    rho = 0.35
    h = 1e-4 * rho

    def eps_at(rb):
        return eos_point(solve_fields(rb, nitr_i_params), nitr_i_params)[0]

    mu_b = (eps_at(rho + h) - eps_at(rho - h)) / (2.0 * h)
    eps, prs = eos_point(solve_fields(rho, nitr_i_params), nitr_i_params)
    assert abs(prs - (rho * mu_b - eps)) / prs <= 1e-4


def test_muon_onset(nitr_i_params):
    lo, hi = 0.04, 0.4

    def mu_e_at(rho):
        state = solve_fields(rho, nitr_i_params)
        return chemical_potentials(state, nitr_i_params)[2]

    onset = brentq(lambda rho: mu_e_at(rho) - M_MUON, lo, hi, xtol=1e-10)
    below = solve_fields(onset * 0.995, nitr_i_params)
    above = solve_fields(onset * 1.005, nitr_i_params)
    assert below.kf_mu == 0.0
    assert above.kf_mu > 0.0
    # continuity: muon density grows from zero at onset
    assert number_density(above.kf_mu) / (above.rho_b * HC3) < 1e-3


def test_core_table_monotone_and_residuals(nitr_i_params):
    table = build_core_table(nitr_i_params, np.geomspace(0.04, 1.2, 60))
    assert np.all(np.diff(table.P) > 0.0)
    assert np.all(np.diff(table.eps) > 0.0)


def test_continuation_equals_cold_start(nitr_i_params):
    grid = np.geomspace(0.04, 1.2, 24)
    table = build_core_table(nitr_i_params, grid)
    for i in range(0, len(grid), 5):
        state = solve_fields(grid[i], nitr_i_params)  # cold start
        eps, prs = eos_point(state, nitr_i_params)
        assert abs(eps - table.eps[i]) / table.eps[i] <= 1e-9
        assert abs(prs - table.P[i]) / table.P[i] <= 1e-9


def test_table_thermodynamic_identity(nitr_i_params):
    table = build_core_table(nitr_i_params, np.geomspace(0.04, 1.2, 400))
    d_eps = (table.eps[2:] - table.eps[:-2]) / (table.rho[2:] - table.rho[:-2])
    mu = (table.eps[1:-1] + table.P[1:-1]) / table.rho[1:-1]
    assert np.max(np.abs(d_eps / mu - 1.0)) <= 1e-4


def test_saturation_defining_condition(nitr_i_params):
    sat = saturation_properties(nitr_i_params)

    def ea(rho):
        state = solve_fields(rho, nitr_i_params, "symmetric")
        return eos_point(state, nitr_i_params)[0] / rho - nitr_i_params.M_N

    h = 2e-5
    slope = (ea(sat.rho_sat + h) - ea(sat.rho_sat - h)) / (2.0 * h)
    assert abs(slope) < 5e-6
    assert abs(_symmetric_pressure(sat.rho_sat, nitr_i_params)) < 1e-8


def test_derivative_oracle_denser_stencil(nitr_i_params):
    """Richardson-extrapolated K, J, L vs a denser 5-point-stencil oracle."""
    sat = saturation_properties(nitr_i_params)
    rho0 = sat.rho_sat

    def ea(rho):
        state = solve_fields(rho, nitr_i_params, "symmetric")
        return eos_point(state, nitr_i_params)[0] / rho - nitr_i_params.M_N

    def d2_5pt(f, x, h):
        return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x)
                + 16 * f(x - h) - f(x - 2 * h)) / (12.0 * h * h)

    k_oracle = 9.0 * rho0**2 * d2_5pt(ea, rho0, 0.006)
    assert abs(k_oracle - sat.K_sat) / abs(sat.K_sat) <= 1e-3

    def ea_t(t, rho=rho0):
        state = solve_fields(rho, nitr_i_params, "fixed_asymmetry", t=t)
        return eos_point(state, nitr_i_params)[0] / rho - nitr_i_params.M_N

    j_oracle = 0.5 * d2_5pt(ea_t, 0.0, 0.012)
    assert abs(j_oracle - sat.J_sat) / sat.J_sat <= 1e-3

    def j_of_rho(rho):
        return symmetry_energy(rho, nitr_i_params)

    def d1_5pt(f, x, h):
        return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h)
                + f(x - 2 * h)) / (12.0 * h)

    l_oracle = 3.0 * rho0 * d1_5pt(j_of_rho, rho0, 0.006)
    assert abs(l_oracle - sat.L_sat) / sat.L_sat <= 1e-3


def test_symmetric_pressure_single_sign_change_all_models():
    for name in BUNDLED_MODELS:
        params = RMFParameterSet.from_file(resolve_model(name))
        grid = np.linspace(0.10, 0.22, 13)
        signs = np.sign([_symmetric_pressure(r, params) for r in grid])
        changes = np.sum(np.diff(signs) != 0.0)
        assert changes == 1, f"{name}: {changes} sign changes"


def test_unphysical_inputs_raise(nitr_i_params):
    with pytest.raises(ValueError):
        solve_fields(-0.1, nitr_i_params)
    with pytest.raises(ValueError):
        RMFParameterSet(m_sigma=-1, m_omega=782, m_rho=763, g_sigma=9,
                        g_omega=11, g_rho=9, kappa3=0, kappa4=0, zeta0=0,
                        lambda_omega=0)
    with pytest.raises(RMFError):
        # far outside the saturation window
        saturation_properties(nitr_i_params, window=(0.9, 1.0))


def test_parameter_roundtrip(tmp_path, nitr_i_params):
    path = tmp_path / "m.params"
    with open(path, "w") as fh:
        for key in ("m_sigma", "m_omega", "m_rho", "g_sigma", "g_omega",
                    "g_rho", "kappa3", "kappa4", "zeta0", "lambda_omega",
                    "M_N"):
            fh.write(f"{key} = {getattr(nitr_i_params, key)!r}\n")
        fh.write("model_name = NITR-I\n")
    q = RMFParameterSet.from_file(path)
    assert q == nitr_i_params
