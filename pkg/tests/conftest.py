import pytest

from dmans.dm import DMParameterSet
from dmans.eos import attach_crust, load_crust
from dmans.rmf import RMFParameterSet, build_core_table
from dmans.tov import mr_curve, star_at_mass
from dmans.workbench import (RunConfig, resolve_model, BUNDLED_MODELS,
                             build_unified_table, pooled_fits, sample_branch)


@pytest.fixture(scope="session")
def nitr_i_params():
    return RMFParameterSet.from_file(resolve_model("nitr_i"))


@pytest.fixture(scope="session")
def crust():
    return load_crust()


@pytest.fixture(scope="session")
def dm_defaults():
    return DMParameterSet()


@pytest.fixture(scope="session")
def nitr_i_core(nitr_i_params):
    return build_core_table(nitr_i_params)


@pytest.fixture(scope="session")
def nitr_i_table(nitr_i_core, crust):
    return attach_crust(nitr_i_core, crust)


@pytest.fixture(scope="session")
def nitr_i_curve(nitr_i_table):
    return mr_curve(nitr_i_table)


@pytest.fixture(scope="session")
def nitr_i_star14(nitr_i_curve, nitr_i_table):
    return star_at_mass(nitr_i_curve, 1.4, eos=nitr_i_table)


@pytest.fixture(scope="session")
def bank_cfg():
    return RunConfig(model_files=[resolve_model(m) for m in BUNDLED_MODELS],
                     rho_c_n=56)


@pytest.fixture(scope="session")
def bank(bank_cfg, crust, dm_defaults):
    """Full pipeline bank: pooled fits + per-(model, kf) samples and tables.

    Fit-bearing Fermi momenta {0, 0.02, 0.03, 0.05} carry 40-star samples;
    kf = 0.04 (softening checks) carries a lighter 12-star pass.
    """
    fits, samples = pooled_fits(bank_cfg, kf_list=[0.0, 0.02, 0.03, 0.05],
                                crust=crust, dmp=dm_defaults)
    tables = {}
    for mf in bank_cfg.model_files:
        params = RMFParameterSet.from_file(mf)
        for kf in (0.0, 0.02, 0.03, 0.04, 0.05):
            tables[(params.model_name, kf)] = build_unified_table(
                params, crust, dm_defaults, kf)
        _, sam04 = sample_branch(tables[(params.model_name, 0.04)],
                                 bank_cfg, n=12)
        samples[(params.model_name, 0.04)] = sam04
    return {"fits": fits, "samples": samples, "tables": tables,
            "cfg": bank_cfg}
