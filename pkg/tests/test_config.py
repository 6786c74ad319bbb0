import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov.verify.config import ConfigError, ExperimentConfig, HeatConfig, load_config


def test_defaults_and_times():
    cfg = ExperimentConfig()
    assert cfg.dims() == (1, 2)
    assert cfg.heat.times == [2.0**-j for j in range(3, 8)]
    assert ExperimentConfig(dim=2).dims() == (2,)


@given(
    st.sampled_from([None, 1, 2]),
    st.lists(st.one_of(st.floats(2, 40), st.just(math.inf)), min_size=1, max_size=4),
    st.lists(st.floats(0.05, 1.95), min_size=1, max_size=3),
    st.integers(0, 10**6),
)
def test_toml_round_trip_bit_exact(dim, p, alpha, seed):
    cfg = ExperimentConfig(dim=dim, p=p, alpha=alpha, seed=seed, potential="random-lipschitz:seed=3")
    back = ExperimentConfig.from_toml(cfg.to_toml())
    assert back == cfg
    assert back.config_hash() == cfg.config_hash()


def test_hash_changes_with_content():
    a = ExperimentConfig()
    assert a.config_hash() != a.replace(seed=1).config_hash()
    assert a.config_hash() == ExperimentConfig().config_hash()


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown"):
        ExperimentConfig.from_toml("dimension = 1\n")
    with pytest.raises(ConfigError, match=r"\[heat\]"):
        ExperimentConfig.from_toml("[heat]\nt_min = 3\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_toml("fit = 3\n")
    with pytest.raises(ConfigError, match="malformed"):
        ExperimentConfig.from_toml("dim = \n")


@pytest.mark.parametrize(
    "kw",
    [
        {"dim": 3},
        {"max_degree": 0},
        {"p": [1.5]},
        {"alpha": [2.0]},
        {"seed": -1},
        {"heat": HeatConfig(t_min_exp=2, t_max_exp=3)},
    ],
)
def test_validation(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kw)


def test_load_nested_file(tmp_path):
    f = tmp_path / "c.toml"
    f.write_text('dim = 1\np = [2.0, 4.0]\n[fit]\nlambda_min = 16.0\n[nodal]\nrefinement = 12\n')
    cfg = load_config(f)
    assert cfg.dim == 1 and cfg.fit.lambda_min == 16.0 and cfg.nodal.refinement == 12
    assert cfg.fit.lambda_max == 96.0
