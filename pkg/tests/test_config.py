import importlib

import pytest

import config
from config import RunConfig
from estimation import EstimatorConfig


def test_defaults_are_valid():
    cfg = RunConfig()
    assert cfg.r > 1
    assert cfg.output_path is None


@pytest.mark.parametrize("overrides", [
    {"r": 1.0},
    {"n_lines": 0},
    {"n_segments": 0},
    {"n_mc": 9999},
    {"n_eval": 64},
    {"slack": -1e-3},
    {"workers": 0},
])
def test_run_config_validation(overrides):
    with pytest.raises(ValueError):
        RunConfig(**overrides)


def test_estimator_config_from_run_config(small_run):
    cfg = EstimatorConfig.from_run_config(small_run, sharpness=False)
    assert (cfg.n_segments, cfg.n_subsets, cfg.n_eval, cfg.workers) == (4, 4, 128, 1)
    assert not cfg.sharpness


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("REMEZ_SEED", "99")
    monkeypatch.setenv("REMEZ_WORKERS", "2")
    try:
        reloaded = importlib.reload(config)
        assert reloaded.DEFAULT_SEED == 99
        assert reloaded.MAX_WORKERS == 2
        assert reloaded.RunConfig().seed == 99
    finally:
        monkeypatch.undo()
        importlib.reload(config)
