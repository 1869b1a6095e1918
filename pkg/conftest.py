import json

import numpy as np
import pytest

from config import RunConfig
from function_core import MultiPoly, Poly


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_run():
    """Smallest run config the validators accept; single worker."""
    return RunConfig(seed=7, n_lines=4, n_segments=4, n_subsets=4, n_mc=10000, n_eval=128, workers=1)


def monomial(n, j, k, coeff=1.0):
    exps = [0] * n
    exps[j] = k
    return Poly(MultiPoly.from_terms(n, {tuple(exps): coeff}))


@pytest.fixture
def z1_power():
    return lambda k, n=1: monomial(n, 0, k)


@pytest.fixture
def write_spec(tmp_path):
    def _write(payload, name="f.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return path
    return _write
