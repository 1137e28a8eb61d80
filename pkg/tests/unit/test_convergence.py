from functools import lru_cache

import pytest

from helmholtz_mixed_fem.adapt import AfemConfig, afem_loop, check_quasimonotone, convergence_rate, uniform_loop
from helmholtz_mixed_fem.input.experiments import EXPERIMENTS

pytestmark = pytest.mark.slow

UNIFORM_MAX_NDOF = {0: 200000, 1: 120000, 2: 120000}
ADAPTIVE_MAX_NDOF = 50000
UNIFORM_BRACKET = (-0.40, -0.27)
ADAPTIVE_SLACK = 0.12


@lru_cache(maxsize=None)
def _history(experiment_id, mode, k):
    if mode == "uniform":
        config = AfemConfig.from_defaults(k=k, max_ndof=UNIFORM_MAX_NDOF[k], experiment=experiment_id)
        return tuple(uniform_loop(config, EXPERIMENTS[experiment_id]()))
    config = AfemConfig.from_defaults(k=k, max_ndof=ADAPTIVE_MAX_NDOF, experiment=experiment_id)
    return tuple(afem_loop(config, EXPERIMENTS[experiment_id]()))


def _rate(history, quantity, window):
    values = {
        "lambda": [r.lam for r in history],
        "error": [r.error for r in history],
        "curl_error": [r.curl_error for r in history],
    }[quantity]
    return convergence_rate([r.ndof for r in history], values, window)


def _in_uniform_bracket(rate):
    low, high = UNIFORM_BRACKET
    return low <= rate <= high


# 1. Uniform refinement, constant datum
@pytest.mark.parametrize("k, reached", [(0, 100000), (1, 30000), (2, 30000)])
def test_uniform_lambda_rate_lshape_const(k, reached):
    history = _history("lshape-const", "uniform", k)
    assert history[-1].ndof >= reached
    assert _in_uniform_bracket(_rate(history, "lambda", 3))


# 2. Adaptive refinement, constant datum
@pytest.mark.parametrize("k", [0, 1, 2])
def test_adaptive_lambda_rate_lshape_const(k):
    history = _history("lshape-const", "adaptive", k)
    assert 20000 <= history[-1].ndof <= ADAPTIVE_MAX_NDOF
    assert _rate(history, "lambda", 5) == pytest.approx(-(k + 1) / 2, abs=ADAPTIVE_SLACK)


# 3. Dirichlet data with the corner singularity
@pytest.mark.parametrize("k", [0, 1, 2])
def test_uniform_error_rate_lshape_dirichlet(k):
    assert _in_uniform_bracket(_rate(_history("lshape-dirichlet", "uniform", k), "error", 3))


@pytest.mark.parametrize("k", [0, 1, 2])
def test_adaptive_error_rate_lshape_dirichlet(k):
    history = _history("lshape-dirichlet", "adaptive", k)
    assert _rate(history, "error", 5) == pytest.approx(-(k + 1) / 2, abs=ADAPTIVE_SLACK)


@pytest.mark.parametrize("mode", ["uniform", "adaptive"])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_efficiency_lshape_dirichlet(mode, k):
    ratios = [r.efficiency for r in _history("lshape-dirichlet", mode, k)]
    assert all(2.0 <= ratio <= 40.0 for ratio in ratios), ratios


def test_lshape_dirichlet_takes_both_branches():
    branches = {r.branch for r in _history("lshape-dirichlet", "adaptive", 0)}
    assert branches == {"doerfler", "data"}


# 4. Singular Curl part
@pytest.mark.parametrize("k", [1, 2])
def test_uniform_error_rate_singular_alpha(k):
    assert _in_uniform_bracket(_rate(_history("singular-alpha", "uniform", k), "error", 3))


def test_uniform_rates_singular_alpha_lowest_order():
    history = _history("singular-alpha", "uniform", 0)
    assert _in_uniform_bracket(_rate(history, "curl_error", 3))
    assert _rate(history, "error", 3) <= -0.34


# 5. Quasimonotone data oscillation
@pytest.mark.parametrize("experiment_id", ["lshape-dirichlet", "lshape-const", "singular-alpha"])
def test_mu_quasimonotone_on_adaptive_histories(experiment_id):
    history = _history(experiment_id, "adaptive", 0)
    assert len(history) > 5
    assert check_quasimonotone(history) == []
