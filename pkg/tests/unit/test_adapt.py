import math

import numpy as np
import pytest
from unittest import mock

from helmholtz_mixed_fem.adapt import (
    AfemConfig,
    AfemRecord,
    afem_loop,
    check_quasimonotone,
    convergence_rate,
    data_mark,
    doerfler_mark,
    history_rates,
    ndof_of,
    uniform_loop,
)
from helmholtz_mixed_fem.adapt.loop import OscillationMemo
from helmholtz_mixed_fem.exceptions import ConfigurationError, DataApproximationError
from helmholtz_mixed_fem.estimator import element_mu2, estimate_mu
from helmholtz_mixed_fem.input.experiments import ExperimentSpec, lshape_const, lshape_dirichlet
from helmholtz_mixed_fem.mesh import bisect
from helmholtz_mixed_fem.spaces import ScalarField, VectorField


def _records(mus):
    return [AfemRecord(level=i, ndof=10 * (i + 1), n_triangles=i + 1, lam=1.0, mu=mu) for i, mu in enumerate(mus)]


# 1. Doerfler marking
@pytest.mark.parametrize(
    "theta, expected",
    [(0.5, [0, 1]), (0.01, [0]), (1.0, [0, 1, 2, 3])],
)
def test_doerfler_mark(theta, expected):
    assert doerfler_mark([4.0, 3.0, 2.0, 1.0], theta).tolist() == expected


def test_doerfler_mark_breaks_ties_by_id():
    assert doerfler_mark([1.0, 1.0, 1.0, 1.0], 0.5).tolist() == [0, 1]
    assert doerfler_mark([1.0, 3.0, 3.0], 0.4).tolist() == [1]


def test_doerfler_mark_result_is_sorted():
    assert doerfler_mark([1.0, 2.0, 5.0, 2.0], 0.8).tolist() == [1, 2, 3]


def test_doerfler_mark_skips_zero_contributions():
    assert doerfler_mark([2.0, 0.0, 0.0], 1.0).tolist() == [0]
    assert doerfler_mark(np.zeros(4), 0.5).size == 0


@pytest.mark.parametrize("theta", [0.0, -0.1, 1.5])
def test_doerfler_mark_invalid_theta(theta):
    with pytest.raises(ConfigurationError):
        doerfler_mark([1.0], theta)


# 2. Data marking
def test_data_mark_reduces_oscillation(lshape):
    phi = lshape_const().phi

    def mu_fn(mesh):
        return estimate_mu(mesh, 0, phi)

    mu2 = mu_fn(lshape)
    target = data_mark(lshape, mu2, 0.5, mu_fn)
    assert target.n_triangles > lshape.n_triangles
    assert mu_fn(target).sum() <= 0.5 * mu2.sum()


def test_data_mark_from_initial_mesh(lshape):
    phi = lshape_const().phi

    def mu_fn(mesh):
        return estimate_mu(mesh, 0, phi)

    mu2 = mu_fn(lshape)
    target = data_mark(lshape, mu2, 0.75, mu_fn, start=lshape.initial)
    assert target.fingerprint == lshape.fingerprint


def test_data_mark_stagnation(lshape):
    mu_fn = mock.Mock(side_effect=lambda mesh: np.ones(mesh.n_triangles))
    with pytest.raises(DataApproximationError):
        data_mark(lshape, np.ones(lshape.n_triangles), 0.5, mu_fn)
    assert mu_fn.call_count == 3


def test_data_mark_round_limit(lshape):
    # decreases too slowly to reach the target within two rounds
    totals = iter([0.9, 0.8])

    def mu_fn(mesh):
        values = np.zeros(mesh.n_triangles)
        values[0] = next(totals)
        return values

    with pytest.raises(DataApproximationError):
        data_mark(lshape, np.ones(lshape.n_triangles) / 6.0, 0.1, mu_fn, max_rounds=2)


def test_data_mark_marks_only_the_deficit(lshape):
    # total 10, target 7.5: the largest contribution alone carries the deficit 2.5
    mu2 = np.array([4.0, 3.0, 2.0, 1.0, 0.0, 0.0])
    mu_fn = mock.Mock(side_effect=lambda mesh: np.full(mesh.n_triangles, 0.5))
    with mock.patch("helmholtz_mixed_fem.adapt.marking.bisect", wraps=bisect) as bisect_spy:
        target = data_mark(lshape, mu2, 0.75, mu_fn)
    assert bisect_spy.call_count == 1
    assert bisect_spy.call_args.args[1].tolist() == [0]
    assert mu_fn.call_count == 1
    assert target.n_triangles == 8


def test_data_mark_rechecks_after_each_round(lshape):
    totals = iter([6.0, 1.0])
    mu_fn = mock.Mock(side_effect=lambda mesh: np.full(mesh.n_triangles, next(totals) / mesh.n_triangles))
    data_mark(lshape, np.ones(6), 0.5, mu_fn)
    assert mu_fn.call_count == 2


def test_data_mark_needs_positive_oscillation(lshape):
    with pytest.raises(DataApproximationError):
        data_mark(lshape, np.zeros(6), 0.5, mock.Mock())
    with pytest.raises(ConfigurationError):
        data_mark(lshape, np.ones(6), 1.0, mock.Mock())


# 3. Configuration
def test_config_defaults():
    config = AfemConfig.from_defaults()
    assert config.theta == 0.1
    assert config.kappa == 0.5
    assert config.rho == 0.75
    assert config.solver == "direct"
    assert config.max_levels == 1000
    assert config.data_mark_from == "current"
    assert config.mu_quad_degree is None


def test_config_overrides():
    config = AfemConfig.from_defaults(theta=0.3, k=2, rho=None)
    assert config.theta == 0.3
    assert config.k == 2
    assert config.rho == 0.75
    assert config.as_dict()["theta"] == 0.3


def test_config_rejects_unknown_override():
    with pytest.raises(ConfigurationError):
        AfemConfig.from_defaults(omega=0.5)


@pytest.mark.parametrize(
    "overrides",
    [
        {"theta": 0.0},
        {"kappa": 0.0},
        {"rho": 1.0},
        {"k": -1},
        {"max_ndof": 0},
        {"quad_degree": 0},
        {"mu_quad_degree": 0},
        {"solver": "lu"},
        {"data_mark_from": "previous"},
        {"adaptive_rate_window": 1},
    ],
)
def test_config_validation(overrides):
    with pytest.raises(ConfigurationError):
        AfemConfig(**overrides)


# 4. Loops
def test_ndof_of(lshape):
    assert ndof_of(lshape, 0) == 7
    assert ndof_of(lshape, 1) == 20
    assert ndof_of(lshape, 2) == 39


def test_afem_loop_stops_when_estimators_vanish():
    experiment = ExperimentSpec(
        id="zero",
        description="zero datum",
        domain="square",
        phi=VectorField.zero(),
        f=ScalarField.constant(0.0),
    )
    history = afem_loop(AfemConfig(max_levels=5), experiment)
    assert len(history) == 1
    assert history[0].lam == 0.0
    assert history[0].mu == 0.0
    assert history[0].branch == "doerfler"


def test_afem_loop_levels():
    config = AfemConfig(k=0, theta=0.5, max_levels=4)
    seen = []
    history = afem_loop(config, lshape_const(), on_level=lambda record, mesh, solution, report: seen.append(mesh))
    assert len(history) == 4
    assert [r.level for r in history] == [0, 1, 2, 3]
    assert all(a.ndof < b.ndof for a, b in zip(history, history[1:]))
    assert all(r.branch in ("doerfler", "data") for r in history)
    assert all(math.isnan(r.error) for r in history)
    assert [mesh.n_triangles for mesh in seen] == [r.n_triangles for r in history]
    assert all(ndof_of(mesh, 0) == r.ndof for mesh, r in zip(seen, history))


def test_afem_loop_takes_data_branch():
    def refine_all(mesh, report, config, mu_fn):
        return bisect(mesh, range(mesh.n_triangles))

    with mock.patch("helmholtz_mixed_fem.adapt.loop._data_refinement", side_effect=refine_all) as refinement:
        history = afem_loop(AfemConfig(k=0, kappa=1e-12, max_levels=2), lshape_const())
    assert [r.branch for r in history] == ["data", "data"]
    assert refinement.call_count == 1


def test_afem_loop_respects_max_ndof():
    history = afem_loop(AfemConfig(k=1, theta=0.5, max_levels=30, max_ndof=60), lshape_const())
    assert history[-1].ndof <= 60
    assert len(history) < 30


def test_uniform_loop_levels():
    history = uniform_loop(AfemConfig(k=1, max_levels=3), lshape_const())
    assert [r.n_triangles for r in history] == [6, 24, 96]
    assert all(r.branch == "uniform" for r in history)


def test_uniform_loop_respects_max_ndof():
    history = uniform_loop(AfemConfig(k=0, max_levels=10, max_ndof=20), lshape_const())
    assert [r.ndof for r in history] == [7, 20]


# 5. Rates and monotonicity
def test_convergence_rate_of_power_law():
    ndof = np.array([10.0, 100.0, 1000.0, 10000.0])
    assert convergence_rate(ndof, 3.0 * ndof ** -0.5, window=3) == pytest.approx(-0.5)


def test_convergence_rate_skips_unusable_levels():
    assert math.isnan(convergence_rate([10, 100], [math.nan, 1.0], window=5))
    assert convergence_rate([10, 100, 1000], [0.0, 1.0, 0.1], window=5) == pytest.approx(-1.0)


def test_history_rates_keys():
    rates = history_rates(_records([1.0, 0.5, 0.25]), window=3)
    assert set(rates) == {"error", "lambda", "mu", "estimator", "curl_error"}
    assert math.isnan(rates["error"])
    assert rates["lambda"] == pytest.approx(0.0, abs=1e-12)


def test_check_quasimonotone():
    assert check_quasimonotone(_records([1.0, 0.5, 0.7, 0.3])) == [2]
    assert check_quasimonotone(_records([1.0, 0.5, 0.5])) == []


def test_mu_quasimonotone_on_real_history():
    history = afem_loop(AfemConfig(k=0, max_ndof=400), lshape_dirichlet())
    assert len(history) > 3
    assert check_quasimonotone(history) == []


def test_oscillation_memo_reuses_kept_triangles(lshape):
    g = lshape_dirichlet().oscillation_datum
    memo = OscillationMemo(0, g, 20)
    first = memo(lshape)
    fine = bisect(lshape, [3])
    with mock.patch("helmholtz_mixed_fem.adapt.loop.element_mu2", wraps=element_mu2) as compute:
        second = memo(fine)
    parents = fine.parent_map(lshape)
    kept = np.bincount(parents, minlength=6)[parents] == 1
    assert compute.call_args.args[0].shape == (fine.n_triangles - kept.sum(), 3, 2)
    assert np.array_equal(second[kept], first[parents[kept]])
    assert np.allclose(second, estimate_mu(fine, 0, g, quad_degree=20))


def test_record_efficiency():
    record = AfemRecord(level=0, ndof=7, n_triangles=6, lam=3.0, mu=4.0, error=5.0)
    assert record.estimator == pytest.approx(5.0)
    assert record.efficiency == pytest.approx(1.0)
    assert record.as_dict()["efficiency"] == pytest.approx(1.0)
    assert math.isnan(AfemRecord(level=0, ndof=7, n_triangles=6, lam=1.0, mu=0.0).efficiency)
