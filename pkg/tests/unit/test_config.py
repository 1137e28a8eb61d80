import json
import logging

import pytest
from unittest import mock

from helmholtz_mixed_fem.config import DIRECTORIES, RESULTS_DIR, load_defaults
from helmholtz_mixed_fem.exceptions import ConfigurationError, HelmholtzFemError, MeshError
from helmholtz_mixed_fem.input import RunSpecification
from helmholtz_mixed_fem.registry import ExperimentRegistry, get_registry
from helmholtz_mixed_fem.utils import SpaceCache, cached, log_execution_time, setup_logging


# 1. Defaults file
def test_load_defaults():
    defaults = load_defaults()
    assert defaults["theta"] == 0.1
    assert defaults["kappa"] == 0.5
    assert defaults["rho"] == 0.75
    assert DIRECTORIES["results"] == RESULTS_DIR


def test_load_defaults_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_defaults(tmp_path / "missing.json")


def test_load_defaults_incomplete_file(tmp_path):
    path = tmp_path / "defaults.json"
    path.write_text(json.dumps({"theta": 0.2}))
    with pytest.raises(ConfigurationError) as excinfo:
        load_defaults(path)
    assert "kappa" in str(excinfo.value)


def test_configuration_error_is_value_error():
    assert issubclass(ConfigurationError, ValueError)
    assert issubclass(ConfigurationError, HelmholtzFemError)
    assert MeshError("bad", invariant="conformity").invariant == "conformity"


# 2. Run specification
def test_run_specification(tmp_path):
    spec = RunSpecification(
        {"experiment": "singular-alpha", "mode": "adaptive", "k": 2, "out": str(tmp_path / "r.csv"), "theta": 0.3}
    )
    assert spec.title == "singular-alpha_adaptive_k2"
    assert spec.config.theta == 0.3
    assert spec.config.k == 2
    assert spec.rate_window == 5
    assert spec.as_dict()["config"]["experiment"] == "singular-alpha"
    assert "Degree k: 2" in str(spec)


def test_run_specification_uniform_window(tmp_path):
    spec = RunSpecification({"experiment": "lshape-const", "mode": "uniform", "k": 0, "out": str(tmp_path / "r.csv")})
    assert spec.rate_window == 3
    assert not spec.gnuplot
    assert spec.save_meshes is None


@pytest.mark.parametrize(
    "changes",
    [{"experiment": None}, {"mode": "random"}, {"k": 3}, {"out": None}, {"rho": 1.5}],
)
def test_run_specification_rejects(tmp_path, changes):
    params = {"experiment": "lshape-const", "mode": "uniform", "k": 0, "out": str(tmp_path / "r.csv")}
    params.update(changes)
    with pytest.raises(ConfigurationError):
        RunSpecification(params)


def test_run_specification_custom_defaults(tmp_path):
    defaults = load_defaults()
    defaults["theta"] = 0.25
    path = tmp_path / "defaults.json"
    path.write_text(json.dumps(defaults))
    spec = RunSpecification(
        {"experiment": "lshape-const", "mode": "adaptive", "k": 0, "out": str(tmp_path / "r.csv"), "defaults": str(path)}
    )
    assert spec.config.theta == 0.25


# 3. Registry
def test_registry_lookup(registry):
    assert registry.ids() == ["lshape-const", "lshape-dirichlet", "singular-alpha", "square-smooth"]
    assert registry.get("lshape-const") is registry.get("lshape-const")
    with pytest.raises(ConfigurationError):
        registry.get("circle")


def test_registry_builds_each_experiment_once():
    factory = mock.Mock(return_value="spec")
    registry = ExperimentRegistry(factories={"custom": factory})
    assert registry.ids() == ["custom"]
    assert registry.get("custom") == "spec"
    assert registry.get("custom") == "spec"
    factory.assert_called_once_with()


def test_registry_run_status(registry):
    registry.register_run("run", {"k": 0})
    assert registry.get_status("run") == "pending"
    registry.update_status("run", "completed")
    assert registry.get_status("run") == "completed"
    assert "last_updated" in registry.runs["run"]
    assert registry.get_status("other") is None
    with pytest.raises(ConfigurationError):
        registry.update_status("run", "lost")


def test_get_registry_is_shared():
    assert get_registry() is get_registry()


# 4. Cache and logging utilities
def test_space_cache_evicts_least_recently_used():
    cache = SpaceCache(max_size=2)
    cache.set("a", 1)
    cache.set("b", 2)
    assert cache.get("a") == 1
    cache.set("c", 3)
    assert cache.get("b") is None
    assert cache.get("a") == 1
    assert cache.stats["evictions"] == 1
    assert cache.stats["size"] == 2
    cache.clear()
    assert cache.stats["size"] == 0
    assert cache.get("a") is None


def test_cached_decorator_keys_by_uid():
    calls = []

    @cached("test")
    def build(mesh, k):
        calls.append((mesh.uid, k))
        return object()

    first, second = mock.Mock(uid="first"), mock.Mock(uid="second")
    assert build(first, 1) is build(first, 1)
    assert build(second, 1) is not build(first, 1)
    assert calls == [("first", 1), ("second", 1)]


def test_setup_logging_without_file(reset_logging):
    setup_logging(verbose_level=0, log_file_name=None)
    handlers = logging.getLogger().handlers
    assert len(handlers) == 1
    assert handlers[0].level == logging.ERROR


def test_setup_logging_with_file(tmp_path, reset_logging):
    log_file = tmp_path / "run.log"
    setup_logging(verbose_level=2, log_file_name=str(log_file))
    logging.getLogger("helmholtz_mixed_fem.test").debug("written to file")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "written to file" in log_file.read_text()


def test_log_execution_time_reraises():
    @log_execution_time
    def failing():
        raise MeshError("broken")

    with pytest.raises(MeshError):
        failing()
