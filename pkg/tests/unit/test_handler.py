import concurrent.futures
import json

import pytest
from unittest import mock

from helmholtz_mixed_fem.exceptions import ConfigurationError, SolverError
from helmholtz_mixed_fem.handler import ExperimentHandler, ParallelHandler
from helmholtz_mixed_fem.handler.experiment import CSV_COLUMNS, GNUPLOT_COLUMNS


def _params(tmp_path, **extra):
    params = {
        "experiment": "lshape-const",
        "mode": "uniform",
        "k": 0,
        "out": str(tmp_path / "out" / "lshape-const.csv"),
        "max_levels": 2,
    }
    params.update(extra)
    return params


# 1. Single runs
def test_handle_run_writes_results(tmp_path, registry):
    result = ExperimentHandler(registry=registry).handle_run(_params(tmp_path, gnuplot=True))

    lines = (tmp_path / "out" / "lshape-const.csv").read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[:6] == ["lshape-const", "uniform", "0", "0", "7", "6"]
    assert first[6] == ""
    assert first[9] == "uniform"

    metadata = json.loads((tmp_path / "out" / "lshape-const.json").read_text())
    assert metadata["title"] == "lshape-const_uniform_k0"
    assert metadata["rate_quantity"] == "lambda"
    assert len(metadata["levels"]) == 2
    assert metadata["levels"][0]["error"] is None

    dat = (tmp_path / "out" / "lshape-const.dat").read_text().splitlines()
    assert dat[0] == "# " + " ".join(GNUPLOT_COLUMNS)
    assert len(dat) == 3

    assert result["status"] == "completed"
    assert result["rate_quantity"] == "lambda"
    assert registry.get_status("lshape-const_uniform_k0") == "completed"


def test_handle_run_with_exact_solution_reports_error_rate(tmp_path, registry):
    params = _params(tmp_path, experiment="square-smooth", k=1, out=str(tmp_path / "smooth.csv"), max_levels=4)
    result = ExperimentHandler(registry=registry).handle_run(params)
    assert result["rate_quantity"] == "error"
    # smooth solution, uniform refinement: ||p - p_h|| = O(h^2) = O(ndof^-1)
    assert result["rate"] < -0.8
    assert all(record.error > 0.0 for record in result["history"])


def test_handle_run_saves_meshes(tmp_path, registry):
    mesh_dir = tmp_path / "meshes"
    ExperimentHandler(registry=registry).handle_run(_params(tmp_path, save_meshes=str(mesh_dir)))
    assert sorted(p.name for p in mesh_dir.iterdir()) == [
        "lshape-const_uniform_k0_level000.mesh",
        "lshape-const_uniform_k0_level001.mesh",
    ]


def test_handle_run_unknown_experiment(tmp_path, registry):
    with pytest.raises(ConfigurationError):
        ExperimentHandler(registry=registry).handle_run(_params(tmp_path, experiment="unknown"))


def test_handle_run_marks_failure(tmp_path, registry):
    with mock.patch("helmholtz_mixed_fem.handler.experiment.uniform_loop", side_effect=SolverError("boom")):
        with pytest.raises(SolverError):
            ExperimentHandler(registry=registry).handle_run(_params(tmp_path))
    assert registry.get_status("lshape-const_uniform_k0") == "failed"
    assert registry.runs["lshape-const_uniform_k0"]["message"] == "boom"


def test_handle_run_releases_space_cache(tmp_path, registry):
    cache = mock.Mock(stats={"hits": 3, "size": 4})
    with mock.patch("helmholtz_mixed_fem.handler.experiment.get_cache", return_value=cache):
        ExperimentHandler(registry=registry).handle_run(_params(tmp_path))
    cache.clear.assert_called_once_with()


def test_handle_run_releases_space_cache_on_failure(tmp_path, registry):
    cache = mock.Mock(stats={})
    with mock.patch("helmholtz_mixed_fem.handler.experiment.get_cache", return_value=cache):
        with mock.patch("helmholtz_mixed_fem.handler.experiment.uniform_loop", side_effect=SolverError("boom")):
            with pytest.raises(SolverError):
                ExperimentHandler(registry=registry).handle_run(_params(tmp_path))
    cache.clear.assert_called_once_with()


def test_handle_run_rejects_directory_as_output(tmp_path, registry):
    with pytest.raises(ConfigurationError):
        ExperimentHandler(registry=registry).handle_run(_params(tmp_path, out=str(tmp_path)))


# 2. Batches
def test_build_runs(tmp_path):
    runs = ParallelHandler().build_runs(
        {"experiments": "lshape-const", "modes": ["uniform"], "degrees": [0, 1], "out_dir": str(tmp_path), "max_levels": 2}
    )
    assert [r["job_name"] for r in runs] == ["lshape-const_uniform_k0", "lshape-const_uniform_k1"]
    assert all(r["max_levels"] == 2 for r in runs)
    assert runs[1]["out"] == str(tmp_path / "lshape-const_uniform_k1.csv")


def test_build_runs_defaults_to_every_combination(tmp_path):
    runs = ParallelHandler().build_runs({"out_dir": str(tmp_path)})
    assert len(runs) == 4 * 2 * 3


def test_handle_batch_collects_failures(tmp_path):
    def fake_run(params):
        if params["k"] == 1:
            raise SolverError("diverged")
        return {"title": params["experiment"], "status": "completed", "rate": -0.5, "rate_quantity": "lambda"}

    handler = ParallelHandler(max_workers=2, executor_class=concurrent.futures.ThreadPoolExecutor)
    with mock.patch("helmholtz_mixed_fem.handler.parallel._run_single", side_effect=fake_run) as run_single:
        results = handler.handle_batch(
            {"experiments": ["lshape-const"], "modes": ["uniform"], "degrees": [0, 1], "out_dir": str(tmp_path)}
        )
    assert run_single.call_count == 2
    assert "job_name" not in run_single.call_args_list[0].args[0]
    assert results["lshape-const_uniform_k0"]["status"] == "completed"
    assert results["lshape-const_uniform_k1"] == {
        "title": "lshape-const_uniform_k1",
        "status": "failed",
        "error_message": "diverged",
    }
    statuses = {run["job_name"]: run["status"] for run in handler.runs}
    assert statuses == {"lshape-const_uniform_k0": "completed", "lshape-const_uniform_k1": "failed"}


def test_handle_batch_runs_real_jobs_in_threads(tmp_path):
    handler = ParallelHandler(max_workers=2, executor_class=concurrent.futures.ThreadPoolExecutor)
    results = handler.handle_batch(
        {"experiments": ["lshape-const"], "modes": ["uniform"], "degrees": [0], "out_dir": str(tmp_path), "max_levels": 2}
    )
    summary = results["lshape-const_uniform_k0"]
    assert summary["status"] == "completed"
    assert summary["levels"] == 2
    assert (tmp_path / "lshape-const_uniform_k0.csv").exists()
