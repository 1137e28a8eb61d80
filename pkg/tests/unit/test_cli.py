import pytest
from unittest import mock

from helmholtz_mixed_fem.cli import cli
from helmholtz_mixed_fem.input.geometry import lshape_mesh
from helmholtz_mixed_fem.mesh import write_mesh
from helmholtz_mixed_fem.verify import VerificationSummary


@pytest.fixture(autouse=True)
def _logging(reset_logging):
    yield


# 1. run
def test_run_prints_rate_last(runner, tmp_path):
    out = tmp_path / "lc.csv"
    result = runner.invoke(
        cli,
        ["-q", "run", "--experiment", "lshape-const", "--mode", "uniform", "--k", "0",
         "--max-levels", "3", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert lines[-1].startswith("rate lambda vs ndof: ")
    float(lines[-1].split(":")[1])
    assert out.exists()


def test_run_unknown_experiment(runner, tmp_path):
    result = runner.invoke(
        cli,
        ["-q", "run", "--experiment", "circle", "--mode", "uniform", "--k", "0", "--out", str(tmp_path / "x.csv")],
    )
    assert result.exit_code != 0
    assert "Unknown experiment" in result.output


def test_run_rejects_degree_out_of_range(runner, tmp_path):
    result = runner.invoke(
        cli,
        ["-q", "run", "--experiment", "lshape-const", "--mode", "uniform", "--k", "3", "--out", str(tmp_path / "x.csv")],
    )
    assert result.exit_code == 2


def test_run_rejects_invalid_theta(runner, tmp_path):
    result = runner.invoke(
        cli,
        ["-q", "run", "--experiment", "lshape-const", "--mode", "adaptive", "--k", "0",
         "--theta", "1.5", "--out", str(tmp_path / "x.csv")],
    )
    assert result.exit_code == 1
    assert "theta" in result.output


# 2. batch
def test_batch_reports_each_run(runner, tmp_path):
    results = {
        "lshape-const_uniform_k0": {"status": "completed", "rate": -0.5, "rate_quantity": "lambda"},
        "lshape-const_uniform_k1": {"status": "failed", "error_message": "diverged"},
    }
    with mock.patch("helmholtz_mixed_fem.cli.main.ParallelHandler") as handler_class:
        handler_class.return_value.handle_batch.return_value = results
        result = runner.invoke(
            cli, ["-q", "batch", "--experiments", "lshape-const", "--modes", "uniform", "--degrees", "0",
                  "--degrees", "1", "--out-dir", str(tmp_path), "--workers", "2"]
        )
    assert result.exit_code == 1
    assert "lshape-const_uniform_k0: rate lambda -0.5000" in result.output
    assert "lshape-const_uniform_k1: failed (diverged)" in result.output
    handler_class.assert_called_once_with(max_workers=2)
    params = handler_class.return_value.handle_batch.call_args.args[0]
    assert params["degrees"] == [0, 1]
    assert params["experiments"] == ["lshape-const"]


# 3. verify
def test_verify_reports_failures(runner):
    summary = VerificationSummary()
    summary.add("cr-equivalence lshape+0", 1e-3, 1e-9)
    summary.add("projection k=0", 1e-15, 1e-12)
    with mock.patch("helmholtz_mixed_fem.cli.main.verify_all", return_value=summary) as verify_all:
        result = runner.invoke(cli, ["-q", "verify", "--fault-injection", "--seed", "3"])
    verify_all.assert_called_once_with(fault_injection=True, seed=3)
    assert result.exit_code == 1
    assert "FAIL cr-equivalence lshape+0" in result.output
    assert "PASS projection k=0" in result.output
    assert result.output.strip().splitlines()[-1] == "1/2 checks passed"


def test_verify_passes(runner):
    summary = VerificationSummary()
    summary.add("projection k=0", 0.0, 1e-12)
    with mock.patch("helmholtz_mixed_fem.cli.main.verify_all", return_value=summary):
        result = runner.invoke(cli, ["-q", "verify"])
    assert result.exit_code == 0
    assert "1/1 checks passed" in result.output


# 4. mesh info
def test_mesh_info(runner, tmp_path):
    path = write_mesh(lshape_mesh(), tmp_path / "lshape.mesh")
    result = runner.invoke(cli, ["-q", "mesh", "info", str(path)])
    assert result.exit_code == 0
    assert "n_triangles: 6" in result.output
    assert "n_edges: 13" in result.output
    assert "n_interior_edges: 5" in result.output


def test_mesh_info_malformed_file(runner, tmp_path):
    path = tmp_path / "broken.mesh"
    path.write_text("vertices 1\n0 0\n")
    result = runner.invoke(cli, ["-q", "mesh", "info", str(path)])
    assert result.exit_code == 1
    assert "triangles" in result.output
