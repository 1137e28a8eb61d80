"""
Command line interface: ``helmholtz-fem``.

    helmholtz-fem run --experiment lshape-const --mode adaptive --k 0 --out results/lc.csv
    helmholtz-fem batch --experiments lshape-const --modes uniform --degrees 0 1 2
    helmholtz-fem verify [--fault-injection]
    helmholtz-fem mesh info mesh.txt

Logging goes to stderr; stdout carries the results and the last line of
``run`` is the fitted convergence rate.
"""

import logging
import math

import click

from ..adapt.config import SOLVERS
from ..exceptions import HelmholtzFemError
from ..handler import ExperimentHandler, ParallelHandler
from ..mesh import read_mesh, validate
from ..utils.log_config import setup_logging
from ..verify import verify_all

logger = logging.getLogger(__name__)


def _format_rate(value):
    return "nan" if value is None or math.isnan(value) else f"{value:.4f}"


@click.group()
@click.option("-v", "--verbose", count=True, help="Increase console logging (-v info, -vv debug).")
@click.option("-q", "--quiet", is_flag=True, help="Only log errors on the console.")
@click.option("--log-file", type=click.Path(dir_okay=False), default=None, help="Also write a DEBUG log file.")
def cli(verbose, quiet, log_file):
    """Mixed FEM based on the discrete Helmholtz decomposition."""
    level = 0 if quiet else min(1 + verbose, 2)
    setup_logging(verbose_level=level, log_file_name=log_file)


@cli.command()
@click.option("--experiment", required=True, help="lshape-dirichlet, lshape-const, singular-alpha or square-smooth.")
@click.option("--mode", required=True, type=click.Choice(["uniform", "adaptive"]))
@click.option("--k", "k", required=True, type=click.IntRange(0, 2))
@click.option("--theta", type=float, default=None)
@click.option("--kappa", type=float, default=None)
@click.option("--rho", type=float, default=None)
@click.option("--max-ndof", type=int, default=None)
@click.option("--max-levels", type=int, default=None)
@click.option("--quad-degree", type=int, default=None)
@click.option("--solver", type=click.Choice(list(SOLVERS)), default=None)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="CSV output path.")
@click.option("--gnuplot", is_flag=True, help="Also write <out>.dat for gnuplot.")
@click.option("--save-meshes", type=click.Path(file_okay=False), default=None, help="Write every level's mesh here.")
def run(experiment, mode, k, theta, kappa, rho, max_ndof, max_levels, quad_degree, solver, out, gnuplot, save_meshes):
    """Run one experiment and write its convergence history."""
    params = {
        "experiment": experiment,
        "mode": mode,
        "k": k,
        "theta": theta,
        "kappa": kappa,
        "rho": rho,
        "max_ndof": max_ndof,
        "max_levels": max_levels,
        "quad_degree": quad_degree,
        "solver": solver,
        "out": out,
        "gnuplot": gnuplot,
        "save_meshes": save_meshes,
    }
    try:
        result = ExperimentHandler().handle_run(params)
    except HelmholtzFemError as e:
        raise click.ClickException(str(e))

    history = result["history"]
    last = history[-1]
    click.echo(f"{result['title']}: {len(history)} levels, final ndof {last.ndof}, card_T {last.n_triangles}")
    click.echo(f"Results written to {result['csv']}")
    click.echo(f"rate {result['rate_quantity']} vs ndof: {_format_rate(result['rate'])}")


@cli.command()
@click.option("--experiments", multiple=True, help="Experiment ids (repeatable); default all.")
@click.option("--modes", multiple=True, type=click.Choice(["uniform", "adaptive"]))
@click.option("--degrees", multiple=True, type=click.IntRange(0, 2))
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--max-ndof", type=int, default=None)
@click.option("--max-levels", type=int, default=None)
@click.option("--workers", type=int, default=4, show_default=True)
def batch(experiments, modes, degrees, out_dir, max_ndof, max_levels, workers):
    """Run several (experiment, mode, k) combinations in parallel processes."""
    params = {
        "experiments": list(experiments) or None,
        "modes": list(modes) or None,
        "degrees": list(degrees) or None,
        "out_dir": out_dir,
        "max_ndof": max_ndof,
        "max_levels": max_levels,
    }
    results = ParallelHandler(max_workers=workers).handle_batch(params)
    failed = 0
    for name in sorted(results):
        result = results[name]
        if result["status"] == "failed":
            failed += 1
            click.echo(f"{name}: failed ({result['error_message']})")
        else:
            click.echo(f"{name}: rate {result['rate_quantity']} {_format_rate(result['rate'])}")
    if failed:
        raise click.ClickException(f"{failed} of {len(results)} runs failed")


@cli.command()
@click.option("--fault-injection", is_flag=True, help="Perturb p_h in one element; the CR checks must fail.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def verify(ctx, fault_injection, seed):
    """Run the structural verification checks."""
    try:
        summary = verify_all(fault_injection=fault_injection, seed=seed)
    except HelmholtzFemError as e:
        raise click.ClickException(str(e))
    for check in summary.checks:
        status = "PASS" if check.passed else "FAIL"
        click.echo(f"{status} {check.name}: {check.value:.3e} (tolerance {check.tolerance:.0e}) {check.detail}".rstrip())
    click.echo(f"{len(summary.checks) - len(summary.failures)}/{len(summary.checks)} checks passed")
    if not summary.passed:
        ctx.exit(1)


@cli.group()
def mesh():
    """Mesh utilities."""


@mesh.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def info(path):
    """Print the counts of a mesh file."""
    try:
        counts = validate(read_mesh(path))
    except HelmholtzFemError as e:
        raise click.ClickException(str(e))
    for key, value in counts.as_dict().items():
        click.echo(f"{key}: {value:.4f}" if isinstance(value, float) else f"{key}: {value}")


if __name__ == "__main__":
    cli()
