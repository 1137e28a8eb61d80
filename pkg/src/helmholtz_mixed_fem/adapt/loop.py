"""
Adaptive loop with separate marking and the uniform reference loop.

Each level runs Solve, Estimate and then branches: if mu^2 <= kappa lambda^2
the Doerfler set of lambda is bisected, otherwise the data-approximation
refinement is overlaid with the current mesh.
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from ..estimator import curl_error, element_mu2, estimate, exact_error
from ..exceptions import DataApproximationError
from ..mesh import bisect, overlay, red_refine
from ..spaces import default_mu_quad_degree, default_quad_degree
from ..system import solve_mixed
from ..utils.log_config import log_execution_time
from .marking import data_mark, doerfler_mark

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AfemRecord:
    """
    Summary of one level.

    Attributes:
        level: Level index, starting at 0
        ndof: Unknowns of the reduced system
        n_triangles: card(T)
        lam, mu: Global estimators
        error: ||p - p_h|| or NaN without an exact solution
        curl_error: ||Curl(alpha - alpha_h)|| or NaN
        branch: "doerfler" or "data" (adaptive), "uniform" otherwise
    """

    level: int
    ndof: int
    n_triangles: int
    lam: float
    mu: float
    error: float = math.nan
    curl_error: float = math.nan
    branch: str = "doerfler"

    @property
    def estimator(self):
        return math.sqrt(self.lam ** 2 + self.mu ** 2)

    @property
    def efficiency(self):
        """sqrt(lambda^2 + mu^2) / error, NaN when the error is unknown or zero."""
        if not self.error > 0.0:
            return math.nan
        return self.estimator / self.error

    def as_dict(self):
        row = asdict(self)
        row["efficiency"] = self.efficiency
        return row


def ndof_of(mesh, k):
    """Size of the reduced system on a mesh without building the space."""
    return (
        mesh.n_vertices
        + k * mesh.n_edges
        + (k * (k - 1) // 2) * mesh.n_triangles
        - 1
    )


class OscillationMemo:
    """
    Per-triangle mu^2 remembered by forest key.

    A triangle kept from one mesh to the next gets exactly the same mu^2, so
    mu cannot grow through quadrature noise. The memo starts over when a mesh
    from another forest (red refinement) comes in.
    """

    def __init__(self, k, g, quad_degree):
        self.k = k
        self.g = g
        self.quad_degree = quad_degree
        self._fingerprint = None
        self._values = {}

    def __call__(self, mesh):
        if mesh.fingerprint != self._fingerprint:
            self._fingerprint = mesh.fingerprint
            self._values = {}
        keys = mesh.keys()
        missing = [i for i, key in enumerate(keys) if key not in self._values]
        if missing:
            corners = mesh.vertices[mesh.triangles[missing]]
            fresh = element_mu2(corners, self.k, self.g, self.quad_degree)
            self._values.update(zip((keys[i] for i in missing), fresh.tolist()))
        return np.array([self._values[key] for key in keys])


def _solve_and_estimate(mesh, config, experiment, quad_degree, mu_fn):
    solution = solve_mixed(
        mesh,
        config.k,
        experiment.phi,
        experiment.grad_uD,
        quad_degree=quad_degree,
        solver=config.solver,
        cg_rtol=config.cg_rtol,
        cg_maxiter_factor=config.cg_maxiter_factor,
    )
    report = estimate(
        mesh, config.k, solution, experiment.phi, experiment.grad_uD, quad_degree=quad_degree, mu2=mu_fn(mesh)
    )
    error = math.nan
    if experiment.p_exact is not None:
        error = exact_error(solution, experiment.p_exact, quad_degree=quad_degree)
    curl = math.nan
    if experiment.curl_alpha_exact is not None:
        curl = curl_error(solution, experiment.curl_alpha_exact, quad_degree=quad_degree)
    return solution, report, error, curl


def _log_level(record):
    error = f", error {record.error:.4e}" if not math.isnan(record.error) else ""
    logger.info(
        f"Level {record.level}: ndof {record.ndof}, card_T {record.n_triangles}, "
        f"lambda {record.lam:.4e}, mu {record.mu:.4e}{error}, branch {record.branch}"
    )


def _data_refinement(mesh, report, config, mu_fn):
    start = mesh.initial if config.data_mark_from == "initial" else mesh
    target = data_mark(
        mesh, report.mu2, config.rho, mu_fn, start=start, max_rounds=config.data_mark_max_rounds
    )
    refined = overlay(mesh, target)
    if refined.n_triangles == mesh.n_triangles and start is not mesh:
        logger.debug("Overlay did not refine the current mesh; data marking again from the current mesh")
        refined = data_mark(mesh, report.mu2, config.rho, mu_fn, max_rounds=config.data_mark_max_rounds)
    if refined.n_triangles == mesh.n_triangles:
        raise DataApproximationError("Data refinement left the mesh unchanged")
    return refined


@log_execution_time
def afem_loop(config, experiment, on_level=None):
    """
    Run the adaptive algorithm.

    Args:
        config: AfemConfig
        experiment: ExperimentSpec providing the data and the initial mesh
        on_level: Optional callback ``on_level(record, mesh, solution, report)``

    Returns:
        list: AfemRecord per level, ndof strictly increasing
    """
    k = config.k
    quad_degree = config.quad_degree or default_quad_degree(k)

    mu_fn = OscillationMemo(k, experiment.oscillation_datum, config.mu_quad_degree or default_mu_quad_degree(k))

    mesh = experiment.initial_mesh()
    history = []
    for level in range(config.max_levels):
        solution, report, error, curl = _solve_and_estimate(mesh, config, experiment, quad_degree, mu_fn)
        lambda2, mu2 = report.lambda2_total, report.mu2_total
        data_branch = mu2 > config.kappa * lambda2

        record = AfemRecord(
            level=level,
            ndof=solution.ndof,
            n_triangles=mesh.n_triangles,
            lam=report.lam,
            mu=report.mu,
            error=error,
            curl_error=curl,
            branch="data" if data_branch else "doerfler",
        )
        history.append(record)
        _log_level(record)
        if on_level is not None:
            on_level(record, mesh, solution, report)

        if lambda2 == 0.0 and mu2 == 0.0:
            logger.info("Estimators vanish; stopping")
            break
        if level + 1 >= config.max_levels:
            break

        if data_branch:
            next_mesh = _data_refinement(mesh, report, config, mu_fn)
        else:
            marked = doerfler_mark(report.lambda2, config.theta)
            if marked.size == 0:
                logger.info("Nothing marked; stopping")
                break
            next_mesh = bisect(mesh, marked)

        if ndof_of(next_mesh, k) > config.max_ndof:
            logger.info(f"Next mesh has {ndof_of(next_mesh, k)} unknowns > {config.max_ndof}; stopping")
            break
        mesh = next_mesh
    return history


@log_execution_time
def uniform_loop(config, experiment, on_level=None):
    """Solve and estimate on successive red refinements of the initial mesh."""
    k = config.k
    quad_degree = config.quad_degree or default_quad_degree(k)
    mu_fn = OscillationMemo(k, experiment.oscillation_datum, config.mu_quad_degree or default_mu_quad_degree(k))
    mesh = experiment.initial_mesh()
    history = []
    for level in range(config.max_levels):
        solution, report, error, curl = _solve_and_estimate(mesh, config, experiment, quad_degree, mu_fn)
        record = AfemRecord(
            level=level,
            ndof=solution.ndof,
            n_triangles=mesh.n_triangles,
            lam=report.lam,
            mu=report.mu,
            error=error,
            curl_error=curl,
            branch="uniform",
        )
        history.append(record)
        _log_level(record)
        if on_level is not None:
            on_level(record, mesh, solution, report)

        if level + 1 >= config.max_levels:
            break
        next_mesh = red_refine(mesh)
        if ndof_of(next_mesh, k) > config.max_ndof:
            logger.info(f"Next mesh has {ndof_of(next_mesh, k)} unknowns > {config.max_ndof}; stopping")
            break
        mesh = next_mesh
    return history


def convergence_rate(ndof, values, window):
    """
    Least-squares slope of log(values) against log(ndof) over the last ``window`` levels.

    Levels with non-positive or non-finite values are skipped; NaN is returned
    when fewer than two usable levels remain.
    """
    ndof = np.asarray(ndof, dtype=float)[-window:]
    values = np.asarray(values, dtype=float)[-window:]
    usable = np.isfinite(values) & (values > 0.0) & (ndof > 0.0)
    if np.count_nonzero(usable) < 2 or np.unique(ndof[usable]).size < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(ndof[usable]), np.log(values[usable]), 1)
    return float(slope)


def history_rates(history, window):
    """Fitted rates of every reported quantity."""
    ndof = [r.ndof for r in history]
    return {
        "error": convergence_rate(ndof, [r.error for r in history], window),
        "lambda": convergence_rate(ndof, [r.lam for r in history], window),
        "mu": convergence_rate(ndof, [r.mu for r in history], window),
        "estimator": convergence_rate(ndof, [r.estimator for r in history], window),
        "curl_error": convergence_rate(ndof, [r.curl_error for r in history], window),
    }


def check_quasimonotone(history, tolerance=1e-12):
    """
    Levels at which mu increased.

    Returns:
        list: Levels l + 1 with mu_{l+1} > mu_l + tolerance (empty when monotone)
    """
    return [
        after.level
        for before, after in zip(history, history[1:])
        if after.mu > before.mu + tolerance
    ]
