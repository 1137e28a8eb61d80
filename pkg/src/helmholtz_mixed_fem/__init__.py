"""
helmholtz_mixed_fem: a mixed finite element method for the Poisson problem
based on the discrete Helmholtz decomposition, with adaptive mesh refinement.

The flux p = grad u is approximated directly in X_h = P_k(T; R^2); the
reduction to a Curl-Curl problem on Y_h = P_{k+1}(T) gives the unknowns.
"""

import logging

from .handler.experiment import ExperimentHandler
from .handler.parallel import ParallelHandler

__version__ = "0.1.0"

logger = logging.getLogger(__name__)


def run_experiment(input):
    """
    Run one experiment with the provided input parameters.

    This is the main entry point for the package.

    Args:
        input (dict): Dictionary containing run parameters:
            - experiment: lshape-dirichlet, lshape-const, singular-alpha or square-smooth
            - mode: "uniform" or "adaptive"
            - k: Polynomial degree 0, 1 or 2
            - out: CSV output path
            - theta, kappa, rho, max_ndof, max_levels, quad_degree: optional overrides

    Returns:
        dict: Output paths, level history and fitted rates

    Examples:
        result = run_experiment({
            'experiment': 'lshape-const',
            'mode': 'adaptive',
            'k': 1,
            'out': 'results/lshape-const.csv'
        })
    """
    try:
        return ExperimentHandler().handle_run(input)
    except Exception as e:
        logger.error(f"Error in experiment execution: {e}")
        raise


def run_batch(input, max_workers=4):
    """Run several experiments in parallel; see ParallelHandler.build_runs for the keys."""
    return ParallelHandler(max_workers=max_workers).handle_batch(input)
