"""
Doerfler marking and the data-approximation refinement.
"""

import logging

import numpy as np

from ..exceptions import ConfigurationError, DataApproximationError
from ..mesh import bisect

logger = logging.getLogger(__name__)

STAGNATION_ROUNDS = 3


def doerfler_mark(lambda2, theta):
    """
    Minimal set M with theta * sum(lambda2) <= sum(lambda2[M]).

    Ties are broken by triangle id so the result is reproducible.

    Args:
        lambda2: Per-triangle estimator contributions
        theta: Bulk parameter in (0, 1]

    Returns:
        np.ndarray: Sorted ids of the marked triangles (empty if lambda2 vanishes)
    """
    if not 0.0 < theta <= 1.0:
        raise ConfigurationError(f"theta must lie in (0, 1], got {theta}")
    lambda2 = np.asarray(lambda2, dtype=float)
    if lambda2.size == 0 or not np.any(lambda2 > 0.0):
        return np.empty(0, dtype=np.int64)

    order = np.lexsort((np.arange(lambda2.size), -lambda2))
    cumulative = np.cumsum(lambda2[order])
    target = theta * cumulative[-1]
    # Relative slack keeps theta = 1 from missing the full sum by rounding
    count = int(np.searchsorted(cumulative, target * (1.0 - 1e-14), side="left")) + 1
    marked = order[:count]
    marked = marked[lambda2[marked] > 0.0]
    return np.sort(marked)


def data_mark(mesh, mu2, rho, mu_fn, start=None, max_rounds=60):
    """
    Refine until the data oscillation drops below rho times its current value.

    The candidate mesh starts at ``start`` (the current mesh by default). Each
    round bisects the fewest largest contributions that carry the remaining
    deficit ``mu^2 - rho * sum(mu2)`` and then re-evaluates mu^2, so the
    result stays close to the coarsest mesh meeting the target.

    Args:
        mesh: Current triangulation
        mu2: Per-triangle mu^2 on ``mesh``
        rho: Reduction factor in (0, 1)
        mu_fn: Callable mesh -> per-triangle mu^2
        start: Mesh to refine from, e.g. the initial mesh
        max_rounds: Bisection rounds before giving up

    Returns:
        Triangulation: Admissible mesh with sum(mu_fn(result)) <= rho * sum(mu2)

    Raises:
        DataApproximationError: When mu stops decreasing or rounds run out
    """
    if not 0.0 < rho < 1.0:
        raise ConfigurationError(f"rho must lie in (0, 1), got {rho}")
    target = rho * float(np.sum(mu2))
    if target <= 0.0:
        raise DataApproximationError("Data marking requires a positive oscillation")

    candidate = mesh if start is None else start
    current = np.asarray(mu2, dtype=float) if candidate is mesh else mu_fn(candidate)
    total = float(current.sum())
    stagnant = 0
    for round_number in range(1, max_rounds + 1):
        if total <= target:
            logger.debug(f"Data marking reached mu^2={total:.3e} <= {target:.3e} after {round_number - 1} rounds")
            return candidate
        deficit = min(1.0, (total - target) / total)
        candidate = bisect(candidate, doerfler_mark(current, deficit))
        current = mu_fn(candidate)
        new_total = float(current.sum())
        stagnant = stagnant + 1 if new_total >= total else 0
        if stagnant >= STAGNATION_ROUNDS:
            raise DataApproximationError(
                f"Data oscillation stagnates at mu^2={new_total:.3e} after {round_number} rounds; "
                f"the datum may be too rough"
            )
        total = new_total

    if total <= target:
        return candidate
    raise DataApproximationError(
        f"Data marking did not reach mu^2 <= {target:.3e} within {max_rounds} rounds (mu^2={total:.3e})"
    )
