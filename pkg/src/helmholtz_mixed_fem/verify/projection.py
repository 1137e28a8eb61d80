"""
Projection property: Pi_k grad v is orthogonal to Curl Y_h for conforming v
with zero trace, also when v lives on a finer nested mesh.
"""

import logging

import numpy as np

from ..exceptions import VerificationError
from ..spaces import build_xh, build_yh, derivative_matrix, project_between

logger = logging.getLogger(__name__)

PROJECTION_TOLERANCE = 1e-12


def random_conforming_function(mesh, k, rng=None):
    """
    Random P_{k+1} function vanishing on the boundary, as Y_h coefficients.

    Args:
        mesh: Triangulation
        k: Degree of X_h (the function has degree k + 1)
        rng: numpy Generator or seed
    """
    rng = np.random.default_rng(rng)
    yh = build_yh(mesh, k)
    coeffs = rng.standard_normal(yh.n_dofs)
    coeffs[yh.boundary_dofs()] = 0.0
    return coeffs


def check_projection_property(mesh, k, v=None, rng=None, coarse=None):
    """
    Relative orthogonality residual of Pi_k grad v against Curl Y_h.

    residual = max_beta |(Pi grad v, Curl beta)| / (||grad v|| ||Curl beta||)

    Args:
        mesh: Mesh on which v lives
        k: Degree of X_h
        v: Y_h coefficients of v on ``mesh`` (random when None)
        rng: Seed or Generator for the random function
        coarse: Optional coarser mesh refined by ``mesh``; the projection and
            the Curl test functions are then taken on ``coarse``

    Returns:
        float: The residual (0 for v = 0)
    """
    yh = build_yh(mesh, k)
    xh = build_xh(mesh, k)
    if v is None:
        v = random_conforming_function(mesh, k, rng)
    v = yh.check(v)
    if np.any(v[yh.boundary_dofs()] != 0.0):
        raise VerificationError("Projection check needs a function with zero boundary values")

    gradient = derivative_matrix(yh, xh, kind="grad") @ v
    gradient_norm = xh.norm(gradient)
    if gradient_norm == 0.0:
        return 0.0

    target_xh, target_yh = xh, yh
    projected = gradient
    if coarse is not None:
        target_xh = build_xh(coarse, k)
        target_yh = build_yh(coarse, k)
        projected = project_between(xh, gradient, target_xh)

    curls = derivative_matrix(target_yh, target_xh, kind="curl")
    inner = np.abs(curls.T @ projected)
    curl_norms = np.sqrt(np.asarray(curls.multiply(curls).sum(axis=0))).ravel()
    residual = float(np.max(inner / (gradient_norm * curl_norms)))
    logger.debug(f"Projection residual k={k} on {mesh.n_triangles} triangles: {residual:.2e}")
    return residual
