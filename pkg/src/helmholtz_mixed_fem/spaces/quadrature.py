"""
Quadrature on the reference triangle and on edges.

Triangle rules are collapsed Gauss-Legendre products: the square (u, v) in
[0, 1]^2 is mapped onto the reference triangle by xi = u, eta = (1 - u) v.
With n points per direction the rule integrates polynomials of total degree
2n - 2 exactly, and every point lies strictly inside the triangle.
"""

import logging
from functools import lru_cache

import numpy as np

from ..exceptions import QuadratureError

logger = logging.getLogger(__name__)

MAX_DEGREE = 40
# data oscillation integrands are only piecewise smooth (cutoff kinks, corner singularity)
MU_QUAD_DEGREE = 20


def default_quad_degree(k):
    """Default exactness degree for data and error integrals."""
    return max(2 * k + 2, 8)


def default_mu_quad_degree(k):
    """Default exactness degree for the oscillation mu."""
    return max(2 * k + 2, MU_QUAD_DEGREE)


def _check_degree(degree):
    if not isinstance(degree, (int, np.integer)) or degree < 1 or degree > MAX_DEGREE:
        raise QuadratureError(f"Unsupported quadrature degree {degree!r}; expected 1..{MAX_DEGREE}")


@lru_cache(maxsize=None)
def gauss_legendre(n_points):
    """Gauss-Legendre points and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n_points)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def triangle_rule(degree):
    """
    Quadrature rule on the reference triangle (0,0), (1,0), (0,1).

    Args:
        degree: Total polynomial degree to integrate exactly

    Returns:
        tuple: points (nq, 2) and weights (nq,) summing to 1/2

    Raises:
        QuadratureError: For degrees outside 1..MAX_DEGREE
    """
    _check_degree(degree)
    n = (degree + 3) // 2
    t, w = gauss_legendre(n)
    U, V = np.meshgrid(t, t, indexing="ij")
    WU, WV = np.meshgrid(w, w, indexing="ij")
    points = np.column_stack([U.ravel(), ((1.0 - U) * V).ravel()])
    weights = (WU * WV * (1.0 - U)).ravel()
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


def edge_rule(k):
    """Gauss-Legendre rule on [0, 1] for the edge terms of the estimator."""
    n_points = int(np.ceil((2 * k + 2) / 2)) + 2
    return gauss_legendre(n_points)


def physical_points(mesh, ref_points):
    """Map reference points into every triangle: (n_triangles, nq, 2)."""
    a, B, _ = mesh.affine_maps()
    return a[:, None, :] + np.einsum("tij,qj->tqi", B, ref_points)


def integrate(field, mesh, quad_degree, per_element=False):
    """
    Integrate a field over the mesh.

    Args:
        field: Callable mapping an (..., 2) point array to values (...) or (..., d)
        mesh: Triangulation
        quad_degree: Exactness degree of the triangle rule
        per_element: Return one value per triangle instead of the total

    Returns:
        float or np.ndarray: Integral(s); vector fields give a trailing axis
    """
    points, weights = triangle_rule(quad_degree)
    x = physical_points(mesh, points)
    values = np.asarray(field(x), dtype=float)
    jac = 2.0 * mesh.areas
    if values.ndim == 2:
        per = jac * (values @ weights)
    else:
        per = jac[:, None] * np.einsum("tqc,q->tc", values, weights)
    return per if per_element else per.sum(axis=0)
