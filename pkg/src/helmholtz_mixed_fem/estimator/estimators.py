"""
Residual error estimator lambda and data oscillation mu.

    lambda^2(T) = ||h_T curl_NC p_h||_T^2 + h_T sum_{E in E(T)} ||[p_h]_E . tau_E||_E^2
    mu^2(T)     = ||g - Pi_k g||_T^2,  g = phi - grad u_D

h_T is the square root of the area. An interior edge contributes to both
neighbours, each time weighted by that neighbour's h_T. On boundary edges the
jump is the tangential trace of p_h - grad u_D.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import EstimatorError
from ..spaces import default_mu_quad_degree, edge_rule, reference_basis, triangle_rule

logger = logging.getLogger(__name__)

# triangles per batch of oscillation integrals; bounds the (n, nq, 2) work arrays
MU_CHUNK = 8192


@dataclass(frozen=True)
class EstimatorReport:
    """Per-triangle estimator contributions on one mesh."""

    mesh: object
    k: int
    lambda2: np.ndarray
    mu2: np.ndarray

    @property
    def lambda2_total(self):
        return float(self.lambda2.sum())

    @property
    def mu2_total(self):
        return float(self.mu2.sum())

    @property
    def lam(self):
        return float(np.sqrt(self.lambda2_total))

    @property
    def mu(self):
        return float(np.sqrt(self.mu2_total))

    @property
    def total(self):
        """sqrt(lambda^2 + mu^2)."""
        return float(np.sqrt(self.lambda2_total + self.mu2_total))


def _check_solution(mesh, k, solution):
    if solution.mesh is not mesh and solution.mesh.uid != mesh.uid:
        raise EstimatorError("Solution was computed on a different mesh")
    if solution.k != k:
        raise EstimatorError(f"Solution has degree k={solution.k}, estimator asked for k={k}")


def edge_jump_terms(mesh, xh, p, grad_uD=None):
    """
    ||[p_h]_E . tau_E||_E^2 for every edge.

    Returns:
        np.ndarray: (n_edges,)
    """
    t, w = edge_rule(xh.k)
    start = mesh.vertices[mesh.edges[:, 0]]
    end = mesh.vertices[mesh.edges[:, 1]]
    points = start[:, None, :] + t[None, :, None] * (end - start)[:, None, :]

    plus = mesh.edge_tris[:, 0]
    jump = xh.evaluate_at(p, plus, xh.reference_coordinates(plus, points))

    interior = ~mesh.boundary
    minus = mesh.edge_tris[interior, 1]
    jump[interior] -= xh.evaluate_at(p, minus, xh.reference_coordinates(minus, points[interior]))
    if grad_uD is not None:
        jump[mesh.boundary] -= grad_uD(points[mesh.boundary])

    tangential = np.einsum("egc,ec->eg", jump, mesh.tangents)
    return mesh.edge_lengths * (tangential ** 2 @ w)


def estimate_lambda(mesh, k, solution, grad_uD=None, quad_degree=None):
    """
    Per-triangle lambda^2.

    Raises:
        EstimatorError: If the solution does not belong to (mesh, k)
    """
    _check_solution(mesh, k, solution)
    xh = solution.xh
    points, weights = triangle_rule(quad_degree or max(2 * k, 1))
    curl = xh.curl_nc(solution.p, points)
    volume = mesh.areas * xh.jacobians * (curl ** 2 @ weights)

    edge_terms = edge_jump_terms(mesh, xh, solution.p, grad_uD)
    lambda2 = volume + mesh.h * edge_terms[mesh.tri_edges].sum(axis=1)
    return lambda2


def element_mu2(corners, k, g, quad_degree=None):
    """
    ||g - Pi_k g||^2 on each triangle given by its corners.

    Depends on nothing but the triangle geometry, so values can be reused for
    triangles shared by several meshes of one forest.

    Args:
        corners: (n, 3, 2) vertex coordinates
        k: Degree of the projection
        g: VectorField
        quad_degree: Exactness degree (default max(2k+2, 20))

    Returns:
        np.ndarray: (n,)
    """
    corners = np.asarray(corners, dtype=float)
    if len(corners) > MU_CHUNK:
        return np.concatenate(
            [element_mu2(corners[i:i + MU_CHUNK], k, g, quad_degree) for i in range(0, len(corners), MU_CHUNK)]
        )
    points, weights = triangle_rule(quad_degree or default_mu_quad_degree(k))
    origin = corners[:, 0, :]
    B = np.stack([corners[:, 1, :] - origin, corners[:, 2, :] - origin], axis=-1)
    values = g(origin[:, None, :] + np.einsum("tij,qj->tqi", B, points))
    phi = reference_basis(k, points)
    # orthonormal basis: the projection does not see the affine scaling
    coefficients = np.einsum("tqc,q,ql->tcl", values, weights, phi)
    residual = values - np.einsum("tcl,ql->tqc", coefficients, phi)
    return np.abs(np.linalg.det(B)) * (np.sum(residual ** 2, axis=2) @ weights)


def estimate_mu(mesh, k, phi, grad_uD=None, quad_degree=None):
    """Per-triangle mu^2 = ||g - Pi_k g||^2 with g = phi - grad u_D."""
    g = phi if grad_uD is None else phi - grad_uD
    return element_mu2(mesh.vertices[mesh.triangles], k, g, quad_degree)


def estimate(mesh, k, solution, phi, grad_uD=None, quad_degree=None, mu_quad_degree=None, mu2=None):
    """
    Both estimators in one report.

    ``quad_degree`` applies to lambda, ``mu_quad_degree`` to mu; precomputed
    per-triangle ``mu2`` skips the oscillation integrals.
    """
    if mu2 is None:
        mu2 = estimate_mu(mesh, k, phi, grad_uD, mu_quad_degree)
    report = EstimatorReport(
        mesh=mesh,
        k=k,
        lambda2=estimate_lambda(mesh, k, solution, grad_uD, quad_degree),
        mu2=np.asarray(mu2, dtype=float),
    )
    logger.debug(f"Estimated lambda={report.lam:.4e}, mu={report.mu:.4e} on {mesh.n_triangles} triangles")
    return report
