"""
The broken space X_h = P_k(T; R^2).

Each triangle carries its own orthonormal basis: monomials on the reference
triangle are orthonormalized once, then scaled by 1/sqrt(det B_T). Mass
matrices are therefore identities, L2 inner products are dot products of
coefficient vectors and the elementwise projection is a single quadrature
sweep. Coefficients are laid out as (triangle, component, basis function).
"""

import logging
from functools import lru_cache

import numpy as np

from ..exceptions import SpaceError
from ..utils.cache import cached
from .polynomials import dimension, monomial_gradients, monomials
from .quadrature import physical_points, triangle_rule

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _orthonormal_coefficients(k):
    points, weights = triangle_rule(max(2 * k, 1))
    M = monomials(points, k)
    gram = (M * weights[:, None]).T @ M
    L = np.linalg.cholesky(gram)
    coefficients = np.linalg.inv(L).T
    coefficients.setflags(write=False)
    return coefficients


def reference_basis(k, ref_points):
    """Orthonormal P_k basis of the reference triangle at points (..., 2): (..., n_local)."""
    return monomials(ref_points, k) @ _orthonormal_coefficients(k)


class XhSpace:
    """
    Discontinuous vector-valued P_k space on a triangulation.

    Args:
        mesh: Triangulation
        k: Polynomial degree (>= 0)
    """

    def __init__(self, mesh, k):
        if k < 0:
            raise SpaceError(f"Polynomial degree must be non-negative, got {k}")
        self.mesh = mesh
        self.k = int(k)
        self.n_local = dimension(self.k)
        self.dim = 2 * mesh.n_triangles * self.n_local
        self.jacobians = 2.0 * mesh.areas
        self.scale = 1.0 / np.sqrt(self.jacobians)
        self._origin, _, self._B_inv = mesh.affine_maps()
        self._coefficients = _orthonormal_coefficients(self.k)

    def __repr__(self):
        return f"XhSpace(k={self.k}, dim={self.dim})"

    # reference basis --------------------------------------------------

    def basis_values(self, ref_points):
        """Reference basis at points (..., 2): (..., n_local)."""
        return reference_basis(self.k, ref_points)

    def basis_gradients(self, ref_points):
        """Reference gradients: (..., n_local, 2)."""
        return np.einsum("...mi,ml->...li", monomial_gradients(ref_points, self.k), self._coefficients)

    def reference_coordinates(self, triangles, points):
        """Pull points (n, ng, 2) back into triangles (n,) of this mesh."""
        shifted = points - self._origin[triangles][:, None, :]
        return np.einsum("nij,ngj->ngi", self._B_inv[triangles], shifted)

    # coefficient handling --------------------------------------------

    def reshape(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.size != self.dim:
            raise SpaceError(f"Coefficient vector has size {coeffs.size}, space dimension is {self.dim}")
        return coeffs.reshape(self.mesh.n_triangles, 2, self.n_local)

    def evaluate(self, coeffs, ref_points):
        """Values at the same reference points in every triangle: (n_triangles, nq, 2)."""
        c = self.reshape(coeffs)
        phi = self.basis_values(ref_points)
        return np.einsum("tcl,ql->tqc", c, phi) * self.scale[:, None, None]

    def evaluate_at(self, coeffs, triangles, ref_points):
        """Values at per-row reference points (n, ng, 2) of the given triangles: (n, ng, 2)."""
        c = self.reshape(coeffs)[triangles]
        phi = self.basis_values(ref_points)
        return np.einsum("ncl,ngl->ngc", c, phi) * self.scale[triangles][:, None, None]

    def curl_nc(self, coeffs, ref_points):
        """Elementwise scalar curl d(q2)/dx - d(q1)/dy at reference points: (n_triangles, nq)."""
        c = self.reshape(coeffs)
        grads = np.einsum("tji,qlj->tqli", self._B_inv, self.basis_gradients(ref_points))
        d_q1 = np.einsum("tl,tqli->tqi", c[:, 0, :], grads)
        d_q2 = np.einsum("tl,tqli->tqi", c[:, 1, :], grads)
        return (d_q2[..., 0] - d_q1[..., 1]) * self.scale[:, None]

    def project_values(self, values, ref_points, weights):
        """Elementwise L2 projection of values sampled at a quadrature rule: flat coefficients."""
        phi = self.basis_values(ref_points)
        c = np.einsum("tqc,q,ql->tcl", values, weights, phi) * np.sqrt(self.jacobians)[:, None, None]
        return c.reshape(-1)

    def project(self, field, quad_degree):
        """Pi_k applied to a vector field (l2_project)."""
        points, weights = triangle_rule(quad_degree)
        values = field(physical_points(self.mesh, points))
        return self.project_values(values, points, weights)

    def norm(self, coeffs):
        return float(np.linalg.norm(self.reshape(coeffs)))

    def element_norms2(self, coeffs):
        """Squared L2 norm per triangle."""
        return np.sum(self.reshape(coeffs) ** 2, axis=(1, 2))

    def inner(self, a, b):
        return float(np.dot(self.reshape(a).ravel(), self.reshape(b).ravel()))


@cached("xh")
def build_xh(mesh, k):
    """X_h(T) = P_k(T; R^2) on the given mesh."""
    space = XhSpace(mesh, k)
    logger.debug(f"Built X_h with k={k}: dim {space.dim}")
    return space


def l2_project(field, xh, quad_degree):
    return xh.project(field, quad_degree)


def project_between(fine, coeffs, coarse):
    """
    L2 projection of an element of X_h on a refinement onto X_h of a coarser mesh.

    Args:
        fine: XhSpace on the finer mesh
        coeffs: Coefficients in ``fine``
        coarse: XhSpace on a mesh refined by ``fine.mesh``

    Returns:
        np.ndarray: Flat coefficients in ``coarse``
    """
    parents = fine.mesh.parent_map(coarse.mesh)
    points, weights = triangle_rule(max(fine.k + coarse.k, 1))
    values = fine.evaluate(coeffs, points)
    x = physical_points(fine.mesh, points)
    phi = coarse.basis_values(coarse.reference_coordinates(parents, x))
    contributions = np.einsum("tqc,q,tql->tcl", values, weights, phi)
    contributions *= (fine.jacobians * coarse.scale[parents])[:, None, None]
    projected = np.zeros((coarse.mesh.n_triangles, 2, coarse.n_local))
    np.add.at(projected, parents, contributions)
    return projected.reshape(-1)
