"""
Assembly of the Curl-Curl system on Y_h.

In two dimensions Curl beta is the rotated gradient, so the Curl-Curl
matrix coincides with the Lagrange P_{k+1} stiffness matrix.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..spaces.quadrature import physical_points, triangle_rule

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SparseSystem:
    """Curl-Curl matrix and load vector before pinning."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    pinned: int

    @property
    def free(self):
        mask = np.ones(self.matrix.shape[0], dtype=bool)
        mask[self.pinned] = False
        return mask

    def reduced(self):
        """Matrix and right-hand side with the pinned DOF removed."""
        free = self.free
        return self.matrix[free][:, free].tocsc(), self.rhs[free]


def assemble_curl_curl(yh):
    """Global matrix with entries (Curl beta_j, Curl beta_i)."""
    points, weights = triangle_rule(max(2 * yh.k, 1))
    grads = yh.physical_gradients(points)
    local = np.einsum("q,tqai,tqbi->tab", weights, grads, grads) * yh.jacobians[:, None, None]

    rows = np.broadcast_to(yh.dofmap[:, :, None], local.shape).ravel()
    cols = np.broadcast_to(yh.dofmap[:, None, :], local.shape).ravel()
    matrix = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(yh.n_dofs, yh.n_dofs)).tocsr()
    matrix.sum_duplicates()
    logger.debug(f"Assembled Curl-Curl matrix: {yh.n_dofs} DOFs, {matrix.nnz} nonzeros")
    return matrix


def assemble_rhs(g, yh, quad_degree):
    """Load vector with entries (g, Curl beta_i)."""
    points, weights = triangle_rule(quad_degree)
    values = g(physical_points(yh.mesh, points))
    grads = yh.physical_gradients(points)
    curls = np.stack([grads[..., 1], -grads[..., 0]], axis=-1)
    local = np.einsum("q,tqc,tqlc->tl", weights, values, curls) * yh.jacobians[:, None]
    return np.bincount(yh.dofmap.ravel(), weights=local.ravel(), minlength=yh.n_dofs)


def assemble_system(yh, g, quad_degree):
    return SparseSystem(matrix=assemble_curl_curl(yh), rhs=assemble_rhs(g, yh, quad_degree), pinned=yh.pinned)
