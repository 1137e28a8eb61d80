"""
The continuous space Y_h = P_{k+1}(T) with a zero-mean constraint.

Global DOF numbering: vertices first, then (k) nodes per edge ordered from
the lower to the higher endpoint index, then interior nodes triangle by
triangle. The zero-mean constraint is handled by pinning the lowest-index
vertex DOF for the solve and subtracting the mean afterwards.
"""

import logging
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ..exceptions import SpaceError
from ..utils.cache import cached
from .polynomials import dimension, monomial_gradients, monomials
from .quadrature import physical_points, triangle_rule
from .xh import build_xh

logger = logging.getLogger(__name__)

_REFERENCE_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@lru_cache(maxsize=None)
def reference_nodes(m):
    """Equispaced Lagrange nodes of degree m in local order: vertices, edges 0..2, interior."""
    nodes = [p for p in _REFERENCE_VERTICES]
    for j in range(3):
        start = _REFERENCE_VERTICES[(j + 1) % 3]
        end = _REFERENCE_VERTICES[(j + 2) % 3]
        for s in range(1, m):
            nodes.append(start + (s / m) * (end - start))
    for i in range(1, m):
        for j in range(1, m - i):
            nodes.append(np.array([i / m, j / m]))
    nodes = np.array(nodes)
    nodes.setflags(write=False)
    return nodes


@lru_cache(maxsize=None)
def _lagrange_coefficients(m):
    coefficients = np.linalg.inv(monomials(reference_nodes(m), m))
    coefficients.setflags(write=False)
    return coefficients


class YhSpace:
    """
    Continuous Lagrange P_{k+1} space on a triangulation.

    Attributes:
        n_dofs: Number of global nodal DOFs (n_Y)
        ndof: Size of the reduced system, n_Y - 1
        pinned: DOF fixed to zero during the solve
        dofmap: (n_triangles, n_local) global DOF of every local node
    """

    def __init__(self, mesh, k):
        if k < 0:
            raise SpaceError(f"Polynomial degree must be non-negative, got {k}")
        self.mesh = mesh
        self.k = int(k)
        self.degree = self.k + 1
        self.n_local = dimension(self.degree)
        self.per_edge = self.degree - 1
        self.per_triangle = (self.degree - 1) * (self.degree - 2) // 2
        self.n_dofs = (
            mesh.n_vertices + mesh.n_edges * self.per_edge + mesh.n_triangles * self.per_triangle
        )
        self.ndof = self.n_dofs - 1
        self.pinned = int(mesh.triangles.min())
        self.jacobians = 2.0 * mesh.areas
        _, _, self._B_inv = mesh.affine_maps()
        self._coefficients = _lagrange_coefficients(self.degree)
        self.dofmap = self._build_dofmap()

    def __repr__(self):
        return f"YhSpace(k={self.k}, n_dofs={self.n_dofs}, ndof={self.ndof})"

    def _build_dofmap(self):
        mesh = self.mesh
        t = mesh.triangles
        columns = [t]
        edge_offset = mesh.n_vertices
        for j in range(3):
            e = mesh.tri_edges[:, j]
            forward = t[:, (j + 1) % 3] == mesh.edges[e, 0]
            for s in range(self.per_edge):
                position = np.where(forward, s, self.per_edge - 1 - s)
                columns.append((edge_offset + e * self.per_edge + position)[:, None])
        if self.per_triangle:
            interior_offset = edge_offset + mesh.n_edges * self.per_edge
            columns.append(
                interior_offset
                + np.arange(mesh.n_triangles)[:, None] * self.per_triangle
                + np.arange(self.per_triangle)[None, :]
            )
        dofmap = np.hstack(columns).astype(np.int64)
        dofmap.setflags(write=False)
        return dofmap

    # nodes -------------------------------------------------------------

    def node_coordinates(self):
        """Physical coordinates of all global DOFs: (n_dofs, 2)."""
        mesh = self.mesh
        coords = np.empty((self.n_dofs, 2))
        coords[: mesh.n_vertices] = mesh.vertices
        start = mesh.vertices[mesh.edges[:, 0]]
        direction = mesh.vertices[mesh.edges[:, 1]] - start
        for s in range(self.per_edge):
            ids = mesh.n_vertices + np.arange(mesh.n_edges) * self.per_edge + s
            coords[ids] = start + ((s + 1) / self.degree) * direction
        if self.per_triangle:
            interior = reference_nodes(self.degree)[self.n_local - self.per_triangle:]
            points = physical_points(mesh, interior)
            coords[self.dofmap[:, self.n_local - self.per_triangle:].ravel()] = points.reshape(-1, 2)
        return coords

    def boundary_dofs(self):
        """Sorted DOFs located on the boundary."""
        mesh = self.mesh
        boundary_edges = np.flatnonzero(mesh.boundary)
        ids = [mesh.edges[boundary_edges].ravel()]
        for s in range(self.per_edge):
            ids.append(mesh.n_vertices + boundary_edges * self.per_edge + s)
        return np.unique(np.concatenate(ids))

    def interpolate(self, field):
        """Nodal interpolation of a scalar field."""
        return np.asarray(field(self.node_coordinates()), dtype=float)

    # basis ---------------------------------------------------------------

    def basis_values(self, ref_points):
        return monomials(ref_points, self.degree) @ self._coefficients

    def basis_gradients(self, ref_points):
        return np.einsum(
            "...mi,ml->...li", monomial_gradients(ref_points, self.degree), self._coefficients
        )

    def physical_gradients(self, ref_points):
        """Gradients of the local basis in every triangle: (n_triangles, nq, n_local, 2)."""
        return np.einsum("tji,qlj->tqli", self._B_inv, self.basis_gradients(ref_points))

    def check(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.n_dofs,):
            raise SpaceError(f"Coefficient vector has shape {coeffs.shape}, expected ({self.n_dofs},)")
        return coeffs

    def evaluate(self, coeffs, ref_points):
        local = self.check(coeffs)[self.dofmap]
        return local @ self.basis_values(ref_points).T

    def gradient_values(self, coeffs, ref_points):
        local = self.check(coeffs)[self.dofmap]
        return np.einsum("tl,tqli->tqi", local, self.physical_gradients(ref_points))

    def curl_values(self, coeffs, ref_points):
        """Curl beta = (d beta/dy, -d beta/dx) at reference points: (n_triangles, nq, 2)."""
        grad = self.gradient_values(coeffs, ref_points)
        return np.stack([grad[..., 1], -grad[..., 0]], axis=-1)

    def basis_integrals(self):
        """Integral of every global basis function."""
        points, weights = triangle_rule(max(self.degree, 1))
        local = self.jacobians[:, None] * (weights @ self.basis_values(points))[None, :]
        return np.bincount(self.dofmap.ravel(), weights=local.ravel(), minlength=self.n_dofs)

    def mean(self, coeffs):
        return float(self.basis_integrals() @ self.check(coeffs) / self.mesh.areas.sum())

    def normalize(self, coeffs):
        """Shift to zero mean; Lagrange bases reproduce constants."""
        return self.check(coeffs) - self.mean(coeffs)


@cached("yh")
def build_yh(mesh, k):
    """Y_h(T) = P_{k+1}(T) with the zero-mean constraint, on the given mesh."""
    space = YhSpace(mesh, k)
    logger.debug(f"Built Y_h with k={k}: n_Y {space.n_dofs}, ndof {space.ndof}")
    return space


def curl_of(yh, coeffs, xh=None):
    """Exact representation of Curl beta_h in X_h (flat coefficients)."""
    if xh is None:
        xh = build_xh(yh.mesh, yh.k)
    if xh.mesh is not yh.mesh or xh.k != yh.k:
        raise SpaceError("curl_of needs X_h and Y_h on the same mesh with the same k")
    points, weights = triangle_rule(max(2 * yh.k, 1))
    return xh.project_values(yh.curl_values(coeffs, points), points, weights)


def derivative_matrix(yh, xh, kind="curl"):
    """
    Sparse matrix mapping Y_h coefficients to X_h coefficients of Curl or grad.

    Columns are the X_h coefficients of Curl (or grad) of each global basis function.
    """
    if kind not in ("curl", "grad"):
        raise SpaceError(f"Unknown derivative kind '{kind}'")
    points, weights = triangle_rule(max(2 * yh.k, 1))
    grads = yh.physical_gradients(points)
    if kind == "curl":
        grads = np.stack([grads[..., 1], -grads[..., 0]], axis=-1)
    phi = xh.basis_values(points)
    local = np.einsum("tqac,q,qm->tacm", grads, weights, phi) * np.sqrt(xh.jacobians)[:, None, None, None]

    n_t = yh.mesh.n_triangles
    t = np.arange(n_t)[:, None, None, None]
    c = np.arange(2)[None, None, :, None]
    m = np.arange(xh.n_local)[None, None, None, :]
    rows = np.broadcast_to(t * 2 * xh.n_local + c * xh.n_local + m, local.shape)
    cols = np.broadcast_to(yh.dofmap[:, :, None, None], local.shape)
    matrix = sp.coo_matrix((local.ravel(), (rows.ravel(), cols.ravel())), shape=(xh.dim, yh.n_dofs))
    return matrix.tocsr()
