"""
Crouzeix-Raviart oracle for the lowest-order mixed scheme.

The CR assembly here uses its own barycentric basis table and touches the
mixed solver only through its result, so a systematic error in either code
path shows up as a mismatch.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..exceptions import VerificationError
from ..spaces import physical_points, triangle_rule
from ..system import solve_mixed

logger = logging.getLogger(__name__)

EQUIVALENCE_TOLERANCE = 1e-9
FAULT_SIZE = 1e-3


class CrSpace:
    """
    CR^1_0 on a triangulation: one DOF per interior edge (the midpoint value).

    The local basis function of edge j (opposite vertex j) is 1 - 2 lambda_j.
    """

    def __init__(self, mesh):
        self.mesh = mesh
        interior = ~mesh.boundary
        self.dof_of_edge = np.full(mesh.n_edges, -1, dtype=np.int64)
        self.dof_of_edge[interior] = np.arange(np.count_nonzero(interior))
        self.dim = int(np.count_nonzero(interior))
        self.local_dofs = self.dof_of_edge[mesh.tri_edges]
        self.gradients = self._basis_gradients()

    def _basis_gradients(self):
        """Constant gradients of the three local basis functions: (n_triangles, 3, 2)."""
        z = self.mesh.vertices[self.mesh.triangles]
        area2 = 2.0 * self.mesh.areas
        grads = np.empty((self.mesh.n_triangles, 3, 2))
        for j in range(3):
            d = z[:, (j + 2) % 3] - z[:, (j + 1) % 3]
            grad_lambda = np.column_stack([-d[:, 1], d[:, 0]]) / area2[:, None]
            grads[:, j] = -2.0 * grad_lambda
        return grads

    def stiffness(self):
        local = self.mesh.areas[:, None, None] * np.einsum("tic,tjc->tij", self.gradients, self.gradients)
        rows = np.broadcast_to(self.local_dofs[:, :, None], local.shape)
        cols = np.broadcast_to(self.local_dofs[:, None, :], local.shape)
        keep = (rows >= 0) & (cols >= 0)
        matrix = sp.coo_matrix((local[keep], (rows[keep], cols[keep])), shape=(self.dim, self.dim))
        return matrix.tocsr()

    def load(self, f_values):
        """Load vector for a piecewise constant f given per triangle."""
        local = np.repeat((f_values * self.mesh.areas / 3.0)[:, None], 3, axis=1)
        keep = self.local_dofs >= 0
        return np.bincount(self.local_dofs[keep], weights=local[keep], minlength=self.dim)

    def gradient(self, coeffs):
        """Piecewise gradient of a CR function: (n_triangles, 2)."""
        padded = np.append(np.asarray(coeffs, dtype=float), 0.0)
        local = padded[self.local_dofs]
        return np.einsum("tj,tjc->tc", local, self.gradients)


def build_cr(mesh):
    return CrSpace(mesh)


@dataclass(frozen=True)
class CrSolution:
    coeffs: np.ndarray
    gradient: np.ndarray


def _piecewise_values(mesh, f):
    if callable(f):
        return np.asarray(f(mesh.centroids()), dtype=float)
    values = np.broadcast_to(np.asarray(f, dtype=float), (mesh.n_triangles,))
    return np.array(values)


def cr_solve(mesh, f, dense=False):
    """
    Solve (grad_NC u_CR, grad_NC v_CR) = (f, v_CR) for all v_CR in CR^1_0.

    Args:
        mesh: Triangulation
        f: Per-triangle values, a scalar, or a ScalarField (sampled at centroids)
        dense: Use a dense solve (oracle for small systems)

    Returns:
        CrSolution
    """
    space = build_cr(mesh)
    f_values = _piecewise_values(mesh, f)
    if space.dim == 0:
        return CrSolution(coeffs=np.zeros(0), gradient=np.zeros((mesh.n_triangles, 2)))
    A = space.stiffness()
    b = space.load(f_values)
    if dense:
        coeffs = np.linalg.solve(A.toarray(), b)
    else:
        coeffs = spla.spsolve(sp.csc_matrix(A), b)
    coeffs = np.atleast_1d(coeffs)
    if not np.all(np.isfinite(coeffs)):
        raise VerificationError("Crouzeix-Raviart system is singular")
    return CrSolution(coeffs=coeffs, gradient=space.gradient(coeffs))


def piecewise_constant_divergence(mesh, phi, tolerance=1e-10):
    """
    Per-triangle value of div phi, checking that it is constant on every triangle.

    Raises:
        VerificationError: If phi has no known divergence or it varies inside a triangle
    """
    if phi.divergence is None:
        raise VerificationError(f"Datum {phi.name} has no known divergence")
    points, _ = triangle_rule(4)
    values = phi.divergence(physical_points(mesh, points))
    spread = float(np.max(np.ptp(values, axis=1)))
    scale = max(1.0, float(np.max(np.abs(values))))
    if spread > tolerance * scale:
        raise VerificationError(f"-div phi is not piecewise constant (spread {spread:.2e})")
    return values.mean(axis=1)


def check_cr_equivalence(mesh, phi, quad_degree=None, fault_injection=False):
    """
    Largest elementwise deviation |p_h - grad_NC u_CR| for k = 0.

    Args:
        mesh: Triangulation
        phi: Lowest-order Raviart-Thomas datum with known divergence
        quad_degree: Quadrature degree of the mixed solve
        fault_injection: Perturb p_h in the first triangle by FAULT_SIZE

    Returns:
        float: Maximum Euclidean deviation over all triangles
    """
    f_values = -piecewise_constant_divergence(mesh, phi)
    solution = solve_mixed(mesh, 0, phi, quad_degree=quad_degree)
    centroid = np.array([[1.0 / 3.0, 1.0 / 3.0]])
    p_h = solution.xh.evaluate(solution.p, centroid)[:, 0, :]
    if fault_injection:
        p_h = p_h.copy()
        p_h[0, 0] += FAULT_SIZE
    cr = cr_solve(mesh, f_values)
    deviation = float(np.max(np.linalg.norm(p_h - cr.gradient, axis=1)))
    logger.debug(f"CR equivalence on {mesh.n_triangles} triangles: deviation {deviation:.2e}")
    return deviation
