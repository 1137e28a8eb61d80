"""
Discrete Helmholtz decompositions of the lowest-order flux spaces.

Triangles:  P_0(T; R^2) = grad_NC CR^1_0(T) + Curl(P_1(T) cap Y)
Squares:    X_1^rect(T) = grad_NC V_NC^rot(T) + Curl V_Q1(T)

Both checks build explicit bases of the two summands as weighted coefficient
columns (so that plain dot products are L2 inner products), then verify the
dimension count, the orthogonality of the two families and full joint rank.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..exceptions import VerificationError
from ..mesh import validate
from ..spaces.quadrature import gauss_legendre
from .crouzeix_raviart import build_cr

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DecompositionReport:
    """Outcome of a decomposition check."""

    name: str
    dim_total: int
    dim_gradients: int
    dim_curls: int
    orthogonality: float
    rank: int

    @property
    def dimension_identity(self):
        return self.dim_total == self.dim_gradients + self.dim_curls

    @property
    def passed(self):
        return (
            self.dimension_identity
            and self.orthogonality <= ORTHOGONALITY_TOLERANCE
            and self.rank == self.dim_total
        )


def _report(name, dim_total, gradients, curls):
    def normalized(columns):
        norms = np.linalg.norm(columns, axis=0)
        return columns / np.where(norms > 0.0, norms, 1.0)

    a = normalized(gradients)
    b = normalized(curls)
    orthogonality = float(np.max(np.abs(a.T @ b))) if a.size and b.size else 0.0
    rank = int(np.linalg.matrix_rank(np.hstack([a, b])))
    report = DecompositionReport(
        name=name,
        dim_total=dim_total,
        dim_gradients=gradients.shape[1],
        dim_curls=curls.shape[1],
        orthogonality=orthogonality,
        rank=rank,
    )
    logger.debug(
        f"{name}: {dim_total} = {report.dim_gradients} + {report.dim_curls}, "
        f"orthogonality {orthogonality:.2e}, rank {rank}"
    )
    return report


# ----------------------------------------------------------------------
# triangles

def check_triangle_decomposition(mesh):
    """
    Verify P_0(T; R^2) = grad_NC CR^1_0(T) (+) Curl(P_1(T) cap Y).

    Columns hold sqrt(|T|) times the constant value on every triangle.
    """
    counts = validate(mesh)
    n_t = mesh.n_triangles
    weights = np.sqrt(mesh.areas)[:, None]

    cr = build_cr(mesh)
    gradients = np.zeros((n_t, 2, cr.dim))
    for j in range(3):
        dofs = cr.local_dofs[:, j]
        rows = np.flatnonzero(dofs >= 0)
        gradients[rows, :, dofs[rows]] = cr.gradients[rows, j] * weights[rows]

    # P1 hat functions: the CR gradient of edge j is -2 grad(lambda_j), Curl rotates it
    curls = np.zeros((n_t, 2, counts.n_vertices))
    for j in range(3):
        grad_lambda = -0.5 * cr.gradients[:, j]
        curl = np.column_stack([grad_lambda[:, 1], -grad_lambda[:, 0]]) * weights
        np.add.at(curls, (np.arange(n_t), slice(None), mesh.triangles[:, j]), curl)
    # The hats sum to one, so dropping one vertex leaves a basis of Curl P_1
    curls = curls[:, :, :-1]

    return _report(
        f"triangles ({n_t})",
        2 * n_t,
        gradients.reshape(2 * n_t, -1),
        curls.reshape(2 * n_t, -1),
    )


# ----------------------------------------------------------------------
# squares

# X_1^rect on a square cell in local coordinates (X, Y) in [0, 1]^2:
# e1 = (1, 0), e2 = (0, 1), e3 = (-X, Y)
_CELL_GRAM = np.array(
    [
        [1.0, 0.0, -0.5],
        [0.0, 1.0, 0.5],
        [-0.5, 0.5, 2.0 / 3.0],
    ]
)
_CELL_FACTOR = np.linalg.cholesky(_CELL_GRAM).T

_REFERENCE_CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


@lru_cache(maxsize=None)
def _rotated_coefficients():
    """
    Rannacher-Turek basis on [0,1]^2 in span{1, X, Y, X^2 - Y^2}.

    Column e is the function with integral mean 1 on local edge e (bottom,
    right, top, left) and 0 on the others.
    """
    t, w = gauss_legendre(3)
    means = np.empty((4, 4))
    for e in range(4):
        start = _REFERENCE_CORNERS[e]
        end = _REFERENCE_CORNERS[(e + 1) % 4]
        X = start[0] + t * (end[0] - start[0])
        Y = start[1] + t * (end[1] - start[1])
        monomials = np.stack([np.ones_like(X), X, Y, X ** 2 - Y ** 2], axis=1)
        means[e] = w @ monomials
    return np.linalg.inv(means)


@lru_cache(maxsize=None)
def _bilinear_coefficients():
    """Nodal bilinear basis in span{1, X, Y, XY}; column i belongs to corner i."""
    X, Y = _REFERENCE_CORNERS[:, 0], _REFERENCE_CORNERS[:, 1]
    return np.linalg.inv(np.column_stack([np.ones(4), X, Y, X * Y]))


def check_square_decomposition(sq):
    """
    Verify X_1^rect(T) = grad_NC V_NC^rot(T) (+) Curl V_Q1(T) on a square partition.

    Raises:
        VerificationError: If the cells are not squares
    """
    if not sq.is_square:
        raise VerificationError(
            f"Cells of size {sq.hx} x {sq.hy} are not squares; the decomposition is only checked on squares"
        )
    sq.validate()
    n_c = sq.n_cells
    h = sq.hx

    # grad(a + bX + cY + d(X^2 - Y^2)) = b e1 + c e2 - 2d e3
    C = _rotated_coefficients()
    rotated_local = np.stack([C[1], C[2], -2.0 * C[3]]) / h
    interior = ~sq.boundary
    dof_of_edge = np.full(sq.n_edges, -1, dtype=np.int64)
    dof_of_edge[interior] = np.arange(np.count_nonzero(interior))
    gradients = np.zeros((n_c, 3, int(np.count_nonzero(interior))))
    for e in range(4):
        dofs = dof_of_edge[sq.cell_edges[:, e]]
        rows = np.flatnonzero(dofs >= 0)
        gradients[rows, :, dofs[rows]] = rotated_local[:, e]

    # Curl(a + bX + cY + dXY) = c e1 - b e2 - d e3
    B = _bilinear_coefficients()
    bilinear_local = np.stack([B[2], -B[1], -B[3]]) / h
    curls = np.zeros((n_c, 3, sq.n_vertices))
    for i in range(4):
        np.add.at(curls, (np.arange(n_c), slice(None), sq.cells[:, i]), bilinear_local[:, i])
    curls = curls[:, :, :-1]

    # Weight by the Cholesky factor of the cell Gram matrix (times h for the cell area)
    gradients = np.einsum("ij,cjn->cin", _CELL_FACTOR, gradients) * h
    curls = np.einsum("ij,cjn->cin", _CELL_FACTOR, curls) * h

    return _report(
        f"squares ({sq.nx}x{sq.ny})",
        3 * n_c,
        gradients.reshape(3 * n_c, -1),
        curls.reshape(3 * n_c, -1),
    )
