"""
Solve the discrete mixed problem through its Curl-Curl reduction.

Given the datum phi (and optionally the gradient of a Dirichlet lift u_D),
alpha_h in Y_h solves (Curl beta, Curl alpha_h) = (phi - grad u_D, Curl beta)
for all beta in Y_h, and p_h = Pi_k phi - Curl alpha_h holds elementwise.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..exceptions import SolverError
from ..spaces import build_xh, build_yh, curl_of, default_quad_degree
from ..utils.log_config import log_execution_time
from .assembly import assemble_system

logger = logging.getLogger(__name__)

SOLVERS = ("direct", "cg")
RESIDUAL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class DiscreteSolution:
    """
    Discrete pair (p_h, alpha_h) together with the data used to compute it.

    Attributes:
        alpha: Y_h coefficients of alpha_h (zero mean)
        p: X_h coefficients of p_h
        pi_phi: X_h coefficients of Pi_k phi
        curl_alpha: X_h coefficients of Curl alpha_h
        ndof: Size of the reduced linear system
        residual: Relative residual of the linear solve
    """

    mesh: object
    k: int
    xh: object
    yh: object
    alpha: np.ndarray
    p: np.ndarray
    pi_phi: np.ndarray
    curl_alpha: np.ndarray
    ndof: int
    residual: float
    quad_degree: int
    solver: str = "direct"

    def norms(self):
        """L2 norms of p_h, Curl alpha_h and Pi_k phi."""
        return {
            "p": self.xh.norm(self.p),
            "curl_alpha": self.xh.norm(self.curl_alpha),
            "pi_phi": self.xh.norm(self.pi_phi),
        }


def _conjugate_gradient(A, b, rtol, maxiter):
    diagonal = A.diagonal()
    if np.any(diagonal <= 0):
        raise SolverError("Matrix has a non-positive diagonal entry; pinning failed")
    M = spla.LinearOperator(A.shape, matvec=lambda x: x / diagonal)
    try:
        x, info = spla.cg(A, b, rtol=rtol, atol=0.0, maxiter=maxiter, M=M)
    except TypeError:
        # scipy < 1.12 names the relative tolerance 'tol'
        x, info = spla.cg(A, b, tol=rtol, atol=0.0, maxiter=maxiter, M=M)
    if info > 0:
        raise SolverError(f"Conjugate gradient did not converge in {maxiter} iterations")
    if info < 0:
        raise SolverError("Conjugate gradient broke down (illegal input)")
    return x


def solve_linear(A, b, solver="direct", cg_rtol=1e-12, cg_maxiter_factor=10):
    """
    Solve the pinned SPD system.

    Returns:
        tuple: solution vector and relative residual

    Raises:
        SolverError: On a non-finite solution or a relative residual above RESIDUAL_TOLERANCE
    """
    if solver not in SOLVERS:
        raise SolverError(f"Unknown linear solver '{solver}'; choose from {SOLVERS}")
    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return np.zeros_like(b), 0.0

    if solver == "direct":
        x = spla.spsolve(sp.csc_matrix(A), b)
    else:
        x = _conjugate_gradient(A, b, cg_rtol, cg_maxiter_factor * max(A.shape[0], 1))

    if not np.all(np.isfinite(x)):
        raise SolverError("Linear solve produced non-finite values; the system is singular")
    residual = float(np.linalg.norm(A @ x - b) / b_norm)
    if residual > RESIDUAL_TOLERANCE:
        raise SolverError(f"Relative residual {residual:.2e} exceeds {RESIDUAL_TOLERANCE:.0e}")
    return x, residual


@log_execution_time
def solve_mixed(
    mesh, k, phi, grad_uD=None, quad_degree=None, solver="direct", cg_rtol=1e-12, cg_maxiter_factor=10, pinned=None
):
    """
    Compute the discrete solution (p_h, alpha_h).

    Args:
        mesh: Triangulation
        k: Polynomial degree of X_h
        phi: VectorField datum with -div phi = f
        grad_uD: Optional VectorField, gradient of the Dirichlet lift
        quad_degree: Exactness of the data quadrature (default max(2k+2, 8))
        solver: "direct" or "cg"
        pinned: Y_h DOF fixed during the solve (default: the lowest vertex)

    Returns:
        DiscreteSolution

    Raises:
        SolverError: On non-convergence or a singular system
    """
    quad_degree = quad_degree or default_quad_degree(k)
    xh = build_xh(mesh, k)
    yh = build_yh(mesh, k)

    datum = phi if grad_uD is None else phi - grad_uD
    system = assemble_system(yh, datum, quad_degree)
    if pinned is not None:
        system = replace(system, pinned=int(pinned))
    A, b = system.reduced()
    x, residual = solve_linear(A, b, solver=solver, cg_rtol=cg_rtol, cg_maxiter_factor=cg_maxiter_factor)

    alpha = np.zeros(yh.n_dofs)
    alpha[system.free] = x
    alpha = yh.normalize(alpha)

    pi_phi = xh.project(phi, quad_degree)
    curl_alpha = curl_of(yh, alpha, xh)
    p = pi_phi - curl_alpha

    logger.debug(f"Solved mixed system with k={k}: ndof {yh.ndof}, residual {residual:.2e}")
    return DiscreteSolution(
        mesh=mesh,
        k=k,
        xh=xh,
        yh=yh,
        alpha=alpha,
        p=p,
        pi_phi=pi_phi,
        curl_alpha=curl_alpha,
        ndof=yh.ndof,
        residual=residual,
        quad_degree=quad_degree,
        solver=solver,
    )
