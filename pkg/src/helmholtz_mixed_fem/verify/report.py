"""
Run every structural check on its standard set of meshes.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..input.experiments import lshape_const, singular_alpha
from ..input.geometry import lshape_mesh, refined, unit_square_mesh
from ..mesh import bisect, build_square_partition
from ..spaces import VectorField
from ..system import solve_mixed
from ..utils.log_config import log_execution_time
from .crouzeix_raviart import EQUIVALENCE_TOLERANCE, check_cr_equivalence
from .helmholtz import ORTHOGONALITY_TOLERANCE, check_square_decomposition, check_triangle_decomposition
from .projection import PROJECTION_TOLERANCE, check_projection_property

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-9
PROJECTION_SAMPLES = 20
# red refinements of the L-shape: 6, 1536, 6144 and 24576 triangles
CR_LEVELS = (0, 4, 5, 6)
CORNER_ROUNDS = 25


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class VerificationSummary:
    checks: list = field(default_factory=list)

    def add(self, name, value, tolerance, passed=None, detail=""):
        if passed is None:
            passed = bool(value <= tolerance)
        result = CheckResult(name=name, value=float(value), tolerance=tolerance, passed=passed, detail=detail)
        self.checks.append(result)
        level = logging.INFO if passed else logging.ERROR
        logger.log(level, f"{'PASS' if passed else 'FAIL'} {name}: {value:.3e} (tolerance {tolerance:.0e}) {detail}")
        return result

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def as_rows(self):
        return [
            {"check": c.name, "value": c.value, "tolerance": c.tolerance, "passed": c.passed, "detail": c.detail}
            for c in self.checks
        ]


def _uniform_bisections(mesh, times):
    for _ in range(times):
        mesh = bisect(mesh, range(mesh.n_triangles))
    return mesh


def _corner_graded(mesh, rounds):
    """Repeatedly bisect the triangles at the reentrant corner (the origin)."""
    for _ in range(rounds):
        at_corner = np.all(mesh.vertices[mesh.triangles] == 0.0, axis=2).any(axis=1)
        mesh = bisect(mesh, np.flatnonzero(at_corner))
    return mesh


def check_structural_identities(mesh, k, phi):
    """
    Relative defects of ||p_h||^2 + ||Curl alpha_h||^2 = ||Pi_k phi||^2 and of p_h + Curl alpha_h = Pi_k phi.
    """
    solution = solve_mixed(mesh, k, phi)
    xh = solution.xh
    reference = xh.norm(solution.pi_phi)
    pythagoras = abs(xh.norm(solution.p) ** 2 + xh.norm(solution.curl_alpha) ** 2 - reference ** 2)
    first_equation = xh.norm(solution.p + solution.curl_alpha - solution.pi_phi)
    scale = max(reference, np.finfo(float).tiny)
    return pythagoras / scale ** 2, first_equation / scale


@log_execution_time
def verify_all(fault_injection=False, seed=0):
    """
    Run the CR equivalence, projection, decomposition and identity checks.

    Args:
        fault_injection: Perturb p_h in one element in the CR checks, which must then fail
        seed: Seed of the random conforming functions

    Returns:
        VerificationSummary
    """
    summary = VerificationSummary()
    rng = np.random.default_rng(seed)
    initial = lshape_mesh()
    half_position = lshape_const().phi

    for levels in CR_LEVELS:
        mesh = refined(initial, levels)
        deviation = check_cr_equivalence(mesh, half_position, fault_injection=fault_injection)
        summary.add(f"cr-equivalence lshape+{levels}", deviation, EQUIVALENCE_TOLERANCE,
                    detail=f"{mesh.n_triangles} triangles")
    mesh = _corner_graded(refined(initial, 3), CORNER_ROUNDS)
    deviation = check_cr_equivalence(mesh, half_position, fault_injection=fault_injection)
    summary.add("cr-equivalence corner-graded", deviation, EQUIVALENCE_TOLERANCE,
                detail=f"{mesh.n_triangles} triangles")
    deviation = check_cr_equivalence(refined(initial, 1), VectorField.constant((1.0, -2.0)),
                                     fault_injection=fault_injection)
    summary.add("cr-equivalence constant datum", deviation, EQUIVALENCE_TOLERANCE)

    fine = _uniform_bisections(initial, 2)
    for k in (0, 1, 2):
        residual = max(check_projection_property(initial, k, rng=rng) for _ in range(PROJECTION_SAMPLES))
        summary.add(f"projection k={k}", residual, PROJECTION_TOLERANCE, detail=f"{PROJECTION_SAMPLES} samples")
        residual = max(check_projection_property(fine, k, rng=rng, coarse=initial) for _ in range(5))
        summary.add(f"projection two-level k={k}", residual, PROJECTION_TOLERANCE)

    for name, mesh in (("lshape", initial), ("lshape+1", refined(initial, 1)), ("square", unit_square_mesh())):
        report = check_triangle_decomposition(mesh)
        summary.add(f"helmholtz triangles {name}", report.orthogonality, ORTHOGONALITY_TOLERANCE,
                    passed=report.passed, detail=f"{report.dim_total} = {report.dim_gradients} + {report.dim_curls}")

    for nx, ny in ((2, 1), (2, 2), (4, 4)):
        report = check_square_decomposition(build_square_partition(nx, ny))
        summary.add(f"helmholtz squares {nx}x{ny}", report.orthogonality, ORTHOGONALITY_TOLERANCE,
                    passed=report.passed, detail=f"{report.dim_total} = {report.dim_gradients} + {report.dim_curls}")

    phi = singular_alpha().phi
    mesh = refined(initial, 1)
    for k in (0, 1, 2):
        pythagoras, first_equation = check_structural_identities(mesh, k, phi)
        summary.add(f"pythagoras k={k}", pythagoras, IDENTITY_TOLERANCE)
        summary.add(f"first equation k={k}", first_equation, IDENTITY_TOLERANCE)

    logger.info(f"Verification: {len(summary.checks) - len(summary.failures)}/{len(summary.checks)} checks passed")
    return summary
