"""
Verify package: independent oracles for the structural properties of the scheme.
"""
from .crouzeix_raviart import (
    EQUIVALENCE_TOLERANCE,
    FAULT_SIZE,
    CrSolution,
    CrSpace,
    build_cr,
    check_cr_equivalence,
    cr_solve,
    piecewise_constant_divergence,
)
from .helmholtz import (
    ORTHOGONALITY_TOLERANCE,
    DecompositionReport,
    check_square_decomposition,
    check_triangle_decomposition,
)
from .projection import PROJECTION_TOLERANCE, check_projection_property, random_conforming_function
from .report import CheckResult, VerificationSummary, check_structural_identities, verify_all

__all__ = [
    "EQUIVALENCE_TOLERANCE",
    "FAULT_SIZE",
    "ORTHOGONALITY_TOLERANCE",
    "PROJECTION_TOLERANCE",
    "CheckResult",
    "CrSolution",
    "CrSpace",
    "DecompositionReport",
    "VerificationSummary",
    "build_cr",
    "check_cr_equivalence",
    "check_projection_property",
    "check_square_decomposition",
    "check_structural_identities",
    "check_triangle_decomposition",
    "cr_solve",
    "piecewise_constant_divergence",
    "random_conforming_function",
    "verify_all",
]
