"""
System package: Curl-Curl assembly and the mixed solve.
"""
from .assembly import SparseSystem, assemble_curl_curl, assemble_rhs, assemble_system
from .solver import DiscreteSolution, solve_linear, solve_mixed

__all__ = [
    "DiscreteSolution",
    "SparseSystem",
    "assemble_curl_curl",
    "assemble_rhs",
    "assemble_system",
    "solve_linear",
    "solve_mixed",
]
