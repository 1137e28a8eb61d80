"""
Mesh package: conforming triangulations, newest-vertex bisection, red
refinement, overlay, square partitions and the plain-text mesh format.
"""
from .io import format_mesh, parse_mesh, read_mesh, write_mesh
from .refinement import bisect, overlay, red_refine, refine_edges
from .squares import SquarePartition, build_square_partition
from .triangulation import CountsReport, Triangulation, build_initial, validate

__all__ = [
    "CountsReport",
    "SquarePartition",
    "Triangulation",
    "bisect",
    "build_initial",
    "build_square_partition",
    "format_mesh",
    "overlay",
    "parse_mesh",
    "read_mesh",
    "red_refine",
    "refine_edges",
    "validate",
    "write_mesh",
]
