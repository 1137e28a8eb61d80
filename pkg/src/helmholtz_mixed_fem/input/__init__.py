"""
Input handling package initialization.
"""
from .experiments import EXPERIMENTS, ExperimentSpec
from .geometry import lshape_mesh, reference_triangle_mesh, refined, unit_square_mesh
from .specification import RunSpecification

__all__ = [
    "EXPERIMENTS",
    "ExperimentSpec",
    "RunSpecification",
    "lshape_mesh",
    "reference_triangle_mesh",
    "refined",
    "unit_square_mesh",
]
