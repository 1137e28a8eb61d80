"""
Registry package for looking up experiments and tracking runs.
"""
from .registry import ExperimentRegistry, get_registry

__all__ = ["ExperimentRegistry", "get_registry"]
