"""
Handler package initialization.

This package provides the high-level interfaces for running experiments,
both single runs and batches of independent runs.
"""

from .experiment import ExperimentHandler
from .parallel import ParallelHandler

__all__ = [
    "ExperimentHandler",
    "ParallelHandler",
]
