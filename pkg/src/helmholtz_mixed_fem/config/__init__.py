"""
Configuration package: directory layout and default run parameters.
"""
from .settings import (
    DIRECTORIES,
    PROJECT_ROOT,
    RESULTS_DIR,
    ensure_directories_exist,
    load_defaults,
)

__all__ = [
    "DIRECTORIES",
    "PROJECT_ROOT",
    "RESULTS_DIR",
    "ensure_directories_exist",
    "load_defaults",
]
