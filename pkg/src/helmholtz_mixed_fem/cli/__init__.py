"""
Command line package.
"""
from .main import cli

__all__ = ["cli"]
