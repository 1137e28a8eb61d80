"""
Utility package: logging configuration and the space cache.
"""
from .cache import SpaceCache, cached, get_cache
from .log_config import log_execution_time, setup_logging

__all__ = [
    "SpaceCache",
    "cached",
    "get_cache",
    "log_execution_time",
    "setup_logging",
]
