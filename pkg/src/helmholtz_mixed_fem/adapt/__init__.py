"""
Adapt package: marking strategies and the adaptive and uniform loops.
"""
from .config import AfemConfig
from .loop import (
    AfemRecord,
    afem_loop,
    check_quasimonotone,
    convergence_rate,
    history_rates,
    ndof_of,
    uniform_loop,
)
from .marking import data_mark, doerfler_mark

__all__ = [
    "AfemConfig",
    "AfemRecord",
    "afem_loop",
    "check_quasimonotone",
    "convergence_rate",
    "data_mark",
    "doerfler_mark",
    "history_rates",
    "ndof_of",
    "uniform_loop",
]
