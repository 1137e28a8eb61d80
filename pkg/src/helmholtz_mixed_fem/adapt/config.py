"""
Parameters of the adaptive loop.
"""

from dataclasses import dataclass, fields
from typing import Optional

from ..config.settings import load_defaults
from ..exceptions import ConfigurationError

SOLVERS = ("direct", "cg")
DATA_MARK_STARTS = ("initial", "current")


@dataclass(frozen=True)
class AfemConfig:
    """
    Validated AFEM parameters.

    Attributes:
        theta: Doerfler bulk parameter, 0 < theta <= 1
        kappa: Branch parameter; data marking runs when mu^2 > kappa lambda^2
        rho: Data reduction factor, 0 < rho < 1
        k: Polynomial degree of X_h
        max_ndof: Stop before a mesh with more unknowns would be solved
        max_levels: Stop after this many levels
        experiment: Experiment id (informational)
        quad_degree: Data/error quadrature degree, None for max(2k+2, 8)
        mu_quad_degree: Quadrature degree of mu, None for max(2k+2, 20)
        data_mark_from: "current" refines the current mesh for the data step, "initial" starts over from T_0
    """

    theta: float = 0.1
    kappa: float = 0.5
    rho: float = 0.75
    k: int = 0
    max_ndof: int = 200000
    max_levels: int = 1000
    experiment: Optional[str] = None
    quad_degree: Optional[int] = None
    mu_quad_degree: Optional[int] = None
    solver: str = "direct"
    cg_rtol: float = 1e-12
    cg_maxiter_factor: int = 10
    data_mark_max_rounds: int = 60
    data_mark_from: str = "current"
    adaptive_rate_window: int = 5
    uniform_rate_window: int = 3

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ConfigurationError(f"theta must lie in (0, 1], got {self.theta}")
        if not self.kappa > 0.0:
            raise ConfigurationError(f"kappa must be positive, got {self.kappa}")
        if not 0.0 < self.rho < 1.0:
            raise ConfigurationError(f"rho must lie in (0, 1), got {self.rho}")
        if not isinstance(self.k, int) or self.k < 0:
            raise ConfigurationError(f"Degree k must be a non-negative integer, got {self.k!r}")
        if self.max_ndof < 1 or self.max_levels < 1:
            raise ConfigurationError(
                f"Stop rule needs positive max_ndof and max_levels, got {self.max_ndof}, {self.max_levels}"
            )
        if self.quad_degree is not None and self.quad_degree < 1:
            raise ConfigurationError(f"Quadrature degree must be at least 1, got {self.quad_degree}")
        if self.mu_quad_degree is not None and self.mu_quad_degree < 1:
            raise ConfigurationError(f"Quadrature degree of mu must be at least 1, got {self.mu_quad_degree}")
        if self.solver not in SOLVERS:
            raise ConfigurationError(f"Unknown solver '{self.solver}'; choose from {SOLVERS}")
        if self.data_mark_from not in DATA_MARK_STARTS:
            raise ConfigurationError(
                f"data_mark_from must be one of {DATA_MARK_STARTS}, got '{self.data_mark_from}'"
            )
        if self.data_mark_max_rounds < 1:
            raise ConfigurationError("data_mark_max_rounds must be positive")
        if self.adaptive_rate_window < 2 or self.uniform_rate_window < 2:
            raise ConfigurationError("Rate windows need at least two levels")

    @classmethod
    def from_defaults(cls, path=None, **overrides):
        """
        Build a config from defaults.json, then apply keyword overrides.

        Overrides equal to None are ignored so CLI options can be passed through.
        """
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(overrides) - names)
        if unknown:
            raise ConfigurationError(f"Unknown AFEM parameters: {', '.join(unknown)}")
        values = {key: value for key, value in load_defaults(path).items() if key in names}
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}
