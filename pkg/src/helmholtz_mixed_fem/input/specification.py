# src/helmholtz_mixed_fem/input/specification.py

import logging
from pathlib import Path

from ..adapt.config import AfemConfig
from ..exceptions import ConfigurationError
from .experiments import EXPERIMENTS

MODES = ("uniform", "adaptive")
DEGREES = (0, 1, 2)


class RunSpecification:
    def __init__(self, input):
        """
        Initializes the RunSpecification instance from an input dictionary.

        Parameters:
        - input: Dictionary with run parameters
            experiment: Experiment id (required)
            mode: "uniform" or "adaptive" (required)
            k: Polynomial degree 0, 1 or 2 (required)
            out: Path of the CSV file (required)
            theta, kappa, rho, max_ndof, max_levels, quad_degree, solver:
                optional overrides of the defaults
            gnuplot: Also write a whitespace-separated .dat file (default: False)
            save_meshes: Directory for per-level meshes (default: None)
        """
        self.logger = logging.getLogger(__name__)

        for key in ("experiment", "mode", "k", "out"):
            if input.get(key) is None:
                raise ConfigurationError(f"Run specification requires '{key}'")

        if input["experiment"] not in EXPERIMENTS:
            raise ConfigurationError(
                f"Unknown experiment '{input['experiment']}'; choose from {', '.join(EXPERIMENTS)}"
            )
        if input["mode"] not in MODES:
            raise ConfigurationError(f"Unknown mode '{input['mode']}'; choose from {', '.join(MODES)}")
        if input["k"] not in DEGREES:
            raise ConfigurationError(f"Degree k must be one of {DEGREES}, got {input['k']!r}")

        self.logger.info(f"Creating run specification for {input['experiment']} ({input['mode']}, k={input['k']})")

        self.experiment_id = input["experiment"]
        self.mode = input["mode"]
        self.k = int(input["k"])
        self.out = Path(input["out"])
        self.gnuplot = bool(input.get("gnuplot", False))
        self.save_meshes = Path(input["save_meshes"]) if input.get("save_meshes") else None

        overrides = {
            key: input.get(key)
            for key in ("theta", "kappa", "rho", "max_ndof", "max_levels", "quad_degree", "solver")
        }
        self.config = AfemConfig.from_defaults(
            path=input.get("defaults"), k=self.k, experiment=self.experiment_id, **overrides
        )

        self.title = f"{self.experiment_id}_{self.mode}_k{self.k}"
        self.validate_output()

    def validate_output(self):
        """Check that the output locations can be created."""
        for target in (self.out.parent, self.save_meshes):
            if target is None:
                continue
            if target.exists() and not target.is_dir():
                raise ConfigurationError(f"Output location {target} exists and is not a directory")
        if self.out.exists() and self.out.is_dir():
            raise ConfigurationError(f"Output path {self.out} is a directory")

    @property
    def rate_window(self):
        if self.mode == "adaptive":
            return self.config.adaptive_rate_window
        return self.config.uniform_rate_window

    def as_dict(self):
        """Parameters recorded in the run metadata."""
        return {
            "experiment": self.experiment_id,
            "mode": self.mode,
            "k": self.k,
            "out": str(self.out),
            "gnuplot": self.gnuplot,
            "save_meshes": str(self.save_meshes) if self.save_meshes else None,
            "config": self.config.as_dict(),
        }

    def __str__(self):
        config = self.config
        return (
            f"RunSpecification for {self.title}:\n"
            f"  Experiment: {self.experiment_id}\n"
            f"  Mode: {self.mode}\n"
            f"  Degree k: {self.k}\n"
            f"  theta={config.theta}, kappa={config.kappa}, rho={config.rho}\n"
            f"  Stop: max_ndof={config.max_ndof}, max_levels={config.max_levels}\n"
            f"  Output: {self.out}"
        )
