"""
Handler for a single experiment run: loop, CSV table, JSON metadata and
optional gnuplot data and per-level meshes.
"""

import json
import logging
import math
import random
import time
from datetime import datetime

import pandas as pd

from ..adapt import afem_loop, check_quasimonotone, history_rates, uniform_loop
from ..exceptions import ConfigurationError
from ..input.specification import RunSpecification
from ..mesh import write_mesh
from ..registry import get_registry
from ..utils.cache import get_cache

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["experiment", "mode", "k", "level", "ndof", "card_T", "error", "lambda", "mu", "branch"]
GNUPLOT_COLUMNS = ["ndof", "error", "lambda", "mu", "estimator", "curl_error"]


def _clean(value):
    """NaN and infinities are not valid JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    return value


def history_frame(history, experiment_id, mode, k):
    """Result rows in the fixed CSV column order."""
    rows = [
        {
            "experiment": experiment_id,
            "mode": mode,
            "k": k,
            "level": record.level,
            "ndof": record.ndof,
            "card_T": record.n_triangles,
            "error": record.error,
            "lambda": record.lam,
            "mu": record.mu,
            "branch": record.branch,
        }
        for record in history
    ]
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def write_csv(frame, path):
    frame.to_csv(path, index=False, na_rep="", float_format="%.12e", lineterminator="\n", encoding="utf-8")


def write_gnuplot(history, path):
    frame = pd.DataFrame(
        [
            {
                "ndof": r.ndof,
                "error": r.error,
                "lambda": r.lam,
                "mu": r.mu,
                "estimator": r.estimator,
                "curl_error": r.curl_error,
            }
            for r in history
        ],
        columns=GNUPLOT_COLUMNS,
    )
    with open(path, "w", newline="\n") as f:
        f.write("# " + " ".join(GNUPLOT_COLUMNS) + "\n")
        frame.to_csv(f, sep=" ", index=False, header=False, na_rep="nan", float_format="%.12e", lineterminator="\n")


class ExperimentHandler:
    """Runs one (experiment, mode, k) combination and stores its results."""

    @classmethod
    def _generate_run_id(cls):
        return random.randint(100000, 999999)

    def __init__(self, registry=None):
        self.registry = registry or get_registry()
        self.logger = logger

    def handle_run(self, input_params):
        """
        Handle a complete run.

        Args:
            input_params: Dictionary accepted by RunSpecification

        Returns:
            dict: title, output paths, history, fitted rates and the reported rate

        Raises:
            ConfigurationError: For invalid parameters or unwritable outputs
            HelmholtzFemError: Propagated from the numerical layers
        """
        start_time = time.time()
        spec = RunSpecification(input_params)
        run_id = self._generate_run_id()
        self.registry.register_run(spec.title, spec.as_dict())
        self.registry.update_status(spec.title, "running")

        try:
            experiment = self.registry.get(spec.experiment_id)
            self._prepare_outputs(spec)
            on_level = self._mesh_writer(spec) if spec.save_meshes else None
            loop = afem_loop if spec.mode == "adaptive" else uniform_loop
            history = loop(spec.config, experiment, on_level=on_level)
            result = self._store_results(spec, experiment, history, run_id, time.time() - start_time)
        except Exception as e:
            self.registry.update_status(spec.title, "failed", str(e))
            self.logger.error(f"Run {spec.title} failed: {e}")
            raise
        finally:
            self._release_spaces(spec)

        self.registry.update_status(spec.title, "completed")
        self.logger.info(f"Completed run {spec.title} ({run_id}) in {time.time() - start_time:.1f}s")
        return result

    def _release_spaces(self, spec):
        # no mesh outlives its run
        cache = get_cache()
        self.logger.debug(f"Space cache after {spec.title}: {cache.stats}")
        cache.clear()

    def _prepare_outputs(self, spec):
        try:
            spec.out.parent.mkdir(parents=True, exist_ok=True)
            if spec.save_meshes:
                spec.save_meshes.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigurationError(f"Cannot create output directory: {e}")

    @staticmethod
    def _mesh_writer(spec):
        def on_level(record, mesh, solution, report):
            write_mesh(mesh, spec.save_meshes / f"{spec.title}_level{record.level:03d}.mesh")

        return on_level

    def _store_results(self, spec, experiment, history, run_id, elapsed):
        rates = history_rates(history, spec.rate_window)
        rate_quantity = "error" if experiment.has_exact_solution else "lambda"
        json_path = spec.out.with_suffix(".json")
        dat_path = spec.out.with_suffix(".dat") if spec.gnuplot else None

        metadata = {
            "run_id": run_id,
            "title": spec.title,
            "created_at": datetime.now().isoformat(),
            "elapsed_seconds": elapsed,
            "description": experiment.description,
            "specification": spec.as_dict(),
            "rate_window": spec.rate_window,
            "rates": rates,
            "rate_quantity": rate_quantity,
            "rate": rates[rate_quantity],
            "mu_increases_at": check_quasimonotone(history),
            "levels": [record.as_dict() for record in history],
        }

        try:
            write_csv(history_frame(history, spec.experiment_id, spec.mode, spec.k), spec.out)
            with open(json_path, "w", newline="\n") as f:
                json.dump(_clean(metadata), f, indent=2)
            if dat_path is not None:
                write_gnuplot(history, dat_path)
        except OSError as e:
            raise ConfigurationError(f"Cannot write results for {spec.title}: {e}")

        self.logger.debug(f"Stored {len(history)} levels of {spec.title} in {spec.out}")
        return {
            "title": spec.title,
            "run_id": run_id,
            "status": "completed",
            "csv": str(spec.out),
            "json": str(json_path),
            "dat": str(dat_path) if dat_path else None,
            "history": history,
            "rates": rates,
            "rate_quantity": rate_quantity,
            "rate": rates[rate_quantity],
        }
