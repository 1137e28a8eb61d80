"""
Parallel handler for running independent experiment runs simultaneously.

Each (experiment, mode, k) run is sequential, so a batch is spread over a
process pool with one run per worker.
"""

import concurrent.futures
import logging
from datetime import datetime
from pathlib import Path

from ..config.settings import RESULTS_DIR, ensure_directories_exist
from ..input.experiments import EXPERIMENTS
from .experiment import ExperimentHandler

logger = logging.getLogger(__name__)


def _run_single(input_params):
    """Worker entry point; returns a picklable summary of one run."""
    result = ExperimentHandler().handle_run(input_params)
    return {
        "title": result["title"],
        "status": result["status"],
        "csv": result["csv"],
        "json": result["json"],
        "rate": result["rate"],
        "rate_quantity": result["rate_quantity"],
        "levels": len(result["history"]),
    }


class ParallelHandler:
    def __init__(self, max_workers=4, executor_class=concurrent.futures.ProcessPoolExecutor):
        """
        Initialize parallel handler.

        Args:
            max_workers: Maximum number of concurrent runs
            executor_class: Executor used to run the jobs (a thread pool works for tests)
        """
        self.max_workers = max_workers
        self.executor_class = executor_class
        self.runs = []

    def update_status(self, params, new_status, error_msg=None):
        """
        Update run status and log the change.

        Args:
            params: Run parameters
            new_status: New status (pending/running/completed/failed)
            error_msg: Error message (optional)
        """
        job_name = params["job_name"]
        for run in self.runs:
            if run["job_name"] == job_name:
                run["status"] = new_status
                if error_msg:
                    run["error"] = error_msg
                if new_status == "running":
                    run["start_time"] = datetime.now()
                elif new_status in ("completed", "failed") and run.get("start_time"):
                    run["elapsed"] = str(datetime.now() - run["start_time"]).split(".")[0]
                break

        log_msg = f"Job {job_name}: {new_status}"
        if error_msg:
            log_msg += f" - {error_msg}"
        logger.info(log_msg)

    def build_runs(self, input):
        """
        Expand a batch description into one parameter dict per run.

        Args:
            input: Dictionary with batch parameters
                experiments: Id or list of ids (default: all experiments)
                modes: Mode or list of modes (default: uniform and adaptive)
                degrees: Degree or list of degrees (default: 0, 1, 2)
                out_dir: Directory for the CSV files (default: RESULTS_DIR)
                any other key: passed to every run (theta, max_ndof, ...)
        """
        def as_list(value, default):
            if value is None:
                return list(default)
            return value if isinstance(value, (list, tuple)) else [value]

        experiments = as_list(input.get("experiments"), EXPERIMENTS)
        modes = as_list(input.get("modes"), ("uniform", "adaptive"))
        degrees = as_list(input.get("degrees"), (0, 1, 2))
        if input.get("out_dir"):
            out_dir = Path(input["out_dir"])
        else:
            ensure_directories_exist()
            out_dir = RESULTS_DIR
        shared = {
            key: value
            for key, value in input.items()
            if key not in ("experiments", "modes", "degrees", "out_dir")
        }

        runs = []
        for experiment in experiments:
            for mode in modes:
                for k in degrees:
                    job_name = f"{experiment}_{mode}_k{k}"
                    runs.append(
                        {
                            **shared,
                            "experiment": experiment,
                            "mode": mode,
                            "k": k,
                            "out": str(out_dir / f"{job_name}.csv"),
                            "job_name": job_name,
                        }
                    )
        return runs

    def handle_batch(self, input):
        """
        Run every combination of a batch.

        Returns:
            dict: job name -> summary (status "failed" with the error message for failures)
        """
        runs = self.build_runs(input)
        self.runs = [{"job_name": r["job_name"], "status": "pending"} for r in runs]
        logger.info(f"Launching {len(runs)} runs with {self.max_workers} workers")

        results = {}
        with self.executor_class(max_workers=self.max_workers) as executor:
            future_to_params = {}
            for params in runs:
                job_params = {key: value for key, value in params.items() if key != "job_name"}
                future_to_params[executor.submit(_run_single, job_params)] = params
                self.update_status(params, "running")

            for future in concurrent.futures.as_completed(future_to_params):
                params = future_to_params[future]
                try:
                    results[params["job_name"]] = future.result()
                    self.update_status(params, "completed")
                except Exception as e:
                    error_msg = str(e)
                    logger.error(f"Run {params['job_name']} failed: {error_msg}")
                    self.update_status(params, "failed", error_msg)
                    results[params["job_name"]] = {
                        "title": params["job_name"],
                        "status": "failed",
                        "error_message": error_msg,
                    }

        failed = sum(1 for r in results.values() if r["status"] == "failed")
        logger.info(f"Batch finished: {len(results) - failed} completed, {failed} failed")
        return results
