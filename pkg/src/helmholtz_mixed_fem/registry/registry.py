"""
Registry of benchmark experiments and of the runs made with them.
"""
import logging
from datetime import datetime

from ..exceptions import ConfigurationError
from ..input.experiments import EXPERIMENTS

logger = logging.getLogger(__name__)

STATUSES = ("pending", "running", "completed", "failed")


class ExperimentRegistry:
    """
    Looks up experiments by id and keeps the status of runs in memory.

    Args:
        factories: Optional mapping id -> callable returning an ExperimentSpec
    """

    def __init__(self, factories=None):
        self._factories = dict(EXPERIMENTS if factories is None else factories)
        self._specs = {}
        self.runs = {}

    def ids(self):
        return sorted(self._factories)

    def get(self, experiment_id):
        """
        Get the ExperimentSpec for an id.

        Raises:
            ConfigurationError: For unknown ids
        """
        if experiment_id not in self._factories:
            raise ConfigurationError(
                f"Unknown experiment '{experiment_id}'; choose from {', '.join(self.ids())}"
            )
        if experiment_id not in self._specs:
            self._specs[experiment_id] = self._factories[experiment_id]()
        return self._specs[experiment_id]

    def register_run(self, title, parameters=None):
        """Record a new run and return its key."""
        self.runs[title] = {
            "title": title,
            "status": "pending",
            "created_at": datetime.now().isoformat(),
            "parameters": parameters or {},
            "message": None,
        }
        return title

    def update_status(self, title, status, message=None):
        if status not in STATUSES:
            raise ConfigurationError(f"Unknown run status '{status}'")
        if title not in self.runs:
            self.register_run(title)
        self.runs[title]["status"] = status
        self.runs[title]["last_updated"] = datetime.now().isoformat()
        if message:
            self.runs[title]["message"] = message

    def get_status(self, title):
        run = self.runs.get(title)
        return run["status"] if run else None

_registry = None


def get_registry():
    """Process-wide registry instance."""
    global _registry
    if _registry is None:
        _registry = ExperimentRegistry()
    return _registry
