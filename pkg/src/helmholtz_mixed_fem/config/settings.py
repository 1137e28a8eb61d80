"""
Configuration settings for file and directory locations.

This module defines where results are stored and
loads the default parameters of the adaptive loop from defaults.json.
"""

import json
import os
from pathlib import Path

# Allow overriding the project root with an environment variable
PROJECT_ROOT = Path(os.environ.get("HELMHOLTZ_FEM_ROOT", Path.cwd()))

# Main directories
RESULTS_DIR = PROJECT_ROOT / "results"

# Configuration files
CONFIG_DIR = Path(__file__).resolve().parent
DEFAULTS_FILE = Path(os.environ.get("HELMHOLTZ_FEM_DEFAULTS", CONFIG_DIR / "defaults.json"))

# Dictionary with all directories for easy access
DIRECTORIES = {
    "project_root": PROJECT_ROOT,
    "results": RESULTS_DIR,
}

_REQUIRED_KEYS = ("theta", "kappa", "rho", "max_ndof", "max_levels", "solver")


def ensure_directories_exist():
    """Create all required directories if they don't exist yet."""
    for directory in DIRECTORIES.values():
        directory.mkdir(parents=True, exist_ok=True)
    return True


def load_defaults(path=None):
    """
    Load the default run parameters.

    Args:
        path: Optional JSON file; falls back to DEFAULTS_FILE

    Returns:
        dict: Parameter name -> default value

    Raises:
        ConfigurationError: If the file is missing, unreadable or incomplete
    """
    from ..exceptions import ConfigurationError

    config_file = Path(path) if path is not None else DEFAULTS_FILE
    try:
        with open(config_file, "r") as f:
            defaults = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read defaults from {config_file}: {e}")

    missing = [key for key in _REQUIRED_KEYS if key not in defaults]
    if missing:
        raise ConfigurationError(f"Defaults file {config_file} lacks keys: {', '.join(missing)}")
    return defaults


# Only create directories when explicitly requested or when module is run directly
if __name__ == "__main__":
    ensure_directories_exist()
    print("Testing settings.py configuration:")
    print(f"Project Root: {PROJECT_ROOT}")

    for name, path in DIRECTORIES.items():
        print(f"{name}: {path}")
        print(f"  - Exists: {path.exists()}")
    print(f"Defaults: {load_defaults()}")
