import logging

import pytest
from click.testing import CliRunner

from helmholtz_mixed_fem.input.geometry import lshape_mesh, reference_triangle_mesh, unit_square_mesh
from helmholtz_mixed_fem.registry import ExperimentRegistry


@pytest.fixture
def lshape():
    return lshape_mesh()


@pytest.fixture
def square():
    return unit_square_mesh()


@pytest.fixture
def reference():
    return reference_triangle_mesh()


@pytest.fixture
def registry():
    return ExperimentRegistry()


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def reset_logging():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
