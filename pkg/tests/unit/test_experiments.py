import numpy as np
import pytest

from helmholtz_mixed_fem.exceptions import ConfigurationError
from helmholtz_mixed_fem.input.experiments import (
    EXPERIMENTS,
    corner_function,
    corner_gradient,
    cutoff,
    cutoff_derivative,
    lshape_const,
    lshape_dirichlet,
    polar,
)
from helmholtz_mixed_fem.input.geometry import GEOMETRIES, refined, unit_square_mesh


# 1. Polar coordinates and the corner singularity
def test_polar_angle_range():
    r, theta = polar(np.array([1.0, 0.0, -1.0, 0.0]), np.array([0.0, 1.0, 0.0, -1.0]))
    assert np.allclose(r, 1.0)
    assert np.allclose(theta, [0.0, np.pi / 2, np.pi, 3 * np.pi / 2])


def test_corner_function_vanishes_on_reentrant_edges():
    assert corner_function(np.array([0.5]), np.array([0.0]))[0] == pytest.approx(0.0)
    assert corner_function(np.array([0.0]), np.array([-0.5]))[0] == pytest.approx(0.0, abs=1e-15)


def test_corner_gradient_matches_finite_differences():
    x, y, step = np.array([-0.3]), np.array([0.4]), 1e-6
    gx, gy = corner_gradient(x, y)
    dx = (corner_function(x + step, y) - corner_function(x - step, y)) / (2 * step)
    dy = (corner_function(x, y + step) - corner_function(x, y - step)) / (2 * step)
    assert gx[0] == pytest.approx(dx[0], abs=1e-6)
    assert gy[0] == pytest.approx(dy[0], abs=1e-6)


def test_corner_gradient_is_finite_at_origin():
    gx, gy = corner_gradient(np.array([0.0]), np.array([0.0]))
    assert gx[0] == 0.0
    assert gy[0] == 0.0


# 2. Cutoff
def test_cutoff_values():
    assert float(cutoff(0.25)) == 0.0
    assert float(cutoff(0.5)) == pytest.approx(0.0)
    assert float(cutoff(1.0)) == pytest.approx(1.0)
    assert float(cutoff(0.75)) == pytest.approx(0.5625)
    assert float(cutoff(2.0)) == 1.0


def test_cutoff_derivative_matches_finite_differences():
    r, step = 0.7, 1e-6
    numeric = (float(cutoff(r + step)) - float(cutoff(r - step))) / (2 * step)
    assert float(cutoff_derivative(r)) == pytest.approx(numeric, abs=1e-6)
    assert float(cutoff_derivative(0.75)) == pytest.approx(3.0)
    assert float(cutoff_derivative(0.3)) == 0.0


# 3. Experiment data
@pytest.mark.parametrize("experiment_id", sorted(EXPERIMENTS))
def test_divergence_matches_forcing(experiment_id):
    assert EXPERIMENTS[experiment_id]().check_divergence() < 1e-5


def test_experiment_domains():
    assert EXPERIMENTS["square-smooth"]().initial_mesh().n_triangles == 2
    assert lshape_const().initial_mesh().n_triangles == 6


def test_exact_solutions():
    assert not lshape_const().has_exact_solution
    assert lshape_dirichlet().has_exact_solution
    assert EXPERIMENTS["singular-alpha"]().curl_alpha_exact is not None


def test_dirichlet_lift_matches_solution_away_from_corner():
    experiment = lshape_dirichlet()
    points = np.array([[-0.9, 0.9], [0.95, 0.6], [-0.8, -0.9]])
    assert np.allclose(experiment.grad_uD(points), experiment.p_exact(points))
    assert np.allclose(experiment.grad_uD(np.array([[0.1, 0.2]])), 0.0)


def test_dirichlet_curl_is_minus_gradient():
    experiment = lshape_dirichlet()
    points = np.array([[-0.3, 0.2], [0.4, 0.7]])
    assert np.allclose(experiment.curl_alpha_exact(points), -experiment.p_exact(points))


# 4. Geometry helpers
def test_geometries():
    assert set(GEOMETRIES) == {"lshape", "square", "reference"}
    assert GEOMETRIES["reference"]().n_triangles == 1


def test_refined_levels(lshape):
    assert refined(lshape, 0) is lshape
    assert refined(lshape, 2).n_triangles == 96
    with pytest.raises(ConfigurationError):
        refined(lshape, -1)


def test_unit_square_rejects_empty_rectangle():
    assert unit_square_mesh((0, 2, 0, 1)).areas.sum() == pytest.approx(2.0)
    with pytest.raises(ConfigurationError):
        unit_square_mesh((1, 1, 0, 1))
