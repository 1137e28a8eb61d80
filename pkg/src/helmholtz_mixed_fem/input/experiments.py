"""
Analytic data of the benchmark experiments.

Every experiment fixes the datum phi with -div phi = f, an optional Dirichlet
lift u_D (through its gradient), the exact flux p = grad u when it is known and
the exact Curl alpha when it is known.

Experiments:
    lshape-dirichlet: phi = 0 and u_D = g u with u = r^(2/3) sin(2 theta / 3)
        and a quartic cutoff g that vanishes near the re-entrant corner
    lshape-const: phi = (x, y) / 2, hence f = -1, homogeneous boundary data
    singular-alpha: phi = grad u + Curl(r^(2/3) sin(2 theta / 3)) on the
        L-shape with u = sin(pi x) sin(pi y)
    square-smooth: phi = grad u + Curl(cos(pi x) cos(pi y)) on the unit square
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..spaces import ScalarField, VectorField
from .geometry import lshape_mesh, refined, unit_square_mesh

logger = logging.getLogger(__name__)

EXPONENT = 2.0 / 3.0


# ----------------------------------------------------------------------
# polar helpers on the L-shape

def polar(x, y):
    """Radius and angle in [0, 2 pi); the L-shape occupies angles [0, 3 pi / 2]."""
    r = np.hypot(x, y)
    theta = np.mod(np.arctan2(y, x), 2.0 * np.pi)
    return r, theta


def _safe_radius(r):
    return np.where(r > 0.0, r, 1.0)


def corner_function(x, y):
    """r^(2/3) sin(2 theta / 3)."""
    r, theta = polar(x, y)
    return r ** EXPONENT * np.sin(EXPONENT * theta)


def corner_gradient(x, y):
    r, theta = polar(x, y)
    factor = np.where(r > 0.0, EXPONENT * _safe_radius(r) ** (EXPONENT - 1.0), 0.0)
    return -factor * np.sin(theta / 3.0), factor * np.cos(theta / 3.0)


def corner_curl(x, y):
    """Curl of r^(2/3) sin(2 theta / 3), the gradient rotated clockwise."""
    gx, gy = corner_gradient(x, y)
    return gy, -gx


def cutoff(r):
    """C^1 quartic blend from 0 (r <= 1/2) to 1 (r >= 1)."""
    middle = 16.0 * r ** 4 - 64.0 * r ** 3 + 88.0 * r ** 2 - 48.0 * r + 9.0
    return np.where(r <= 0.5, 0.0, np.where(r >= 1.0, 1.0, middle))


def cutoff_derivative(r):
    middle = 64.0 * r ** 3 - 192.0 * r ** 2 + 176.0 * r - 48.0
    return np.where((r > 0.5) & (r < 1.0), middle, 0.0)


def dirichlet_lift(x, y):
    r, _ = polar(x, y)
    return cutoff(r) * corner_function(x, y)


def dirichlet_lift_gradient(x, y):
    """grad(g u) = g'(r) (x, y) / r u + g grad u; vanishes for r <= 1/2."""
    r, _ = polar(x, y)
    u = corner_function(x, y)
    gx, gy = corner_gradient(x, y)
    radial = cutoff_derivative(r) * u / _safe_radius(r)
    g = cutoff(r)
    return radial * x + g * gx, radial * y + g * gy


# ----------------------------------------------------------------------
# smooth helpers

def sine_product(x, y):
    return np.sin(np.pi * x) * np.sin(np.pi * y)


def sine_gradient(x, y):
    return (
        np.pi * np.cos(np.pi * x) * np.sin(np.pi * y),
        np.pi * np.sin(np.pi * x) * np.cos(np.pi * y),
    )


def sine_forcing(x, y):
    """-Laplace(sin(pi x) sin(pi y))."""
    return 2.0 * np.pi ** 2 * sine_product(x, y)


def cosine_curl(x, y):
    """Curl(cos(pi x) cos(pi y))."""
    return (
        -np.pi * np.cos(np.pi * x) * np.sin(np.pi * y),
        np.pi * np.sin(np.pi * x) * np.cos(np.pi * y),
    )


def _sum(first, second):
    def field(x, y):
        ax, ay = first(x, y)
        bx, by = second(x, y)
        return ax + bx, ay + by

    return field


@dataclass(frozen=True)
class ExperimentSpec:
    """
    One benchmark problem.

    Attributes:
        id: Experiment identifier used on the command line
        domain: "lshape" or "square"
        phi: Datum with -div phi = f
        f: Right-hand side (ScalarField)
        grad_uD: Gradient of the Dirichlet lift, or None for u_D = 0
        p_exact: Exact flux grad u, or None when unknown
        curl_alpha_exact: Exact Curl alpha, or None when unknown
        u_D: Dirichlet lift itself, used only for reporting
    """

    id: str
    description: str
    domain: str
    phi: VectorField
    f: ScalarField
    grad_uD: Optional[VectorField] = None
    p_exact: Optional[VectorField] = None
    curl_alpha_exact: Optional[VectorField] = None
    u_D: Optional[Callable] = None

    @property
    def has_exact_solution(self):
        return self.p_exact is not None

    @property
    def oscillation_datum(self):
        """g = phi - grad u_D, the field whose oscillation mu measures."""
        return self.phi if self.grad_uD is None else self.phi - self.grad_uD

    def initial_mesh(self):
        if self.domain == "lshape":
            return lshape_mesh()
        return unit_square_mesh()

    def check_divergence(self, levels=2, step=1e-6):
        """
        Largest deviation of -div phi from f at the centroids of a refined initial mesh.

        The divergence is taken by central differences, so the result is only
        meaningful up to O(step^2) plus rounding.
        """
        points = refined(self.initial_mesh(), levels).centroids()
        x, y = points[:, 0], points[:, 1]
        dx = np.array([step, 0.0])
        dy = np.array([0.0, step])
        div = (self.phi(points + dx)[:, 0] - self.phi(points - dx)[:, 0]) / (2.0 * step)
        div += (self.phi(points + dy)[:, 1] - self.phi(points - dy)[:, 1]) / (2.0 * step)
        deviation = float(np.max(np.abs(-div - self.f.func(x, y))))
        logger.debug(f"Experiment {self.id}: max |-div phi - f| = {deviation:.2e}")
        return deviation


def _zero_scalar(x, y):
    return np.zeros_like(x)


def lshape_dirichlet():
    return ExperimentSpec(
        id="lshape-dirichlet",
        description="L-shape, phi = 0, u_D = g u with the corner singularity u",
        domain="lshape",
        phi=VectorField.zero(),
        f=ScalarField(_zero_scalar, degree=0, name="zero"),
        grad_uD=VectorField(dirichlet_lift_gradient, name="grad_uD"),
        p_exact=VectorField(corner_gradient, divergence=ScalarField(_zero_scalar), name="grad_u"),
        curl_alpha_exact=VectorField(lambda x, y: tuple(-c for c in corner_gradient(x, y)), name="curl_alpha"),
        u_D=dirichlet_lift,
    )


def lshape_const():
    return ExperimentSpec(
        id="lshape-const",
        description="L-shape, phi = (x, y) / 2, f = -1, u_D = 0",
        domain="lshape",
        phi=VectorField(
            lambda x, y: (0.5 * x, 0.5 * y),
            degree=1,
            divergence=ScalarField.constant(1.0),
            name="half_position",
        ),
        f=ScalarField.constant(-1.0, name="minus_one"),
    )


def singular_alpha():
    # The forcing is -Laplace u = 2 pi^2 sin(pi x) sin(pi y); only phi enters the solve
    return ExperimentSpec(
        id="singular-alpha",
        description="L-shape, phi = grad u + Curl(r^(2/3) sin(2 theta / 3)), u = sin(pi x) sin(pi y)",
        domain="lshape",
        phi=VectorField(
            _sum(sine_gradient, corner_curl),
            divergence=ScalarField(lambda x, y: -sine_forcing(x, y)),
            name="phi",
        ),
        f=ScalarField(sine_forcing, name="f"),
        p_exact=VectorField(sine_gradient, name="grad_u"),
        curl_alpha_exact=VectorField(corner_curl, name="curl_alpha"),
    )


def square_smooth():
    return ExperimentSpec(
        id="square-smooth",
        description="Unit square, phi = grad u + Curl(cos(pi x) cos(pi y)), u = sin(pi x) sin(pi y)",
        domain="square",
        phi=VectorField(
            _sum(sine_gradient, cosine_curl),
            divergence=ScalarField(lambda x, y: -sine_forcing(x, y)),
            name="phi",
        ),
        f=ScalarField(sine_forcing, name="f"),
        p_exact=VectorField(sine_gradient, name="grad_u"),
        curl_alpha_exact=VectorField(cosine_curl, name="curl_alpha"),
    )


EXPERIMENTS = {
    "lshape-dirichlet": lshape_dirichlet,
    "lshape-const": lshape_const,
    "singular-alpha": singular_alpha,
    "square-smooth": square_smooth,
}
