"""
Monomials on the reference triangle and their derivatives.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def exponents(degree):
    """Exponent pairs (a, b) of xi^a eta^b with a + b <= degree, graded order."""
    return tuple((total - b, b) for total in range(degree + 1) for b in range(total + 1))


def monomials(points, degree):
    """Values of all monomials: (..., n_monomials)."""
    points = np.asarray(points, dtype=float)
    xi, eta = points[..., 0], points[..., 1]
    return np.stack([xi ** a * eta ** b for a, b in exponents(degree)], axis=-1)


def monomial_gradients(points, degree):
    """Reference gradients of all monomials: (..., n_monomials, 2)."""
    points = np.asarray(points, dtype=float)
    xi, eta = points[..., 0], points[..., 1]
    zeros = np.zeros_like(xi)
    columns = []
    for a, b in exponents(degree):
        d_xi = a * xi ** (a - 1) * eta ** b if a > 0 else zeros
        d_eta = b * xi ** a * eta ** (b - 1) if b > 0 else zeros
        columns.append(np.stack([d_xi, d_eta], axis=-1))
    return np.stack(columns, axis=-2)


def dimension(degree):
    return (degree + 1) * (degree + 2) // 2
