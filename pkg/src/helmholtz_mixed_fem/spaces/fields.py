"""
Analytic scalar and vector fields.

Fields wrap a function of coordinate arrays ``func(x, y)`` and are evaluated on
point arrays of shape (..., 2). Vector fields return (..., 2).
"""

import numpy as np


class ScalarField:
    """
    Scalar function on the domain.

    Args:
        func: Callable (x, y) -> values, broadcasting over arrays
        degree: Polynomial degree when the field is a polynomial, else None
        name: Label used in logs and reports
    """

    def __init__(self, func, degree=None, name="scalar"):
        self.func = func
        self.degree = degree
        self.name = name

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        x, y = points[..., 0], points[..., 1]
        return np.broadcast_to(np.asarray(self.func(x, y), dtype=float), x.shape)

    @classmethod
    def constant(cls, value, name="constant"):
        return cls(lambda x, y: np.full_like(x, float(value)), degree=0, name=name)

    def __repr__(self):
        return f"ScalarField({self.name})"


class VectorField:
    """
    Vector function on the domain.

    Args:
        func: Callable (x, y) -> (fx, fy)
        degree: Polynomial degree when the field is a polynomial, else None
        divergence: Optional ScalarField with the divergence of the field
        name: Label used in logs and reports
    """

    def __init__(self, func, degree=None, divergence=None, name="vector"):
        self.func = func
        self.degree = degree
        self.divergence = divergence
        self.name = name

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        x, y = points[..., 0], points[..., 1]
        fx, fy = self.func(x, y)
        fx = np.broadcast_to(np.asarray(fx, dtype=float), x.shape)
        fy = np.broadcast_to(np.asarray(fy, dtype=float), x.shape)
        return np.stack([fx, fy], axis=-1)

    @classmethod
    def constant(cls, value, name="constant"):
        cx, cy = (float(c) for c in value)
        return cls(
            lambda x, y: (np.full_like(x, cx), np.full_like(x, cy)),
            degree=0,
            divergence=ScalarField.constant(0.0),
            name=name,
        )

    @classmethod
    def zero(cls):
        return cls.constant((0.0, 0.0), name="zero")

    def __sub__(self, other):
        def difference(x, y):
            ax, ay = self.func(x, y)
            bx, by = other.func(x, y)
            return ax - bx, ay - by

        degree = None
        if self.degree is not None and other.degree is not None:
            degree = max(self.degree, other.degree)
        divergence = None
        if self.divergence is not None and other.divergence is not None:
            divergence = ScalarField(
                lambda x, y: self.divergence.func(x, y) - other.divergence.func(x, y)
            )
        return VectorField(difference, degree=degree, divergence=divergence, name=f"{self.name}-{other.name}")

    def __repr__(self):
        return f"VectorField({self.name})"
