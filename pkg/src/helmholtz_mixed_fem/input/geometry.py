"""
Initial triangulations of the experiment domains.
"""

import logging

from ..exceptions import ConfigurationError
from ..mesh import build_initial, red_refine

logger = logging.getLogger(__name__)

LSHAPE_VERTICES = [
    (0.0, 0.0),
    (1.0, 0.0),
    (1.0, 1.0),
    (-1.0, 1.0),
    (-1.0, -1.0),
    (0.0, -1.0),
    (-1.0, 0.0),
    (0.0, 1.0),
]

# Diagonal from (-1,-1) to (1,1) plus the three edges around (-1,0), (0,0), (0,1)
LSHAPE_TRIANGLES = [
    (0, 1, 2),
    (0, 2, 7),
    (6, 0, 7),
    (6, 7, 3),
    (4, 5, 0),
    (4, 0, 6),
]


def lshape_mesh():
    """Six-triangle initial mesh of (-1,1)^2 minus [0,1) x (-1,0]."""
    return build_initial(LSHAPE_VERTICES, LSHAPE_TRIANGLES)


def unit_square_mesh(domain=(0.0, 1.0, 0.0, 1.0)):
    """A rectangle split into two triangles along the diagonal from the lower-left corner."""
    x0, x1, y0, y1 = (float(c) for c in domain)
    if x1 <= x0 or y1 <= y0:
        raise ConfigurationError(f"Empty rectangle {domain}")
    vertices = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    return build_initial(vertices, [(0, 1, 2), (0, 2, 3)])


def reference_triangle_mesh():
    """The reference triangle (0,0), (1,0), (0,1) as a one-element mesh."""
    return build_initial([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], [(0, 1, 2)])


def refined(mesh, levels):
    """Apply ``levels`` red refinements."""
    if levels < 0:
        raise ConfigurationError(f"Number of refinement levels must be non-negative, got {levels}")
    for _ in range(levels):
        mesh = red_refine(mesh)
    logger.debug(f"Red-refined {levels} times: {mesh.n_triangles} triangles")
    return mesh


GEOMETRIES = {
    "lshape": lshape_mesh,
    "square": unit_square_mesh,
    "reference": reference_triangle_mesh,
}
