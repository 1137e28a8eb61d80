"""
Regular partitions of a rectangle into axis-aligned cells.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import MeshError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SquarePartition:
    """
    nx by ny cells over the rectangle (x0, x1) x (y0, y1).

    Cells list their vertices counterclockwise starting at the lower left
    corner; local edges are bottom, right, top, left.
    """

    nx: int
    ny: int
    domain: tuple
    vertices: np.ndarray = field(repr=False)
    cells: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)
    cell_edges: np.ndarray = field(repr=False)
    edge_cells: np.ndarray = field(repr=False)

    @property
    def hx(self):
        return (self.domain[1] - self.domain[0]) / self.nx

    @property
    def hy(self):
        return (self.domain[3] - self.domain[2]) / self.ny

    @property
    def is_square(self):
        return abs(self.hx - self.hy) <= 1e-12 * max(self.hx, self.hy)

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def boundary(self):
        return self.edge_cells[:, 1] < 0

    @property
    def n_interior_edges(self):
        return int(np.count_nonzero(~self.boundary))

    def validate(self):
        """Check 3|T| + 1 = |E(Omega)| + |N|."""
        if 3 * self.n_cells + 1 != self.n_interior_edges + self.n_vertices:
            raise MeshError(
                f"Quadrilateral Euler formula violated: 3*{self.n_cells} + 1 != "
                f"{self.n_interior_edges} + {self.n_vertices}",
                invariant="euler-quadrilateral",
            )
        return True


def build_square_partition(nx, ny, domain=None):
    """
    Build the regular nx by ny partition.

    Args:
        nx, ny: Number of cells per direction (>= 1)
        domain: (x0, x1, y0, y1); defaults to unit cells (0, nx) x (0, ny)

    Returns:
        SquarePartition
    """
    if nx < 1 or ny < 1:
        raise MeshError(f"Need at least one cell per direction, got {nx}x{ny}", invariant="format")
    if domain is None:
        domain = (0.0, float(nx), 0.0, float(ny))
    x0, x1, y0, y1 = (float(c) for c in domain)
    if not (x1 > x0 and y1 > y0):
        raise MeshError(f"Empty rectangle {domain}", invariant="positive-area")

    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    index = np.arange((nx + 1) * (ny + 1)).reshape(ny + 1, nx + 1)
    ll = index[:-1, :-1].ravel()
    lr = index[:-1, 1:].ravel()
    ur = index[1:, 1:].ravel()
    ul = index[1:, :-1].ravel()
    cells = np.column_stack([ll, lr, ur, ul])

    local = np.stack([cells[:, [0, 1]], cells[:, [1, 2]], cells[:, [2, 3]], cells[:, [3, 0]]], axis=1)
    pairs = np.sort(local.reshape(-1, 2), axis=1)
    edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    cell_edges = inverse.reshape(-1, 4)

    edge_cells = np.full((len(edges), 2), -1, dtype=np.int64)
    owner = np.repeat(np.arange(len(cells)), 4)
    order = np.argsort(inverse, kind="stable")
    edge_of = inverse[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = edge_of[1:] != edge_of[:-1]
    edge_cells[edge_of[first], 0] = owner[order[first]]
    edge_cells[edge_of[~first], 1] = owner[order[~first]]

    partition = SquarePartition(
        nx=int(nx),
        ny=int(ny),
        domain=(x0, x1, y0, y1),
        vertices=vertices,
        cells=cells,
        edges=edges,
        cell_edges=cell_edges,
        edge_cells=edge_cells,
    )
    partition.validate()
    return partition
