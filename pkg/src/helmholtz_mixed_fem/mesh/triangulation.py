"""
Conforming triangulations with edge tables and bisection-forest ancestry.

A Triangulation is immutable once built: refinement always returns a new
object. Every triangle remembers the triangle of the initial mesh it descends
from (``roots``) and its position in the binary bisection tree below that root
(``codes``, a heap index: the root is 1, the children of node c are 2c and
2c + 1). The pair (root, code) identifies a triangle geometrically among all
admissible refinements of the same initial mesh.
"""

import hashlib
import logging
import uuid
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..exceptions import MeshError

logger = logging.getLogger(__name__)

# relative tolerance for degenerate triangles and longest-edge ties
_GEOM_TOL = 1e-12


def _readonly(array):
    array.setflags(write=False)
    return array


class Triangulation:
    """
    Triangle mesh of a polygonal domain.

    Use ``build_initial`` for user input; the constructor itself only computes
    derived tables and assumes a consistent triangle list.

    Attributes:
        vertices: (n_vertices, 2) coordinates
        triangles: (n_triangles, 3) counterclockwise vertex indices
        refinement_edge: (n_triangles,) local index r; the refinement edge is
            the edge opposite local vertex r
        edges: (n_edges, 2) sorted endpoint indices
        tri_edges: (n_triangles, 3) global edge of local edge j (opposite vertex j)
        edge_tris: (n_edges, 2) adjacent triangles (T+, T-), -1 on the boundary
        normals: (n_edges, 2) unit outer normal of T+
        tangents: (n_edges, 2) unit tangent, the normal rotated counterclockwise
        roots, codes: bisection-forest ancestry of every triangle
        initial: the initial mesh this one descends from (itself for roots)
    """

    def __init__(self, vertices, triangles, refinement_edge, roots=None, codes=None, initial=None):
        self.vertices = _readonly(np.array(vertices, dtype=float).reshape(-1, 2))
        self.triangles = _readonly(np.array(triangles, dtype=np.int64).reshape(-1, 3))
        self.refinement_edge = _readonly(np.array(refinement_edge, dtype=np.int64).reshape(-1))
        n_triangles = len(self.triangles)

        if roots is None:
            roots = np.arange(n_triangles, dtype=np.int64)
        if codes is None:
            codes = np.empty(n_triangles, dtype=object)
            codes[:] = 1
        self.roots = _readonly(np.asarray(roots, dtype=np.int64))
        self.codes = _readonly(np.asarray(codes, dtype=object))

        self.initial = self if initial is None else initial
        if initial is None:
            digest = hashlib.sha1()
            for array in (self.vertices, self.triangles, self.refinement_edge):
                digest.update(np.ascontiguousarray(array).tobytes())
            self.fingerprint = digest.hexdigest()
        else:
            self.fingerprint = initial.fingerprint

        self.uid = uuid.uuid4().hex
        self._build_geometry()
        self._build_edges()

    # ------------------------------------------------------------------
    # derived tables

    def _build_geometry(self):
        v = self.vertices[self.triangles]
        d1 = v[:, 1] - v[:, 0]
        d2 = v[:, 2] - v[:, 0]
        self.signed_areas = _readonly(0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]))
        self.areas = _readonly(np.abs(self.signed_areas))
        self.h = _readonly(np.sqrt(self.areas))

    def _build_edges(self):
        t = self.triangles
        n_triangles = len(t)
        if n_triangles == 0:
            raise MeshError("Triangulation has no triangles", invariant="non-empty")
        # local edge j joins local vertices j+1 -> j+2 (counterclockwise)
        directed = np.stack([t[:, [1, 2]], t[:, [2, 0]], t[:, [0, 1]]], axis=1).reshape(-1, 2)

        sorted_pairs = np.sort(directed, axis=1)
        edges, inverse, counts = np.unique(
            sorted_pairs, axis=0, return_inverse=True, return_counts=True
        )
        inverse = inverse.reshape(-1)
        if counts.max() > 2:
            bad = edges[np.argmax(counts)]
            raise MeshError(
                f"Edge {tuple(bad)} is shared by {counts.max()} triangles",
                invariant="conformity",
            )

        owner = np.repeat(np.arange(n_triangles), 3)
        order = np.argsort(inverse, kind="stable")
        edge_of = inverse[order]
        first = np.ones(len(order), dtype=bool)
        first[1:] = edge_of[1:] != edge_of[:-1]

        edge_tris = np.full((len(edges), 2), -1, dtype=np.int64)
        edge_local = np.full((len(edges), 2), -1, dtype=np.int64)
        edge_tris[edge_of[first], 0] = owner[order[first]]
        edge_local[edge_of[first], 0] = order[first] % 3
        edge_tris[edge_of[~first], 1] = owner[order[~first]]
        edge_local[edge_of[~first], 1] = order[~first] % 3

        # both neighbours of an interior edge must traverse it in opposite directions
        interior = edge_tris[:, 1] >= 0
        start_plus = directed[3 * edge_tris[interior, 0] + edge_local[interior, 0], 0]
        start_minus = directed[3 * edge_tris[interior, 1] + edge_local[interior, 1], 0]
        if np.any(start_plus == start_minus):
            raise MeshError("Neighbouring triangles have inconsistent orientation", invariant="orientation")

        start = directed[3 * edge_tris[:, 0] + edge_local[:, 0]]
        d = self.vertices[start[:, 1]] - self.vertices[start[:, 0]]
        lengths = np.hypot(d[:, 0], d[:, 1])
        tangents = d / lengths[:, None]

        self.edges = _readonly(edges.astype(np.int64))
        self.tri_edges = _readonly(inverse.reshape(n_triangles, 3).astype(np.int64))
        self.edge_tris = _readonly(edge_tris)
        self.edge_local = _readonly(edge_local)
        self.edge_lengths = _readonly(lengths)
        self.tangents = _readonly(tangents)
        self.normals = _readonly(np.column_stack([tangents[:, 1], -tangents[:, 0]]))
        self.boundary = _readonly(~interior)

    # ------------------------------------------------------------------
    # counts

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_interior_edges(self):
        return int(np.count_nonzero(~self.boundary))

    @property
    def refinement_edges(self):
        """Global edge index of every triangle's refinement edge."""
        return self.tri_edges[np.arange(self.n_triangles), self.refinement_edge]

    def min_angle(self):
        """Smallest interior angle in radians."""
        v = self.vertices[self.triangles]
        angles = []
        for j in range(3):
            a = v[:, (j + 1) % 3] - v[:, j]
            b = v[:, (j + 2) % 3] - v[:, j]
            cos = np.einsum("ij,ij->i", a, b) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            angles.append(np.arccos(np.clip(cos, -1.0, 1.0)))
        return float(np.min(angles))

    def affine_maps(self):
        """
        Affine maps x = a + B xi from the reference triangle (0,0),(1,0),(0,1).

        Returns:
            tuple: (a, B, B_inv) with shapes (n, 2), (n, 2, 2), (n, 2, 2)
        """
        v = self.vertices[self.triangles]
        a = v[:, 0]
        B = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]], axis=2)
        return a, B, np.linalg.inv(B)

    def midpoints(self):
        return 0.5 * (self.vertices[self.edges[:, 0]] + self.vertices[self.edges[:, 1]])

    def centroids(self):
        return self.vertices[self.triangles].mean(axis=1)

    # ------------------------------------------------------------------
    # ancestry

    def keys(self):
        """Forest keys (root, code) of all triangles, in triangle order."""
        return list(zip(self.roots.tolist(), self.codes.tolist()))

    def parent_map(self, coarse):
        """
        Index of the coarse triangle containing each triangle of this mesh.

        Args:
            coarse: A mesh this one refines (same initial mesh)

        Returns:
            np.ndarray: (n_triangles,) indices into coarse.triangles

        Raises:
            MeshError: If this mesh does not refine ``coarse``
        """
        if coarse.fingerprint != self.fingerprint:
            raise MeshError("Meshes descend from different initial meshes", invariant="common-root")
        lookup = {key: i for i, key in enumerate(coarse.keys())}
        parents = np.empty(self.n_triangles, dtype=np.int64)
        for i, (root, code) in enumerate(self.keys()):
            while (root, code) not in lookup:
                if code <= 1:
                    raise MeshError(
                        f"Triangle {i} is not contained in any triangle of the coarse mesh",
                        invariant="nesting",
                    )
                code >>= 1
            parents[i] = lookup[(root, code)]
        return parents

    def __repr__(self):
        return (
            f"Triangulation(n_triangles={self.n_triangles}, n_vertices={self.n_vertices}, "
            f"n_edges={self.n_edges})"
        )


@dataclass(frozen=True)
class CountsReport:
    """Combinatorial summary returned by ``validate``."""

    n_triangles: int
    n_vertices: int
    n_edges: int
    n_interior_edges: int
    min_angle: float

    @property
    def n_boundary_edges(self):
        return self.n_edges - self.n_interior_edges

    def as_dict(self):
        return {
            "n_triangles": self.n_triangles,
            "n_vertices": self.n_vertices,
            "n_edges": self.n_edges,
            "n_interior_edges": self.n_interior_edges,
            "n_boundary_edges": self.n_boundary_edges,
            "min_angle_deg": float(np.degrees(self.min_angle)),
        }


def validate(mesh):
    """
    Check the mesh invariants and return its counts.

    The checks run in a fixed order and the first violation raises.

    Raises:
        MeshError: With ``invariant`` naming the violated property
    """
    if np.any(mesh.signed_areas <= 0.0):
        bad = int(np.argmin(mesh.signed_areas))
        raise MeshError(
            f"Triangle {bad} has non-positive signed area {mesh.signed_areas[bad]:.3e}",
            invariant="positive-area",
        )

    used = np.zeros(mesh.n_vertices, dtype=bool)
    used[mesh.triangles.reshape(-1)] = True
    if not used.all():
        raise MeshError(f"Vertex {int(np.argmin(used))} belongs to no triangle", invariant="vertices-used")

    n_t, n_n = mesh.n_triangles, mesh.n_vertices
    n_e, n_ei = mesh.n_edges, mesh.n_interior_edges
    if n_e + n_ei != 3 * n_t:
        raise MeshError(
            f"Euler formula violated: |E| + |E(Omega)| = {n_e} + {n_ei} != 3|T| = {3 * n_t}",
            invariant="euler-edges",
        )
    if n_ei + n_n != 2 * n_t + 1:
        raise MeshError(
            f"Euler formula violated: |E(Omega)| + |N| = {n_ei} + {n_n} != 2|T| + 1 = {2 * n_t + 1}",
            invariant="euler-vertices",
        )

    return CountsReport(
        n_triangles=n_t,
        n_vertices=n_n,
        n_edges=n_e,
        n_interior_edges=n_ei,
        min_angle=mesh.min_angle(),
    )


def _longest_edge(vertices, triangles):
    # edge j is opposite vertex j; ties go to the smallest opposite vertex index
    v = vertices[triangles]
    lengths = np.stack(
        [np.linalg.norm(v[:, (j + 2) % 3] - v[:, (j + 1) % 3], axis=1) for j in range(3)], axis=1
    )
    longest = lengths.max(axis=1, keepdims=True)
    candidates = lengths >= longest * (1.0 - _GEOM_TOL)
    opposite = np.where(candidates, triangles, np.iinfo(np.int64).max)
    return np.argmin(opposite, axis=1)


def _find_hanging_vertices(mesh):
    # a hanging vertex lies inside an edge that has a single neighbour
    tree = cKDTree(mesh.vertices)
    candidates = np.flatnonzero(mesh.boundary)
    mids = mesh.midpoints()[candidates]
    radii = 0.5 * mesh.edge_lengths[candidates] * (1.0 + 1e-9)
    for e, mid, radius in zip(candidates, mids, radii):
        i, j = mesh.edges[e]
        for n in tree.query_ball_point(mid, radius):
            if n in (i, j):
                continue
            a, b, x = mesh.vertices[i], mesh.vertices[j], mesh.vertices[n]
            d = b - a
            cross = d[0] * (x - a)[1] - d[1] * (x - a)[0]
            if abs(cross) <= 1e-10 * float(d @ d):
                return int(n), (int(i), int(j))
    return None


def build_initial(vertices, triangles, refinement_edges=None):
    """
    Build a validated initial triangulation.

    Args:
        vertices: Sequence of (x, y) points
        triangles: Sequence of counterclockwise vertex-index triples
        refinement_edges: Optional local refinement-edge index per triangle;
            defaults to the longest edge

    Returns:
        Triangulation: Root of a new bisection forest

    Raises:
        MeshError: For malformed, degenerate, mis-oriented or non-conforming input
    """
    vertices = np.asarray(vertices, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    if vertices.ndim != 2 or vertices.shape[1] != 2:
        raise MeshError(f"Vertices must have shape (n, 2), got {vertices.shape}", invariant="format")
    if triangles.ndim != 2 or triangles.shape[1] != 3 or len(triangles) == 0:
        raise MeshError(f"Triangles must have shape (m, 3), got {triangles.shape}", invariant="format")
    if triangles.min() < 0 or triangles.max() >= len(vertices):
        raise MeshError("Triangle refers to a vertex index out of range", invariant="format")
    if np.any(np.sort(triangles, axis=1)[:, 1:] == np.sort(triangles, axis=1)[:, :-1]):
        raise MeshError("Triangle repeats a vertex", invariant="positive-area")

    v = vertices[triangles]
    d1 = v[:, 1] - v[:, 0]
    d2 = v[:, 2] - v[:, 0]
    signed = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    longest = np.max([np.sum((v[:, (j + 1) % 3] - v[:, j]) ** 2, axis=1) for j in range(3)], axis=0)
    degenerate = np.abs(signed) <= _GEOM_TOL * longest
    if degenerate.any():
        bad = int(np.argmax(degenerate))
        raise MeshError(f"Triangle {bad} is degenerate (zero area)", invariant="positive-area")
    if np.any(signed < 0):
        bad = int(np.argmax(signed < 0))
        raise MeshError(f"Triangle {bad} is oriented clockwise", invariant="orientation")

    if refinement_edges is None:
        refinement_edges = _longest_edge(vertices, triangles)
    refinement_edges = np.asarray(refinement_edges, dtype=np.int64)
    if refinement_edges.shape != (len(triangles),) or np.any((refinement_edges < 0) | (refinement_edges > 2)):
        raise MeshError("Refinement edge indices must be one of 0, 1, 2 per triangle", invariant="format")

    mesh = Triangulation(vertices, triangles, refinement_edges)
    hanging = _find_hanging_vertices(mesh)
    if hanging is not None:
        n, (i, j) = hanging
        raise MeshError(f"Hanging vertex {n} on edge ({i}, {j})", invariant="conformity")
    validate(mesh)
    logger.debug(f"Built initial mesh with {mesh.n_triangles} triangles and {mesh.n_vertices} vertices")
    return mesh
