"""
Newest-vertex bisection with closure, red refinement and overlay.

All operations return new Triangulation objects and leave their inputs
untouched. Bisection and overlay stay inside the bisection forest of the
input's initial mesh; red refinement starts a fresh forest because red
children are not reachable by bisection.
"""

import logging

import numpy as np

from ..exceptions import MeshError, OverlayError
from .triangulation import Triangulation, validate

logger = logging.getLogger(__name__)


def _split(triangles, refinement_edge, midpoints):
    """
    Bisect each triangle across its refinement edge.

    With (p, q, s) the triangle rotated so that p is opposite the refinement
    edge, the children are (p, q, m) and (p, m, s). The new vertex m is the
    newest vertex of both, so their refinement edges are p-q and s-p.
    """
    rows = np.arange(len(triangles))
    p = triangles[rows, refinement_edge]
    q = triangles[rows, (refinement_edge + 1) % 3]
    s = triangles[rows, (refinement_edge + 2) % 3]
    child0 = np.column_stack([p, q, midpoints])
    child1 = np.column_stack([p, midpoints, s])
    return child0, child1


def _close(mesh, marked_edges):
    """Mark refinement edges until no triangle has a marked edge besides an unmarked refinement edge."""
    marked = marked_edges.copy()
    ref = mesh.refinement_edges
    rounds = 0
    while True:
        needs = marked[mesh.tri_edges].any(axis=1) & ~marked[ref]
        if not needs.any():
            break
        marked[ref[needs]] = True
        rounds += 1
    logger.debug(f"Closure reached a fixed point after {rounds} rounds")
    return marked


def refine_edges(mesh, marked_edges, midpoint_ids=None):
    """
    Smallest conforming NVB refinement that bisects every marked edge.

    Args:
        mesh: Input triangulation
        marked_edges: (n_edges,) boolean mask
        midpoint_ids: Optional (n_edges,) vertex ids of midpoints that already
            exist as vertices (-1 where none); used to repair hanging vertices

    Returns:
        Triangulation: Refined mesh in the same bisection forest
    """
    marked = _close(mesh, np.asarray(marked_edges, dtype=bool))
    if not marked.any():
        return mesh

    mid = np.full(mesh.n_edges, -1, dtype=np.int64)
    if midpoint_ids is not None:
        mid[:] = midpoint_ids
    fresh = marked & (mid < 0)
    mid[fresh] = mesh.n_vertices + np.arange(np.count_nonzero(fresh))
    new_points = 0.5 * (
        mesh.vertices[mesh.edges[fresh, 0]] + mesh.vertices[mesh.edges[fresh, 1]]
    )
    vertices = np.vstack([mesh.vertices, new_points])

    tris, r = mesh.triangles, mesh.refinement_edge
    ref = mesh.refinement_edges
    split = marked[ref]
    keep = ~split

    # first bisection of every triangle with a marked refinement edge
    rows = np.flatnonzero(split)
    r_split = r[split]
    c0, c1 = _split(tris[split], r_split, mid[ref[split]])
    # refinement edges of the children are parent edges p-q and s-p
    c0_edge = mesh.tri_edges[rows, (r_split + 2) % 3]
    c1_edge = mesh.tri_edges[rows, (r_split + 1) % 3]
    codes = mesh.codes[split]
    roots = mesh.roots[split]

    children = np.vstack([c0, c1])
    child_r = np.concatenate([np.full(len(c0), 2), np.full(len(c1), 1)])
    child_edge = np.concatenate([c0_edge, c1_edge])
    child_codes = np.concatenate([codes * 2, codes * 2 + 1])
    child_roots = np.concatenate([roots, roots])

    # second bisection where a child's refinement edge is marked too
    again = marked[child_edge]
    g0, g1 = _split(children[again], child_r[again], mid[child_edge[again]])
    grand_codes = child_codes[again]
    grand_roots = child_roots[again]
    settled = ~again

    triangles = np.vstack([tris[keep], children[settled], g0, g1])
    refinement = np.concatenate([
        r[keep],
        child_r[settled],
        np.full(len(g0), 2),
        np.full(len(g1), 1),
    ])
    roots_out = np.concatenate([mesh.roots[keep], child_roots[settled], grand_roots, grand_roots])
    codes_out = np.concatenate([mesh.codes[keep], child_codes[settled], grand_codes * 2, grand_codes * 2 + 1])

    refined = Triangulation(
        vertices, triangles, refinement, roots=roots_out, codes=codes_out, initial=mesh.initial
    )
    validate(refined)
    return refined


def bisect(mesh, marked):
    """
    Smallest admissible refinement in which every marked triangle is bisected.

    Args:
        mesh: Admissible triangulation
        marked: Iterable of triangle ids

    Returns:
        Triangulation: Conforming refinement (the input itself when nothing is marked)

    Raises:
        MeshError: If a marked id does not exist
    """
    marked = np.unique(np.asarray(list(marked), dtype=np.int64))
    if marked.size == 0:
        return mesh
    if marked[0] < 0 or marked[-1] >= mesh.n_triangles:
        bad = marked[0] if marked[0] < 0 else marked[-1]
        raise MeshError(f"Invalid triangle id {bad} for a mesh with {mesh.n_triangles} triangles", invariant="triangle-id")

    edge_mask = np.zeros(mesh.n_edges, dtype=bool)
    edge_mask[mesh.refinement_edges[marked]] = True
    refined = refine_edges(mesh, edge_mask)
    logger.debug(
        f"Bisected {marked.size} marked triangles: {mesh.n_triangles} -> {refined.n_triangles} triangles"
    )
    return refined


def red_refine(mesh):
    """
    Uniform red refinement: every triangle splits into four similar children.

    Corner child i keeps vertex i in local slot i and the middle child is the
    parent rotated by 180 degrees, so each child keeps the parent's local
    refinement-edge index. The result is the root of a new bisection forest.
    """
    mid = mesh.n_vertices + np.arange(mesh.n_edges)
    vertices = np.vstack([mesh.vertices, mesh.midpoints()])
    t = mesh.triangles
    m0, m1, m2 = (mid[mesh.tri_edges[:, j]] for j in range(3))

    corner0 = np.column_stack([t[:, 0], m2, m1])
    corner1 = np.column_stack([m2, t[:, 1], m0])
    corner2 = np.column_stack([m1, m0, t[:, 2]])
    middle = np.column_stack([m0, m1, m2])

    triangles = np.stack([corner0, corner1, corner2, middle], axis=1).reshape(-1, 3)
    refinement = np.repeat(mesh.refinement_edge, 4)
    refined = Triangulation(vertices, triangles, refinement)
    validate(refined)
    logger.debug(f"Red refinement: {mesh.n_triangles} -> {refined.n_triangles} triangles")
    return refined


def overlay(a, b):
    """
    Coarsest common refinement of two admissible triangulations.

    The forests of both meshes are merged and the merged forest is rebuilt from
    the shared initial mesh; any hanging vertex left by the merge is removed
    by closure.

    Raises:
        OverlayError: If the meshes descend from different initial meshes
    """
    if a.fingerprint != b.fingerprint:
        raise OverlayError("Cannot overlay meshes with different initial meshes", invariant="common-root")
    if a is b:
        return a

    nodes = set()
    for mesh in (a, b):
        for root, code in mesh.keys():
            nodes.add((root, code))
            while code > 1:
                code >>= 1
                if (root, code) in nodes:
                    break
                nodes.add((root, code))

    initial = a.initial
    vertices = [tuple(p) for p in initial.vertices.tolist()]
    midpoint_of = {}
    triangles, refinement, roots, codes = [], [], [], []

    for root in range(initial.n_triangles):
        stack = [(1, tuple(initial.triangles[root].tolist()), int(initial.refinement_edge[root]))]
        while stack:
            code, tri, r = stack.pop()
            if (root, 2 * code) not in nodes:
                triangles.append(tri)
                refinement.append(r)
                roots.append(root)
                codes.append(code)
                continue
            p, q, s = tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]
            key = (min(q, s), max(q, s))
            m = midpoint_of.get(key)
            if m is None:
                xq, yq = vertices[q]
                xs, ys = vertices[s]
                m = len(vertices)
                vertices.append((0.5 * (xq + xs), 0.5 * (yq + ys)))
                midpoint_of[key] = m
            # child 1 pushed first so child 0 is emitted first
            stack.append((2 * code + 1, (p, m, s), 1))
            stack.append((2 * code, (p, q, m), 2))

    code_array = np.empty(len(codes), dtype=object)
    code_array[:] = codes
    merged = Triangulation(
        np.array(vertices), np.array(triangles), refinement, roots=roots, codes=code_array, initial=initial
    )

    hanging = np.full(merged.n_edges, -1, dtype=np.int64)
    for e, (i, j) in enumerate(merged.edges.tolist()):
        m = midpoint_of.get((i, j))
        if m is not None:
            hanging[e] = m
    if np.any(hanging >= 0):
        logger.debug(f"Overlay left {np.count_nonzero(hanging >= 0)} hanging edges; applying closure")
        merged = refine_edges(merged, hanging >= 0, midpoint_ids=hanging)
    else:
        validate(merged)
    return merged
