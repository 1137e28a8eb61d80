"""
Plain-text mesh format.

    vertices <n>
    x y            (n lines)
    triangles <m>
    i j k r        (m lines; r is the local refinement-edge index)

Coordinates are written with ``repr`` so that reading a written file gives
back bit-identical floats. Blank lines and lines starting with '#' are ignored.
"""

import logging
import re
from pathlib import Path

from ..exceptions import MeshFormatError
from .triangulation import build_initial

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^(vertices|triangles)\s+(\d+)$")


def _content_lines(text):
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield number, stripped


def _read_block(lines, name, width, convert):
    try:
        number, header = next(lines)
    except StopIteration:
        raise MeshFormatError(f"Missing '{name}' section", invariant="format")
    match = _HEADER.match(header)
    if not match or match.group(1) != name:
        raise MeshFormatError(f"Line {number}: expected '{name} <count>', got '{header}'", invariant="format")

    rows = []
    for _ in range(int(match.group(2))):
        try:
            number, line = next(lines)
        except StopIteration:
            raise MeshFormatError(f"Section '{name}' ends early", invariant="format")
        tokens = line.split()
        if len(tokens) != width:
            raise MeshFormatError(f"Line {number}: expected {width} values, got {len(tokens)}", invariant="format")
        try:
            rows.append([convert(token) for token in tokens])
        except ValueError:
            raise MeshFormatError(f"Line {number}: cannot parse '{line}'", invariant="format")
    return rows


def parse_mesh(text):
    """Parse mesh text into (vertices, triangles, refinement_edges) lists."""
    lines = _content_lines(text)
    vertices = _read_block(lines, "vertices", 2, float)
    rows = _read_block(lines, "triangles", 4, int)
    leftover = next(lines, None)
    if leftover is not None:
        raise MeshFormatError(f"Line {leftover[0]}: unexpected content after triangles", invariant="format")
    triangles = [row[:3] for row in rows]
    refinement_edges = [row[3] for row in rows]
    return vertices, triangles, refinement_edges


def read_mesh(path):
    """
    Read and validate a mesh file.

    Returns:
        Triangulation: A new initial mesh (ancestry is not stored in the file)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise MeshFormatError(f"Cannot read mesh file {path}: {e}", invariant="format")
    vertices, triangles, refinement_edges = parse_mesh(text)
    mesh = build_initial(vertices, triangles, refinement_edges)
    logger.info(f"Read mesh {path} with {mesh.n_triangles} triangles")
    return mesh


def format_mesh(mesh):
    lines = [f"vertices {mesh.n_vertices}"]
    lines.extend(f"{x!r} {y!r}" for x, y in mesh.vertices.tolist())
    lines.append(f"triangles {mesh.n_triangles}")
    for (i, j, k), r in zip(mesh.triangles.tolist(), mesh.refinement_edge.tolist()):
        lines.append(f"{i} {j} {k} {r}")
    return "\n".join(lines) + "\n"


def write_mesh(mesh, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_mesh(mesh), encoding="utf-8", newline="\n")
    logger.debug(f"Wrote mesh with {mesh.n_triangles} triangles to {path}")
    return path
