"""Quadrilateral meshes: structured generation, random distortion, and
smoothing-cell subdivision.

Nodes are laid out on a uniform grid over [0, L] x [-D/2, D/2]; elements
are counter-clockwise 4-node quads. Interior nodes can be perturbed by a
seeded irregularity factor, and each element can be split into 1, 2 or 4
quadrilateral smoothing cells by its bimedians.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateElement,
    InvalidElement,
    UnsupportedSubdivision,
)

log = logging.getLogger(__name__)

BOUNDARY_TAGS = ("left", "right", "top", "bottom")

# Local edge e of a quad runs from corner e to corner (e+1) % 4.
EDGE_CORNERS = ((0, 1), (1, 2), (2, 3), (3, 0))


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class Quad4Element:
    """Four node indices in counter-clockwise order."""

    node_ids: tuple[int, int, int, int]


@dataclass(frozen=True)
class BoundaryEdge:
    element: int
    local_edge: int
    tag: str


@dataclass(frozen=True)
class DistortionSpec:
    """Irregularity factor in [0, 0.5] plus the RNG seed that fixes the
    perturbation draws."""

    alpha_ir: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.alpha_ir <= 0.5:
            raise ValueError(f"alpha_ir must be in [0, 0.5], got {self.alpha_ir}")


@dataclass(frozen=True, eq=False)
class SmoothingCell:
    """A CCW polygonal subcell of an element over which strains are
    smoothed."""

    vertices: np.ndarray  # (m, 2)
    area: float
    parent_element: int


class Mesh:
    """Nodes, CCW quad connectivity, and tagged boundary edges."""

    def __init__(self, nodes, elements, boundary_edges):
        self.nodes = list(nodes)
        self.elements = list(elements)
        self.boundary_edges = list(boundary_edges)
        self._validate()

    def _validate(self):
        n = len(self.nodes)
        ids = [nd.id for nd in self.nodes]
        if ids != list(range(n)):
            raise ValueError("node ids must be 0..N-1 in order")
        for e, el in enumerate(self.elements):
            if len(set(el.node_ids)) != 4:
                raise InvalidElement(e, "repeated node id")
            if any(not 0 <= i < n for i in el.node_ids):
                raise InvalidElement(e, "node id out of range")
        seen = set()
        for be in self.boundary_edges:
            key = (be.element, be.local_edge)
            if key in seen:
                raise ValueError(f"duplicate boundary edge {key}")
            seen.add(key)

    @property
    def num_nodes(self):
        return len(self.nodes)

    @property
    def num_elements(self):
        return len(self.elements)

    def coords(self):
        """All node coordinates as an (N, 2) array."""
        return np.array([(nd.x, nd.y) for nd in self.nodes], dtype=float)

    def element_coords(self, e):
        """Corner coordinates of element e as a (4, 2) CCW array."""
        el = self.elements[e]
        return np.array(
            [(self.nodes[i].x, self.nodes[i].y) for i in el.node_ids], dtype=float
        )

    def boundary_node_ids(self, tag=None):
        """Ids of nodes lying on tagged boundary edges (all tags by default)."""
        out = set()
        for be in self.boundary_edges:
            if tag is not None and be.tag != tag:
                continue
            a, b = EDGE_CORNERS[be.local_edge]
            el = self.elements[be.element]
            out.add(el.node_ids[a])
            out.add(el.node_ids[b])
        return sorted(out)

    def interior_node_ids(self):
        on_boundary = set(self.boundary_node_ids())
        return [nd.id for nd in self.nodes if nd.id not in on_boundary]


def polygon_area(pts):
    """Signed shoelace area of a closed CCW polygon given as (m, 2)."""
    pts = np.asarray(pts, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(pts):
    """Area centroid of a simple polygon (signed-area formula)."""
    pts = np.asarray(pts, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    cx = float(((x + xn) * cross).sum() / (6.0 * a))
    cy = float(((y + yn) * cross).sum() / (6.0 * a))
    return np.array([cx, cy])


def _segments_properly_intersect(p1, p2, p3, p4):
    """True if open segments p1-p2 and p3-p4 cross."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 \
        and d3 != 0 and d4 != 0


def is_simple_quad(pts):
    """True if the quad has no crossing between its two opposite edge pairs."""
    p = np.asarray(pts, dtype=float)
    if _segments_properly_intersect(p[0], p[1], p[2], p[3]):
        return False
    if _segments_properly_intersect(p[1], p[2], p[3], p[0]):
        return False
    return True


def element_geometry(quad):
    """Shoelace area, area centroid, and convexity flag for a CCW quad.

    Convexity holds iff all four cross products of consecutive edges share
    one sign. Raises DegenerateElement when the signed area is <= 0.
    """
    quad = np.asarray(quad, dtype=float)
    area = polygon_area(quad)
    if area <= 0.0:
        raise DegenerateElement(f"signed area {area} is not positive")
    edges = np.roll(quad, -1, axis=0) - quad
    cross = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] \
        - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
    is_convex = bool(np.all(cross > 0) or np.all(cross < 0))
    return area, polygon_centroid(quad), is_convex


def generate_structured_mesh(nx, ny, length, height):
    """Uniform nx-by-ny quad grid over [0, length] x [-height/2, height/2].

    Boundary edges are tagged left/right/top/bottom and each belongs to
    exactly one element.
    """
    if nx < 1 or ny < 1:
        raise ValueError("nx and ny must be >= 1")
    if length <= 0 or height <= 0:
        raise ValueError("length and height must be positive")
    xs = np.linspace(0.0, length, nx + 1)
    ys = np.linspace(-height / 2.0, height / 2.0, ny + 1)
    nodes = []
    for j in range(ny + 1):
        for i in range(nx + 1):
            nodes.append(Node(id=j * (nx + 1) + i, x=float(xs[i]), y=float(ys[j])))

    def nid(i, j):
        return j * (nx + 1) + i

    elements = []
    boundary = []
    for j in range(ny):
        for i in range(nx):
            e = len(elements)
            elements.append(
                Quad4Element((nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1)))
            )
            if j == 0:
                boundary.append(BoundaryEdge(e, 0, "bottom"))
            if i == nx - 1:
                boundary.append(BoundaryEdge(e, 1, "right"))
            if j == ny - 1:
                boundary.append(BoundaryEdge(e, 2, "top"))
            if i == 0:
                boundary.append(BoundaryEdge(e, 3, "left"))
    return Mesh(nodes, elements, boundary)


def distort_mesh(mesh, spec, dx, dy):
    """Perturb interior nodes by (2r - 1) * alpha_ir * (dx, dy) with
    independent uniform draws r per node per axis.

    Draw order is node-major, x before y, so a fixed seed reproduces the
    mesh bit for bit. Boundary nodes never move. Elements that come out
    self-intersecting or inverted raise InvalidElement; concave-but-simple
    elements are accepted (and left to the caller to inspect via
    concave_elements).
    """
    rng = np.random.default_rng(spec.seed)
    interior = set(mesh.interior_node_ids())
    new_nodes = []
    for nd in mesh.nodes:
        if nd.id in interior:
            rx = rng.random()
            ry = rng.random()
            x = nd.x + (2.0 * rx - 1.0) * spec.alpha_ir * dx
            y = nd.y + (2.0 * ry - 1.0) * spec.alpha_ir * dy
            new_nodes.append(Node(nd.id, x, y))
        else:
            new_nodes.append(nd)
    out = Mesh(new_nodes, mesh.elements, mesh.boundary_edges)
    for e in range(out.num_elements):
        quad = out.element_coords(e)
        if polygon_area(quad) <= 0.0:
            raise InvalidElement(e, "distortion inverted the element")
        if not is_simple_quad(quad):
            raise InvalidElement(e, "distortion produced a self-intersecting quad")
    n_concave = len(concave_elements(out))
    if n_concave:
        log.debug("distort_mesh: %d concave element(s) at alpha_ir=%g",
                  n_concave, spec.alpha_ir)
    return out


def concave_elements(mesh):
    """Indices of simple but non-convex elements."""
    out = []
    for e in range(mesh.num_elements):
        _, _, convex = element_geometry(mesh.element_coords(e))
        if not convex:
            out.append(e)
    return out


def _make_cell(verts, parent):
    verts = np.asarray(verts, dtype=float)
    area = polygon_area(verts)
    if area <= 0.0:
        raise DegenerateElement(
            f"smoothing cell of element {parent} has area {area}"
        )
    return SmoothingCell(vertices=verts, area=area, parent_element=parent)


def subdivide(quad, k, parent_element=-1, split="12-34"):
    """Split a CCW quad (given as (4, 2) corner coordinates) into k
    smoothing cells.

    k=1 keeps the element; k=4 uses both bimedians (cells meet at the
    bimedian intersection); k=2 uses one bimedian, by default the one
    joining the midpoints of sides 1-2 and 3-4 (split="12-34"); pass
    split="23-41" for the other orientation. The cells tile the element.
    """
    quad = np.asarray(quad, dtype=float)
    if quad.shape != (4, 2):
        raise ValueError("quad must be a (4, 2) coordinate array")
    if k not in (1, 2, 4):
        raise UnsupportedSubdivision(f"k must be 1, 2 or 4, got {k}")
    n1, n2, n3, n4 = quad
    if k == 1:
        return [_make_cell(quad, parent_element)]
    m12 = 0.5 * (n1 + n2)
    m23 = 0.5 * (n2 + n3)
    m34 = 0.5 * (n3 + n4)
    m41 = 0.5 * (n4 + n1)
    if k == 2:
        if split == "12-34":
            cells = [(n1, m12, m34, n4), (m12, n2, n3, m34)]
        elif split == "23-41":
            cells = [(n1, n2, m23, m41), (m41, m23, n3, n4)]
        else:
            raise ValueError(f"unknown split {split!r}")
        return [_make_cell(c, parent_element) for c in cells]
    center = 0.25 * (n1 + n2 + n3 + n4)  # bimedians bisect each other here
    cells = [
        (n1, m12, center, m41),
        (m12, n2, m23, center),
        (center, m23, n3, m34),
        (m41, center, m34, n4),
    ]
    return [_make_cell(c, parent_element) for c in cells]


def subdivide_adaptive(quad, k, parent_element=-1, split="12-34"):
    """Subdivision with a deterministic fallback for strongly concave
    elements whose bimedian cells invert.

    Tries the requested (k, split); on an inverted cell falls back to the
    two-cell splits (both orientations) and finally to the single cell,
    which is always valid for a simple CCW quad. Returns
    (cells, k_used, split_used).
    """
    if k == 4:
        attempts = [(4, split), (2, "12-34"), (2, "23-41"), (1, split)]
    elif k == 2:
        other = "23-41" if split == "12-34" else "12-34"
        attempts = [(2, split), (2, other), (1, split)]
    else:
        attempts = [(k, split)]
    last = None
    for kk, ss in attempts:
        try:
            return subdivide(quad, kk, parent_element, ss), kk, ss
        except DegenerateElement as err:
            last = err
    raise last


def mesh_to_text(mesh):
    """Serialize to the plain-text mesh format.

    Line 1: ``nodes N elements E``; then N ``id x y`` lines, E
    ``id n1 n2 n3 n4`` lines, and one ``edge elem local_edge tag`` line
    per boundary edge.
    """
    lines = [f"nodes {mesh.num_nodes} elements {mesh.num_elements}"]
    for nd in mesh.nodes:
        lines.append(f"{nd.id} {nd.x:.17g} {nd.y:.17g}")
    for e, el in enumerate(mesh.elements):
        lines.append(f"{e} {el.node_ids[0]} {el.node_ids[1]} {el.node_ids[2]} {el.node_ids[3]}")
    for be in mesh.boundary_edges:
        lines.append(f"edge {be.element} {be.local_edge} {be.tag}")
    return "\n".join(lines) + "\n"


def mesh_from_text(text):
    """Parse the plain-text mesh format produced by mesh_to_text."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    head = rows[0]
    if head[0] != "nodes" or head[2] != "elements":
        raise ValueError("bad header line")
    n, e = int(head[1]), int(head[3])
    nodes = []
    for row in rows[1 : 1 + n]:
        nodes.append(Node(int(row[0]), float(row[1]), float(row[2])))
    elements = []
    for row in rows[1 + n : 1 + n + e]:
        elements.append(Quad4Element(tuple(int(t) for t in row[1:5])))
    boundary = []
    for row in rows[1 + n + e :]:
        if row[0] != "edge":
            raise ValueError(f"expected boundary edge line, got {row}")
        boundary.append(BoundaryEdge(int(row[1]), int(row[2]), row[3]))
    return Mesh(nodes, elements, boundary)


def write_mesh_text(mesh, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(mesh_to_text(mesh))


def read_mesh_text(path):
    with open(path, "r", encoding="ascii") as fh:
        return mesh_from_text(fh.read())
