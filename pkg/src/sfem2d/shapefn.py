"""Shape functions on physical-coordinate quadrilaterals.

Three schemes:

* ``wachspress`` -- rational barycentric interpolants built from the four
  side-line equations and wedge constants. Kronecker delta at nodes,
  linear on edges, linearly complete, and positive inside convex quads.
* ``averaged`` -- the nine-site table (nodes, edge midpoints, bimedian
  intersection) extended by linear interpolation along smoothing-cell
  boundary segments. Defined only on that skeleton.
* ``lagrange`` -- the non-mapped {1, x, y, xy} fit through the nodes.
  May fail to exist (singular moment matrix), go negative, or lose
  linearity on edges; kept deliberately unpatched so those deficiencies
  can be reproduced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AdjointZero,
    CoincidentPoints,
    DegenerateElement,
    NonExistent,
    OffSkeleton,
    SfemError,
    WedgeDegenerate,
)
from .mesh import polygon_area

SCHEMES = ("wachspress", "averaged", "lagrange")

# Wedge i is the product of the line equations of the two sides not
# adjacent to node i; sides are 1-2, 2-3, 3-4, 4-1 in that order.
_WEDGE_SIDES = ((1, 2), (2, 3), (3, 0), (0, 1))


@dataclass(frozen=True, eq=False)
class LineEquation:
    """Unit-normalized line a*x + b*y + c, positive on the element side
    that contains the reference interior point.

    Evaluation uses the anchored cross-product form
    sign * (dx*(y - py) - dy*(x - px)) / |d|, which is bit-exact zero at
    both defining points; (a, b, c) are the equivalent coefficients."""

    px: float
    py: float
    dx: float
    dy: float
    norm: float
    sign: float

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        return self.sign * (
            self.dx * (p[..., 1] - self.py) - self.dy * (p[..., 0] - self.px)
        ) / self.norm

    @property
    def a(self):
        return -self.sign * self.dy / self.norm

    @property
    def b(self):
        return self.sign * self.dx / self.norm

    @property
    def c(self):
        return -(self.a * self.px + self.b * self.py)

    @property
    def normal(self):
        return np.array([self.a, self.b])


def line_through(p, q, positive_at):
    """Unit-normalized line through p and q, sign fixed so the equation is
    positive at ``positive_at``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = q - p
    norm = float(np.hypot(d[0], d[1]))
    if not norm > 0.0:
        raise CoincidentPoints(f"line through {p} and {q} is undefined")
    line = LineEquation(px=float(p[0]), py=float(p[1]), dx=float(d[0]),
                        dy=float(d[1]), norm=norm, sign=1.0)
    if line(np.asarray(positive_at, dtype=float)) < 0.0:
        line = LineEquation(px=line.px, py=line.py, dx=line.dx, dy=line.dy,
                            norm=norm, sign=-1.0)
    return line


def _interior_point(quad):
    """A point strictly inside a simple quad: the midpoint of an interior
    diagonal (falls back to the vertex average)."""
    for i, j in ((0, 2), (1, 3)):
        mid = 0.5 * (quad[i] + quad[j])
        if _point_in_polygon(mid, quad):
            return mid
    return quad.mean(axis=0)


def _point_in_polygon(p, poly):
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > p[1]) != (y2 > p[1]):
            xi = x1 + (p[1] - y1) * (x2 - x1) / (y2 - y1)
            if p[0] < xi:
                inside = not inside
    return inside


def quad_diameter(quad):
    quad = np.asarray(quad, dtype=float)
    d = quad[:, None, :] - quad[None, :, :]
    return float(np.sqrt((d ** 2).sum(-1)).max())


@dataclass(frozen=True, eq=False)
class WachspressBasis:
    node_coords: np.ndarray           # (4, 2)
    lines: tuple                      # side lines 1-2, 2-3, 3-4, 4-1
    kappas: np.ndarray                # (4,)
    diameter: float
    # vectorized copies of the line data (anchor, direction, sign/norm)
    line_anchor: np.ndarray           # (4, 2)
    line_dir: np.ndarray              # (4, 2)
    line_scale: np.ndarray            # (4,)

    def line_values(self, p):
        """All four side-line equations at p, shape (..., 4)."""
        p = np.asarray(p, dtype=float)
        rel = p[..., None, :] - self.line_anchor
        return (
            self.line_dir[:, 0] * rel[..., 1] - self.line_dir[:, 1] * rel[..., 0]
        ) * self.line_scale

    @property
    def line_normals(self):
        """(4, 2) unit normals (gradients of the line equations)."""
        return np.column_stack(
            [-self.line_dir[:, 1], self.line_dir[:, 0]]
        ) * self.line_scale[:, None]


def _triangle_area(a, b, c):
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def build_wachspress(quad):
    """Construct the rational basis for a CCW quad.

    The wedge constant of node i weights the product of its two
    opposite-side lines by the signed corner-triangle area at i and the
    lengths of those sides, kappa_i = A(v_{i-1}, v_i, v_{i+1}) |s_j| |s_k|.
    That choice (and only that choice, up to a common factor) makes the
    rational basis reproduce linear fields exactly; the Kronecker-delta
    property is verified to 1e-12 before returning.
    """
    quad = np.asarray(quad, dtype=float)
    if polygon_area(quad) <= 0.0:
        raise DegenerateElement("quad must be CCW with positive area")
    ref = _interior_point(quad)
    lines = tuple(
        line_through(quad[i], quad[(i + 1) % 4], ref) for i in range(4)
    )
    diam = quad_diameter(quad)
    side_len = np.array(
        [np.hypot(*(quad[(i + 1) % 4] - quad[i])) for i in range(4)]
    )
    kappas = np.empty(4)
    for i, (j, k) in enumerate(_WEDGE_SIDES):
        prod = float(lines[j](quad[i]) * lines[k](quad[i]))
        if abs(prod) < 1e-14 * diam ** 2:
            raise WedgeDegenerate(
                f"opposite sides pass through node {i + 1}; wedge undefined"
            )
        corner = _triangle_area(quad[i - 1], quad[i], quad[(i + 1) % 4])
        if abs(corner) < 1e-14 * diam ** 2:
            raise WedgeDegenerate(
                f"node {i + 1} is collinear with its neighbours; "
                "wedge constant zero"
            )
        kappas[i] = corner * side_len[j] * side_len[k]
    kappas /= np.abs(kappas).max()  # common factor; keeps wedges O(1)
    basis = WachspressBasis(
        quad, lines, kappas, diam,
        line_anchor=np.array([(ln.px, ln.py) for ln in lines]),
        line_dir=np.array([(ln.dx, ln.dy) for ln in lines]),
        line_scale=np.array([ln.sign / ln.norm for ln in lines]),
    )
    delta = eval_wachspress(basis, quad) - np.eye(4)
    if np.abs(delta).max() > 1e-12:
        raise SfemError("Kronecker-delta check failed at construction")
    return basis


_J_SIDES = [jk[0] for jk in _WEDGE_SIDES]
_K_SIDES = [jk[1] for jk in _WEDGE_SIDES]


def _wedges(basis, p):
    """Wedge values at p; p may be (2,) or (n, 2). Returns (..., 4)."""
    lvals = basis.line_values(p)
    return basis.kappas * lvals[..., _J_SIDES] * lvals[..., _K_SIDES]


def eval_wachspress(basis, p):
    """Shape values N_i = w_i / sum(w) at p ((2,) -> (4,), (n,2) -> (n,4))."""
    w = _wedges(basis, p)
    total = w.sum(axis=-1)
    scale = np.abs(w).max(axis=-1)
    bad = np.abs(total) <= 1e-12 * np.maximum(scale, 1e-300)
    if np.any(bad):
        raise AdjointZero("wedge sum vanishes at the evaluation point")
    return w / total[..., None]


def eval_wachspress_gradient(basis, p):
    """Analytic gradients of the rational basis ((2,) -> (4, 2),
    (n, 2) -> (n, 4, 2)); quotient rule on N_i = w_i / sum(w)."""
    p = np.asarray(p, dtype=float)
    lvals = basis.line_values(p)
    normals = basis.line_normals
    j, k = _J_SIDES, _K_SIDES
    w = basis.kappas * lvals[..., j] * lvals[..., k]
    # grad w_i = kappa_i * (grad l_j * l_k + l_j * grad l_k)
    gw = basis.kappas[..., :, None] * (
        normals[j] * lvals[..., k, None] + normals[k] * lvals[..., j, None]
    )
    total = w.sum(axis=-1)
    scale = np.abs(w).max(axis=-1)
    if np.any(np.abs(total) <= 1e-12 * np.maximum(scale, 1e-300)):
        raise AdjointZero("wedge sum vanishes at the evaluation point")
    gtotal = gw.sum(axis=-2)
    return (gw * total[..., None, None] - w[..., None] * gtotal[..., None, :]) \
        / total[..., None, None] ** 2


@dataclass(frozen=True, eq=False)
class LagrangeBasis:
    node_coords: np.ndarray  # (4, 2)
    coeffs: np.ndarray       # (4, 4), inverse of the nodal moment matrix
    det: float
    center: np.ndarray       # shift applied before forming monomials
    scale: float             # extent divisor, for conditioning only


def build_lagrange(quad):
    """Fit {1, x, y, xy} through the four nodes.

    The monomials are formed in centered, scaled coordinates (the same
    function space, but the moment matrix stays well conditioned for thin
    elements). Raises NonExistent when that matrix is singular relative
    to its Hadamard bound: all four nodes on a line, or on a pair of
    axis-parallel lines / axis-aligned hyperbola.
    """
    quad = np.asarray(quad, dtype=float)
    center = quad.mean(axis=0)
    scale = max(float(np.abs(quad - center).max()), 1e-300)
    q = (quad - center) / scale
    x, y = q[:, 0], q[:, 1]
    m = np.column_stack([np.ones(4), x, y, x * y])
    det = float(np.linalg.det(m))
    hadamard = float(np.prod(np.linalg.norm(m, axis=1)))
    if abs(det) < 1e-12 * hadamard:
        raise NonExistent(
            f"nodal moment matrix is singular (|det| = {abs(det):.3g})"
        )
    return LagrangeBasis(quad, np.linalg.inv(m), det, center, scale)


def eval_lagrange(basis, p):
    """Shape values [1, x', y', x'y'] @ M^-1 at p ((2,) or (n, 2)), with
    x', y' the centered, scaled coordinates used at construction."""
    p = (np.asarray(p, dtype=float) - basis.center) / basis.scale
    x, y = p[..., 0], p[..., 1]
    monomials = np.stack([np.ones_like(x), x, y, x * y], axis=-1)
    return monomials @ basis.coeffs


# ---------------------------------------------------------------------------
# Averaged shape functions (nine-site table + skeleton interpolation)

# Rows 1-9: nodes, edge midpoints (1-2, 2-3, 3-4, 4-1), bimedian intersection.
SITE_VALUES = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.5, 0.5, 0.0, 0.0],
        [0.0, 0.5, 0.5, 0.0],
        [0.0, 0.0, 0.5, 0.5],
        [0.5, 0.0, 0.0, 0.5],
        [0.25, 0.25, 0.25, 0.25],
    ]
)


def table_sites(quad):
    """Coordinates of the nine sites of a quad as a (9, 2) array."""
    quad = np.asarray(quad, dtype=float)
    n1, n2, n3, n4 = quad
    return np.array(
        [
            n1,
            n2,
            n3,
            n4,
            0.5 * (n1 + n2),
            0.5 * (n2 + n3),
            0.5 * (n3 + n4),
            0.5 * (n4 + n1),
            0.25 * (n1 + n2 + n3 + n4),
        ]
    )


def _skeleton_segments(k, split):
    """Site-index pairs of the cell-boundary segments for a k-subdivision."""
    edges = [(0, 4), (4, 1), (1, 5), (5, 2), (2, 6), (6, 3), (3, 7), (7, 0)]
    if k == 1:
        return edges
    if k == 2:
        if split == "12-34":
            return edges + [(4, 8), (8, 6)]
        if split == "23-41":
            return edges + [(5, 8), (8, 7)]
        raise ValueError(f"unknown split {split!r}")
    if k == 4:
        return edges + [(4, 8), (5, 8), (6, 8), (7, 8)]
    raise ValueError(f"k must be 1, 2 or 4, got {k}")


class AveragedSkeleton:
    """Piecewise-linear site interpolation along the smoothing-cell
    boundaries of one element."""

    def __init__(self, quad, k, split="12-34"):
        quad = np.asarray(quad, dtype=float)
        self.sites = table_sites(quad)
        self.diameter = quad_diameter(quad)
        pairs = _skeleton_segments(k, split)
        self.p0 = self.sites[[a for a, _ in pairs]]
        self.p1 = self.sites[[b for _, b in pairs]]
        self.v0 = SITE_VALUES[[a for a, _ in pairs]]
        self.v1 = SITE_VALUES[[b for _, b in pairs]]
        d = self.p1 - self.p0
        self._d = d
        self._len2 = (d ** 2).sum(axis=1)

    def eval_point(self, p):
        p = np.asarray(p, dtype=float)
        rel = p[None, :] - self.p0
        t = np.clip((rel * self._d).sum(axis=1) / self._len2, 0.0, 1.0)
        foot = self.p0 + t[:, None] * self._d
        dist2 = ((p[None, :] - foot) ** 2).sum(axis=1)
        best = int(np.argmin(dist2))
        if np.sqrt(dist2[best]) > 1e-10 * self.diameter:
            raise OffSkeleton(
                f"point {tuple(p)} is not on a smoothing-cell boundary segment"
            )
        tb = t[best]
        return (1.0 - tb) * self.v0[best] + tb * self.v1[best]

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        if p.ndim == 1:
            return self.eval_point(p)
        return np.stack([self.eval_point(q) for q in p])


def eval_averaged(quad, k, p, split="12-34"):
    """Averaged shape values at a point on the k-subdivision skeleton.

    Exactly the table rows at the nine sites; linear interpolation of the
    bracketing site values elsewhere on a segment. Raises OffSkeleton for
    points farther than 1e-10 * diameter from every segment.
    """
    return AveragedSkeleton(quad, k, split)(p)


def shape_evaluator(scheme, quad, k=4, split="12-34"):
    """A callable (n, 2) -> (n, 4) for the requested scheme on one quad.

    The averaged scheme needs the subdivision count k; the other two
    ignore it.
    """
    if scheme == "wachspress":
        basis = build_wachspress(quad)
        return lambda p: eval_wachspress(basis, p)
    if scheme == "averaged":
        return AveragedSkeleton(quad, k, split)
    if scheme == "lagrange":
        basis = build_lagrange(quad)
        return lambda p: eval_lagrange(basis, p)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
