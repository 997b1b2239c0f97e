"""Point-cloud domains, boundary conditions, distances and quadrature.

A :class:`Domain` is described only by boundary nodes (with outward normals
and boundary-condition tags), interior nodes and an inside/outside
indicator.  Nothing here meshes the domain: quadrature rules are built by
masking tensor or quasi-Monte-Carlo point sets with the indicator.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.spatial import Delaunay
from scipy.spatial.distance import cdist
from scipy.stats import qmc

from .exceptions import ConfigError, DomainError, EmptyDomainError, GeometryError

__all__ = [
    "BCKind",
    "BoundaryCondition",
    "BoundaryNode",
    "Domain",
    "QuadratureRule",
    "unit_ball_volume",
    "unit_sphere_area",
    "build_domain",
    "domain_quadrature",
    "pairwise_distances",
    "interval_domain",
    "disk_domain",
    "ball_domain",
    "rectangle_domain",
    "domain_from_record",
    "load_geometry",
]

_NORMAL_TOL = 1e-6


class BCKind(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ROBIN = "robin"


@dataclass(frozen=True)
class BoundaryCondition:
    kind: BCKind = BCKind.DIRICHLET
    robin_a: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", BCKind(self.kind))
        if self.kind is BCKind.ROBIN and not self.robin_a >= 0:
            raise GeometryError(f"Robin coefficient must be >= 0, got {self.robin_a}")

    @classmethod
    def parse(cls, value) -> "BoundaryCondition":
        if isinstance(value, BoundaryCondition):
            return value
        if isinstance(value, BCKind):
            return cls(value)
        if isinstance(value, str):
            try:
                return cls(BCKind(value.lower()))
            except ValueError:
                raise GeometryError(f"unknown boundary condition {value!r}") from None
        if isinstance(value, tuple) and len(value) == 2:
            return cls(BCKind(value[0]), float(value[1]))
        raise GeometryError(f"cannot interpret boundary condition {value!r}")


@dataclass(frozen=True)
class BoundaryNode:
    position: np.ndarray
    normal: np.ndarray
    bc: BoundaryCondition = BoundaryCondition()

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(-1))
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float).reshape(-1))
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))


@dataclass(frozen=True, eq=False)
class Domain:
    """Validated point-cloud domain.  Build it with :func:`build_domain`."""

    dimension: int
    boundary: tuple
    interior: np.ndarray
    indicator: Callable[[np.ndarray], np.ndarray]
    enclosing_radius: float
    centroid: np.ndarray
    shape: Optional[str] = None
    shape_params: dict = field(default_factory=dict)
    check_boundary: Optional[tuple] = None

    @property
    def boundary_positions(self) -> np.ndarray:
        return np.array([b.position for b in self.boundary]).reshape(-1, self.dimension)

    @property
    def boundary_normals(self) -> np.ndarray:
        return np.array([b.normal for b in self.boundary]).reshape(-1, self.dimension)

    @property
    def bc_kinds(self) -> list:
        return [b.bc.kind for b in self.boundary]

    @property
    def robin_coefficients(self) -> np.ndarray:
        return np.array([b.bc.robin_a if b.bc.kind is BCKind.ROBIN else 0.0 for b in self.boundary])

    @property
    def n_dirichlet(self) -> int:
        return sum(k is BCKind.DIRICHLET for k in self.bc_kinds)

    @property
    def has_constant_mode(self) -> bool:
        """True when the constant function satisfies every boundary condition."""
        return all(
            b.bc.kind is BCKind.NEUMANN or (b.bc.kind is BCKind.ROBIN and b.bc.robin_a == 0)
            for b in self.boundary
        )

    @property
    def check_nodes(self) -> tuple:
        return self.check_boundary if self.check_boundary else self.boundary

    @property
    def bounds(self) -> tuple:
        pts = self.boundary_positions
        if len(self.interior):
            pts = np.vstack([pts, self.interior])
        return pts.min(axis=0), pts.max(axis=0)

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dimension)
        return _call_indicator(self.indicator, pts)


def _call_indicator(indicator, pts):
    try:
        out = np.asarray(indicator(pts), dtype=bool)
        if out.shape == (len(pts),):
            return out
    except Exception:  # noqa: BLE001 - fall back to a pointwise predicate
        pass
    return np.array([bool(indicator(p)) for p in pts], dtype=bool)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    est_error: float

    @property
    def measure(self) -> float:
        return float(self.weights.sum())

    def integrate(self, values) -> float:
        """Integrate sampled values (or a callable of the nodes)."""
        if callable(values):
            values = values(self.nodes)
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in n dimensions."""
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def unit_sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n (n >= 2)."""
    if int(n) != n or n < 2:
        raise DomainError(f"surface area needs dimension >= 2, got {n}")
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def pairwise_distances(A, B) -> np.ndarray:
    """Euclidean distance matrix ``D[i, j] = |A[i] - B[j]|``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    A = A.reshape(len(A), -1) if A.ndim < 2 else A
    B = B.reshape(len(B), -1) if B.ndim < 2 else B
    if A.shape[1] != B.shape[1]:
        raise DomainError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    return cdist(A, B)


def build_domain(
    dimension: int,
    boundary: Sequence,
    interior=None,
    indicator=None,
    R: Optional[float] = None,
    *,
    shape: Optional[str] = None,
    shape_params: Optional[dict] = None,
    check_boundary: Optional[Sequence] = None,
    center=None,
) -> Domain:
    """Validate and assemble a :class:`Domain`.

    ``boundary`` holds :class:`BoundaryNode` objects or ``(position, normal,
    bc)`` tuples.  Normals are renormalised; nodes whose normal is off unit
    length by more than 1e-6 are rejected.  Dirichlet nodes are moved to the
    front by a stable sort.  When ``R`` is omitted it is the largest distance
    from the centroid to any node.
    """
    n = int(dimension)
    if n < 1:
        raise GeometryError("dimension must be >= 1")
    nodes = _coerce_nodes(boundary, n)
    if not nodes:
        raise GeometryError("boundary must contain at least one node")
    interior = np.zeros((0, n)) if interior is None else np.asarray(interior, dtype=float)
    interior = interior.reshape(-1, n) if interior.size else np.zeros((0, n))
    if indicator is None:
        indicator = _hull_indicator(np.array([b.position for b in nodes]), n)

    if len(interior):
        inside = _call_indicator(indicator, interior)
        if not inside.all():
            bad = int(np.flatnonzero(~inside)[0])
            raise GeometryError(f"interior node {bad} fails the domain indicator", index=bad)

    positions = np.array([b.position for b in nodes])
    pts = np.vstack([positions, interior]) if len(interior) else positions
    centroid = pts.mean(axis=0) if center is None else np.asarray(center, dtype=float)
    radii = np.linalg.norm(positions - centroid, axis=1)
    if R is None:
        R = float(max(radii.max(), np.linalg.norm(pts - centroid, axis=1).max()))
    else:
        R = float(R)
        if not R > 0:
            raise GeometryError("enclosing radius must be positive")
        outside = radii > R * (1 + 1e-12)
        if outside.any():
            bad = int(np.flatnonzero(outside)[0])
            raise GeometryError(f"boundary node {bad} lies outside the enclosing ball", index=bad)

    order = sorted(range(len(nodes)), key=lambda i: nodes[i].bc.kind is not BCKind.DIRICHLET)
    nodes = tuple(nodes[i] for i in order)
    check = tuple(_coerce_nodes(check_boundary, n)) if check_boundary is not None else None
    return Domain(
        dimension=n,
        boundary=nodes,
        interior=interior,
        indicator=indicator,
        enclosing_radius=R,
        centroid=centroid,
        shape=shape,
        shape_params=dict(shape_params or {}),
        check_boundary=check,
    )


def _coerce_nodes(boundary, n):
    nodes = []
    for i, b in enumerate(boundary):
        if not isinstance(b, BoundaryNode):
            b = BoundaryNode(*b)
        if b.position.shape != (n,) or b.normal.shape != (n,):
            raise GeometryError(f"boundary node {i} does not have dimension {n}", index=i)
        norm = float(np.linalg.norm(b.normal))
        if abs(norm - 1.0) > _NORMAL_TOL:
            raise GeometryError(
                f"boundary node {i} has a non-unit normal (|n| = {norm:.6g})", index=i
            )
        nodes.append(BoundaryNode(b.position, b.normal / norm, b.bc))
    return nodes


def _hull_indicator(positions, n):
    """Indicator for a bare point cloud: interval hull in 1D, the polygon
    through the nodes (in listed order) in 2D, the convex hull otherwise."""
    if n == 1:
        lo, hi = positions.min(), positions.max()
        tol = 1e-12 * max(1.0, hi - lo)
        return lambda X: (X[:, 0] >= lo - tol) & (X[:, 0] <= hi + tol)
    if n == 2 and len(positions) >= 3:
        poly = positions.copy()

        def inside_polygon(X):
            x, y = X[:, 0], X[:, 1]
            res = np.zeros(len(X), dtype=bool)
            xj, yj = poly[-1]
            for xi, yi in poly:
                cross = (yi > y) != (yj > y)
                with np.errstate(divide="ignore", invalid="ignore"):
                    xint = (xj - xi) * (y - yi) / (yj - yi) + xi
                res ^= cross & (x < xint)
                xj, yj = xi, yi
            return res

        return inside_polygon
    tri = Delaunay(positions)
    return lambda X: tri.find_simplex(X, tol=1e-10) >= 0


# --------------------------------------------------------------------------
# built-in shapes


def _uniform_bc(bc, count):
    bc = BoundaryCondition.parse(bc)
    return [bc] * count


def interval_domain(a=0.0, b=1.0, n_interior=9, bc="dirichlet") -> Domain:
    a, b = float(a), float(b)
    if not b > a:
        raise GeometryError("interval needs a < b")
    bcs = [bc, bc] if not isinstance(bc, (list, tuple)) or isinstance(bc, tuple) and len(bc) == 2 and not isinstance(bc[0], str) else list(bc)
    bcs = [BoundaryCondition.parse(x) for x in bcs]
    nodes = [BoundaryNode([a], [-1.0], bcs[0]), BoundaryNode([b], [1.0], bcs[1])]
    interior = np.linspace(a, b, int(n_interior) + 2)[1:-1, None]
    return build_domain(
        1,
        nodes,
        interior,
        lambda X: (X[:, 0] >= a) & (X[:, 0] <= b),
        shape="interval",
        shape_params={"a": a, "b": b},
    )


def _lattice(lower, upper, spacing):
    axes = [np.arange(lo + spacing / 2, hi, spacing) for lo, hi in zip(lower, upper)]
    axes = [ax - (ax.mean() - (lo + hi) / 2) for ax, lo, hi in zip(axes, lower, upper)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def disk_domain(radius=1.0, n_boundary=32, interior_spacing=None, center=(0.0, 0.0), bc="dirichlet") -> Domain:
    radius = float(radius)
    c = np.asarray(center, dtype=float)
    theta = 2 * np.pi * np.arange(int(n_boundary)) / int(n_boundary)
    normals = np.c_[np.cos(theta), np.sin(theta)]
    bcs = _uniform_bc(bc, len(theta))
    nodes = [BoundaryNode(c + radius * nrm, nrm, b) for nrm, b in zip(normals, bcs)]
    h = 0.15 * radius if interior_spacing is None else float(interior_spacing)
    lat = _lattice(c - radius, c + radius, h)
    interior = lat[np.linalg.norm(lat - c, axis=1) < radius - 0.5 * h]
    theta_c = 2 * np.pi * (np.arange(4 * len(theta)) + 0.5) / (4 * len(theta))
    ncheck = np.c_[np.cos(theta_c), np.sin(theta_c)]
    check = [BoundaryNode(c + radius * nrm, nrm, bcs[0]) for nrm in ncheck]
    return build_domain(
        2,
        nodes,
        interior,
        lambda X: np.linalg.norm(X - c, axis=1) <= radius * (1 + 1e-12),
        R=radius,
        shape="disk",
        center=c,
        shape_params={"radius": radius, "center": c.tolist()},
        check_boundary=check,
    )


def _fibonacci_sphere(count):
    k = np.arange(count) + 0.5
    z = 1 - 2 * k / count
    phi = np.pi * (1 + 5**0.5) * k
    s = np.sqrt(1 - z * z)
    return np.c_[s * np.cos(phi), s * np.sin(phi), z]


def ball_domain(radius=1.0, n_boundary=100, interior_spacing=None, center=(0.0, 0.0, 0.0), bc="dirichlet") -> Domain:
    radius = float(radius)
    c = np.asarray(center, dtype=float)
    normals = _fibonacci_sphere(int(n_boundary))
    bcs = _uniform_bc(bc, len(normals))
    nodes = [BoundaryNode(c + radius * nrm, nrm, b) for nrm, b in zip(normals, bcs)]
    h = 0.3 * radius if interior_spacing is None else float(interior_spacing)
    lat = _lattice(c - radius, c + radius, h)
    interior = lat[np.linalg.norm(lat - c, axis=1) < radius - 0.5 * h]
    check = [BoundaryNode(c + radius * nrm, nrm, bcs[0]) for nrm in _fibonacci_sphere(4 * len(normals))]
    return build_domain(
        3,
        nodes,
        interior,
        lambda X: np.linalg.norm(X - c, axis=1) <= radius * (1 + 1e-12),
        R=radius,
        shape="ball",
        center=c,
        shape_params={"radius": radius, "center": c.tolist()},
        check_boundary=check,
    )


def rectangle_domain(lower=(0.0, 0.0), upper=(1.0, 1.0), n_per_side=8, interior_spacing=None, bc="dirichlet") -> Domain:
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if lo.shape != (2,) or hi.shape != (2,) or np.any(hi <= lo):
        raise GeometryError("rectangle needs 2D lower < upper")

    def edge_nodes(m):
        t = (np.arange(m) + 0.5) / m
        out = []
        for x in lo[0] + t * (hi[0] - lo[0]):
            out.append(([x, lo[1]], [0.0, -1.0]))
            out.append(([x, hi[1]], [0.0, 1.0]))
        for y in lo[1] + t * (hi[1] - lo[1]):
            out.append(([lo[0], y], [-1.0, 0.0]))
            out.append(([hi[0], y], [1.0, 0.0]))
        return out

    bcs = BoundaryCondition.parse(bc)
    nodes = [BoundaryNode(p, q, bcs) for p, q in edge_nodes(int(n_per_side))]
    check = [BoundaryNode(p, q, bcs) for p, q in edge_nodes(4 * int(n_per_side))]
    h = 0.15 * float(np.min(hi - lo)) if interior_spacing is None else float(interior_spacing)
    interior = _lattice(lo, hi, h)
    interior = interior[np.all((interior > lo + 0.25 * h) & (interior < hi - 0.25 * h), axis=1)]
    return build_domain(
        2,
        nodes,
        interior,
        lambda X: np.all((X >= lo) & (X <= hi), axis=1),
        shape="rectangle",
        shape_params={"lower": lo.tolist(), "upper": hi.tolist()},
        check_boundary=check,
    )


# --------------------------------------------------------------------------
# quadrature


def domain_quadrature(domain: Domain, budget: int = 64 * 64) -> QuadratureRule:
    """Quadrature rule over the domain using about ``budget`` nodes.

    n = 1: Gauss-Legendre on each sub-interval where the indicator holds.
    n = 2: Gauss-Legendre lines in x (with x = c - h cos(theta) so that
    square-root chord endpoints stay smooth) and Gauss-Legendre in y on each
    indicator segment of every line; ``sqrt(budget)`` nodes per direction.
    n >= 3: unscrambled Halton points in the bounding box, masked.

    ``est_error`` is the largest change over the probe integrands 1, x_k,
    x_k**2 between this rule and one built with half the resolution.
    """
    budget = int(budget)
    if budget < 16:
        raise DomainError("quadrature budget must be >= 16")
    n = domain.dimension
    if n == 1:
        fine = _rule_1d(domain, budget)
        coarse = _rule_1d(domain, max(8, budget // 2))
    elif n == 2:
        m = max(4, int(round(math.sqrt(budget))))
        fine = _rule_2d(domain, m)
        coarse = _rule_2d(domain, max(4, m // 2))
    else:
        fine = _rule_qmc(domain, budget)
        coarse = _rule_qmc(domain, budget // 2)
    est = _probe_difference(fine, coarse)
    return QuadratureRule(fine[0], fine[1], est)


def _probe_difference(fine, coarse):
    (xf, wf), (xc, wc) = fine, coarse
    diffs = [abs(wf.sum() - wc.sum())]
    for k in range(xf.shape[1]):
        diffs.append(abs(wf @ xf[:, k] - wc @ xc[:, k]))
        diffs.append(abs(wf @ xf[:, k] ** 2 - wc @ xc[:, k] ** 2))
    return float(max(diffs))


def _segments(inside_fn, lo, hi, samples, bisect_iters=60):
    """Sub-intervals of [lo, hi] where ``inside_fn`` holds, for a batch of lines.

    ``inside_fn(t)`` maps an array of shape (lines, k) to booleans.  Returns a
    list (one per line) of (start, end) pairs.
    """
    t = np.linspace(lo, hi, samples)
    mask = inside_fn(np.broadcast_to(t, (inside_fn.lines, samples)))
    out = [[] for _ in range(inside_fn.lines)]
    change = np.diff(mask.astype(np.int8), axis=1)
    li, ci = np.nonzero(change)
    if len(li):
        a = t[ci].copy()
        b = t[ci + 1].copy()
        rising = change[li, ci] > 0
        for _ in range(bisect_iters):
            mid = 0.5 * (a + b)
            inside = inside_fn.points(li, mid)
            # rising edge: outside at a, inside at b
            move_a = np.where(rising, ~inside, inside)
            a = np.where(move_a, mid, a)
            b = np.where(move_a, b, mid)
        edges = 0.5 * (a + b)
    for line in range(inside_fn.lines):
        sel = li == line
        row_edges = list(edges[sel]) if len(li) else []
        row_rising = list(rising[sel]) if len(li) else []
        start = lo if mask[line, 0] else None
        for e, r in zip(row_edges, row_rising):
            if r:
                start = e
            elif start is not None:
                out[line].append((start, e))
                start = None
        if start is not None:
            out[line].append((start, hi))
    return out


class _LineProbe:
    """Evaluate the indicator along axis-aligned lines."""

    def __init__(self, domain, fixed, axis):
        self.domain = domain
        self.fixed = np.atleast_2d(fixed)
        self.axis = axis
        self.lines = len(self.fixed)

    def _assemble(self, fixed_rows, t):
        n = self.domain.dimension
        pts = np.empty((len(t), n))
        others = [k for k in range(n) if k != self.axis]
        pts[:, others] = fixed_rows
        pts[:, self.axis] = t
        return pts

    def __call__(self, tgrid):
        lines, k = tgrid.shape
        rows = np.repeat(self.fixed, k, axis=0)
        pts = self._assemble(rows, tgrid.reshape(-1))
        return self.domain.contains(pts).reshape(lines, k)

    def points(self, line_idx, t):
        pts = self._assemble(self.fixed[line_idx], t)
        return self.domain.contains(pts)


def _pad(lo, hi):
    width = hi - lo
    pad = 1e-3 * np.where(width > 0, width, 1.0)
    return lo - pad, hi + pad


def _rule_1d(domain, budget):
    lo, hi = _pad(*domain.bounds)
    probe = _LineProbe(domain, np.zeros((1, 0)), 0)
    segs = _segments(probe, lo[0], hi[0], max(400, 4 * budget))[0]
    if not segs:
        raise EmptyDomainError("indicator rejects every candidate node")
    # snap edges onto boundary nodes (the indicator carries a tolerance)
    knots = domain.boundary_positions[:, 0]
    tol = 1e-9 * (hi[0] - lo[0])

    def snap(e):
        k = knots[np.argmin(np.abs(knots - e))]
        return float(k) if abs(k - e) <= tol else e

    segs = [(snap(a), snap(b)) for a, b in segs]
    total = sum(b - a for a, b in segs)
    xs, ws = [], []
    for a, b in segs:
        m = max(2, int(round(budget * (b - a) / total)))
        g, w = np.polynomial.legendre.leggauss(m)
        xs.append(0.5 * (a + b) + 0.5 * (b - a) * g)
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs)[:, None], np.concatenate(ws)


def _x_extent(domain, lo, hi, samples):
    """Refine the x-range of a 2D domain beyond the node bounding box."""
    ylo, yhi = _pad(lo[1], hi[1])
    ys = np.linspace(ylo, yhi, samples)

    def occupied(x):
        pts = np.c_[np.full_like(ys, x), ys]
        return domain.contains(pts).any()

    xlo, xhi = lo[0], hi[0]
    width = hi[0] - lo[0]
    for sign in (-1, 1):
        edge = xlo if sign < 0 else xhi
        outer = edge + sign * 0.05 * width
        if occupied(outer):
            edge = outer  # domain sticks out: fall back to the padded box
        else:
            a, b = edge, outer
            if occupied(a):
                for _ in range(50):
                    mid = 0.5 * (a + b)
                    a, b = (mid, b) if occupied(mid) else (a, mid)
                edge = a
        if sign < 0:
            xlo = edge
        else:
            xhi = edge
    return xlo, xhi


def _rule_2d(domain, m):
    lo, hi = domain.bounds
    xlo, xhi = _x_extent(domain, lo, hi, 8 * m)
    g, w = np.polynomial.legendre.leggauss(m)
    theta = 0.5 * np.pi * (g + 1.0)
    wt = 0.5 * np.pi * w
    c, h = 0.5 * (xlo + xhi), 0.5 * (xhi - xlo)
    xs = c - h * np.cos(theta)
    wx = h * np.sin(theta) * wt
    ylo, yhi = _pad(lo[1], hi[1])
    probe = _LineProbe(domain, xs[:, None], 1)
    segs = _segments(probe, ylo, yhi, max(200, 8 * m))
    # lines grazing the boundary can have chords shorter than the sampling
    # step; retry them with a much finer search
    for i, row in enumerate(segs):
        if row:
            continue
        fine = _LineProbe(domain, xs[i : i + 1, None], 1)
        for factor in (16, 256):
            row = _segments(fine, ylo, yhi, factor * max(200, 8 * m))[0]
            if row:
                segs[i] = row
                break
    nodes, weights = [], []
    for x, wxi, row in zip(xs, wx, segs):
        for a, b in row:
            ya = 0.5 * (a + b) + 0.5 * (b - a) * g
            nodes.append(np.c_[np.full(m, x), ya])
            weights.append(wxi * 0.5 * (b - a) * w)
    if not nodes:
        raise EmptyDomainError("indicator rejects every candidate node")
    return np.vstack(nodes), np.concatenate(weights)


def _rule_qmc(domain, count):
    lo, hi = _pad(*domain.bounds)
    pts = qmc.Halton(d=domain.dimension, scramble=False).random(int(count) + 1)[1:]
    pts = lo + pts * (hi - lo)
    keep = domain.contains(pts)
    if not keep.any():
        raise EmptyDomainError("indicator rejects every candidate node")
    vol = float(np.prod(hi - lo))
    return pts[keep], np.full(int(keep.sum()), vol / len(pts))


# --------------------------------------------------------------------------
# geometry files

_TOP_FIELDS = {"dimension", "boundary", "interior", "shape", "R"}
_NODE_FIELDS = {"position", "normal", "bc", "robin_a"}
_SHAPES = {
    "interval": ({"a", "b", "n_interior", "bc"}, interval_domain, 1),
    "disk": ({"radius", "n_boundary", "interior_spacing", "center", "bc"}, disk_domain, 2),
    "ball": ({"radius", "n_boundary", "interior_spacing", "center", "bc"}, ball_domain, 3),
    "rectangle": ({"lower", "upper", "n_per_side", "interior_spacing", "bc"}, rectangle_domain, 2),
}


def _parse_bc_field(name, value, robin_a=None):
    if not isinstance(value, str) or value.lower() not in {k.value for k in BCKind}:
        raise ConfigError(f"bc must be one of dirichlet|neumann|robin, got {value!r}", name, "bad_value")
    kind = BCKind(value.lower())
    if kind is BCKind.ROBIN:
        a = 0.0 if robin_a is None else robin_a
        if not isinstance(a, (int, float)) or a < 0:
            raise ConfigError("robin_a must be a number >= 0", name.rsplit(".", 1)[0] + ".robin_a", "bad_value")
        return BoundaryCondition(kind, float(a))
    return BoundaryCondition(kind)


def domain_from_record(record: dict, prefix: str = "geometry") -> Domain:
    """Build a domain from the geometry-file data model.

    Errors are :class:`~helmwave.exceptions.ConfigError` naming the field.
    """
    if not isinstance(record, dict):
        raise ConfigError("geometry must be an object", prefix, "bad_type")
    unknown = set(record) - _TOP_FIELDS
    if unknown:
        name = sorted(unknown)[0]
        raise ConfigError(f"unknown geometry field {name!r}", f"{prefix}.{name}", "unknown_field")
    if "shape" in record:
        if "boundary" in record or "interior" in record:
            raise ConfigError("shape cannot be combined with explicit nodes", f"{prefix}.shape", "conflict")
        shape = record["shape"]
        if not isinstance(shape, dict) or len(shape) != 1:
            raise ConfigError("shape must be an object with one key", f"{prefix}.shape", "bad_type")
        (kind, params), = shape.items()
        if kind not in _SHAPES:
            raise ConfigError(f"unknown shape {kind!r}", f"{prefix}.shape.{kind}", "bad_value")
        allowed, factory, dim = _SHAPES[kind]
        params = dict(params or {})
        for key in params:
            if key not in allowed:
                raise ConfigError(f"unknown {kind} parameter {key!r}", f"{prefix}.shape.{kind}.{key}", "unknown_field")
        if "dimension" in record and record["dimension"] != dim:
            raise ConfigError(f"{kind} is {dim}-dimensional", f"{prefix}.dimension", "bad_value")
        if "bc" in params:
            params["bc"] = _parse_bc_field(f"{prefix}.shape.{kind}.bc", params["bc"])
        try:
            return factory(**params)
        except (GeometryError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc), f"{prefix}.shape.{kind}", "bad_value") from exc

    if "dimension" not in record:
        raise ConfigError("dimension is required", f"{prefix}.dimension", "missing_field")
    n = record["dimension"]
    if not isinstance(n, int) or n < 1:
        raise ConfigError("dimension must be an integer >= 1", f"{prefix}.dimension", "bad_value")
    raw = record.get("boundary")
    if not isinstance(raw, list) or not raw:
        raise ConfigError("boundary must be a nonempty list", f"{prefix}.boundary", "missing_field")
    nodes = []
    for i, rec in enumerate(raw):
        where = f"{prefix}.boundary[{i}]"
        if not isinstance(rec, dict):
            raise ConfigError("boundary record must be an object", where, "bad_type")
        extra = set(rec) - _NODE_FIELDS
        if extra:
            name = sorted(extra)[0]
            raise ConfigError(f"unknown boundary field {name!r}", f"{where}.{name}", "unknown_field")
        for key in ("position", "normal", "bc"):
            if key not in rec:
                raise ConfigError(f"{key} is required", f"{where}.{key}", "missing_field")
        bc = _parse_bc_field(f"{where}.bc", rec["bc"], rec.get("robin_a"))
        nodes.append(BoundaryNode(rec["position"], rec["normal"], bc))
    interior = record.get("interior", [])
    try:
        return build_domain(n, nodes, np.asarray(interior, dtype=float), R=record.get("R"))
    except GeometryError as exc:
        where = f"{prefix}.boundary[{exc.index}]" if exc.index is not None else prefix
        if "interior" in str(exc) and exc.index is not None:
            where = f"{prefix}.interior[{exc.index}]"
        raise ConfigError(str(exc), where, "bad_value") from exc


def load_geometry(path) -> Domain:
    """Read a JSON geometry file."""
    try:
        record = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"geometry file {path} not found", "geometry.file", "missing_file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"geometry file {path}: {exc}", "geometry.file", "parse") from exc
    return domain_from_record(record)
