"""Lattice sets and discrete geometry on the square lattice.

Points are integer pairs ``(i1, i2)``.  A finite set of points stands for the
union of the unit squares centred at them.  Sets whose points all share the
parity of ``i1 + i2`` are checkerboards; the geometry below (effective
boundary, discrete vertices and edges) is defined for those.

All arithmetic is on integers, so every predicate here is exact.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, hypot
from typing import Iterable

import numpy as np

from .errors import (
    DegenerateBoundary,
    DegeneratePolygon,
    EmptySet,
    MixedParity,
    NotBoundaryPoint,
    VertexOffLattice,
)

Point = tuple[int, int]

NEIGHBORS = ((1, 0), (-1, 0), (0, 1), (0, -1))
DIAGONALS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


class LatticeSet(frozenset):
    """Immutable set of lattice points with a cached bounding box."""

    def __new__(cls, points: Iterable = ()):
        return super().__new__(cls, ((int(p[0]), int(p[1])) for p in points))

    @cached_property
    def bbox(self) -> tuple[int, int, int, int] | None:
        """(min i1, min i2, max i1, max i2), or None for the empty set."""
        if not self:
            return None
        xs = [p[0] for p in self]
        ys = [p[1] for p in self]
        return min(xs), min(ys), max(xs), max(ys)

    @cached_property
    def parity(self) -> str:
        """'even', 'odd', 'mixed' or 'empty'."""
        kinds = {(p[0] + p[1]) % 2 for p in self}
        if not kinds:
            return "empty"
        if len(kinds) == 2:
            return "mixed"
        return "even" if kinds == {0} else "odd"

    def sorted(self) -> list[Point]:
        return sorted(self)

    def __repr__(self):
        return f"LatticeSet({sorted(self)})"


def as_set(points: Iterable) -> LatticeSet:
    return points if isinstance(points, LatticeSet) else LatticeSet(points)


def parity(p: Point) -> str:
    return "even" if (p[0] + p[1]) % 2 == 0 else "odd"


def _require_monochromatic(s: LatticeSet) -> None:
    if s.parity == "mixed":
        raise MixedParity("set contains points of both parities")


def effective_boundary(s: Iterable) -> LatticeSet:
    """Points of a checkerboard set with a missing diagonal neighbour."""
    s = as_set(s)
    _require_monochromatic(s)
    return LatticeSet(
        p for p in s if any((p[0] + a, p[1] + b) not in s for a, b in DIAGONALS)
    )


def lattice_perimeter(s: Iterable) -> int:
    """Length of the boundary of the union of unit squares centred at s."""
    s = as_set(s)
    return sum(
        4 - sum((p[0] + a, p[1] + b) in s for a, b in NEIGHBORS) for p in s
    )


def check_symmetry(s: Iterable) -> bool:
    """Invariance under coordinate sign changes and the coordinate swap."""
    s = as_set(s)
    for x, y in s:
        for img in ((-x, y), (x, -y), (y, x)):
            if img not in s:
                return False
    return True


def minkowski_sum(a: Iterable, b: Iterable) -> LatticeSet:
    a, b = as_set(a), as_set(b)
    return LatticeSet((p[0] + q[0], p[1] + q[1]) for p in a for q in b)


def cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


# ---------------------------------------------------------------------------
# convex hulls and lattice point counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvexLatticePolygon:
    """Strictly convex polygon with counterclockwise integer vertices.

    Hulls of collinear sets keep their two endpoints (or single point) and
    have ``area2 == 0``.
    """

    vertices: tuple[Point, ...]
    area2: int

    @property
    def degenerate(self) -> bool:
        return self.area2 == 0

    def contains(self, p: Point, scale: int = 1) -> bool:
        """Closed membership test for ``scale * polygon``."""
        vs = [(scale * x, scale * y) for x, y in self.vertices]
        if len(vs) == 1:
            return tuple(p) == vs[0]
        if len(vs) == 2:
            (ax, ay), (bx, by) = vs
            return (cross(vs[0], vs[1], p) == 0
                    and min(ax, bx) <= p[0] <= max(ax, bx)
                    and min(ay, by) <= p[1] <= max(ay, by))
        return all(cross(vs[k], vs[(k + 1) % len(vs)], p) >= 0 for k in range(len(vs)))

    def boundary_count(self, lattice: str = "Z2") -> int:
        """Number of lattice points on the boundary."""
        if self.degenerate:
            raise DegeneratePolygon("boundary count needs a two-dimensional polygon")
        _check_vertices(self, lattice)
        total = 0
        n = len(self.vertices)
        for k in range(n):
            (ax, ay), (bx, by) = self.vertices[k], self.vertices[(k + 1) % n]
            dx, dy = bx - ax, by - ay
            g = gcd(dx, dy)
            if lattice == "Z2" or ((dx + dy) // g) % 2 == 0:
                total += g
            else:
                total += g // 2
        return total


def _check_vertices(q: ConvexLatticePolygon, lattice: str) -> None:
    if lattice not in ("Z2", "Z2even"):
        raise ValueError(f"unknown lattice {lattice!r}")
    if lattice == "Z2even" and any((x + y) % 2 for x, y in q.vertices):
        raise VertexOffLattice(f"vertices {q.vertices} are not all even")


def convex_hull(s: Iterable) -> ConvexLatticePolygon:
    """Monotone chain hull; collinear boundary points are dropped."""
    pts = sorted(as_set(s))
    if not pts:
        raise EmptySet("hull of an empty set")
    if len(pts) == 1:
        return ConvexLatticePolygon((pts[0],), 0)

    def half(seq):
        chain: list[Point] = []
        for p in seq:
            while len(chain) >= 2 and cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower, upper = half(pts), half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) <= 2:
        # collinear input: keep the two extreme points
        return ConvexLatticePolygon((pts[0], pts[-1]), 0)
    area2 = sum(
        hull[k][0] * hull[(k + 1) % len(hull)][1] - hull[(k + 1) % len(hull)][0] * hull[k][1]
        for k in range(len(hull))
    )
    return ConvexLatticePolygon(tuple(hull), area2)


def lattice_points_in(q: ConvexLatticePolygon, sub: str = "Z2", scale: int = 1) -> LatticeSet:
    """Points of ``scale * q`` on Z2 or on one parity class ('even'/'odd')."""
    vs = np.array([(scale * x, scale * y) for x, y in q.vertices], dtype=np.int64)
    x0, y0 = vs.min(axis=0)
    x1, y1 = vs.max(axis=0)
    xs, ys = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    keep = np.ones(xs.shape, dtype=bool)
    if sub == "even":
        keep &= (xs + ys) % 2 == 0
    elif sub == "odd":
        keep &= (xs + ys) % 2 == 1
    if len(vs) == 2:
        (ax, ay), (bx, by) = vs
        keep &= (bx - ax) * (ys - ay) - (by - ay) * (xs - ax) == 0
    elif len(vs) > 2:
        for k in range(len(vs)):
            (ax, ay), (bx, by) = vs[k], vs[(k + 1) % len(vs)]
            keep &= (bx - ax) * (ys - ay) - (by - ay) * (xs - ax) >= 0
    return LatticeSet(zip(xs[keep].tolist(), ys[keep].tolist()))


def pick_count(q: ConvexLatticePolygon, lattice: str = "Z2", m: int = 1) -> int:
    """Lattice points of ``m * q`` from area and boundary counts alone."""
    if q.degenerate:
        raise DegeneratePolygon("counting formula needs a two-dimensional polygon")
    if m < 1:
        raise ValueError("m must be a positive integer")
    _check_vertices(q, lattice)
    det = 1 if lattice == "Z2" else 2
    count = Fraction(q.area2 * m * m, 2 * det) + Fraction(m * q.boundary_count(lattice), 2) + 1
    assert count.denominator == 1, count
    return int(count)


def is_sublattice_convex(s: Iterable) -> bool:
    """True iff the hull of s contains no other point of s's parity class."""
    s = as_set(s)
    _require_monochromatic(s)
    if not s:
        raise EmptySet("convexity of an empty set")
    return lattice_points_in(convex_hull(s), s.parity) == s


def mfold_identity_check(s: Iterable, m: int) -> bool:
    """Compare the m-fold Minkowski sum of s with ``m * conv(s)`` on its class."""
    s = as_set(s)
    _require_monochromatic(s)
    if not s:
        raise EmptySet("m-fold sum of an empty set")
    hull = convex_hull(s)
    if hull.degenerate:
        raise DegeneratePolygon("the identity needs a two-dimensional hull")
    if not is_sublattice_convex(s):
        raise ValueError("set is not convex in its parity class")
    total = s
    for _ in range(m - 1):
        total = minkowski_sum(total, s)
    target = "even" if s.parity == "even" or m % 2 == 0 else "odd"
    return total == lattice_points_in(hull, target, m)


# ---------------------------------------------------------------------------
# local order of the effective boundary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalOrder:
    prev: Point
    next: Point


# corners of a unit cell in rotated coordinates, counterclockwise
_CELL = ((0, 0), (1, 0), (1, 1), (0, 1))


def is_nondegenerate(s: Iterable, j: Point) -> LocalOrder | None:
    """Clockwise neighbours of a boundary point, or None if degenerate.

    The same-parity points within l1 distance 2 of ``j`` form a 3x3 block in
    the rotated coordinates u = (dx+dy)/2, v = (dx-dy)/2, and the segments of
    Euclidean length at most 2 become the king moves of that block.  The
    triangles spanned by those segments are unions of quarter cells, so the
    boundary of their union can be traced with exact integer bookkeeping.
    """
    s = as_set(s)
    j = (int(j[0]), int(j[1]))
    _require_monochromatic(s)
    if j not in s or all((j[0] + a, j[1] + b) in s for a, b in DIAGONALS):
        raise NotBoundaryPoint(f"{j} is not an effective boundary point")

    present = {
        (u, v)
        for u in (-1, 0, 1)
        for v in (-1, 0, 1)
        if (j[0] + u + v, j[1] + u - v) in s
    }

    # quarter cells covered by triangles; cells are indexed by their low corner
    edge_count: Counter = Counter()
    covered_pairs: set[frozenset] = set()
    for a in (-1, 0):
        for b in (-1, 0):
            corners = [(a + du, b + dv) for du, dv in _CELL]
            have = [c in present for c in corners]
            if sum(have) < 3:
                continue
            centre = (2 * a + 1, 2 * b + 1)
            for k in range(4):
                c0, c1 = corners[k], corners[(k + 1) % 4]
                if not (have[k] and have[(k + 1) % 4]):
                    continue
                d0, d1 = (2 * c0[0], 2 * c0[1]), (2 * c1[0], 2 * c1[1])
                for e in ((d0, d1), (d0, centre), (d1, centre)):
                    edge_count[frozenset(e)] += 1
            for x in range(4):
                for y in range(x + 1, 4):
                    if have[x] and have[y]:
                        covered_pairs.add(frozenset((corners[x], corners[y])))

    if not edge_count:
        return None
    # every short segment must belong to some triangle
    pts = sorted(present)
    for x in range(len(pts)):
        for y in range(x + 1, len(pts)):
            p, q = pts[x], pts[y]
            if max(abs(p[0] - q[0]), abs(p[1] - q[1])) == 1:
                if frozenset((p, q)) not in covered_pairs:
                    return None

    boundary = [tuple(e) for e, c in edge_count.items() if c == 1]
    adj: dict = {}
    for a_, b_ in boundary:
        adj.setdefault(a_, []).append(b_)
        adj.setdefault(b_, []).append(a_)
    if any(len(v) != 2 for v in adj.values()):
        return None
    start = (0, 0)
    if start not in adj:
        return None
    cycle = [start]
    prev, cur = start, adj[start][0]
    while cur != start:
        cycle.append(cur)
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        prev, cur = cur, nxt
    if len(cycle) != len(boundary):
        return None

    # back to lattice offsets; doubled (U, V) maps to ((U+V)/2, (U-V)/2)
    offsets = [((U + V) // 2, (U - V) // 2) for U, V in cycle]
    signed = sum(
        offsets[k][0] * offsets[(k + 1) % len(offsets)][1]
        - offsets[(k + 1) % len(offsets)][0] * offsets[k][1]
        for k in range(len(offsets))
    )
    lattice_idx = [k for k, (U, V) in enumerate(cycle) if U % 2 == 0]
    order = [offsets[k] for k in lattice_idx]
    if signed > 0:
        order.reverse()
    pos = order.index((0, 0))
    before, after = order[pos - 1], order[(pos + 1) % len(order)]
    return LocalOrder(
        (j[0] + before[0], j[1] + before[1]), (j[0] + after[0], j[1] + after[1])
    )


def boundary_cycle(s: Iterable) -> list[Point]:
    """Effective boundary in clockwise order, walked through local orders."""
    s = as_set(s)
    bd = effective_boundary(s)
    if not bd:
        raise DegenerateBoundary([], "empty boundary")
    orders: dict[Point, LocalOrder] = {}
    bad = []
    for j in bd:
        o = is_nondegenerate(s, j)
        if o is None:
            bad.append(j)
        else:
            orders[j] = o
    if bad:
        raise DegenerateBoundary(bad, "degenerate boundary points")
    start = min(bd)
    walk = [start]
    cur = start
    while True:
        nxt = orders[cur].next
        if nxt not in orders or orders[nxt].prev != cur:
            raise DegenerateBoundary([cur, nxt], "inconsistent boundary walk")
        if nxt == start:
            break
        if len(walk) > len(bd):
            raise DegenerateBoundary([cur], "boundary walk does not close")
        walk.append(nxt)
        cur = nxt
    if len(walk) != len(bd):
        raise DegenerateBoundary(sorted(set(bd) - set(walk)), "boundary is not a single cycle")
    return walk


# ---------------------------------------------------------------------------
# discrete vertices and edges
# ---------------------------------------------------------------------------

def _turns_clockwise(v1: Point, v2: Point) -> bool:
    """Signed angle from v1 to v2 is negative (antiparallel counts as -pi)."""
    c = v1[0] * v2[1] - v1[1] * v2[0]
    if c != 0:
        return c < 0
    return v1[0] * v2[0] + v1[1] * v2[1] < 0


def _vertex_flags(walk: list[Point]) -> list[bool]:
    n = len(walk)
    flags = []
    for k, j in enumerate(walk):
        jm, jp = walk[k - 1], walk[(k + 1) % n]
        nu_plus = (j[1] - jp[1], jp[0] - j[0])
        nu_minus = (jm[1] - j[1], j[0] - jm[0])
        flags.append(_turns_clockwise(nu_minus, nu_plus))
    return flags


def discrete_vertices(s: Iterable) -> list[Point]:
    """Boundary points where the outward normal turns clockwise."""
    walk = boundary_cycle(s)
    if len(walk) < 3:
        raise DegenerateBoundary(walk, "boundary too small")
    return [j for j, f in zip(walk, _vertex_flags(walk)) if f]


@dataclass(frozen=True)
class DiscreteEdge:
    points: tuple[Point, ...]
    direction: Point  # integer outward normal, not normalised
    normal: tuple[float, float]
    slope: Fraction | float
    edge_class: str


def _classify(direction: Point) -> str:
    lo, hi = sorted((abs(direction[0]), abs(direction[1])))
    if lo == 0:
        return "flat-i"
    if lo == hi:
        return "slant-iv"
    if 3 * lo <= hi:
        return "flat-ii"
    return "slant-iii"


def _make_edge(points: list[Point]) -> DiscreteEdge:
    (x0, y0), (xl, yl) = points[0], points[-1]
    d = (y0 - yl, xl - x0)
    g = gcd(*d)
    d = (d[0] // g, d[1] // g)
    length = hypot(*d)
    if d[1] == 0:
        slope: Fraction | float = float("inf") if d[0] > 0 else float("-inf")
    else:
        slope = Fraction(d[0], d[1])
    return DiscreteEdge(tuple(points), d, (d[0] / length, d[1] / length), slope, _classify(d))


def discrete_edges(s: Iterable) -> list[DiscreteEdge]:
    """Runs of at least three boundary points between consecutive vertices."""
    walk = boundary_cycle(s)
    if len(walk) < 3:
        raise DegenerateBoundary(walk, "boundary too small")
    flags = _vertex_flags(walk)
    if not any(flags):
        raise DegenerateBoundary(walk, "no discrete vertices")
    first = flags.index(True)
    walk = walk[first:] + walk[:first]
    flags = flags[first:] + flags[:first]
    edges = []
    run = [walk[0]]
    for j, f in zip(walk[1:] + walk[:1], flags[1:] + flags[:1]):
        run.append(j)
        if f:
            if len(run) >= 3:
                edges.append(_make_edge(run))
            run = [j]
    return edges


def edge_steps(edge: DiscreteEdge) -> list[Point]:
    p = edge.points
    return [(p[k + 1][0] - p[k][0], p[k + 1][1] - p[k][1]) for k in range(len(p) - 1)]


def matches_edge_pattern(edge: DiscreteEdge) -> bool:
    """Step pattern check for an edge whose normal points up with slope in [0, 1]."""
    steps = edge_steps(edge)
    flat, slant = (2, 0), (1, -1)
    cls = edge.edge_class
    if cls == "flat-i":
        return all(st == flat for st in steps)
    if cls == "flat-ii":
        return steps[0] == slant and all(st == flat for st in steps[1:])
    if cls == "slant-iii":
        return steps[-1] == flat and all(st == slant for st in steps[:-1])
    return all(st == slant for st in steps)


@dataclass(frozen=True)
class MonotoneCheck:
    ok: bool
    violation: tuple[DiscreteEdge, DiscreteEdge] | None = None

    def __bool__(self):
        return self.ok


def check_monotone_edges(s: Iterable) -> MonotoneCheck:
    """Normals of clockwise-consecutive edges must rotate clockwise."""
    edges = discrete_edges(s)
    if not edges:
        return MonotoneCheck(True)
    for k, e in enumerate(edges):
        f = edges[(k + 1) % len(edges)]
        if not _turns_clockwise(e.direction, f.direction):
            return MonotoneCheck(False, (e, f))
    return MonotoneCheck(True)
