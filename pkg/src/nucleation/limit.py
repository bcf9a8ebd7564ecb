"""Nucleus, limit polygon and velocity, and diagnostics of the limit motion."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateBoundary, SingularAlpha
from .lattice import (
    LatticeSet,
    as_set,
    boundary_cycle,
    check_monotone_edges,
    check_symmetry,
    convex_hull,
    is_sublattice_convex,
)
from .norms import (
    Number,
    NormSpec,
    _frac,
    as_alpha,
    ball_points,
    is_singular,
    nearest_singular,
    verify_hypotheses,
)
from .solver import DEFAULT_TOL

Vertex = tuple[Number, Number]


@dataclass(frozen=True)
class NucleusReport:
    nucleus: LatticeSet
    alpha: Number
    pinned: bool
    max_i1: int
    polygon: tuple[tuple[Fraction, Fraction], ...]
    velocity: Number
    kind: str
    hypotheses: dict


@dataclass(frozen=True)
class LimitMotion:
    """Motion ``t -> initial + velocity * t * polygon``."""

    polygon: tuple[Vertex, ...]
    velocity: Number
    kind: str  # nucleation, pinned or segment
    initial: tuple[Vertex, ...] = ((0, 0),)

    @classmethod
    def from_report(cls, rep: NucleusReport, initial: Sequence[Vertex] = ((0, 0),)) -> "LimitMotion":
        return cls(rep.polygon, rep.velocity, rep.kind, tuple(initial))


@dataclass(frozen=True)
class FastRegimeBall:
    """Ball of radius 4t of the norm, the limit when the time step dominates."""

    norm: NormSpec
    radius: Number
    kind: str = "fast_regime_ball"

    def contains(self, x) -> bool:
        return self.norm(x) <= self.radius

    def boundary(self, samples: int = 256) -> np.ndarray:
        th = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
        u = np.stack([np.cos(th), np.sin(th)], axis=1)
        r = np.array([float(self.radius) / self.norm((float(a), float(b))) for a, b in u])
        return u * r[:, None]


def _hypotheses(n: NormSpec, alpha, nuc: LatticeSet, max_i1: int) -> dict:
    h = verify_hypotheses(n)
    out = {
        "absolute": h.absolute,
        "H1": h.h1_symmetric,
        "H2": h.h2_normalized,
        "H3": h.h3,
        "submodular": h.submodular,
        "symmetry": check_symmetry(nuc),
        "sublattice_convex": is_sublattice_convex(nuc),
    }
    try:
        boundary_cycle(nuc)
        out["non_degeneracy"] = True
        out["monotone_edges"] = check_monotone_edges(nuc).ok
    except DegenerateBoundary:
        out["non_degeneracy"] = False
        out["monotone_edges"] = False
    out["max_i1_in_expected_pair"] = max_i1 in (2 * math.floor(2 / alpha), math.floor(4 / alpha))
    return out


def nucleus(n: NormSpec, alpha, tol: float = DEFAULT_TOL) -> NucleusReport:
    """First step from the unit cell: even points of the open ball of radius 4/alpha."""
    alpha = as_alpha(n, alpha)
    if is_singular(n, alpha, 0 if n.exact else tol):
        raise SingularAlpha(alpha, nearest_singular(n, alpha)[0])
    nuc = ball_points(n, 4 / alpha, "Z2even", strict=True)
    max_i1 = max(p[0] for p in nuc)
    pinned = nuc == {(0, 0)}
    hull = convex_hull(nuc)
    if pinned:
        polygon = ((Fraction(0), Fraction(0)),)
        kind = "pinned"
    else:
        polygon = tuple((Fraction(x, max_i1), Fraction(y, max_i1)) for x, y in hull.vertices)
        kind = "segment" if hull.degenerate else "nucleation"
    return NucleusReport(
        nuc, alpha, pinned, max_i1, polygon, alpha * max_i1, kind,
        _hypotheses(n, alpha, nuc, max_i1),
    )


def pinning_threshold(n: NormSpec) -> Number:
    """Largest alpha at which the unit cell can still grow: 4/phi(1,1)."""
    return 4 / n((1, 1))


def _hull(points: Iterable[Vertex]) -> tuple[Vertex, ...]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return tuple(pts)

    def half(seq):
        chain: list = []
        for p in seq:
            while len(chain) >= 2 and (
                (chain[-1][0] - chain[-2][0]) * (p[1] - chain[-2][1])
                - (chain[-1][1] - chain[-2][1]) * (p[0] - chain[-2][0])
            ) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower, upper = half(pts), half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return tuple(hull) if len(hull) > 1 else (pts[0], pts[-1])


def limit_set(m: LimitMotion, t) -> tuple[Vertex, ...]:
    """Vertices of the limit set at time t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    s = m.velocity * t
    scaled = [(s * x, s * y) for x, y in m.polygon]
    if m.initial == ((0, 0),):
        if s == 0 or m.kind == "pinned":
            return ((0, 0),)
        return tuple(scaled)
    return _hull((a + x, b + y) for a, b in m.initial for x, y in scaled)


def fast_regime_limit(n: NormSpec, t) -> FastRegimeBall:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return FastRegimeBall(n, 4 * t)


# ---------------------------------------------------------------------------
# Hausdorff diagnostic
# ---------------------------------------------------------------------------

def _dist_to_convex(pts: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Euclidean distance from points to a convex polygon, segment or point."""
    if len(verts) == 1:
        return np.hypot(*(pts - verts[0]).T)
    best = np.full(len(pts), np.inf)
    k = len(verts) if len(verts) > 2 else 1
    for i in range(k):
        a, b = verts[i], verts[(i + 1) % len(verts)]
        ab = b - a
        tt = np.clip(((pts - a) @ ab) / (ab @ ab), 0.0, 1.0)
        proj = a + tt[:, None] * ab
        best = np.minimum(best, np.hypot(*(pts - proj).T))
    if len(verts) > 2:
        inside = np.ones(len(pts), dtype=bool)
        for i in range(len(verts)):
            a, b = verts[i], verts[(i + 1) % len(verts)]
            inside &= (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0]) >= 0
        best[inside] = 0.0
    return best


def _sample_convex(verts: np.ndarray, h: float) -> tuple[np.ndarray, float]:
    """Samples of a convex set and a radius covering the set by them."""
    bound = []
    for i in range(len(verts) if len(verts) > 2 else max(len(verts) - 1, 0)):
        a, b = verts[i], verts[(i + 1) % len(verts)]
        steps = max(1, int(math.ceil(np.hypot(*(b - a)) / h)))
        tt = np.linspace(0.0, 1.0, steps + 1)
        bound.append(a + tt[:, None] * (b - a))
    if len(verts) == 1:
        return verts.astype(float), 0.0
    bound = np.concatenate(bound)
    if len(verts) == 2:
        return bound, h / 2
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    gx = np.arange(math.floor(lo[0] / h), math.ceil(hi[0] / h) + 1) * h
    gy = np.arange(math.floor(lo[1] / h), math.ceil(hi[1] / h) + 1) * h
    xs, ys = np.meshgrid(gx, gy, indexing="ij")
    grid = np.stack([xs.ravel(), ys.ravel()], axis=1)
    grid = grid[_dist_to_convex(grid, verts) == 0.0]
    # a point of the set is within h/sqrt(2) of a grid node; if that node is
    # outside, the segment to it crosses the boundary, itself sampled at h
    return np.concatenate([bound, grid]), h * (1 / math.sqrt(2) + 0.5)


def _dist_to_cells(pts: np.ndarray, cells: LatticeSet, eps: float) -> np.ndarray:
    """Distance from points to the union of squares of side eps at eps * cells."""
    arr = np.array(sorted(cells), dtype=np.int64)
    x0, y0 = arr.min(axis=0)
    pad = 2
    occ = np.zeros((arr[:, 0].max() - x0 + 2 * pad + 1, arr[:, 1].max() - y0 + 2 * pad + 1), bool)
    occ[arr[:, 0] - x0 + pad, arr[:, 1] - y0 + pad] = True
    c = np.rint(pts / eps).astype(np.int64)
    out = np.full(len(pts), np.inf)
    todo = np.arange(len(pts))
    r = 1
    while len(todo):
        best = np.full(len(todo), np.inf)
        for a in range(-r, r + 1):
            for b in range(-r, r + 1):
                gx = c[todo, 0] + a - x0 + pad
                gy = c[todo, 1] + b - y0 + pad
                ok = (gx >= 0) & (gy >= 0) & (gx < occ.shape[0]) & (gy < occ.shape[1])
                hit = np.zeros(len(todo), bool)
                hit[ok] = occ[gx[ok], gy[ok]]
                dx = np.maximum(np.abs(pts[todo, 0] - eps * (c[todo, 0] + a)) - eps / 2, 0)
                dy = np.maximum(np.abs(pts[todo, 1] - eps * (c[todo, 1] + b)) - eps / 2, 0)
                best = np.where(hit, np.minimum(best, np.hypot(dx, dy)), best)
        # squares beyond ring r are at least r * eps away
        done = best <= r * eps
        out[todo[done]] = best[done]
        todo = todo[~done]
        r *= 2
    return out


def hausdorff_gap(orbit_step: Iterable, eps, m: LimitMotion, t, pitch=None) -> float:
    """Upper estimate of the Hausdorff distance between the rescaled cells and the limit set.

    The distance from the squares to the convex limit set is exact (attained
    at square corners).  The other direction is sampled with the given pitch
    (default eps/4) and increased by the covering radius of the samples, so
    the result never underestimates the true distance.
    """
    cells = as_set(orbit_step)
    eps = float(eps)
    h = eps / 4 if pitch is None else float(pitch)
    verts = np.array([(float(x), float(y)) for x, y in limit_set(m, t)])
    centres = eps * np.array(sorted(cells), dtype=float)
    corners = np.concatenate([centres + eps / 2 * np.array(d) for d in ((1, 1), (1, -1), (-1, 1), (-1, -1))])
    to_limit = float(_dist_to_convex(corners, verts).max())
    samples, cover = _sample_convex(verts, h)
    to_cells = float(_dist_to_cells(samples, cells, eps).max()) + cover
    return max(to_limit, to_cells)


def hausdorff_bound(eps, alpha, velocity, t) -> float:
    """eps + v (t - (eps/alpha) floor(alpha t / eps))."""
    eps, alpha, velocity, t = (Fraction(_frac(x)) for x in (eps, alpha, velocity, t))
    return float(eps + velocity * (t - eps / alpha * math.floor(alpha * t / eps)))


# ---------------------------------------------------------------------------
# l1 parity analysis
# ---------------------------------------------------------------------------

def alpha_critical(r: int) -> Fraction:
    """Alpha at which the even and odd l1 first-step candidates tie, given floor(4/alpha) = r."""
    if r < 1:
        raise ValueError("r must be positive")
    if r % 2:
        return Fraction(4 * (2 * r + 1), 2 * r * (r + 1) + 1)
    return Fraction(4 * (2 * r + 1), 2 * r * (r + 1) - 1)


@dataclass(frozen=True)
class ParityAnalysis:
    R: int
    energy_even: Fraction
    energy_odd: Fraction
    first_step_parity: str
    threshold_below: Fraction
    threshold_above: Fraction | None


def l1_parity_analysis(alpha) -> ParityAnalysis:
    """Compare the best even and odd first steps of the unconstrained l1 scheme."""
    a = _frac(alpha)
    if a <= 0:
        raise ValueError("alpha must be positive")
    if (4 / a).denominator == 1:
        raise SingularAlpha(a, a)
    R = math.floor(4 / a)
    he, ho = R // 2, (R + 1) // 2
    e_even = -4 * (2 * he + 1) ** 2 + 4 * a * sum((2 * j) ** 2 for j in range(1, he + 1))
    e_odd = -4 * (2 * ho) ** 2 + 4 * a * sum((2 * j - 1) ** 2 for j in range(1, ho + 1)) + a
    if R == 0 or a > alpha_critical(R):
        upper_index = R - 1
        below = alpha_critical(max(R, 1))
        above = alpha_critical(R - 1) if R > 1 else None
    else:
        upper_index = R
        below, above = alpha_critical(R + 1), alpha_critical(R)
    if a in (below, above):
        raise SingularAlpha(a, a)
    parity = "even" if upper_index <= 0 or upper_index % 2 == 0 else "odd"
    assert parity == ("even" if e_even < e_odd else "odd"), (a, e_even, e_odd)
    return ParityAnalysis(R, e_even, e_odd, parity, below, above)
