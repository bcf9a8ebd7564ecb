"""Planar norms, their structural checks, distances and lattice balls.

Polyhedral norms with rational coefficients (l1, l-infinity, weighted l1 and
the max of two linear forms) are evaluated exactly: on integer vectors they
return ``Fraction`` values, and the vectorised path returns integer
numerators over a fixed common denominator.  The lp family (1 < p < inf) and
the elliptic family are evaluated in double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import EmptySet
from .lattice import LatticeSet, Point, as_set

Number = Fraction | float

EXACT_KINDS = ("l1", "linf", "wl1", "rectmax")

# rows of the two linear forms of the rectangular max norm
RECTMAX_ROWS = ((Fraction(3, 10), Fraction(2, 10)), (Fraction(-2), Fraction(3)))


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x))


@dataclass(frozen=True)
class NormSpec:
    """A planar norm, identified by its kind and parameters.

    kinds: ``l1``, ``linf``, ``lp`` (params ``(p,)``), ``elliptic``
    (params ``(a11, a12)``), ``wl1`` (params ``(w1, w2)``) and ``rectmax``.
    """

    kind: str
    params: tuple = field(default=())

    def __post_init__(self):
        if self.kind == "lp":
            (p,) = self.params
            if p != math.inf and p < 1:
                raise ValueError("lp needs p >= 1")
        elif self.kind == "elliptic":
            a11, a12 = self.params
            if not a11 > abs(a12):
                raise ValueError("elliptic norm needs a11 > |a12|")
        elif self.kind == "wl1":
            if min(self.params) <= 0:
                raise ValueError("weights must be positive")
        elif self.kind not in ("l1", "linf", "rectmax"):
            raise ValueError(f"unknown norm kind {self.kind!r}")

    # -- constructors ------------------------------------------------------
    @classmethod
    def lp(cls, p) -> "NormSpec":
        if p == 1:
            return cls("l1")
        if p == math.inf:
            return cls("linf")
        return cls("lp", (p,))

    @classmethod
    def elliptic(cls, a11, a12) -> "NormSpec":
        return cls("elliptic", (_frac(a11), _frac(a12)))

    @classmethod
    def weighted_l1(cls, w1, w2) -> "NormSpec":
        return cls("wl1", (_frac(w1), _frac(w2)))

    def __str__(self):
        if self.kind == "lp":
            return f"lp:{self.params[0]}"
        if self.kind in ("elliptic", "wl1"):
            return f"{self.kind}:{self.params[0]},{self.params[1]}"
        return self.kind

    # -- evaluation --------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.kind in EXACT_KINDS

    @property
    def denominator(self) -> int:
        """Common denominator of the exact vectorised path."""
        if self.kind == "wl1":
            w1, w2 = self.params
            return math.lcm(w1.denominator, w2.denominator)
        if self.kind == "rectmax":
            return 10
        return 1

    def batch(self, dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
        """Vectorised evaluation on integer arrays.

        Exact kinds return int64 numerators over ``denominator``; the others
        return floats.
        """
        ax, ay = np.abs(dx), np.abs(dy)
        k = self.kind
        if k == "l1":
            return ax + ay
        if k == "linf":
            return np.maximum(ax, ay)
        if k == "wl1":
            d = self.denominator
            w1, w2 = (int(w * d) for w in self.params)
            return w1 * ax + w2 * ay
        if k == "rectmax":
            return np.maximum(np.abs(3 * dx + 2 * dy), 10 * np.abs(3 * dy - 2 * dx))
        if k == "lp":
            p = float(self.params[0])
            if p == 2:
                return np.hypot(ax, ay)
            return (ax.astype(float) ** p + ay.astype(float) ** p) ** (1 / p)
        a11, a12 = (float(a) for a in self.params)
        x, y = dx.astype(float), dy.astype(float)
        return np.sqrt(np.maximum(a11 * (x * x + y * y) + 2 * a12 * x * y, 0.0))

    def scalar(self, raw) -> Number:
        """Convert one entry of :meth:`batch` to a Fraction or a float."""
        if self.exact:
            return Fraction(int(raw), self.denominator)
        return float(raw)

    def __call__(self, x) -> Number:
        return evaluate(self, x)

    def unit_values(self) -> tuple[Number, Number]:
        return self((1, 0)), self((0, 1))

    def coord_bound(self, radius) -> int:
        """B with ``phi(x) <= radius  =>  |x1|, |x2| <= B``."""
        if radius <= 0:
            return 0
        k = self.kind
        if k in ("l1", "linf", "wl1", "lp"):
            # absolute norms are monotone: phi(x) >= |x_k| phi(e_k)
            return int(math.floor(radius / min(self.unit_values()))) + 1
        if k == "elliptic":
            a11, a12 = self.params
            lam = float(a11 - abs(a12))
            return int(math.floor(float(radius) / math.sqrt(lam) * (1 + 1e-12))) + 1
        # |x|_inf <= ||L^{-1}||_inf |Lx|_inf, with L the two linear forms
        (a, b), (c, d) = RECTMAX_ROWS
        det = a * d - b * c
        inv_rows = ((d / det, -b / det), (-c / det, a / det))
        op = max(abs(r[0]) + abs(r[1]) for r in inv_rows)
        return int(math.floor(radius * op)) + 1


def evaluate(n: NormSpec, x) -> Number:
    """Norm value; exact for the polyhedral kinds on integer input."""
    x1, x2 = x
    if n.exact and isinstance(x1, (int, np.integer)) and isinstance(x2, (int, np.integer)):
        raw = n.batch(np.array([int(x1)], dtype=np.int64), np.array([int(x2)], dtype=np.int64))
        return n.scalar(raw[0])
    x1, x2 = float(x1), float(x2)
    k = n.kind
    if k == "l1":
        return abs(x1) + abs(x2)
    if k == "linf":
        return max(abs(x1), abs(x2))
    if k == "wl1":
        return float(n.params[0]) * abs(x1) + float(n.params[1]) * abs(x2)
    if k == "rectmax":
        (a, b), (c, d) = RECTMAX_ROWS
        return max(abs(float(a) * x1 + float(b) * x2), abs(float(c) * x1 + float(d) * x2))
    return float(n.batch(np.array([x1]), np.array([x2]))[0])


def parse_norm(text: str) -> NormSpec:
    """Parse ``linf | l1 | lp:<p> | elliptic:<a11>,<a12> | wl1:<w1>,<w2> | rectmax``."""
    text = text.strip()
    if text == "rect_max":
        text = "rectmax"
    if text[:1] == "l" and text[1:].isdigit():
        # shorthand l2, l3, ... for lp:<p>
        text = "lp:" + text[1:]
    if text in ("linf", "l1", "rectmax"):
        return NormSpec(text)
    head, _, rest = text.partition(":")
    if head == "lp" and rest:
        if rest in ("inf", "oo"):
            return NormSpec.lp(math.inf)
        p = Fraction(rest)
        return NormSpec.lp(int(p) if p.denominator == 1 else float(p))
    if head in ("elliptic", "wl1") and rest:
        a, b = (Fraction(v) for v in rest.split(","))
        return NormSpec.elliptic(a, b) if head == "elliptic" else NormSpec.weighted_l1(a, b)
    raise ValueError(f"cannot parse norm {text!r}")


def as_alpha(n: NormSpec, alpha) -> Number:
    """Exact Fraction for polyhedral norms (floats read by their decimal repr)."""
    if n.exact:
        return _frac(alpha)
    return float(alpha)


def close(a: Number, b: Number, rel: float = 1e-12) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= rel * max(1.0, abs(float(a)), abs(float(b)))


# ---------------------------------------------------------------------------
# structural checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisReport:
    absolute: bool
    h1_symmetric: bool
    h2_normalized: bool
    h3: bool
    h3_checked_up_to: int
    submodular: bool
    counterexample: dict | None = None

    def as_dict(self) -> dict:
        return {
            "absolute": self.absolute,
            "h1_symmetric": self.h1_symmetric,
            "h2_normalized": self.h2_normalized,
            "h3": self.h3,
            "h3_checked_up_to": self.h3_checked_up_to,
            "submodular": self.submodular,
        }


def _grid(window: int) -> tuple[np.ndarray, np.ndarray]:
    r = np.arange(-window, window + 1, dtype=np.int64)
    xs, ys = np.meshgrid(r, r, indexing="ij")
    return xs.ravel(), ys.ravel()


def _equal_arrays(n: NormSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if n.exact:
        return a == b
    return np.abs(a - b) <= 1e-12 * np.maximum(1.0, np.abs(a))


@lru_cache(maxsize=64)
def verify_hypotheses(n: NormSpec, h_max: int = 20, window: int = 20) -> HypothesisReport:
    """Check absoluteness, the symmetry/normalisation/slope conditions and the
    2x2 submodularity inequality on an integer window.  Failures are data."""
    xs, ys = _grid(window)
    base = n.batch(xs, ys)
    witness: dict | None = None

    def first_bad(ok: np.ndarray, name: str) -> bool:
        nonlocal witness
        if ok.all():
            return True
        k = int(np.argmin(ok))
        if witness is None:
            witness = {"check": name, "point": (int(xs[k]), int(ys[k]))}
        return False

    absolute = first_bad(
        _equal_arrays(n, base, n.batch(-xs, ys)) & _equal_arrays(n, base, n.batch(xs, -ys)),
        "absolute",
    )
    h1 = first_bad(_equal_arrays(n, base, n.batch(ys, xs)), "h1")
    e1, e2 = n.unit_values()
    h2 = e1 == 1 and e2 == 1
    if not h2 and witness is None:
        witness = {"check": "h2", "values": (str(e1), str(e2))}
    h3 = True
    for h in range(h_max + 1):
        gap = n((h, h + 1)) - n((h, h))
        if gap < Fraction(1, 2) - (0 if n.exact else 1e-12):
            h3 = False
            if witness is None:
                witness = {"check": "h3", "h": h}
            break
    sx, sy = np.sign(xs), np.sign(ys)
    lhs = base + n.batch(xs + sx, ys + sy)
    rhs = n.batch(xs + sx, ys) + n.batch(xs, ys + sy)
    slack = 0 if n.exact else 1e-12 * np.maximum(1.0, np.abs(rhs))
    submodular = first_bad(lhs <= rhs + slack, "submodular")
    return HypothesisReport(absolute, h1, h2, h3, h_max, submodular, witness)


# ---------------------------------------------------------------------------
# balls and distances
# ---------------------------------------------------------------------------

def _box_points(bound: int, sub: str = "Z2") -> tuple[np.ndarray, np.ndarray]:
    xs, ys = _grid(bound)
    if sub in ("Z2even", "even"):
        keep = (xs + ys) % 2 == 0
    elif sub in ("Z2odd", "odd"):
        keep = (xs + ys) % 2 != 0
    else:
        keep = np.ones(xs.shape, dtype=bool)
    return xs[keep], ys[keep]


def _scaled_threshold(n: NormSpec, radius) -> Number:
    """Radius in the units of :meth:`NormSpec.batch`."""
    if n.exact:
        return _frac(radius) * n.denominator
    return float(radius)


def ball_points(n: NormSpec, radius, sub: str = "Z2", strict: bool = True) -> LatticeSet:
    """Lattice points of a sublattice with phi < radius (or <= radius)."""
    xs, ys = _box_points(n.coord_bound(radius), sub)
    vals = n.batch(xs, ys)
    thr = _scaled_threshold(n, radius)
    keep = vals < thr if strict else vals <= thr
    return LatticeSet(zip(xs[keep].tolist(), ys[keep].tolist()))


@dataclass(frozen=True)
class SingularSet:
    values: tuple[Number, ...]
    cutoff: Number


def _even_values(n: NormSpec, phi_max) -> list[Number]:
    xs, ys = _box_points(n.coord_bound(phi_max), "even")
    nz = (xs != 0) | (ys != 0)
    xs, ys = xs[nz], ys[nz]
    vals = n.batch(xs, ys)
    thr = _scaled_threshold(n, phi_max)
    if not n.exact:
        thr = thr * (1 + 1e-12)
    return sorted({v for v in vals[vals <= thr].tolist()})


def singular_set(n: NormSpec, alpha_min) -> SingularSet:
    """Values 4/phi(i), i even and nonzero, that are >= alpha_min."""
    alpha_min = as_alpha(n, alpha_min)
    cutoff = 4 / alpha_min
    out: list[Number] = []
    for raw in _even_values(n, cutoff):
        v = 4 / n.scalar(raw)
        if out and close(out[-1], v):
            continue
        out.append(v)
    return SingularSet(tuple(out), cutoff)


def nearest_singular(n: NormSpec, alpha) -> tuple[Number, float]:
    """Element of the singular set closest to alpha and its distance."""
    alpha = as_alpha(n, alpha)
    top = 4 / n((1, 1))
    lam = singular_set(n, min(alpha / 2, top)).values
    best = min(lam, key=lambda v: abs(float(v) - float(alpha)))
    return best, abs(float(best) - float(alpha))


def is_singular(n: NormSpec, alpha, tol=0.0) -> bool:
    """Some nonzero even point has |4/phi(i) - alpha| <= tol."""
    alpha = as_alpha(n, alpha)
    if tol:
        lo = alpha - tol
        phi_max = 4 / lo if lo > 0 else None
    else:
        phi_max = 4 / alpha
    if phi_max is None:
        return True
    for raw in _even_values(n, phi_max):
        v = n.scalar(raw)
        if abs(4 / v - alpha) <= tol:
            return True
    return False


def _arrays(s: Iterable) -> tuple[np.ndarray, np.ndarray]:
    pts = np.array(sorted(as_set(s)), dtype=np.int64).reshape(-1, 2)
    return pts[:, 0], pts[:, 1]


def distance_to_set(n: NormSpec, p: Point, s: Iterable) -> Number:
    s = as_set(s)
    if not s:
        raise EmptySet("distance to an empty set")
    xs, ys = _arrays(s)
    vals = n.batch(p[0] - xs, p[1] - ys)
    return n.scalar(vals.min())


def projection(n: NormSpec, p: Point, s: Iterable, tol=0.0) -> LatticeSet:
    """Points of s realising the distance from p (up to tol)."""
    s = as_set(s)
    if not s:
        raise EmptySet("projection onto an empty set")
    xs, ys = _arrays(s)
    vals = n.batch(p[0] - xs, p[1] - ys)
    lim = vals.min() + _scaled_threshold(n, tol) if tol else vals.min()
    keep = vals <= lim
    return LatticeSet(zip(xs[keep].tolist(), ys[keep].tolist()))


def offsets_within(n: NormSpec, cutoff) -> list[tuple[Point, Number]]:
    """Nonzero lattice offsets with phi <= cutoff, sorted by norm value."""
    xs, ys = _box_points(n.coord_bound(cutoff))
    vals = n.batch(xs, ys)
    thr = _scaled_threshold(n, cutoff)
    keep = (vals <= thr) & ((xs != 0) | (ys != 0))
    order = sorted(zip(vals[keep].tolist(), xs[keep].tolist(), ys[keep].tolist()))
    return [((x, y), n.scalar(v)) for v, x, y in order]
