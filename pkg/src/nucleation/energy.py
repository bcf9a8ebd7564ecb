"""Step energy: negative perimeter plus alpha times the norm dissipation."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import EmptyPrevious
from .lattice import LatticeSet, Point, as_set, lattice_perimeter
from .norms import Number, NormSpec, as_alpha


@dataclass(frozen=True)
class EnergyBreakdown:
    perimeter: int
    dissipation: Number
    total: Number
    alpha: Number


def distance_to_complement(n: NormSpec, p: Point, s: Iterable) -> Number:
    """Distance from p to the nearest lattice point outside the finite set s.

    Rings of growing sup-norm radius are scanned until every point closer
    than the best candidate is known to have been seen.
    """
    s = as_set(s)
    best = None
    r = 1
    while True:
        ring = [(p[0] + a, p[1] + b) for a in range(-r, r + 1) for b in (-r, r)]
        ring += [(p[0] + a, p[1] + b) for a in (-r, r) for b in range(-r + 1, r)]
        for q in ring:
            if q not in s:
                d = n((q[0] - p[0], q[1] - p[1]))
                if best is None or d < best:
                    best = d
        if best is not None and r >= n.coord_bound(best):
            return best
        r += 1


def _distances_to(n: NormSpec, cells: list[Point], s: LatticeSet) -> list[Number]:
    """Distance from each cell to s, vectorised in chunks."""
    if not cells:
        return []
    sp = np.array(sorted(s), dtype=np.int64)
    cp = np.array(cells, dtype=np.int64)
    out = []
    step = max(1, 2_000_000 // len(sp))
    for k in range(0, len(cp), step):
        c = cp[k:k + step]
        vals = n.batch(c[:, :1] - sp[None, :, 0], c[:, 1:] - sp[None, :, 1])
        out.extend(n.scalar(v) for v in vals.min(axis=1))
    return out


def dissipation(n: NormSpec, e: Iterable, eprev: Iterable) -> Number:
    """Sum of distances over the cells that changed state.

    An added cell costs its distance to the previous set, a removed cell its
    distance to the complement of the previous set.
    """
    e, eprev = as_set(e), as_set(eprev)
    if not eprev:
        raise EmptyPrevious("previous set must be non-empty")
    added = sorted(e - eprev)
    removed = sorted(eprev - e)
    total: Number = sum(_distances_to(n, added, eprev), Fraction(0) if n.exact else 0.0)
    for p in removed:
        total += distance_to_complement(n, p, eprev)
    return total


def scaled_energy(n: NormSpec, alpha, e: Iterable, eprev: Iterable) -> EnergyBreakdown:
    alpha = as_alpha(n, alpha)
    per = lattice_perimeter(e)
    dis = dissipation(n, e, eprev)
    return EnergyBreakdown(per, dis, -per + alpha * dis, alpha)
