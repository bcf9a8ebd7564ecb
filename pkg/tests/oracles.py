"""Slow reference computations used as independent test oracles."""
import itertools

from nucleation.energy import scaled_energy


def inside(verts, p):
    k = len(verts)
    signs = [
        (verts[(i + 1) % k][0] - verts[i][0]) * (p[1] - verts[i][1])
        - (verts[(i + 1) % k][1] - verts[i][1]) * (p[0] - verts[i][0])
        for i in range(k)
    ]
    return all(s >= 0 for s in signs) or all(s <= 0 for s in signs)


def count_points(verts, m=1, cls=None):
    """Points of m * conv(verts), optionally restricted to 'even' or 'odd'."""
    vs = [(m * x, m * y) for x, y in verts]
    xs = [v[0] for v in vs]
    ys = [v[1] for v in vs]
    want = {None: None, "even": 0, "odd": 1}[cls]
    return sum(
        1
        for x in range(min(xs), max(xs) + 1)
        for y in range(min(ys), max(ys) + 1)
        if (want is None or (x + y) % 2 == want) and inside(vs, (x, y))
    )


def subset_minimum(n, alpha, prev, box, constrained):
    """Minimum step energy over all sets made of box cells, by enumeration."""
    prev = frozenset(prev)
    free = sorted(set(box) - prev) if constrained else sorted(set(box) | prev)
    base = prev if constrained else frozenset()
    best = None
    for r in range(len(free) + 1):
        for extra in itertools.combinations(free, r):
            e = base | frozenset(extra)
            if not e and constrained:
                continue
            val = scaled_energy(n, alpha, e, prev).total
            if best is None or val < best:
                best = val
    return best
