"""Randomised cross-checks between independent routes.

Every check returns a ``Check`` record; nothing here raises on a failed
comparison, so one report can cover all suites.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import NucleationError
from .lattice import (
    LatticeSet,
    as_set,
    convex_hull,
    is_sublattice_convex,
    lattice_points_in,
    minkowski_sum,
    mfold_identity_check,
    pick_count,
)
from .limit import nucleus
from .norms import NormSpec, as_alpha, close, is_singular, parse_norm, verify_hypotheses
from .solver import (
    DEFAULT_TOL,
    ORIGIN,
    candidate_window,
    closed_form_violations,
    evolve,
    fast_forward,
    step_brute,
    step_closed_form,
    step_mincut,
)

DEFAULT_NORMS = ("linf", "l1", "lp:2")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witnesses: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def _fmt(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(x)


def _random_alpha(rng: random.Random, n: NormSpec, lo=1.2, hi=4.5):
    while True:
        a = as_alpha(n, round(rng.uniform(lo, hi), 3))
        if not is_singular(n, a, 0 if n.exact else 1e-6):
            return a


def _random_prev(rng: random.Random) -> LatticeSet:
    size = rng.randint(1, 4)
    box = [(x, y) for x in range(-1, 2) for y in range(-1, 2)]
    return as_set(rng.sample(box, size))


def oracle_equivalence(norms: Sequence[NormSpec], instances: int = 30, seed: int = 0,
                       alpha=None, max_window: int = 16, tol: float = DEFAULT_TOL) -> Check:
    """Brute force and min cut agree on the optimum, and each engine's own
    optimum agrees with the energy recomputed from its minimiser."""
    rng = random.Random(seed)
    bad: list = []
    done = 0
    tries = 0
    while done < instances and tries < 50 * instances:
        tries += 1
        n = rng.choice(list(norms))
        a = as_alpha(n, alpha) if alpha is not None else _random_alpha(rng, n)
        prev = _random_prev(rng)
        constrained = rng.random() < 0.5
        try:
            free, _ = candidate_window(n, a, prev, constrained, tol)
        except NucleationError:
            continue
        if len(free) > max_window:
            continue
        done += 1
        case = {"norm": str(n), "alpha": _fmt(a), "prev": sorted(prev), "constrained": constrained}
        try:
            b = step_brute(n, a, prev, constrained, tol=tol)
            m = step_mincut(n, a, prev, constrained, tol=tol)
        except NucleationError as e:
            bad.append({**case, "error": f"{type(e).__name__}: {e}"})
            continue
        problems = []
        if not close(b.objective, m.objective):
            problems.append(f"optimum brute {_fmt(b.objective)} vs mincut {_fmt(m.objective)}")
        for r in (b, m):
            if not close(r.energy.total, r.objective):
                problems.append(f"{r.solver} energy {_fmt(r.energy.total)} vs optimum {_fmt(r.objective)}")
        if b.unique and m.unique and b.minimizer != m.minimizer:
            problems.append("different unique minimisers")
        if b.unique != m.unique:
            problems.append(f"uniqueness brute {b.unique} vs mincut {m.unique}")
        if problems:
            bad.append({**case, "problems": problems})
    return Check("oracle_equivalence", not bad and done > 0, f"{done} instances", bad[:5])


def structure_theorem(norms: Sequence[NormSpec], instances: int = 10, seed: int = 0,
                      tol: float = DEFAULT_TOL) -> Check:
    """The closed form agrees with min cut wherever its hypotheses hold."""
    rng = random.Random(seed + 1)
    bad: list = []
    done = 0
    for n in norms:
        for _ in range(instances):
            a = _random_alpha(rng, n, 0.9, 3.5)
            prev = ORIGIN
            for _ in range(2):
                if closed_form_violations(n, a, prev, tol):
                    break
                closed = step_closed_form(n, a, prev, tol)
                cut = step_mincut(n, a, prev, True, tol).minimizer
                done += 1
                if closed != cut:
                    bad.append({"norm": str(n), "alpha": _fmt(a), "prev": sorted(prev)})
                    break
                prev = closed
    return Check("structure_theorem", not bad and done > 0, f"{done} steps", bad[:5])


def minkowski_fast_forward(norms: Sequence[NormSpec], instances: int = 4, steps: int = 4,
                           seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    """Evolution from the unit cell equals repeated sums of the nucleus."""
    rng = random.Random(seed + 2)
    bad: list = []
    done = 0
    for n in norms:
        for _ in range(instances):
            a = _random_alpha(rng, n, 1.0, 3.5)
            rep = nucleus(n, a, tol)
            if rep.pinned:
                continue
            trace = evolve(n, a, steps, "auto", True, tol=tol)
            done += 1
            for st in trace.steps[1:]:
                if st.cells != fast_forward(rep.nucleus, st.k):
                    bad.append({"norm": str(n), "alpha": _fmt(a), "k": st.k})
                    break
    return Check("minkowski_fast_forward", not bad and done > 0, f"{done} orbits", bad[:5])


def _random_polygon(rng: random.Random, even: bool):
    while True:
        pts = [(rng.randint(-6, 6), rng.randint(-6, 6)) for _ in range(rng.randint(3, 7))]
        if even:
            pts = [(x, y) if (x + y) % 2 == 0 else (x + 1, y) for x, y in pts]
        q = convex_hull(pts)
        if not q.degenerate and q.area2 <= 200:
            return q


def pick_and_mfold(instances: int = 30, seed: int = 0) -> Check:
    """Counting formula against enumeration; m-fold sums against dilated hulls."""
    rng = random.Random(seed + 3)
    bad: list = []
    for _ in range(instances):
        even = rng.random() < 0.5
        q = _random_polygon(rng, even)
        m = rng.randint(1, 3)
        got = pick_count(q, "Z2even" if even else "Z2", m)
        want = len(lattice_points_in(q, "even" if even else "Z2", m))
        if got != want:
            bad.append({"vertices": q.vertices, "m": m, "formula": got, "enumerated": want})
        s = lattice_points_in(q, "even")
        if len(s) >= 3 and not convex_hull(s).degenerate and is_sublattice_convex(s):
            if not mfold_identity_check(s, m):
                bad.append({"set_hull": convex_hull(s).vertices, "m": m})
        a, b = _random_polygon(rng, False), _random_polygon(rng, False)
        pa, pb = lattice_points_in(a), lattice_points_in(b)
        if convex_hull(minkowski_sum(pa, pb)) != convex_hull(minkowski_sum(a.vertices, b.vertices)):
            bad.append({"hull_sum": (a.vertices, b.vertices)})
    return Check("pick_and_mfold", not bad, f"{instances} polygons", bad[:5])


def submodularity(norms: Sequence[NormSpec]) -> Check:
    bad = [str(n) for n in norms if verify_hypotheses(n).absolute and not verify_hypotheses(n).submodular]
    return Check("submodularity", not bad, "absolute norms only", bad)


def hypotheses() -> Check:
    """Known verdicts: the Euclidean norm passes everything, the tilted
    elliptic norm is not absolute, an unequal weighted l1 is not normalised."""
    l2 = verify_hypotheses(parse_norm("lp:2"))
    ell = verify_hypotheses(NormSpec.elliptic(2, Fraction(-5, 3)))
    wl1 = verify_hypotheses(NormSpec.weighted_l1(1, 2))
    bad = []
    if not (l2.absolute and l2.h1_symmetric and l2.h2_normalized and l2.h3):
        bad.append({"lp:2": l2.as_dict()})
    if ell.absolute:
        bad.append({"elliptic": ell.as_dict()})
    if wl1.h2_normalized:
        bad.append({"wl1": wl1.as_dict()})
    return Check("hypotheses", not bad, "", bad)


def non_uniqueness(n: NormSpec, alpha, tol: float = DEFAULT_TOL) -> Check:
    """At a singular alpha both engines flag the first step as non-unique and
    every cell at distance exactly 4/alpha as a zero-margin cell."""
    a = as_alpha(n, alpha)
    b = step_brute(n, a, ORIGIN, True, tol=tol)
    m = step_mincut(n, a, ORIGIN, True, tol=tol)
    ring = {p for p in set(b.zero_margin_cells) | set(m.zero_margin_cells)
            if abs(a * n(p) - 4) <= (0 if n.exact else tol)}
    ok = (not b.unique and not m.unique and ring
          and ring <= set(b.zero_margin_cells) and ring <= set(m.zero_margin_cells)
          and close(b.objective, m.objective))
    return Check("non_uniqueness_detection", bool(ok), "NonUniqueStep expected",
                 [{"brute": list(b.zero_margin_cells), "mincut": list(m.zero_margin_cells)}])


def run_all(norms: Sequence[NormSpec] | None = None, alpha=None, seed: int = 0,
            instances: int = 30, tol: float = DEFAULT_TOL) -> list[Check]:
    norms = list(norms) if norms else [parse_norm(t) for t in DEFAULT_NORMS]
    checks = [oracle_equivalence(norms, instances, seed, alpha, tol=tol)]
    if alpha is not None and any(is_singular(n, as_alpha(n, alpha), 0 if n.exact else tol) for n in norms):
        checks += [non_uniqueness(n, alpha, tol) for n in norms]
    else:
        checks += [
            structure_theorem(norms, max(1, instances // 6), seed, tol),
            minkowski_fast_forward(norms, 2, 4, seed, tol),
        ]
    checks += [pick_and_mfold(instances, seed), submodularity(norms), hypotheses()]
    return checks
