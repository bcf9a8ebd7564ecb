"""Single-step minimisation of the scaled energy and the evolution driver.

A step minimises ``-perimeter(E) + alpha * dissipation(E, E_prev)`` over
finite sets E, either among supersets of E_prev (constrained) or freely.
Three engines are available:

* ``brute``: exhaustive enumeration of the candidate window;
* ``mincut``: one maximum-flow computation after flipping the odd cells;
* ``closed_form``: the even-lattice formula, refused unless every
  structural hypothesis it needs is machine-checked.

Window.  Adding a cell at distance d from E_prev with k neighbours changes
the energy by ``2k - 4 + alpha*d``, and removing a cell of E_prev at distance
d from the complement changes it by ``4 - 2k + alpha*d``.  With ``k <= 4``
both are positive once ``alpha*d > 4``, whatever the other cells do, so
cells farther than ``4/alpha`` keep their previous state in every minimiser.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .energy import EnergyBreakdown, _distances_to, scaled_energy
from .errors import (
    NucleationError,
    DegenerateBoundary,
    EmptyPrevious,
    HypothesisViolated,
    MixedParity,
    NumericalMargin,
    SolverError,
    WindowTooLarge,
)
from .lattice import (
    NEIGHBORS,
    LatticeSet,
    Point,
    as_set,
    boundary_cycle,
    check_monotone_edges,
    check_symmetry,
    convex_hull,
    is_sublattice_convex,
    lattice_points_in,
    minkowski_sum,
    pick_count,
)
from .maxflow import FlowNetwork
from .norms import Number, NormSpec, as_alpha, is_singular, offsets_within, verify_hypotheses

DEFAULT_TOL = 1e-9
ORIGIN = LatticeSet([(0, 0)])


def _nbrs(p: Point):
    return [(p[0] + a, p[1] + b) for a, b in NEIGHBORS]


# ---------------------------------------------------------------------------
# the step problem as a quadratic pseudo-boolean function
# ---------------------------------------------------------------------------

@dataclass
class StepProblem:
    """Energy of ``fixed_in + chosen`` as ``const + sum u_i x_i + sum 2 x_i x_j``."""

    norm: NormSpec
    alpha: Number
    prev: LatticeSet
    constrained: bool
    free: list[Point]
    fixed_in: LatticeSet
    cost: dict[Point, Number]  # distance paid when a free cell changes state
    unary: list[Number]
    pairs: list[tuple[int, int]]
    const: Number
    tol: float

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.unary) and isinstance(
            self.const, (int, Fraction)
        )

    def scale(self) -> int:
        """Common denominator turning all coefficients into integers."""
        dens = [Fraction(v).denominator for v in self.unary] + [Fraction(self.const).denominator]
        return math.lcm(*dens) if dens else 1

    def value(self, chosen: set[int]) -> Number:
        total = self.const + sum((self.unary[k] for k in chosen), 0)
        total += 2 * sum(1 for a, b in self.pairs if a in chosen and b in chosen)
        return total


def _out_distances(n: NormSpec, prev: LatticeSet, cutoff) -> dict[Point, Number]:
    """Distance to prev for every outside cell with distance <= cutoff."""
    dist: dict[Point, Number] = {}
    for (a, b), v in offsets_within(n, cutoff):
        for x, y in prev:
            q = (x + a, y + b)
            if q not in prev and q not in dist:
                dist[q] = v
    return dist


def _in_distances(n: NormSpec, prev: LatticeSet, cutoff) -> dict[Point, Number]:
    """Distance to the complement for every cell of prev within cutoff."""
    offs = offsets_within(n, cutoff)
    dist: dict[Point, Number] = {}
    for x, y in prev:
        for (a, b), v in offs:
            if (x + a, y + b) not in prev:
                dist[(x, y)] = v
                break
    return dist


def build_problem(n: NormSpec, alpha, eprev: Iterable, constrained: bool,
                  tol: float = DEFAULT_TOL) -> StepProblem:
    prev = as_set(eprev)
    if not prev:
        raise EmptyPrevious("previous set must be non-empty")
    alpha = as_alpha(n, alpha)
    cutoff = 4 / alpha + tol
    cost = _out_distances(n, prev, cutoff)
    if constrained:
        fixed_in = prev
    else:
        inner = _in_distances(n, prev, cutoff)
        cost.update(inner)
        fixed_in = LatticeSet(prev - inner.keys())
    free = sorted(cost)
    index = {p: k for k, p in enumerate(free)}
    unary: list[Number] = []
    const: Number = Fraction(0) if n.exact else 0.0
    for p in free:
        k_fixed = sum(q in fixed_in for q in _nbrs(p))
        if p in prev:
            unary.append(-4 + 2 * k_fixed - alpha * cost[p])
            const += alpha * cost[p]
        else:
            unary.append(-4 + 2 * k_fixed + alpha * cost[p])
    pairs = []
    for p in free:
        for q in ((p[0] + 1, p[1]), (p[0], p[1] + 1)):
            if q in index:
                pairs.append((index[p], index[q]))
    fixed_pairs = sum(
        ((x + 1, y) in fixed_in) + ((x, y + 1) in fixed_in) for x, y in fixed_in
    )
    const += -4 * len(fixed_in) + 2 * fixed_pairs
    return StepProblem(n, alpha, prev, constrained, free, fixed_in, cost, unary, pairs, const, tol)


def candidate_window(n: NormSpec, alpha, eprev: Iterable, constrained: bool,
                     tol: float = DEFAULT_TOL) -> tuple[LatticeSet, LatticeSet]:
    """Free cells and cells forced into every minimiser."""
    prob = build_problem(n, alpha, eprev, constrained, tol)
    return LatticeSet(prob.free), prob.fixed_in


# ---------------------------------------------------------------------------
# results and post-hoc audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepResult:
    minimizer: LatticeSet
    energy: EnergyBreakdown
    solver: str
    zero_margin_cells: tuple[Point, ...]
    unique: bool
    objective: Number  # minimum as computed by the engine itself
    window: int = 0


def _toggle_margins(prob: StepProblem, chosen: set[int]) -> list[Number]:
    """Energy change of flipping each free cell alone at the given state."""
    nb_on = [0] * len(prob.free)
    for a, b in prob.pairs:
        if b in chosen:
            nb_on[a] += 1
        if a in chosen:
            nb_on[b] += 1
    out = []
    for k, u in enumerate(prob.unary):
        add = u + 2 * nb_on[k]
        out.append(-add if k in chosen else add)
    return out


def _audit(prob: StepProblem, chosen: set[int], minimizer: LatticeSet) -> None:
    slack = 0 if prob.exact else prob.tol
    for k, d in enumerate(_toggle_margins(prob, chosen)):
        if d < -slack:
            raise SolverError(f"toggling {prob.free[k]} lowers the energy by {-d}")
    # padding ring: outside cells next to the window must not want in
    region = set(prob.free) | prob.fixed_in
    ring = sorted({
        (x + a, y + b)
        for x, y in region
        for a in (-1, 0, 1)
        for b in (-1, 0, 1)
    } - region - prob.prev)
    for p, d in zip(ring, _distances_to(prob.norm, ring, prob.prev)):
        k = sum(q in minimizer for q in _nbrs(p))
        if 2 * k - 4 + prob.alpha * d < -slack:
            raise SolverError(f"window too small: {p} would improve the energy")


def _finish(prob: StepProblem, chosen: set[int], ambiguous: set[int], objective: Number,
            solver: str) -> StepResult:
    minimizer = LatticeSet(prob.fixed_in | {prob.free[k] for k in chosen})
    _audit(prob, chosen, minimizer)
    singular = {
        prob.free[k]
        for k in range(len(prob.free))
        if abs(prob.alpha * prob.cost[prob.free[k]] - 4) <= (0 if prob.exact else prob.tol)
    }
    if not prob.exact and is_singular(prob.norm, prob.alpha, prob.tol):
        for k, d in enumerate(_toggle_margins(prob, chosen)):
            if abs(d) <= prob.tol:
                raise NumericalMargin(prob.free[k], d)
    zero = tuple(sorted(singular | {prob.free[k] for k in ambiguous}))
    energy = scaled_energy(prob.norm, prob.alpha, minimizer, prob.prev)
    return StepResult(minimizer, energy, solver, zero, not zero, objective, len(prob.free))


# ---------------------------------------------------------------------------
# engines
# ---------------------------------------------------------------------------

def step_brute(n: NormSpec, alpha, eprev: Iterable, constrained: bool = True, cap: int = 22,
               tol: float = DEFAULT_TOL) -> StepResult:
    """Exhaustive minimisation over all subsets of the window.

    Ties go to the fewest cells, then to the lexicographically smallest
    sorted list of centres.
    """
    prob = build_problem(n, alpha, eprev, constrained, tol)
    m = len(prob.free)
    if m > cap:
        raise WindowTooLarge(m, cap)
    if prob.exact:
        scale = prob.scale()
        unary = [int(v * scale) for v in prob.unary]
        pair_w = 2 * scale
        energy = np.zeros(1 << m, dtype=np.int64)
    else:
        scale = 1
        unary = [float(v) for v in prob.unary]
        pair_w = 2.0
        energy = np.zeros(1 << m, dtype=float)
    idx = np.arange(1 << m, dtype=np.int64)
    for k, u in enumerate(unary):
        energy += u * ((idx >> k) & 1)
    for a, b in prob.pairs:
        energy += pair_w * ((idx >> a) & (idx >> b) & 1)
    best = energy.min()
    cands = np.flatnonzero(energy <= (best if prob.exact else best + tol))
    counts = np.array([bin(int(c)).count("1") for c in cands])
    fewest = cands[counts == counts.min()]

    def key(mask: int):
        return sorted(prob.fixed_in | {prob.free[k] for k in range(m) if mask >> k & 1})

    chosen_mask = int(min(fewest.tolist(), key=key))
    varying = 0
    for c in cands.tolist():
        varying |= c ^ chosen_mask
    chosen = {k for k in range(m) if chosen_mask >> k & 1}
    ambiguous = {k for k in range(m) if varying >> k & 1}
    if prob.exact:
        objective = prob.const + Fraction(int(best), scale)
    else:
        objective = prob.const + float(best)
    return _finish(prob, chosen, ambiguous, objective, "brute")


def step_mincut(n: NormSpec, alpha, eprev: Iterable, constrained: bool = True,
                tol: float = DEFAULT_TOL) -> StepResult:
    """Exact minimisation by one minimum cut.

    With y = x on even cells and y = 1 - x on odd cells, each neighbour term
    ``2 x_i x_j`` (i even, j odd) equals ``y_i - y_j + |y_i - y_j|``, so the
    energy becomes unary terms plus unit Potts terms, which a cut represents
    exactly.  Cells whose side differs between the smallest and the largest
    minimum cut are reported as ambiguous.
    """
    prob = build_problem(n, alpha, eprev, constrained, tol)
    m = len(prob.free)
    exact = prob.exact
    scale = prob.scale() if exact else 1
    conv = (lambda v: int(v * scale)) if exact else float
    odd = [(p[0] + p[1]) % 2 == 1 for p in prob.free]
    a = [0] * m
    const = conv(prob.const)
    for k, u in enumerate(prob.unary):
        u = conv(u)
        if odd[k]:
            const += u
            a[k] -= u
        else:
            a[k] += u
    w = conv(1)
    for i, j in prob.pairs:
        ev, od = (i, j) if not odd[i] else (j, i)
        a[ev] += w
        a[od] -= w
    s, t = m, m + 1
    net = FlowNetwork(m + 2)
    for k in range(m):
        if a[k] > 0:
            net.add_edge(s, k, a[k])
        elif a[k] < 0:
            const += a[k]
            net.add_edge(k, t, -a[k])
    for i, j in prob.pairs:
        net.add_edge(i, j, w, w)
    eps = 0 if exact else 1e-12
    flow = net.max_flow(s, t, eps)
    src = net.source_side(s, eps)
    snk = net.sink_side(t, 0 if exact else tol)
    src_loose = net.source_side(s, 0 if exact else tol)
    chosen = set()
    ambiguous = set()
    for k in range(m):
        y = 0 if k in src else 1
        x = 1 - y if odd[k] else y
        if x:
            chosen.add(k)
        if k not in src_loose and k not in snk:
            ambiguous.add(k)
    total = const + flow
    objective = Fraction(total, scale) if exact else float(total)
    return _finish(prob, chosen, ambiguous, objective, "mincut")


def closed_form_violations(n: NormSpec, alpha, eprev: Iterable,
                           tol: float = DEFAULT_TOL) -> list[str]:
    """Names of the hypotheses the closed-form step needs but does not get."""
    which = []
    h = verify_hypotheses(n)
    if not h.absolute:
        which.append("absolute")
    if not h.h2_normalized:
        which.append("H2")
    if not h.h1_symmetric:
        which.append("H1")
    if not h.h3:
        which.append("H3")
    alpha = as_alpha(n, alpha)
    if is_singular(n, alpha, 0 if n.exact else tol):
        which.append("singular-alpha")
    prev = as_set(eprev)
    if prev == ORIGIN:
        return which
    if prev.parity != "even":
        which.append("even")
        return which
    if not is_sublattice_convex(prev):
        which.append("convex")
    try:
        ok = check_monotone_edges(prev).ok
    except DegenerateBoundary:
        which.append("non-degeneracy")
    else:
        if not ok:
            which.append("monotone-edges")
    if not check_symmetry(prev):
        which.append("symmetry")
    return which


def step_closed_form(n: NormSpec, alpha, eprev: Iterable, tol: float = DEFAULT_TOL) -> LatticeSet:
    """Even cells strictly closer than 4/alpha to the previous set, plus that set."""
    which = closed_form_violations(n, alpha, eprev, tol)
    if which:
        raise HypothesisViolated(which)
    prev = as_set(eprev)
    alpha = as_alpha(n, alpha)
    limit = 4 / alpha
    near = _out_distances(n, prev, limit)
    return LatticeSet(prev | {p for p, d in near.items() if d < limit and (p[0] + p[1]) % 2 == 0})


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    k: int
    cells: LatticeSet
    energy: EnergyBreakdown
    parity: str
    checkerboard: bool
    monotone_edges_ok: bool
    unique: bool
    engine: str


@dataclass
class EvolutionTrace:
    norm: NormSpec
    alpha: Number
    constrained: bool
    engine: str
    steps: list[TraceStep] = field(default_factory=list)
    events: list[tuple] = field(default_factory=list)


def monotone_edges_ok(s: LatticeSet) -> bool:
    try:
        return check_monotone_edges(s).ok
    except (DegenerateBoundary, MixedParity):
        return False


def _record(trace: EvolutionTrace, k: int, cells: LatticeSet, energy: EnergyBreakdown,
            unique: bool, engine: str) -> None:
    par = cells.parity
    trace.steps.append(TraceStep(
        k, cells, energy, par, par in ("even", "odd"), monotone_edges_ok(cells), unique, engine,
    ))


def evolve(n: NormSpec, alpha, k_max: int, engine: str = "auto", constrained: bool = True,
           initial: Iterable = ORIGIN, tol: float = DEFAULT_TOL) -> EvolutionTrace:
    """Iterate the step k_max times from the initial datum."""
    if engine not in ("auto", "closed_form", "mincut", "brute"):
        raise ValueError(f"unknown engine {engine!r}")
    alpha = as_alpha(n, alpha)
    cur = as_set(initial)
    if not cur:
        raise EmptyPrevious("initial datum must be non-empty")
    trace = EvolutionTrace(n, alpha, constrained, engine)
    _record(trace, 0, cur, scaled_energy(n, alpha, cur, cur), True, "initial")
    for k in range(1, k_max + 1):
        try:
            nxt, energy, unique, use = _advance(trace, n, alpha, cur, k, engine, constrained, tol)
        except NucleationError as e:
            e.step = k
            raise
        _record(trace, k, nxt, energy, unique, use)
        cur = nxt
    return trace


def _advance(trace: EvolutionTrace, n: NormSpec, alpha, cur: LatticeSet, k: int, engine: str,
             constrained: bool, tol: float):
    use = engine
    if engine == "auto":
        which = closed_form_violations(n, alpha, cur, tol) if constrained else ["unconstrained"]
        use = "closed_form" if not which else "mincut"
        if which:
            trace.events.append(("fallback", k, tuple(which)))
    if use == "closed_form":
        if not constrained:
            raise HypothesisViolated(["unconstrained"])
        nxt = step_closed_form(n, alpha, cur, tol)
        energy = scaled_energy(n, alpha, nxt, cur)
        unique = True
    else:
        step = (step_mincut if use == "mincut" else step_brute)(
            n, alpha, cur, constrained, tol=tol
        )
        nxt, energy, unique = step.minimizer, step.energy, step.unique
        if not unique:
            trace.events.append(("NonUniqueStep", k, step.zero_margin_cells))
    return nxt, energy, unique, use


def fast_forward(nucleus: Iterable, k: int) -> LatticeSet:
    """k-fold Minkowski sum of the nucleus, via the dilated hull when 2D."""
    nucleus = as_set(nucleus)
    if k < 1:
        raise ValueError("k must be positive")
    hull = convex_hull(nucleus)
    if hull.degenerate:
        total = nucleus
        for _ in range(k - 1):
            total = minkowski_sum(total, nucleus)
        return total
    par = nucleus.parity
    target = "even" if par == "even" or k % 2 == 0 else "odd"
    return lattice_points_in(hull, target, k)


def _count(q, lattice: str, m: int) -> int:
    return 1 if m == 0 else pick_count(q, lattice, m)


def parity_flip_bound(n: NormSpec, alpha, nucleus: Iterable, k: int) -> Number:
    """Lower bound for the energy gained by switching step k+1 to odd cells.

    ``-4 #((k+1)Q on odd) + 4 #(kQ on even) + alpha phi_min #(kQ on Z2)`` with
    Q the hull of the nucleus and every count taken from the area/boundary
    formula; it is a quadratic in k with leading term ``alpha |Q| k^2`` for
    normalised norms.
    """
    alpha = as_alpha(n, alpha)
    q = convex_hull(nucleus)
    phi_min = min(n.unit_values())
    odd_next = _count(q, "Z2", k + 1) - _count(q, "Z2even", k + 1)
    return -4 * odd_next + 4 * _count(q, "Z2even", k) + alpha * phi_min * _count(q, "Z2", k)


def parity_flip_threshold(n: NormSpec, alpha, nucleus: Iterable) -> int:
    """Smallest k0 with a positive bound for every k >= k0."""
    f0, f1, f2 = (parity_flip_bound(n, alpha, nucleus, k) for k in range(3))
    lead = (f2 - 2 * f1 + f0) / 2
    lin = f1 - f0 - lead
    if lead <= 0:
        raise ValueError("bound is not eventually positive")
    root = (-lin + math.sqrt(max(float(lin * lin - 4 * lead * f0), 0.0))) / (2 * float(lead))
    k0 = 0
    for k in range(max(0, math.ceil(root)) + 2):
        if parity_flip_bound(n, alpha, nucleus, k) <= 0:
            k0 = k + 1
    return k0
