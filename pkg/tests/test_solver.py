import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import nucleation.energy as energy_module
from nucleation.errors import HypothesisViolated, WindowTooLarge
from nucleation.lattice import as_set, convex_hull, lattice_points_in
from nucleation.limit import nucleus
from nucleation.norms import NormSpec, is_singular, parse_norm
from nucleation.solver import (
    candidate_window,
    evolve,
    fast_forward,
    parity_flip_bound,
    parity_flip_threshold,
    step_brute,
    step_closed_form,
    step_mincut,
)
from nucleation.verify import oracle_equivalence

from oracles import count_points, subset_minimum

LINF, L1, L2 = parse_norm("linf"), parse_norm("l1"), parse_norm("l2")
ELLIPTIC = NormSpec.elliptic(2, Fraction(-5, 3))
RECTMAX = parse_norm("rectmax")
N5 = as_set([(0, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)])


def test_window_examples():
    free, fixed = candidate_window(LINF, 3, {(0, 0)}, True)
    assert free == {(x, y) for x in (-1, 0, 1) for y in (-1, 0, 1)} - {(0, 0)}
    assert fixed == {(0, 0)}
    free, _ = candidate_window(L1, Fraction(11, 5), {(0, 0)}, False)
    assert (0, 0) in free
    assert candidate_window(LINF, 100, {(0, 0)}, True)[0] == set()


def test_brute_examples():
    r = step_brute(LINF, 3, {(0, 0)})
    assert r.minimizer == N5 and r.energy.total == -8 and r.unique
    assert step_brute(LINF, 5, {(0, 0)}).minimizer == {(0, 0)}


def test_brute_cap():
    with pytest.raises(WindowTooLarge):
        step_brute(L2, 0.7, {(0, 0)}, cap=10)


def test_non_uniqueness_linf_alpha_4():
    ring = {(x, y) for x in (-1, 0, 1) for y in (-1, 0, 1)} - {(0, 0)}
    for engine in (step_brute, step_mincut):
        r = engine(LINF, 4, {(0, 0)})
        assert not r.unique
        assert set(r.zero_margin_cells) == ring
    # the tie between {0} and the rhombus is exact
    assert step_brute(LINF, 4, {(0, 0)}).objective == step_mincut(LINF, 4, {(0, 0)}).objective == -4


def test_mincut_l2_first_step():
    r = step_mincut(L2, 0.85, {(0, 0)})
    want = {(x, y) for x in range(-5, 6) for y in range(-5, 6)
            if (x + y) % 2 == 0 and x * x + y * y < (4 / 0.85) ** 2}
    assert r.minimizer == want and r.unique


def test_mincut_rectmax_pair():
    r = step_mincut(RECTMAX, 1.8, {(0, 0)}, constrained=False)
    assert {(1, 1), (2, 1)} <= r.minimizer
    assert (5, 3) not in r.minimizer and (-5, -3) not in r.minimizer
    assert r.minimizer.parity == "mixed"


def _ring_min(n):
    return min(n((x, y)) for x in range(-2, 3) for y in range(-2, 3) if max(abs(x), abs(y)) == 2)


@pytest.mark.parametrize("seed", range(16))
def test_engines_match_subset_enumeration(seed):
    rng = random.Random(seed)
    n = [LINF, L1, L2, RECTMAX][seed % 4]
    prev = rng.choice([{(0, 0)}, {(0, 0), (1, 0)}, {(0, 0), (1, 1)}, {(0, 1), (1, 0)}])
    constrained = seed % 3 != 0
    if not constrained:
        prev = {(0, 0)}
    # every cell at sup-distance 2 from prev is beyond the reach of one step
    alpha = 4 / float(_ring_min(n)) * rng.uniform(1.05, 2.5)
    if n.exact:
        alpha = Fraction(alpha).limit_denominator(100)
    xs, ys = zip(*prev)
    box = [(x, y) for x in range(min(xs) - 1, max(xs) + 2) for y in range(min(ys) - 1, max(ys) + 2)]
    want = subset_minimum(n, alpha, prev, box, constrained)
    for engine in (step_brute, step_mincut):
        r = engine(n, alpha, prev, constrained)
        assert float(r.objective) == pytest.approx(float(want), abs=1e-9)
        assert float(r.energy.total) == pytest.approx(float(want), abs=1e-9)


def test_oracle_equivalence_200_instances():
    norms = [L1, L2, LINF, ELLIPTIC, RECTMAX]
    check = oracle_equivalence(norms, instances=200, seed=7, max_window=18)
    assert check.passed, check.witnesses
    assert check.detail == "200 instances"


def test_oracle_harness_catches_sign_error(monkeypatch):
    real = energy_module.dissipation
    monkeypatch.setattr(energy_module, "dissipation", lambda *a: -real(*a))
    check = oracle_equivalence([LINF, L1], instances=10, seed=1)
    assert not check.passed


def test_closed_form_examples():
    assert step_closed_form(LINF, 3, N5) == lattice_points_in(convex_hull(N5), "even", 2)
    assert len(step_closed_form(LINF, 3, N5)) == 13


def test_closed_form_refusals():
    with pytest.raises(HypothesisViolated) as e:
        step_closed_form(NormSpec.weighted_l1(1, 2), 3, {(0, 0)})
    assert e.value.reason == "H2"
    with pytest.raises(HypothesisViolated) as e:
        step_closed_form(ELLIPTIC, 3, {(0, 0)})
    assert e.value.reason == "absolute"
    with pytest.raises(HypothesisViolated) as e:
        step_closed_form(LINF, 4, {(0, 0)})
    assert "singular-alpha" in e.value.which
    with pytest.raises(HypothesisViolated) as e:
        step_closed_form(LINF, 3, {(0, 0), (1, 0)})
    assert e.value.reason == "even"


def test_closed_form_refuses_edge_violation():
    l3 = parse_norm("l3")
    prev = nucleus(l3, 0.395).nucleus
    with pytest.raises(HypothesisViolated) as e:
        step_closed_form(l3, 0.395, prev)
    assert e.value.which == ["monotone-edges"]


def test_l3_nucleus_at_071_closed_form_agrees_with_mincut():
    # the ball of radius 4/0.71 passes the edge test; both routes agree on the next step
    l3 = parse_norm("l3")
    prev = nucleus(l3, 0.71).nucleus
    assert step_closed_form(l3, 0.71, prev) == step_mincut(l3, 0.71, prev).minimizer


@pytest.mark.parametrize("n,alpha", [(LINF, 3), (LINF, 1.9), (L1, 1.9), (L2, 0.85), (L2, 1.5), (parse_norm("l4"), 1.1)])
def test_structure_and_minkowski(n, alpha):
    nuc = nucleus(n, alpha).nucleus
    trace = evolve(n, alpha, 6, "auto")
    assert not trace.events
    prev = as_set({(0, 0)})
    for st_ in trace.steps[1:]:
        assert st_.cells == fast_forward(nuc, st_.k)
        assert prev <= st_.cells
        if st_.k <= 2:
            assert st_.cells == step_mincut(n, alpha, prev).minimizer
        prev = st_.cells


def test_evolve_examples():
    cells = [len(s.cells) for s in evolve(LINF, 3, 4).steps]
    assert cells == [2 * k * k + 2 * k + 1 for k in range(5)]
    trace = evolve(ELLIPTIC, 3, 3, "mincut")
    for s in trace.steps:
        assert s.cells == {(j, j) for j in range(-s.k, s.k + 1)}
    trace = evolve(L1, Fraction(11, 5), 3, "mincut", constrained=False)
    cross = {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert all(s.cells == cross for s in trace.steps[1:])
    assert len(evolve(LINF, 3, 0).steps) == 1


def test_evolve_reports_step_of_failure():
    with pytest.raises(HypothesisViolated) as e:
        evolve(ELLIPTIC, 3, 2, "closed_form")
    assert e.value.step == 1


def test_auto_falls_back_with_reasons():
    trace = evolve(ELLIPTIC, 3, 1, "auto")
    kind, k, which = trace.events[0]
    assert (kind, k) == ("fallback", 1) and "absolute" in which
    trace = evolve(LINF, 4, 1, "auto")
    assert ("NonUniqueStep", 1) == trace.events[-1][:2]


def test_fast_forward_examples():
    assert fast_forward(N5, 3) == {(x, y) for x in range(-3, 4) for y in range(-3, 4) if (x + y) % 2 == 0}
    assert len(fast_forward(N5, 3)) == 25
    assert fast_forward(N5, 1) == N5
    diag = {(0, 0), (1, 1), (-1, -1)}
    assert fast_forward(diag, 4) == {(j, j) for j in range(-4, 5)}


@given(st.integers(1, 4), st.sampled_from(["linf", "l1", "l2", "l3"]), st.floats(0.8, 3.8))
@settings(max_examples=25, deadline=None)
def test_constrained_steps_are_locally_optimal(k, name, alpha):
    n = parse_norm(name)
    if is_singular(n, alpha, 1e-6):
        return
    trace = evolve(n, alpha, k, "mincut")
    for a, b in zip(trace.steps, trace.steps[1:]):
        assert a.cells <= b.cells


def _bound_by_enumeration(n, alpha, nuc, k):
    verts = convex_hull(nuc).vertices
    cnt = (lambda m, cls: 1 if m == 0 and cls != "odd" else (0 if m == 0 else count_points(verts, m, cls)))
    return -4 * cnt(k + 1, "odd") + 4 * cnt(k, "even") + alpha * min(n.unit_values()) * cnt(k, None)


@pytest.mark.parametrize("alpha", [Fraction(19, 10), Fraction(3, 2)])
def test_parity_flip_bound(alpha):
    nuc = nucleus(L1, alpha).nucleus
    for k in (0, 1, 2, 5, 9):
        assert parity_flip_bound(L1, alpha, nuc, k) == _bound_by_enumeration(L1, alpha, nuc, k)
    assert parity_flip_bound(L1, alpha, nuc, 50) > 0
    k0 = parity_flip_threshold(L1, alpha, nuc)
    scan = [parity_flip_bound(L1, alpha, nuc, k) > 0 for k in range(101)]
    assert all(scan[k0:]) and (k0 == 0 or not scan[k0 - 1])


@pytest.mark.parametrize("alpha", [Fraction(7, 4), Fraction(9, 5), Fraction(19, 10)])
def test_rectmax_minimiser_above_40_over_23(alpha):
    # (5,4) has norm 23/10, so it drops out of reach once alpha > 40/23
    listed = {(0, 0)} | {(s * x, s * y) for s in (1, -1) for x, y in ((1, 1), (2, 1), (3, 2), (4, 3))}
    for constrained in (True, False):
        b = step_brute(RECTMAX, alpha, {(0, 0)}, constrained)
        m = step_mincut(RECTMAX, alpha, {(0, 0)}, constrained)
        assert b.minimizer == m.minimizer == listed and m.unique


def test_rectmax_at_17_tenths_includes_far_pair():
    m = step_mincut(RECTMAX, Fraction(17, 10), {(0, 0)}, constrained=False)
    b = step_brute(RECTMAX, Fraction(17, 10), {(0, 0)}, constrained=False)
    assert m.minimizer == b.minimizer
    assert {(5, 4), (-5, -4)} <= m.minimizer and RECTMAX((5, 4)) == Fraction(23, 10)
