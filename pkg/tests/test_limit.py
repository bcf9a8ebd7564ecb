import math
import random
from fractions import Fraction

import numpy as np
import pytest

from nucleation.errors import SingularAlpha
from nucleation.lattice import as_set, convex_hull
from nucleation.limit import (
    LimitMotion,
    alpha_critical,
    fast_regime_limit,
    hausdorff_bound,
    hausdorff_gap,
    l1_parity_analysis,
    limit_set,
    nucleus,
    pinning_threshold,
)
from nucleation.norms import NormSpec, is_singular, parse_norm
from nucleation.solver import candidate_window, evolve, step_brute, step_mincut

LINF, L1, L2 = parse_norm("linf"), parse_norm("l1"), parse_norm("l2")
ELLIPTIC = NormSpec.elliptic(2, Fraction(-5, 3))


def test_nucleus_linf():
    r = nucleus(LINF, 3)
    assert r.nucleus == {(0, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert r.max_i1 == 1 and r.velocity == 3 and not r.pinned and r.kind == "nucleation"
    assert set(r.polygon) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert all(r.hypotheses.values())


def test_nucleus_singular():
    with pytest.raises(SingularAlpha) as e:
        nucleus(LINF, 2)
    assert e.value.nearest == 2


def test_l2_polygons_depend_on_alpha():
    a, b = nucleus(L2, 0.85), nucleus(L2, 0.7)
    assert (a.max_i1, b.max_i1) == (4, 5)
    assert set(a.polygon) != set(b.polygon)
    for r in (a, b):
        hull = convex_hull(r.nucleus)
        assert set(r.polygon) == {(Fraction(x, r.max_i1), Fraction(y, r.max_i1)) for x, y in hull.vertices}


def test_linf_polygon_does_not_depend_on_alpha():
    polys = {frozenset(nucleus(LINF, a).polygon) for a in (3, 2.5, 1.9, 1.3, 0.7)}
    assert polys == {frozenset({(1, 1), (1, -1), (-1, 1), (-1, -1)})}
    for a in (Fraction(3), Fraction(5, 2), Fraction(19, 10)):
        assert nucleus(LINF, a).velocity == a * math.floor(4 / a)


@pytest.mark.parametrize("name", ["linf", "l1", "l2", "l3", "rectmax"])
def test_pinned_above_threshold(name):
    n = parse_norm(name)
    a = float(pinning_threshold(n)) * 1.01
    r = nucleus(n, a)
    assert r.pinned and r.max_i1 == 0 and r.polygon == ((0, 0),) and r.kind == "pinned"
    assert all(s.cells == {(0, 0)} for s in evolve(n, a, 10).steps)


def test_pinning_thresholds():
    assert pinning_threshold(LINF) == 4
    assert pinning_threshold(L1) == 2
    assert pinning_threshold(L2) == pytest.approx(2 * math.sqrt(2), abs=1e-12)


def test_max_i1_in_expected_pair():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.choice([LINF, L1, L2, parse_norm("l3")])
        a = rng.uniform(0.4, 2.6)
        if is_singular(n, a, 1e-6):
            continue
        r = nucleus(n, a)
        assert r.max_i1 in (2 * math.floor(2 / float(r.alpha)), math.floor(4 / float(r.alpha)))


@pytest.mark.parametrize("alpha", [0.6, 0.85, 1.3, 2.2, 3.5])
def test_nucleus_is_first_brute_step(alpha):
    for n in (LINF, L2, L1):
        if is_singular(n, alpha, 1e-6):
            continue
        r = nucleus(n, alpha)
        if len(candidate_window(n, alpha, {(0, 0)}, True)[0]) <= 22:
            assert step_brute(n, alpha, {(0, 0)}).minimizer == r.nucleus
        assert step_mincut(n, alpha, {(0, 0)}).minimizer == r.nucleus


def test_elliptic_segment_motion():
    for a in (3, 3.5, 4.5):
        r = nucleus(ELLIPTIC, a)
        assert r.nucleus == {(0, 0), (1, 1), (-1, -1)} and r.kind == "segment"
        assert not r.hypotheses["absolute"]
    m = LimitMotion.from_report(nucleus(ELLIPTIC, 3))
    assert set(limit_set(m, 2)) == {(6.0, 6.0), (-6.0, -6.0)}


def test_limit_set_examples():
    m = LimitMotion.from_report(nucleus(LINF, 3))
    assert set(limit_set(m, 2)) == {(6, 6), (6, -6), (-6, 6), (-6, -6)}
    assert limit_set(m, 0) == ((0, 0),)
    pinned = LimitMotion.from_report(nucleus(LINF, 5))
    assert limit_set(pinned, 7) == ((0, 0),)


def test_limit_set_with_initial_polygon():
    m = LimitMotion.from_report(nucleus(LINF, 3), initial=((0, 0), (2, 0), (0, 2)))
    got = set(limit_set(m, 1))
    assert got == {(-3, -3), (5, -3), (5, 3), (3, 5), (-3, 5)}


def test_fast_regime():
    ball = fast_regime_limit(L2, 1)
    assert ball.radius == 4 and ball.kind == "fast_regime_ball"
    assert np.allclose(np.hypot(*ball.boundary(64).T), 4)
    assert fast_regime_limit(L2, 0).radius == 0
    sq = fast_regime_limit(LINF, 0.5)
    assert np.allclose(np.abs(sq.boundary(64)).max(axis=1), 2)


@pytest.mark.parametrize("eps", [Fraction(1, 4), Fraction(1, 8)])
def test_hausdorff_gap_within_bound(eps):
    m = LimitMotion.from_report(nucleus(LINF, 3))
    k = math.floor(3 * 1 / eps)
    cells = evolve(LINF, 3, k).steps[-1].cells
    gap = hausdorff_gap(cells, eps, m, 1)
    assert gap <= hausdorff_bound(eps, 3, 3, 1) + 1e-12
    # the squares stick out of the limit square by half a cell diagonal
    assert gap >= float(eps) / math.sqrt(2) - 1e-12


def test_hausdorff_gap_at_time_zero():
    m = LimitMotion.from_report(nucleus(LINF, 3))
    assert hausdorff_gap({(0, 0)}, 0.25, m, 0) <= 0.25


def test_hausdorff_gap_sees_missing_cells():
    m = LimitMotion.from_report(nucleus(LINF, 3))
    cells = evolve(LINF, 3, 8).steps[-1].cells
    eps = Fraction(1, 8)
    full = hausdorff_gap(cells, eps, m, 1)
    holed = hausdorff_gap(as_set(cells - {(8, 8), (7, 7), (8, 6), (6, 8)}), eps, m, 1)
    assert holed > full


def test_alpha_critical_values():
    assert alpha_critical(1) == Fraction(12, 5)
    assert alpha_critical(2) == Fraction(20, 11)


def test_parity_analysis_example():
    r = l1_parity_analysis(2.2)
    assert r.first_step_parity == "odd" and r.R == 1
    assert r.energy_odd == -5 and r.energy_even == -4
    assert (r.threshold_below, r.threshold_above) == (Fraction(20, 11), Fraction(12, 5))


def _best_of_parity(alpha, cls):
    """Minimum step energy over l1 balls on one parity class, by direct evaluation."""
    from nucleation.energy import scaled_energy
    from nucleation.norms import ball_points

    e = ball_points(L1, 4 / alpha, "Z2even" if cls == "even" else "Z2odd", strict=True)
    return scaled_energy(L1, alpha, e, {(0, 0)}).total


def test_parity_energies_match_direct_evaluation():
    for a in (Fraction(22, 10), Fraction(19, 10), Fraction(3, 2), Fraction(13, 10), Fraction(7, 10)):
        r = l1_parity_analysis(a)
        assert r.energy_even == _best_of_parity(a, "even")
        assert r.energy_odd == _best_of_parity(a, "odd")


def test_parity_matches_unconstrained_first_step():
    rng = random.Random(11)
    done = 0
    while done < 20:
        a = Fraction(rng.randint(1001, 3999), 1000)
        if is_singular(L1, a) or a in {alpha_critical(r) for r in range(1, 12)}:
            continue
        r = l1_parity_analysis(a)
        step = step_mincut(L1, a, {(0, 0)}, constrained=False)
        assert step.minimizer.parity == r.first_step_parity, a
        done += 1


def test_parity_thresholds_bracket_alpha():
    for a in (Fraction(39, 10), Fraction(23, 10), Fraction(21, 10), Fraction(19, 10), Fraction(3, 2), Fraction(9, 10)):
        r = l1_parity_analysis(a)
        assert r.threshold_below < a and (r.threshold_above is None or a < r.threshold_above)


def test_parity_rejects_singular():
    with pytest.raises(SingularAlpha):
        l1_parity_analysis(2)
