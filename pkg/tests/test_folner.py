"""Boundaries, invariance ratios, ball profiles, and the greedy search."""

from fractions import Fraction

import pytest

from fusionkit import catalog
from fusionkit.errors import InvalidLabel
from fusionkit.folner import (
    FolnerSet,
    NotFound,
    ball_profile,
    boundary,
    folner_ratio,
    greedy_search,
    max_generator_ratio,
    verify_sequence,
)
from fusionkit.rings import ball

from oracles import brute_boundary


# -- boundaries ---------------------------------------------------------------


@pytest.mark.parametrize(
    "make,radius",
    [
        (catalog.su2, 4),
        (lambda: catalog.free_group(2), 2),
        (lambda: catalog.free_orthogonal(3), 3),
        (lambda: catalog.cyclic(8), 2),
        (catalog.ising, 1),
        (lambda: catalog.product(catalog.su2(), catalog.cyclic(2)), 2),
    ],
)
def test_boundary_matches_brute_force(make, radius):
    ring = make()
    F = ball(ring, radius)
    candidates = ball(ring, radius + 2)
    for gamma in ring.generators_and_conjugates:
        ours = boundary(ring, F, gamma)
        ref = brute_boundary(ring, F, gamma, candidates)
        assert ours == ref, (ring.name, gamma)


def test_interval_boundary_exact():
    ring = catalog.free_abelian(1)
    F = list(range(-5, 6))
    assert boundary(ring, F, 1) == {5, -6}
    assert boundary(ring, F, -1) == {-5, 6}
    assert folner_ratio(ring, F, 1) == Fraction(2, 11)


def test_interval_ratio_closed_form():
    ring = catalog.free_abelian(1)
    for n in (1, 4, 10, 25):
        F = range(-n, n + 1)
        assert max_generator_ratio(ring, F) == Fraction(2, 2 * n + 1)


def test_su2_ball_ratio_closed_form():
    # boundary of {0..n} in the fundamental direction is {n, n+1}
    ring = catalog.su2()
    n = 50
    F = range(n + 1)
    expected = Fraction(51**2 + 52**2, sum(k**2 for k in range(1, 52)))
    got = folner_ratio(ring, F, 1)
    assert got == expected == Fraction(5305, 45526)
    assert float(got) == pytest.approx(0.1165268, abs=1e-6)


def test_ising_ratio_is_float():
    ring = catalog.ising()
    F = ["1", "sigma"]
    assert boundary(ring, F, "sigma") == {"sigma", "eps"}
    r = folner_ratio(ring, F, "sigma")
    assert isinstance(r, float)
    assert r == pytest.approx(1.0)


def test_folner_set_basics():
    ring = catalog.free_orthogonal(3)
    F = FolnerSet.from_labels(ring, [2, 0, 1, 1])
    assert F.labels == (0, 1, 2)
    assert F.weighted_card == 1 + 9 + 64
    assert isinstance(F.weighted_card, int)
    assert 1 in F and 5 not in F

    with pytest.raises(ValueError):
        FolnerSet.from_labels(ring, [])
    with pytest.raises(InvalidLabel):
        FolnerSet.from_labels(ring, [-3])


# -- profiles -----------------------------------------------------------------


def test_ball_profile_free_abelian_exact():
    ring = catalog.free_abelian(1)
    profile = ball_profile(ring, 5)
    assert [row.n for row in profile.rows] == [1, 2, 3, 4, 5]
    for row in profile.rows:
        assert row.max_ratio == Fraction(2, 2 * row.n + 1)
        assert row.size == 2 * row.n + 1
    assert profile.is_decreasing
    assert profile.generators_only


def test_ball_profile_su2_decreasing():
    profile = ball_profile(catalog.su2(), 20)
    assert profile.is_decreasing
    # boundary {20, 21} against bulk {0..20}: (21^2 + 22^2) / sum k^2
    assert profile.rows[-1].max_ratio == Fraction(925, 3311)


def test_ball_profile_quantum_plateau():
    profile = ball_profile(catalog.free_orthogonal(3), 8)
    ratios = [float(r) for r in profile.max_ratios]
    assert profile.is_decreasing           # decreasing, but pinned above 1
    assert all(r > 1 for r in ratios)
    assert ratios[-1] == pytest.approx(6.711, abs=2e-2)


def test_ball_profile_finite_ring_saturates_to_zero():
    profile = ball_profile(catalog.cyclic(5), 6)
    assert len(profile.rows) == 6
    assert profile.rows[-1].max_ratio == 0
    assert profile.rows[-1].size == 5


def test_profile_serialization_shape():
    payload = ball_profile(catalog.free_abelian(1), 3).to_dict()
    assert payload["kind"] == "balls"
    assert payload["generators_only"] is True
    row = payload["rows"][0]
    assert set(row) == {"n", "size", "weighted_card", "ratios", "max_ratio"}
    assert isinstance(row["max_ratio"], float)


def test_verify_sequence_thresholds():
    ring = catalog.free_abelian(1)
    sets = [range(-n, n + 1) for n in range(1, 11)]
    profile = verify_sequence(ring, sets, eps=0.1)
    assert profile.passes()
    assert not profile.passes(eps=0.05)
    assert profile.rows[-1].max_ratio == Fraction(2, 21)


def test_verify_sequence_custom_directions():
    ring = catalog.free_abelian(1)
    profile = verify_sequence(ring, [range(-10, 11)], eps=0.5, generators=[2, -2])
    assert not profile.generators_only
    # stepping by 2 doubles the boundary: {9, 10} out, {-11, -12} in
    assert profile.rows[0].ratios[2] == Fraction(4, 21)


def test_verify_sequence_needs_eps_or_argument():
    ring = catalog.free_abelian(1)
    profile = ball_profile(ring, 2)
    with pytest.raises(ValueError):
        profile.passes()


# -- greedy search ------------------------------------------------------------


def test_greedy_search_interval_target():
    ring = catalog.free_abelian(1)
    result = greedy_search(ring, target_ratio=0.05)
    assert isinstance(result, FolnerSet)
    assert max_generator_ratio(ring, result) <= Fraction(1, 20)
    # the first ball making it is [-20, 20]
    assert result.labels == tuple(range(-20, 21))


def test_greedy_search_su2_target():
    ring = catalog.su2()
    result = greedy_search(ring, target_ratio=0.118)
    assert isinstance(result, FolnerSet)
    assert result.labels == tuple(range(51))
    assert float(max_generator_ratio(ring, result)) <= 0.118


def test_greedy_search_gap_ring_not_found():
    result = greedy_search(catalog.free_orthogonal(3), target_ratio=0.5, budget=200)
    assert isinstance(result, NotFound)
    assert result.best_ratio == pytest.approx(6.711, abs=0.4)
    assert result.evaluations <= 200


def test_greedy_search_budget_exhaustion():
    result = greedy_search(catalog.free_abelian(1), target_ratio=0.001, budget=3)
    assert isinstance(result, NotFound)
    assert result.evaluations == 3
    assert result.best_ratio > 0.001


def test_greedy_search_finite_ring_reaches_zero():
    result = greedy_search(catalog.finite_group("S3"), target_ratio=0.0)
    assert isinstance(result, FolnerSet)
    assert set(result.labels) == {"triv", "sgn", "std"}
    assert max_generator_ratio(catalog.finite_group("S3"), result) == 0
