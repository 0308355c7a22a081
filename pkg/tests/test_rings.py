"""Core ring arithmetic, measures, balls, and the axiom checker."""

import math

import pytest

from fusionkit import catalog, rings
from fusionkit.errors import InvalidLabel, NonProbability, SizeCapExceeded
from fusionkit.rings import (
    Measure,
    ball,
    ball_shells,
    check_axioms,
    convolution_power,
    delta,
    dirac_convolve,
    involute,
    measure_convolve,
    multiply,
)

from oracles import decompose_char_product


# -- element arithmetic -------------------------------------------------------


def test_multiply_rank1_sum_of_labels():
    ring = catalog.su2()
    out = multiply(ring, {1: 1, 2: 1}, {1: 1})
    assert out == {0: 1, 1: 1, 2: 1, 3: 1}


def test_multiply_matches_character_oracle():
    ring = catalog.su2()
    for a in range(6):
        for b in range(6):
            assert ring.fuse(a, b) == decompose_char_product(a, b)


def test_multiply_unit_laws():
    ring = catalog.free_group(2)
    w = (1, 2, -1)
    assert multiply(ring, delta(ring.unit), delta(w)) == {w: 1}
    assert multiply(ring, delta(w), delta(ring.unit)) == {w: 1}


def test_free_group_word_arithmetic():
    ring = catalog.free_group(2)
    # (ab)(b^-1 a) = a^2
    assert ring.fuse((1, 2), (-2, 1)) == {(1, 1): 1}
    # w * conj(w) collapses to the unit
    w = (1, 2, 2, -1)
    assert multiply(ring, delta(w), delta(ring.conj(w))) == {(): 1}


def test_involute_conjugates_coefficients_and_labels():
    ring = catalog.free_group(2)
    x = {(1,): 2 + 1j, (2, 1): 3}
    out = involute(ring, x)
    assert out == {(-1,): 2 - 1j, (-1, -2): 3}


def test_multiply_drops_zero_coefficients():
    ring = catalog.su2()
    assert multiply(ring, {1: 1, 2: 0}, {0: 1}) == {1: 1}
    assert multiply(ring, {1: 1}, {1: 1, 0: -1}) == {0: 1, 2: 1, 1: -1}


# -- measures -----------------------------------------------------------------


def test_measure_validation():
    with pytest.raises(NonProbability):
        Measure({0: 0.5, 1: 0.4})
    with pytest.raises(NonProbability):
        Measure({0: 1.5, 1: -0.5})
    mu = Measure({0: 0.5, 1: 0.5, 2: 0.0})
    assert mu.support() == [0, 1]
    assert mu(2) == 0.0


def test_measure_constructors():
    ring = catalog.free_group(2)
    mu = Measure.uniform_on_generators(ring)
    assert len(mu) == 4
    assert mu((1,)) == pytest.approx(0.25)
    assert mu.is_symmetric(ring)

    nu = Measure.symmetrized_point(ring, (1, 2))
    assert nu((1, 2)) == 0.5 and nu((-2, -1)) == 0.5
    assert nu.is_symmetric(ring)

    # self-conjugate label: no splitting
    r2 = catalog.su2()
    assert Measure.symmetrized_point(r2, 1).weights == {1: 1.0}


def test_measure_symmetry_detection():
    ring = catalog.free_group(1)
    assert not Measure.point((1,)).is_symmetric(ring)
    assert Measure({(1,): 0.5, (-1,): 0.5}).is_symmetric(ring)


# -- convolution --------------------------------------------------------------


def test_dirac_convolve_rank1():
    ring = catalog.su2()
    mu = dirac_convolve(ring, 1, 1)
    assert mu.weights == pytest.approx({0: 0.25, 2: 0.75})


def test_dirac_convolve_is_group_multiplication_for_dim_one():
    ring = catalog.free_group(2)
    assert dirac_convolve(ring, (1,), (-1,)).weights == {(): 1.0}
    assert dirac_convolve(ring, (1, 2), (2,)).weights == {(1, 2, 2): 1.0}


def test_dirac_convolve_irrational_dims():
    ring = catalog.ising()
    mu = dirac_convolve(ring, "sigma", "sigma")
    assert mu.weights == pytest.approx({"1": 0.5, "eps": 0.5})


def test_three_step_convolution_frozen_value():
    # mu = point mass at the fundamental label; third convolution power
    # splits evenly between labels 1 and 3:
    #   mu*mu = 1/4 d0 + 3/4 d2, then
    #   (1/4 d0 + 3/4 d2)*mu = 1/4 d1 + 3/4(1/3 d1 + 2/3 d3) = 1/2 d1 + 1/2 d3
    ring = catalog.su2()
    mu = Measure.point(1)
    out = convolution_power(ring, mu, 3)
    assert out.weights == pytest.approx({1: 0.5, 3: 0.5}, abs=1e-12)


def test_measure_convolve_mass_is_preserved():
    ring = catalog.free_orthogonal(3)
    mu = Measure({0: 0.125, 1: 0.5, 2: 0.375})
    out = measure_convolve(ring, mu, mu)
    assert sum(out.weights.values()) == pytest.approx(1.0, abs=1e-12)


def test_free_group_return_probability():
    ring = catalog.free_group(2)
    mu = Measure.uniform_on_generators(ring)
    two = measure_convolve(ring, mu, mu)
    assert two.weights[()] == pytest.approx(0.25)
    four = measure_convolve(ring, two, two)
    # return probability after 4 steps: walks on the 4-regular tree
    assert four.weights[()] == pytest.approx(7 / 64)


# -- balls --------------------------------------------------------------------


def test_ball_free_group_counts():
    ring = catalog.free_group(2)
    for r in range(6):
        expected = 1 + 2 * (3**r - 1)
        assert len(ball(ring, r)) == expected


def test_ball_orderings():
    assert ball(catalog.free_abelian(1), 3) == [-3, -2, -1, 0, 1, 2, 3]
    assert ball(catalog.su2(), 4) == [0, 1, 2, 3, 4]
    assert ball(catalog.cyclic(5), 2) == [0, 1, 2, 3, 4]
    assert ball(catalog.ising(), 1) == ["1", "sigma"]


def test_ball_ising_closes_at_radius_two():
    ring = catalog.ising()
    assert ball(ring, 2) == ["1", "eps", "sigma"]
    # finite ring: enumeration stops early
    assert ball(ring, 50) == ["1", "eps", "sigma"]


def test_ball_shells_structure():
    ring = catalog.free_abelian(1)
    shells = ball_shells(ring, 2)
    assert shells == [[0], [-1, 1], [-2, 2]]


def test_ball_cap():
    ring = catalog.free_group(2)
    with pytest.raises(SizeCapExceeded):
        ball(ring, 8, cap=1000)


def test_ball_product_ring():
    ring = catalog.product(catalog.su2(), catalog.cyclic(2))
    labels = ball(ring, 2)
    assert (0, 0) in labels and (1, 1) in labels and (2, 0) in labels
    assert labels == sorted(labels, key=ring.sort_key)


# -- label validation ---------------------------------------------------------


@pytest.mark.parametrize(
    "make,bad",
    [
        (catalog.su2, -1),
        (catalog.su2, 1.5),
        (catalog.su2, "x"),
        (lambda: catalog.free_group(2), (1, -1)),   # not reduced
        (lambda: catalog.free_group(2), (3,)),      # letter out of range
        (lambda: catalog.free_group(2), [1]),       # not a tuple
        (lambda: catalog.cyclic(3), 3),
        (lambda: catalog.free_abelian(2), (1,)),    # wrong arity
    ],
)
def test_invalid_labels_raise(make, bad):
    ring = make()
    with pytest.raises(InvalidLabel):
        ring.dim(bad)
    with pytest.raises(InvalidLabel):
        ring.fuse(bad, ring.unit)


def test_bool_is_not_a_label():
    ring = catalog.su2()
    with pytest.raises(InvalidLabel):
        ring.fuse(True, 1)


# -- axiom checker ------------------------------------------------------------


@pytest.mark.parametrize(
    "ring,radius",
    [
        (catalog.su2(), 4),
        (catalog.free_orthogonal(3), 3),
        (catalog.free_group(2), 2),
        (catalog.free_abelian(2), 2),
        (catalog.cyclic(6), 3),
        (catalog.ising(), 2),
        (catalog.finite_group("S3"), 2),
        (catalog.product(catalog.su2(), catalog.cyclic(2)), 2),
    ],
    ids=lambda v: getattr(v, "name", v),
)
def test_axioms_pass_on_catalog(ring, radius):
    report = check_axioms(ring, ball(ring, radius))
    assert report.passed, report.summary()


def test_axioms_catch_broken_dimension():
    # sigma * sigma = 1 alone is inconsistent with d(sigma) = sqrt(2)
    broken = catalog.table_ring(
        "broken-dim",
        unit="1",
        generators=("s",),
        basis=("1", "s"),
        dims={"1": 1, "s": 2.0**0.5},
        conj={"1": "1", "s": "s"},
        table={("s", "s"): {"1": 1}},
    )
    report = check_axioms(broken, ["1", "s"])
    assert not report.passed
    names = {c.name for c in report.checks if not c.passed}
    assert "dimension-identity" in names


def test_axioms_catch_broken_involution():
    # relabeled Z/3 with the identity involution: Frobenius must fail
    broken = catalog.table_ring(
        "broken-conj",
        unit="1",
        generators=("a",),
        basis=("1", "a", "b"),
        dims={"1": 1, "a": 1, "b": 1},
        conj={"1": "1", "a": "a", "b": "b"},
        table={
            ("a", "a"): {"b": 1},
            ("a", "b"): {"1": 1},
            ("b", "a"): {"1": 1},
            ("b", "b"): {"a": 1},
        },
    )
    report = check_axioms(broken, ["1", "a", "b"])
    assert not report.passed
    names = {c.name for c in report.checks if not c.passed}
    assert "frobenius-reciprocity" in names


def test_axiom_report_shape():
    ring = catalog.su2()
    report = check_axioms(ring, ball(ring, 3))
    text = report.summary()
    assert "PASS" in text and "FAIL" not in text
    payload = report.to_dict()
    assert payload["passed"] is True
    assert {c["name"] for c in payload["checks"]} >= {
        "unit-laws", "involution", "frobenius-reciprocity",
        "dimension-identity", "associativity",
    }
