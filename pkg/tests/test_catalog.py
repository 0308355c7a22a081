"""Builder families: fusion tables, dims, conjugation, and the registry."""

import pytest

from fusionkit import catalog
from fusionkit.catalog import BuilderSpec, build, list_builders
from fusionkit.errors import InvalidSpec

from oracles import decompose_char_product, s3_product_multiplicities


def test_free_group_generators_and_conj():
    ring = catalog.free_group(2)
    assert ring.generators == ((1,), (2,))
    assert set(ring.generators_and_conjugates) == {(1,), (2,), (-1,), (-2,)}
    assert ring.conj((1, 2, -1)) == (1, -2, -1)
    assert ring.dim((1, 2)) == 1


def test_free_abelian_rank_one_uses_plain_ints():
    ring = catalog.free_abelian(1)
    assert ring.unit == 0
    assert ring.fuse(3, -5) == {-2: 1}
    assert ring.conj(7) == -7


def test_free_abelian_higher_rank():
    ring = catalog.free_abelian(3)
    assert ring.unit == (0, 0, 0)
    assert ring.fuse((1, 0, 2), (0, 1, -2)) == {(1, 1, 0): 1}
    assert len(ring.generators) == 3


def test_cyclic_wraps():
    ring = catalog.cyclic(5)
    assert ring.fuse(3, 4) == {2: 1}
    assert ring.conj(2) == 3
    assert ring.basis == (0, 1, 2, 3, 4)
    assert ring.is_finite


def test_cyclic_one_is_trivial():
    ring = catalog.cyclic(1)
    assert ring.basis == (0,)
    assert ring.generators_and_conjugates == (0,)


def test_su2_against_character_oracle():
    ring = catalog.su2()
    for a in range(8):
        assert ring.dim(a) == a + 1
        for b in range(8):
            assert ring.fuse(a, b) == decompose_char_product(a, b)


def test_free_orthogonal_dimension_recurrence():
    ring = catalog.free_orthogonal(3)
    dims = [ring.dim(n) for n in range(6)]
    assert dims == [1, 3, 8, 21, 55, 144]
    # exact integer arithmetic: no float creep even when huge
    big = ring.dim(500)
    assert isinstance(big, int)
    assert big == 3 * ring.dim(499) - ring.dim(498)


def test_free_orthogonal_parameter_two_matches_rank1_dims():
    same = catalog.free_orthogonal(2)
    ref = catalog.su2()
    for n in range(10):
        assert same.dim(n) == ref.dim(n)
        assert same.fuse(n, 1) == ref.fuse(n, 1)


def test_ising_table():
    ring = catalog.ising()
    assert ring.fuse("sigma", "sigma") == {"1": 1, "eps": 1}
    assert ring.fuse("eps", "sigma") == {"sigma": 1}
    assert ring.fuse("eps", "eps") == {"1": 1}
    assert ring.dim("sigma") == pytest.approx(2 ** 0.5)
    assert ring.basis == ("1", "eps", "sigma")


def test_s3_against_character_oracle():
    ring = catalog.finite_group("S3")
    for a in ring.basis:
        for b in ring.basis:
            assert ring.fuse(a, b) == s3_product_multiplicities(a, b)


def test_unknown_group_rejected():
    with pytest.raises(InvalidSpec):
        catalog.finite_group("M24")


def test_product_ring_componentwise():
    ring = catalog.product(catalog.su2(), catalog.cyclic(3))
    assert ring.unit == (0, 0)
    assert ring.fuse((1, 1), (1, 2)) == {(0, 0): 1, (2, 0): 1}
    assert ring.dim((3, 2)) == 4
    assert ring.conj((1, 1)) == (1, 2)
    assert not ring.is_finite

    finite = catalog.product(catalog.ising(), catalog.cyclic(2))
    assert finite.is_finite
    assert len(finite.basis) == 6


def test_table_ring_rejects_incomplete_tables():
    with pytest.raises(InvalidSpec):
        catalog.table_ring(
            "incomplete",
            unit="1",
            generators=("a",),
            basis=("1", "a"),
            dims={"1": 1, "a": 1},
            conj={"1": "1", "a": "a"},
            table={},  # missing (a, a)
        )


def test_table_ring_rejects_bad_constants():
    with pytest.raises(InvalidSpec):
        catalog.table_ring(
            "negative",
            unit="1",
            generators=("a",),
            basis=("1", "a"),
            dims={"1": 1, "a": 1},
            conj={"1": "1", "a": "a"},
            table={("a", "a"): {"1": -1}},
        )


# -- registry -----------------------------------------------------------------


def test_build_by_name_and_params():
    ring = build("free_group", rank=3)
    assert ring.name == "free_group(3)"
    ring = build("cyclic", modulus=7)
    assert ring.name == "cyclic(7)"


def test_build_from_spec_json_round_trip():
    for spec in list_builders():
        ring = build(spec)
        assert ring.builder is not None
        again = build(BuilderSpec.from_json(ring.builder.to_json()))
        assert again.name == ring.name
        assert again.unit == ring.unit


def test_build_product_from_nested_spec():
    spec = {
        "type": "product",
        "params": {
            "left": {"type": "su2", "params": {}},
            "right": {"type": "cyclic", "params": {"modulus": 3}},
        },
    }
    ring = build(spec)
    assert ring.name == "product(su2,cyclic(3))"
    assert ring.fuse((1, 2), (1, 1)) == {(0, 0): 1, (2, 0): 1}


@pytest.mark.parametrize(
    "name,params",
    [
        ("free_group", {"rank": 0}),
        ("free_abelian", {"rank": -1}),
        ("cyclic", {"modulus": 0}),
        ("free_orthogonal", {"parameter": 1}),
        ("nonsense", {}),
    ],
)
def test_bad_builder_specs_rejected(name, params):
    with pytest.raises(InvalidSpec):
        build(name, **params)


def test_builder_spec_is_hashable_and_ordered():
    a = BuilderSpec.make("cyclic", modulus=3)
    b = BuilderSpec.make("cyclic", modulus=3)
    assert a == b and hash(a) == hash(b)
    assert a.to_json() == {"type": "cyclic", "params": {"modulus": 3}}
