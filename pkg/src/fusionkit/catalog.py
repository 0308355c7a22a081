"""Built-in ring families and the builder registry.

Each builder returns a fully wired :class:`~fusionkit.rings.FusionRing` and
stamps it with the :class:`BuilderSpec` that produced it, so rings can be
serialized as a recipe instead of a table.  Families:

- ``free_group`` (rank k): reduced words over k letters, all dims 1;
- ``free_abelian`` (rank d): integer vectors (plain ints for d = 1);
- ``cyclic`` (modulus m): integers mod m;
- ``su2``: nonnegative integers with the Clebsch-Gordan fusion, dim n + 1;
- ``free_orthogonal`` (parameter N >= 2): same fusion rule, dims by the
  recurrence d(n+1) = N d(n) - d(n-1) — kept as exact Python ints, since
  they grow to thousands of digits at the window sizes we use;
- ``ising``: three labels with one irrational dimension (sqrt 2);
- ``finite_group`` (name): representation ring from a built-in character
  table ("S3" ships);
- ``product``: componentwise product of two rings on pair labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import InvalidSpec
from .rings import FusionRing, label_key


@dataclass(frozen=True)
class BuilderSpec:
    """A recipe (type + params) that reconstructs a catalog ring."""

    type: str
    params: tuple = ()  # sorted (key, value) pairs; values JSON-compatible

    @classmethod
    def make(cls, type_: str, **params) -> "BuilderSpec":
        return cls(type_, tuple(sorted(params.items())))

    def params_dict(self) -> dict:
        return {k: v for k, v in self.params}

    def to_json(self) -> dict:
        return {"type": self.type, "params": self.params_dict()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "BuilderSpec":
        try:
            type_ = obj["type"]
            params = dict(obj.get("params", {}))
        except (KeyError, TypeError) as exc:
            raise InvalidSpec(f"malformed builder spec: {obj!r}") from exc
        return cls.make(type_, **params)


# -- individual builders -----------------------------------------------------


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidSpec(msg)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def free_group(rank: int) -> FusionRing:
    """Group ring of the free group on ``rank`` letters.

    Labels are reduced words: tuples of nonzero ints in ``{-rank..rank}``
    with no adjacent cancelling pair.  The unit is the empty tuple.
    """
    _require(_is_int(rank) and rank >= 1, f"free_group rank must be >= 1, got {rank!r}")

    def valid(w):
        if not isinstance(w, tuple):
            return False
        for i, x in enumerate(w):
            if not _is_int(x) or x == 0 or abs(x) > rank:
                return False
            if i and w[i - 1] == -x:
                return False
        return True

    def fuse(u, v):
        i, j = len(u), 0
        while i > 0 and j < len(v) and u[i - 1] == -v[j]:
            i -= 1
            j += 1
        return {u[:i] + v[j:]: 1}

    return FusionRing(
        f"free_group({rank})",
        unit=(),
        generators=tuple((i,) for i in range(1, rank + 1)),
        dim=lambda w: 1,
        conj=lambda w: tuple(-x for x in reversed(w)),
        fuse=fuse,
        validate=valid,
        sort_key=lambda w: (len(w), w),
        builder=BuilderSpec.make("free_group", rank=rank),
    )


def free_abelian(rank: int = 1) -> FusionRing:
    """Group ring of Z^rank.  Labels are ints (rank 1) or int tuples."""
    _require(_is_int(rank) and rank >= 1, f"free_abelian rank must be >= 1, got {rank!r}")
    if rank == 1:
        return FusionRing(
            "free_abelian(1)",
            unit=0,
            generators=(1,),
            dim=lambda n: 1,
            conj=lambda n: -n,
            fuse=lambda a, b: {a + b: 1},
            validate=_is_int,
            sort_key=lambda n: n,
            builder=BuilderSpec.make("free_abelian", rank=1),
        )

    def valid(v):
        return (isinstance(v, tuple) and len(v) == rank
                and all(_is_int(x) for x in v))

    gens = tuple(tuple(1 if j == i else 0 for j in range(rank))
                 for i in range(rank))
    return FusionRing(
        f"free_abelian({rank})",
        unit=(0,) * rank,
        generators=gens,
        dim=lambda v: 1,
        conj=lambda v: tuple(-x for x in v),
        fuse=lambda a, b: {tuple(x + y for x, y in zip(a, b)): 1},
        validate=valid,
        builder=BuilderSpec.make("free_abelian", rank=rank),
    )


def cyclic(modulus: int) -> FusionRing:
    """Group ring of Z/modulus.  Labels are 0..modulus-1."""
    _require(_is_int(modulus) and modulus >= 1,
             f"cyclic modulus must be >= 1, got {modulus!r}")
    m = modulus
    return FusionRing(
        f"cyclic({m})",
        unit=0,
        generators=(1 % m,),
        dim=lambda a: 1,
        conj=lambda a: (-a) % m,
        fuse=lambda a, b: {(a + b) % m: 1},
        validate=lambda a: _is_int(a) and 0 <= a < m,
        basis=range(m),
        sort_key=lambda a: a,
        builder=BuilderSpec.make("cyclic", modulus=m),
    )


def _clebsch_gordan(a: int, b: int) -> dict:
    return {c: 1 for c in range(abs(a - b), a + b + 1, 2)}


def _nonneg_int(n) -> bool:
    return _is_int(n) and n >= 0


def su2() -> FusionRing:
    """Representation ring of the rank-1 compact group: labels n >= 0, dim n+1."""
    return FusionRing(
        "su2",
        unit=0,
        generators=(1,),
        dim=lambda n: n + 1,
        conj=lambda n: n,
        fuse=_clebsch_gordan,
        validate=_nonneg_int,
        sort_key=lambda n: n,
        builder=BuilderSpec.make("su2"),
    )


def free_orthogonal(parameter: int) -> FusionRing:
    """Temperley-Lieb-type ring: same fusion rule as ``su2``, dims from
    d(0) = 1, d(1) = N, d(n+1) = N d(n) - d(n-1).

    Dims are exact Python ints on purpose: for N >= 3 they grow like
    q^n and overflow float64 long before the window sizes used in the
    spectral runs.
    """
    _require(_is_int(parameter) and parameter >= 2,
             f"free_orthogonal parameter must be an int >= 2, got {parameter!r}")
    N = parameter
    dims = [1, N]

    def dim(n):
        while len(dims) <= n:
            dims.append(N * dims[-1] - dims[-2])
        return dims[n]

    return FusionRing(
        f"free_orthogonal({N})",
        unit=0,
        generators=(1,),
        dim=dim,
        conj=lambda n: n,
        fuse=_clebsch_gordan,
        validate=_nonneg_int,
        sort_key=lambda n: n,
        builder=BuilderSpec.make("free_orthogonal", parameter=N),
    )


def table_ring(
    name: str,
    unit,
    generators,
    basis,
    dims: Mapping,
    conj: Mapping,
    table: Mapping,
    builder: BuilderSpec | None = None,
) -> FusionRing:
    """Finite ring from an explicit fusion table.

    ``table`` maps pairs ``(a, b)`` to ``{c: N}``; rows and columns
    involving the unit may be omitted (unit laws fill them in).  Pairs of
    non-unit labels must all be present, else :class:`InvalidSpec`.
    """
    basis = tuple(basis)
    bset = set(basis)
    _require(len(bset) == len(basis), f"{name}: duplicate basis labels")
    _require(unit in bset, f"{name}: unit {unit!r} not in basis")
    for g in generators:
        _require(g in bset, f"{name}: generator {g!r} not in basis")
    for a in basis:
        _require(a in dims, f"{name}: no dimension for {a!r}")
        _require(conj.get(a) in bset, f"{name}: bad conjugate for {a!r}")
    full = {}
    for a in basis:
        for b in basis:
            if a == unit or b == unit:
                continue
            entry = table.get((a, b))
            _require(entry is not None, f"{name}: missing table entry ({a!r}, {b!r})")
            out = {}
            for c, n in entry.items():
                _require(c in bset, f"{name}: table output {c!r} not in basis")
                _require(_is_int(n) and n > 0,
                         f"{name}: structure constant must be a positive int, got {n!r}")
                out[c] = n
            full[(a, b)] = out

    index = {lab: i for i, lab in enumerate(basis)}
    return FusionRing(
        name,
        unit=unit,
        generators=tuple(generators),
        dim=lambda a: dims[a],
        conj=lambda a: conj[a],
        fuse=lambda a, b: full[(a, b)],
        basis=basis,
        sort_key=lambda a: index[a],
        builder=builder,
    )


def ising() -> FusionRing:
    """Three-label ring with one irrational dimension (sqrt 2)."""
    s2 = 2.0 ** 0.5
    return table_ring(
        "ising",
        unit="1",
        generators=("sigma",),
        basis=("1", "eps", "sigma"),
        dims={"1": 1, "eps": 1, "sigma": s2},
        conj={"1": "1", "eps": "eps", "sigma": "sigma"},
        table={
            ("eps", "eps"): {"1": 1},
            ("eps", "sigma"): {"sigma": 1},
            ("sigma", "eps"): {"sigma": 1},
            ("sigma", "sigma"): {"1": 1, "eps": 1},
        },
        builder=BuilderSpec.make("ising"),
    )


#: Character-table data for the built-in finite groups.  Fusion rules are
#: decomposed from character products, frozen here as explicit tables.
_GROUP_TABLES = {
    "S3": dict(
        unit="triv",
        generators=("std",),
        basis=("triv", "sgn", "std"),
        dims={"triv": 1, "sgn": 1, "std": 2},
        conj={"triv": "triv", "sgn": "sgn", "std": "std"},
        table={
            ("sgn", "sgn"): {"triv": 1},
            ("sgn", "std"): {"std": 1},
            ("std", "sgn"): {"std": 1},
            ("std", "std"): {"triv": 1, "sgn": 1, "std": 1},
        },
    ),
}


def finite_group(name: str) -> FusionRing:
    """Representation ring of a built-in finite group ("S3")."""
    data = _GROUP_TABLES.get(name)
    if data is None:
        raise InvalidSpec(
            f"unknown finite group {name!r}; available: {sorted(_GROUP_TABLES)}"
        )
    return table_ring(
        f"finite_group({name})",
        unit=data["unit"],
        generators=data["generators"],
        basis=data["basis"],
        dims=data["dims"],
        conj=data["conj"],
        table=data["table"],
        builder=BuilderSpec.make("finite_group", name=name),
    )


def product(left: FusionRing, right: FusionRing) -> FusionRing:
    """Componentwise product ring on pair labels (a, b)."""
    lk, rk = left.sort_key, right.sort_key

    def valid(p):
        return (isinstance(p, tuple) and len(p) == 2
                and left.is_label(p[0]) and right.is_label(p[1]))

    def fuse(p, q):
        out = {}
        for c1, n1 in left.fuse(p[0], q[0]).items():
            for c2, n2 in right.fuse(p[1], q[1]).items():
                out[(c1, c2)] = n1 * n2
        return out

    gens = tuple((g, right.unit) for g in left.generators) + tuple(
        (left.unit, g) for g in right.generators)
    builder = None
    if left.builder is not None and right.builder is not None:
        builder = BuilderSpec.make(
            "product",
            left=left.builder.to_json(),
            right=right.builder.to_json(),
        )
    basis = None
    if left.is_finite and right.is_finite:
        basis = tuple((a, b) for a in left.basis for b in right.basis)
    return FusionRing(
        f"product({left.name},{right.name})",
        unit=(left.unit, right.unit),
        generators=gens,
        dim=lambda p: left.dim(p[0]) * right.dim(p[1]),
        conj=lambda p: (left.conj(p[0]), right.conj(p[1])),
        fuse=fuse,
        validate=valid,
        basis=basis,
        sort_key=lambda p: (lk(p[0]), rk(p[1])),
        builder=builder,
    )


# -- registry ----------------------------------------------------------------


def _build_product(params: dict) -> FusionRing:
    try:
        left = params["left"]
        right = params["right"]
    except KeyError as exc:
        raise InvalidSpec("product builder needs 'left' and 'right' specs") from exc
    return product(build(BuilderSpec.from_json(left)),
                   build(BuilderSpec.from_json(right)))


_BUILDERS = {
    "free_group": lambda p: free_group(p.get("rank", 2)),
    "free_abelian": lambda p: free_abelian(p.get("rank", 1)),
    "cyclic": lambda p: cyclic(p.get("modulus", 2)),
    "su2": lambda p: su2(),
    "free_orthogonal": lambda p: free_orthogonal(p.get("parameter", 3)),
    "ising": lambda p: ising(),
    "finite_group": lambda p: finite_group(p.get("name", "S3")),
    "product": _build_product,
}


def list_builders() -> list:
    """Template specs (with default params) for every builder type."""
    return [
        BuilderSpec.make("free_group", rank=2),
        BuilderSpec.make("free_abelian", rank=1),
        BuilderSpec.make("cyclic", modulus=2),
        BuilderSpec.make("su2"),
        BuilderSpec.make("free_orthogonal", parameter=3),
        BuilderSpec.make("ising"),
        BuilderSpec.make("finite_group", name="S3"),
        BuilderSpec.make("product", left={"type": "su2", "params": {}},
                         right={"type": "cyclic", "params": {"modulus": 2}}),
    ]


def build(spec: BuilderSpec | Mapping | str, **params) -> FusionRing:
    """Construct a catalog ring from a spec, a JSON dict, or a type name."""
    if isinstance(spec, str):
        spec = BuilderSpec.make(spec, **params)
    elif params:
        raise TypeError("params keyword args only combine with a string type")
    if isinstance(spec, Mapping):
        spec = BuilderSpec.from_json(spec)
    fn = _BUILDERS.get(spec.type)
    if fn is None:
        raise InvalidSpec(
            f"unknown builder type {spec.type!r}; available: {sorted(_BUILDERS)}"
        )
    return fn(spec.params_dict())
