"""Classifications, signatures, tuples and infomorphisms.

All names (types, instances, columns, keys) are strings and every returned
collection is sorted by string order, so outputs are reproducible.

Tuples are plain mappings from column name to instance token; the arity of a
tuple is its key set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import MismatchError, TotalityError, ValidationError, Violation

Tup = Mapping[str, str]


def canon(items: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(items)))


def check_total(name: str, mapping: Mapping, domain: Iterable, codomain: Iterable | None = None) -> None:
    """Raise TotalityError unless ``mapping`` is a total function domain -> codomain."""
    domain = set(domain)
    report = []
    for d in sorted(domain - set(mapping)):
        report.append(Violation("totality", (name, d), "undefined on domain element"))
    for d in sorted(set(mapping) - domain):
        report.append(Violation("totality", (name, d), "defined outside its domain"))
    if codomain is not None:
        codomain = set(codomain)
        for d in sorted(set(mapping) & domain):
            if mapping[d] not in codomain:
                report.append(Violation("totality", (name, d), f"value {mapping[d]!r} escapes the codomain"))
    if report:
        raise TotalityError(report, f"map {name}")


@dataclass(frozen=True)
class Classification:
    types: tuple[str, ...]
    instances: tuple[str, ...]
    incidence: frozenset  # of (instance, type)
    _extents: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        types = tuple(self.types)
        instances = tuple(self.instances)
        report = []
        for label, seq in (("type", types), ("instance", instances)):
            seen = set()
            for x in seq:
                if x in seen:
                    report.append(Violation("duplicate", (x,), f"duplicate {label}"))
                seen.add(x)
        tset, yset = set(types), set(instances)
        incidence = frozenset((str(y), str(x)) for y, x in self.incidence)
        for y, x in sorted(incidence):
            if y not in yset:
                report.append(Violation("incidence", (y, x), f"undeclared instance {y!r}"))
            if x not in tset:
                report.append(Violation("incidence", (y, x), f"undeclared type {x!r}"))
        if report:
            raise ValidationError(report, "classification")
        object.__setattr__(self, "types", tuple(sorted(tset)))
        object.__setattr__(self, "instances", tuple(sorted(yset)))
        object.__setattr__(self, "incidence", incidence)
        ext = {x: [] for x in self.types}
        for y, x in sorted(incidence):
            ext[x].append(y)
        object.__setattr__(self, "_extents", {x: tuple(v) for x, v in ext.items()})

    def holds(self, y: str, x: str) -> bool:
        return (y, x) in self.incidence

    def __hash__(self):
        return hash((self.types, self.instances, self.incidence))


def make_classification(types: Iterable[str], instances: Iterable[str], holds: Iterable[tuple[str, str]]) -> Classification:
    return Classification(tuple(types), tuple(instances), frozenset(holds))


def extent(E: Classification, x: str) -> tuple[str, ...]:
    if x not in E._extents:
        raise KeyError(f"unknown type {x!r}")
    return E._extents[x]


@dataclass(frozen=True)
class Signature:
    """A column set with a sort map into the type set ``universe``."""

    sorts: Mapping[str, str]
    universe: tuple[str, ...]

    def __post_init__(self):
        universe = canon(self.universe)
        sorts = {str(i): str(self.sorts[i]) for i in sorted(self.sorts)}
        bad = [Violation("sort", (i,), f"sort {s!r} not in universe") for i, s in sorts.items() if s not in universe]
        if bad:
            raise ValidationError(bad, "signature")
        object.__setattr__(self, "sorts", sorts)
        object.__setattr__(self, "universe", universe)

    @property
    def arity(self) -> tuple[str, ...]:
        return tuple(self.sorts)

    def __hash__(self):
        return hash((tuple(self.sorts.items()), self.universe))


def classify_tuple(E: Classification, sig: Signature, tup: Tup) -> bool:
    if set(tup) != set(sig.sorts):
        return False
    return all(E.holds(tup[i], s) for i, s in sig.sorts.items())


def tuples_of(E: Classification, sig: Signature) -> Iterator[dict[str, str]]:
    """Enumerate every tuple classified by ``sig`` in lexicographic order."""
    cols = sig.arity
    for values in itertools.product(*(extent(E, sig.sorts[c]) for c in cols)):
        yield dict(zip(cols, values))


@dataclass(frozen=True)
class Infomorphism:
    """A pair (f, g): source <-> target with f on types (source -> target)
    and g on instances (target -> source)."""

    source: Classification
    target: Classification
    type_map: Mapping[str, str]
    inst_map: Mapping[str, str]

    def __hash__(self):
        return hash((self.source, self.target, tuple(sorted(self.type_map.items())), tuple(sorted(self.inst_map.items()))))


def check_infomorphism(E2: Classification, E1: Classification, f: Mapping[str, str], g: Mapping[str, str]) -> list:
    check_total("f", f, E2.types, E1.types)
    check_total("g", g, E1.instances, E2.instances)
    report = []
    for y1 in E1.instances:
        for x2 in E2.types:
            left = E2.holds(g[y1], x2)
            right = E1.holds(y1, f[x2])
            if left != right:
                report.append(Violation(
                    "infomorphism", (y1, x2),
                    f"g({y1})={g[y1]} {'|=' if left else '|/='} {x2} but {y1} {'|=' if right else '|/='} f({x2})={f[x2]}"))
    return report


def make_infomorphism(E2: Classification, E1: Classification, f: Mapping[str, str], g: Mapping[str, str]) -> Infomorphism:
    report = check_infomorphism(E2, E1, f, g)
    if report:
        raise ValidationError(report, "infomorphism")
    return Infomorphism(E2, E1, dict(sorted(f.items())), dict(sorted(g.items())))


def identity_infomorphism(E: Classification) -> Infomorphism:
    return Infomorphism(E, E, {x: x for x in E.types}, {y: y for y in E.instances})


def compose_infomorphisms(outer: Infomorphism, inner: Infomorphism) -> Infomorphism:
    """Compose ``inner``: E3 <-> E2 with ``outer``: E2 <-> E1 into E3 <-> E1."""
    if inner.target != outer.source:
        raise MismatchError("infomorphisms are not composable")
    f = {x3: outer.type_map[inner.type_map[x3]] for x3 in inner.source.types}
    g = {y1: inner.inst_map[outer.inst_map[y1]] for y1 in outer.target.instances}
    return Infomorphism(inner.source, outer.target, f, g)


def sigma_f(sig: Signature, f: Mapping[str, str], universe: Iterable[str]) -> Signature:
    """Push a signature forward along a type map f: X2 -> X1."""
    return Signature({i: f[s] for i, s in sig.sorts.items()}, tuple(universe))


def pair_name(i: str, x: str) -> str:
    return f"{i}@{x}"


def f_star(sig: Signature, f: Mapping[str, str], universe: Iterable[str]) -> Signature:
    """Pull a signature over X1 back along f: X2 -> X1.

    Columns are the pairs (i, x2) with sorts(i) = f(x2), named ``i@x2``.
    """
    universe = canon(universe)
    check_total("f", f, universe)
    sorts = {}
    for i, s in sig.sorts.items():
        for x2 in universe:
            if f[x2] == s:
                sorts[pair_name(i, x2)] = x2
    return Signature(sorts, universe)


def f_star_columns(sig: Signature, f: Mapping[str, str], universe: Iterable[str]) -> dict[str, tuple[str, str]]:
    """Map each pulled-back column name to its (column, type) pair."""
    out = {}
    for i, s in sig.sorts.items():
        for x2 in canon(universe):
            if f[x2] == s:
                out[pair_name(i, x2)] = (i, x2)
    return dict(sorted(out.items()))


def check_signature_morphism(h: Mapping[str, str], src: Signature, dst: Signature, f: Mapping[str, str] | None = None) -> list:
    """Check dst.sorts(h(i)) = f(src.sorts(i)) for every column i of src."""
    check_total("h", h, src.arity, dst.arity)
    report = []
    for i2, s2 in src.sorts.items():
        want = f[s2] if f is not None else s2
        got = dst.sorts[h[i2]]
        if got != want:
            report.append(Violation("sort", (i2, h[i2]), f"{got} != {want}"))
    return report


def tuple_transport(t1: Tup, h: Mapping[str, str], g: Mapping[str, str] | None = None) -> dict[str, str]:
    """Restrict t1 along h and relabel entries by g: result(i2) = g(t1(h(i2)))."""
    if g is None:
        return {i2: t1[i1] for i2, i1 in sorted(h.items())}
    return {i2: g[t1[i1]] for i2, i1 in sorted(h.items())}
