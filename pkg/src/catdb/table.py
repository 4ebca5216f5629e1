"""Tables, table morphisms, base change and isomorphism search.

Direction convention: a morphism T1 -> T2 carries

    col_map  h: columns(T2) -> columns(T1)
    type_map f: types(E2)   -> types(E1)
    inst_map g: instances(E1) -> instances(E2)
    key_map  k: keys(T1)    -> keys(T2)

and must satisfy  T2[k(k1)][i2] == g(T1[k1][h(i2)])  for every k1, i2.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import (
    Classification,
    Infomorphism,
    Signature,
    Tup,
    check_infomorphism,
    check_signature_morphism,
    check_total,
    compose_infomorphisms,
    f_star,
    f_star_columns,
    identity_infomorphism,
)
from .errors import MismatchError, SizeCapError, ValidationError, Violation

MAX_ISO_COLUMNS = 10
MAX_ISO_KEYS = 64


@dataclass(frozen=True, eq=True)
class Table:
    sig: Signature
    cls: Classification
    keys: tuple[str, ...]
    content: Mapping[str, Mapping[str, str]]

    @property
    def columns(self) -> tuple[str, ...]:
        return self.sig.arity

    def row(self, key: str) -> Tup:
        return self.content[key]

    def __len__(self) -> int:
        return len(self.keys)

    __hash__ = None


def make_table(sig: Signature, E: Classification, rows: Iterable[tuple[str, Tup]]) -> Table:
    """Validate entity and domain integrity and return a table in key order."""
    if sig.universe != E.types:
        raise MismatchError("signature universe differs from the classification's types")
    report = []
    content: dict[str, dict[str, str]] = {}
    for key, tup in rows:
        key = str(key)
        if key in content:
            report.append(Violation("entity-integrity", (key,), "duplicate key"))
            continue
        tup = {str(c): str(v) for c, v in tup.items()}
        for c in sorted(set(sig.sorts) - set(tup)):
            report.append(Violation("domain-integrity", (key, c), "missing entry"))
        for c in sorted(set(tup) - set(sig.sorts)):
            report.append(Violation("domain-integrity", (key, c), "column not in signature"))
        for c in sorted(set(tup) & set(sig.sorts)):
            if not E.holds(tup[c], sig.sorts[c]):
                report.append(Violation("domain-integrity", (key, c, tup[c]), f"{tup[c]} is not of type {sig.sorts[c]}"))
        content[key] = dict(sorted(tup.items()))
    if report:
        raise ValidationError(report, "table")
    keys = tuple(sorted(content))
    return Table(sig, E, keys, {k: content[k] for k in keys})


def table_from_columns(E: Classification, sorts: Mapping[str, str], rows: Mapping[str, Tup]) -> Table:
    return make_table(Signature(sorts, E.types), E, rows.items())


@dataclass(frozen=True)
class TableMorphism:
    src: Table
    dst: Table
    col_map: Mapping[str, str]
    info: Infomorphism
    key_map: Mapping[str, str]

    @property
    def is_fiber(self) -> bool:
        return self.info == identity_infomorphism(self.src.cls) and self.src.cls == self.dst.cls

    __hash__ = None


def check_table_morphism(T1: Table, T2: Table, h: Mapping[str, str], f: Mapping[str, str],
                         g: Mapping[str, str], k: Mapping[str, str]) -> list:
    """Itemize every failure of (h, f, g, k) to be a morphism T1 -> T2."""
    check_total("h", h, T2.columns, T1.columns)
    check_total("k", k, T1.keys, T2.keys)
    report = list(check_infomorphism(T2.cls, T1.cls, f, g))
    report += check_signature_morphism(h, T2.sig, T1.sig, f)
    for k1 in T1.keys:
        row1, row2 = T1.content[k1], T2.content[k[k1]]
        for i2 in T2.columns:
            want = g[row1[h[i2]]]
            if row2[i2] != want:
                report.append(Violation("commute", (k1, i2), f"{row2[i2]} != {want}"))
    return report


def make_table_morphism(T1: Table, T2: Table, h: Mapping[str, str], k: Mapping[str, str],
                        info: Infomorphism | None = None) -> TableMorphism:
    if info is None:
        if T1.cls != T2.cls:
            raise MismatchError("an infomorphism is required between tables over different classifications")
        info = identity_infomorphism(T1.cls)
    if info.source != T2.cls or info.target != T1.cls:
        raise MismatchError("infomorphism does not run between the tables' classifications")
    report = check_table_morphism(T1, T2, h, info.type_map, info.inst_map, k)
    if report:
        raise ValidationError(report, "table morphism")
    return TableMorphism(T1, T2, dict(sorted(h.items())), info, dict(sorted(k.items())))


def identity_morphism(T: Table) -> TableMorphism:
    return TableMorphism(T, T, {c: c for c in T.columns}, identity_infomorphism(T.cls), {k: k for k in T.keys})


def same_morphism(m1: TableMorphism, m2: TableMorphism) -> bool:
    return (m1.src == m2.src and m1.dst == m2.dst and dict(m1.col_map) == dict(m2.col_map)
            and m1.info == m2.info and dict(m1.key_map) == dict(m2.key_map))


def compose_table_morphisms(m1: TableMorphism, m2: TableMorphism) -> TableMorphism:
    """Composite T1 -> T3 of m1: T1 -> T2 followed by m2: T2 -> T3."""
    if m1.dst != m2.src:
        raise MismatchError("table morphisms are not composable: boundary tables differ")
    h = {i3: m1.col_map[i2] for i3, i2 in m2.col_map.items()}
    k = {k1: m2.key_map[k2] for k1, k2 in m1.key_map.items()}
    info = compose_infomorphisms(m1.info, m2.info)
    return TableMorphism(m1.src, m2.dst, h, info, k)


def migrate(T1: Table, m: Infomorphism) -> Table:
    """Base change of T1 along m: E2 <-> E1 into a table over E2."""
    if T1.cls != m.target:
        raise MismatchError("table classification is not the infomorphism's target")
    E2 = m.source
    sig2 = f_star(T1.sig, m.type_map, E2.types)
    pairs = f_star_columns(T1.sig, m.type_map, E2.types)
    g = m.inst_map
    content = {k: {c: g[T1.content[k][i]] for c, (i, _) in pairs.items()} for k in T1.keys}
    return Table(sig2, E2, T1.keys, content)


def base_change_morphism(T1: Table, m: Infomorphism) -> TableMorphism:
    """The canonical morphism T1 -> migrate(T1, m): column i@x2 reads column i."""
    T2 = migrate(T1, m)
    pairs = f_star_columns(T1.sig, m.type_map, m.source.types)
    return TableMorphism(T1, T2, {c: i for c, (i, _) in pairs.items()}, m, {k: k for k in T1.keys})


@dataclass(frozen=True)
class IsoWitness:
    col_map: dict  # T1 column -> T2 column
    key_map: dict  # T1 key -> T2 key

    def morphisms(self, T1: Table, T2: Table) -> tuple[TableMorphism, TableMorphism]:
        inv_cols = {v: c for c, v in self.col_map.items()}
        inv_keys = {v: k for k, v in self.key_map.items()}
        fwd = make_table_morphism(T1, T2, inv_cols, self.key_map)
        bwd = make_table_morphism(T2, T1, self.col_map, inv_keys)
        return fwd, bwd


def tables_isomorphic(T1: Table, T2: Table, max_columns: int = MAX_ISO_COLUMNS,
                      max_keys: int = MAX_ISO_KEYS) -> IsoWitness | None:
    """Search sort-respecting column bijections, then match rows as multisets."""
    if T1.cls != T2.cls:
        raise MismatchError("isomorphism is only tested between tables over one classification")
    if len(T1.columns) != len(T2.columns) or len(T1.keys) != len(T2.keys):
        return None
    if len(T1.columns) > max_columns or len(T1.keys) > max_keys:
        raise SizeCapError(f"isomorphism search capped at {max_columns} columns and {max_keys} keys")

    def profile(T, c):
        return (T.sig.sorts[c], tuple(sorted(Counter(T.content[k][c] for k in T.keys).items())))

    groups1, groups2 = defaultdict(list), defaultdict(list)
    for c in T1.columns:
        groups1[profile(T1, c)].append(c)
    for c in T2.columns:
        groups2[profile(T2, c)].append(c)
    if {p: len(v) for p, v in groups1.items()} != {p: len(v) for p, v in groups2.items()}:
        return None

    profiles = sorted(groups1)
    per_group = [
        [dict(zip(groups1[p], perm)) for perm in itertools.permutations(groups2[p])]
        for p in profiles
    ]
    cols1 = T1.columns
    for choice in itertools.product(*per_group):
        col_map = {}
        for part in choice:
            col_map.update(part)
        by_row = defaultdict(list)
        for k2 in T2.keys:
            by_row[tuple(T2.content[k2][col_map[c]] for c in cols1)].append(k2)
        key_map = {}
        for k1 in T1.keys:
            bucket = by_row.get(tuple(T1.content[k1][c] for c in cols1))
            if not bucket:
                break
            key_map[k1] = bucket.pop(0)
        else:
            return IsoWitness(dict(sorted(col_map.items())), key_map)
    return None
