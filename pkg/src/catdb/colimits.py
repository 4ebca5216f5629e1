"""Colimits of tables over one classification: distributed union.

Keys of a colimit are classes of component keys glued along key maps;
columns are compatible families of component columns, one per object.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import Classification, Signature, identity_infomorphism
from .errors import InternalError, MismatchError, SizeCapError, ValidationError
from .fincat import Cocone, TableDiagram, check_cocone, discrete_category, make_diagram
from .limits import UnionFind, family_key, member_name
from .table import Table, TableMorphism, make_table, make_table_morphism

MAX_FAMILY_ARITY = 8


@dataclass(frozen=True)
class ColimitResult:
    table: Table
    injections: Mapping[str, TableMorphism]
    key_classes: Mapping[str, tuple[tuple[str, str], ...]]  # key -> members (object, key)
    column_families: Mapping[str, tuple[str, ...]]  # column -> component columns in object order

    def column_of(self, family) -> str | None:
        lookup = {v: c for c, v in self.column_families.items()}
        return lookup.get(tuple(family))

    __hash__ = None


def initial_table(E: Classification) -> Table:
    """No keys; one column per type, sorted by itself."""
    return make_table(Signature({x: x for x in E.types}, E.types), E, [])


def column_families(d: TableDiagram):
    """Yield families (i_j) with one sort and colMap_e(i_j') = i_j for every e: j -> j'."""
    objs = list(d.shape.objects)
    for j in objs:
        if len(d.tables[j].columns) > MAX_FAMILY_ARITY:
            raise SizeCapError(f"column-family enumeration capped at arity {MAX_FAMILY_ARITY} (object {j})")
    index = {o: n for n, o in enumerate(objs)}
    arrows = [(a, j, j2) for a, (j, j2) in d.shape.arrows.items() if a not in d.shape.identities.values()]

    def candidates(pos, chosen):
        o = objs[pos]
        forced = None
        for a, j, j2 in arrows:
            if j == o and index[j2] < pos:
                i = d.morphisms[a].col_map[chosen[index[j2]]]
                if forced is None:
                    forced = i
                elif forced != i:
                    return []
        pool = [forced] if forced is not None else list(d.tables[o].columns)
        if pos:
            sort = d.tables[objs[0]].sig.sorts[chosen[0]]
            pool = [i for i in pool if d.tables[o].sig.sorts[i] == sort]
        return pool

    def consistent(pos, chosen):
        o = objs[pos]
        for a, j, j2 in arrows:
            if index[j] <= pos and index[j2] <= pos and o in (j, j2):
                if d.morphisms[a].col_map[chosen[index[j2]]] != chosen[index[j]]:
                    return False
        return True

    def walk(pos, chosen):
        if pos == len(objs):
            yield tuple(chosen)
            return
        for i in candidates(pos, chosen):
            chosen.append(i)
            if consistent(pos, chosen):
                yield from walk(pos + 1, chosen)
            chosen.pop()

    yield from walk(0, [])


def glued_keys(d: TableDiagram) -> dict[str, tuple[tuple[str, str], ...]]:
    """Classes of (j, k) under (j, k) ~ (j', keyMap_e(k)), named by least ``j.k``."""
    uf = UnionFind((j, k) for j, T in d.tables.items() for k in T.keys)
    for a, m in d.morphisms.items():
        j, j2 = d.shape.arrows[a]
        for k, k2 in m.key_map.items():
            uf.union((j, k), (j2, k2))
    out = {}
    for members in uf.classes().values():
        out[min(member_name(j, k) for j, k in members)] = tuple(members)
    return dict(sorted(out.items()))


def colimit(d: TableDiagram) -> ColimitResult:
    E = d.cls
    objs = list(d.shape.objects)
    if not objs:
        return ColimitResult(initial_table(E), {}, {}, {x: () for x in E.types})
    families = {family_key(fam): fam for fam in column_families(d)}
    families = dict(sorted(families.items()))
    first = d.tables[objs[0]]
    sorts = {c: first.sig.sorts[fam[0]] for c, fam in families.items()}
    classes = glued_keys(d)
    rows = []
    for key, members in classes.items():
        row = {}
        for col, fam in families.items():
            vals = {d.tables[j].content[k][fam[objs.index(j)]] for j, k in members}
            if len(vals) != 1:
                raise InternalError(f"key class {key} has conflicting entries in column {col}")
            row[col] = vals.pop()
        rows.append((key, row))
    table = make_table(Signature(sorts, E.types), E, rows)
    class_of = {m: key for key, members in classes.items() for m in members}
    ident = identity_infomorphism(E)
    injections = {}
    for n, j in enumerate(objs):
        T = d.tables[j]
        h = {c: fam[n] for c, fam in families.items()}
        k = {key: class_of[(j, key)] for key in T.keys}
        injections[j] = TableMorphism(T, table, h, ident, k)
    return ColimitResult(table, injections, classes, families)


def coproduct(T1: Table, T2: Table, names=("inl", "inr")) -> ColimitResult:
    """Distributed union: disjoint keys over sort-matched column pairs."""
    if T1.cls != T2.cls:
        raise MismatchError("coproduct needs tables over one classification")
    left, right = names
    d = make_diagram(discrete_category([left, right]), {left: T1, right: T2}, {})
    return colimit(d)


def comediating_morphism(d: TableDiagram, colim: ColimitResult, cocone: Cocone) -> TableMorphism:
    report = check_cocone(d, cocone)
    if report:
        raise ValidationError(report, "cocone")
    objs = list(d.shape.objects)
    k = {}
    for key, members in colim.key_classes.items():
        targets = {cocone.legs[j].key_map[kk] for j, kk in members}
        if len(targets) != 1:
            raise InternalError(f"cocone legs disagree on key class {key}")
        k[key] = targets.pop()
    h = {}
    for a in cocone.apex.columns:
        if objs:
            col = colim.column_of(cocone.legs[j].col_map[a] for j in objs)
        else:
            col = cocone.apex.sig.sorts[a]
        if col is None:
            raise InternalError(f"apex column {a} does not pick a compatible column family")
        h[a] = col
    return make_table_morphism(colim.table, cocone.apex, h, k)
