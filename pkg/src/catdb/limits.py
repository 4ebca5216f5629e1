"""Limits in the fiber of tables over one classification: the join."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import Classification, Signature, identity_infomorphism
from .errors import InternalError, MismatchError, ValidationError, Violation
from .fincat import Cone, TableDiagram, check_cone, make_diagram, span_category
from .table import Table, TableMorphism, make_table, make_table_morphism

TERMINAL_KEY = "⋆"


def family_key(parts) -> str:
    return "⟨" + ",".join(parts) + "⟩"


def member_name(obj: str, item: str) -> str:
    return f"{obj}.{item}"


class UnionFind:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def classes(self) -> dict:
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return {r: sorted(v) for r, v in out.items()}


@dataclass(frozen=True)
class LimitResult:
    table: Table
    projections: Mapping[str, TableMorphism]
    column_classes: Mapping[str, tuple[tuple[str, str], ...]]  # column -> members (object, column)
    families: Mapping[str, tuple[str, ...]]  # key -> component keys in object order

    def key_of(self, family) -> str | None:
        lookup = {v: k for k, v in self.families.items()}
        return lookup.get(tuple(family))

    __hash__ = None


def terminal_table(E: Classification) -> Table:
    return make_table(Signature({}, E.types), E, [(TERMINAL_KEY, {})])


def merged_columns(d: TableDiagram) -> dict[str, tuple[tuple[str, str], ...]]:
    """Quotient the disjoint union of component columns by (j, h_e(i')) ~ (j', i').

    Each class is named by its lexicographically least ``j.i`` member.
    """
    uf = UnionFind((j, i) for j, T in d.tables.items() for i in T.columns)
    for a, m in d.morphisms.items():
        j, j2 = d.shape.arrows[a]
        for i2, i in m.col_map.items():
            uf.union((j, i), (j2, i2))
    out = {}
    for members in uf.classes().values():
        out[min(member_name(j, i) for j, i in members)] = tuple(members)
    return dict(sorted(out.items()))


def key_families(d: TableDiagram):
    """Yield arrow-compatible key families in lexicographic object order.

    Objects are visited in order; a key is forced whenever an arrow from an
    already-assigned object reaches the current one, otherwise every key is
    tried and the partial family is checked against all arrows among the
    assigned objects.
    """
    objs = list(d.shape.objects)
    index = {o: n for n, o in enumerate(objs)}
    arrows_by_pair = {}
    for a, (j, j2) in d.shape.arrows.items():
        if a in d.shape.identities.values():
            continue
        arrows_by_pair.setdefault((j, j2), []).append(a)

    def candidates(pos, chosen):
        o = objs[pos]
        forced = None
        for (j, j2), arrs in arrows_by_pair.items():
            if j2 == o and index[j] < pos:
                for a in arrs:
                    k = d.morphisms[a].key_map[chosen[index[j]]]
                    if forced is None:
                        forced = k
                    elif forced != k:
                        return []
        return [forced] if forced is not None else list(d.tables[o].keys)

    def consistent(pos, chosen):
        o = objs[pos]
        for (j, j2), arrs in arrows_by_pair.items():
            if index[j] <= pos and index[j2] <= pos and (j == o or j2 == o):
                for a in arrs:
                    if d.morphisms[a].key_map[chosen[index[j]]] != chosen[index[j2]]:
                        return False
        return True

    def walk(pos, chosen):
        if pos == len(objs):
            yield tuple(chosen)
            return
        for k in candidates(pos, chosen):
            chosen.append(k)
            if consistent(pos, chosen):
                yield from walk(pos + 1, chosen)
            chosen.pop()

    yield from walk(0, [])


def limit(d: TableDiagram) -> LimitResult:
    E = d.cls
    classes = merged_columns(d)
    col_of = {}
    sorts = {}
    for col, members in classes.items():
        member_sorts = {d.tables[j].sig.sorts[i] for j, i in members}
        if len(member_sorts) != 1:
            raise InternalError(f"merged column {col} mixes sorts {sorted(member_sorts)}")
        sorts[col] = member_sorts.pop()
        for j, i in members:
            col_of[(j, i)] = col
    objs = list(d.shape.objects)
    families = {}
    rows = []
    for fam in key_families(d):
        key = family_key(fam)
        families[key] = fam
        row = {}
        for col, members in classes.items():
            vals = {d.tables[j].content[fam[objs.index(j)]][i] for j, i in members}
            if len(vals) != 1:
                raise InternalError(f"family {key} disagrees on merged column {col}")
            row[col] = vals.pop()
        rows.append((key, row))
    table = make_table(Signature(sorts, E.types), E, rows)
    ident = identity_infomorphism(E)
    projections = {}
    for n, j in enumerate(objs):
        T = d.tables[j]
        h = {i: col_of[(j, i)] for i in T.columns}
        k = {key: fam[n] for key, fam in families.items()}
        projections[j] = TableMorphism(table, T, h, ident, k)
    return LimitResult(table, projections, classes, dict(sorted(families.items())))


def pullback(left: TableMorphism, right: TableMorphism, names=("A", "B", "C")) -> LimitResult:
    """Pullback of left: A -> C and right: B -> C; keys are renamed to ⟨a,b⟩."""
    if left.dst != right.dst:
        raise MismatchError("pullback legs do not share a target table")
    E = left.dst.cls
    if left.src.cls != E or right.src.cls != E or left.info != identity_infomorphism(E) or right.info != left.info:
        raise MismatchError("pullback legs must be fiber morphisms over one classification")
    a, b, c = names
    shape = span_category(a, b, c, "l", "r")
    d = make_diagram(shape, {a: left.src, b: right.src, c: left.dst}, {"l": left, "r": right})
    full = limit(d)
    order = list(shape.objects)
    ia, ib = order.index(a), order.index(b)
    rename = {key: family_key((fam[ia], fam[ib])) for key, fam in full.families.items()}
    T = full.table
    back = {v: k for k, v in rename.items()}
    keys = tuple(sorted(back))
    table = Table(T.sig, E, keys, {k: T.content[back[k]] for k in keys})
    projections = {
        j: TableMorphism(table, p.dst, p.col_map, p.info, {rename[k]: v for k, v in p.key_map.items()})
        for j, p in full.projections.items()
    }
    families = {rename[k]: fam for k, fam in full.families.items()}
    return LimitResult(table, projections, full.column_classes, dict(sorted(families.items())))


def mediating_morphism(d: TableDiagram, lim: LimitResult, c: Cone) -> TableMorphism:
    report = check_cone(d, c)
    if report:
        raise ValidationError(report, "cone")
    objs = list(d.shape.objects)
    k = {}
    for a in c.apex.keys:
        fam = tuple(c.legs[j].key_map[a] for j in objs)
        key = lim.key_of(fam)
        if key is None:
            raise InternalError(f"cone key {a} maps to a family {fam} missing from the limit")
        k[a] = key
    h = {}
    for col, members in lim.column_classes.items():
        targets = {c.legs[j].col_map[i] for j, i in members}
        if len(targets) != 1:
            raise InternalError(f"cone legs disagree on merged column {col}: {sorted(targets)}")
        h[col] = targets.pop()
    return make_table_morphism(c.apex, lim.table, h, k)


def select(T: Table, ref: Table, binding: Mapping[str, str]) -> LimitResult:
    """Rows of T whose bound entries occur in ``ref``, as a pullback.

    ``binding`` maps ref columns to columns of T with equal sorts. Both tables
    map into a table keyed by the distinct bound value tuples, so a T row
    appears once per matching ref row (once, when ref rows are distinct).
    """
    if T.cls != ref.cls:
        raise MismatchError("selection needs tables over one classification")
    report = []
    for rc, tc in sorted(binding.items()):
        if rc not in ref.sig.sorts or tc not in T.sig.sorts:
            report.append(Violation("binding", (rc, tc), "unknown column"))
        elif ref.sig.sorts[rc] != T.sig.sorts[tc]:
            report.append(Violation("sort", (rc, tc), f"{ref.sig.sorts[rc]} != {T.sig.sorts[tc]}"))
    if report:
        raise ValidationError(report, "select")
    cols = sorted(binding)

    def value_key(row, names):
        return family_key(row[n] for n in names)

    values = {}
    for key in T.keys:
        values[value_key(T.content[key], [binding[c] for c in cols])] = {c: T.content[key][binding[c]] for c in cols}
    for key in ref.keys:
        values[value_key(ref.content[key], cols)] = {c: ref.content[key][c] for c in cols}
    sig = Signature({c: ref.sig.sorts[c] for c in cols}, T.cls.types)
    shared = make_table(sig, T.cls, values.items())
    left = make_table_morphism(T, shared, {c: binding[c] for c in cols},
                               {k: value_key(T.content[k], [binding[c] for c in cols]) for k in T.keys})
    right = make_table_morphism(ref, shared, {c: c for c in cols},
                                {k: value_key(ref.content[k], cols) for k in ref.keys})
    return pullback(left, right, names=("T", "ref", "values"))
