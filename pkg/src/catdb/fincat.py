"""Finite categories given by explicit composition tables, and diagrams of
tables over them.

Composition is written in diagrammatic order: ``C.then(a, b)`` is "a, then b"
and is defined when ``cod(a) == dom(b)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import Classification, Infomorphism, f_star_columns, identity_infomorphism, pair_name
from .errors import ValidationError, Violation
from .table import (
    Table,
    TableMorphism,
    check_table_morphism,
    compose_table_morphisms,
    identity_morphism,
    migrate,
    same_morphism,
)


def identity_name(obj: str) -> str:
    return f"1_{obj}"


@dataclass(frozen=True)
class FinCat:
    objects: tuple[str, ...]
    arrows: Mapping[str, tuple[str, str]]  # name -> (dom, cod)
    identities: Mapping[str, str]
    composition: Mapping[tuple[str, str], str]

    def dom(self, a: str) -> str:
        return self.arrows[a][0]

    def cod(self, a: str) -> str:
        return self.arrows[a][1]

    def then(self, a: str, b: str) -> str:
        return self.composition[(a, b)]

    def hom(self, x: str, y: str) -> list[str]:
        return [a for a, (d, c) in self.arrows.items() if d == x and c == y]

    def non_identity_arrows(self) -> list[str]:
        ids = set(self.identities.values())
        return [a for a in self.arrows if a not in ids]

    def composable_pairs(self):
        for a in self.arrows:
            for b in self.arrows:
                if self.cod(a) == self.dom(b):
                    yield a, b

    __hash__ = None


def make_fincat(objects: Iterable[str], arrows: Mapping[str, tuple[str, str]],
                composition: Mapping[tuple[str, str], str] | None = None,
                identities: Mapping[str, str] | None = None) -> FinCat:
    """Validate a tabulated category.

    ``arrows`` lists the non-identity arrows (identities may be included if
    named in ``identities``). Composites with an identity are filled in;
    every other composable pair must appear in ``composition``.
    """
    objects = tuple(sorted(set(objects)))
    identities = dict(identities or {o: identity_name(o) for o in objects})
    all_arrows = {str(a): (str(d), str(c)) for a, (d, c) in arrows.items()}
    report = []
    for o in objects:
        ida = identities.get(o)
        if ida is None:
            report.append(Violation("identity", (o,), "no identity arrow"))
            continue
        if ida in all_arrows and all_arrows[ida] != (o, o):
            report.append(Violation("identity", (o, ida), "identity arrow has wrong boundary"))
        all_arrows[ida] = (o, o)
    for a, (d, c) in all_arrows.items():
        if d not in objects or c not in objects:
            report.append(Violation("arrow", (a,), f"boundary {d}->{c} names an undeclared object"))
    if report:
        raise ValidationError(report, "category")

    comp = {(str(a), str(b)): str(c) for (a, b), c in (composition or {}).items()}
    for a, (d, c) in all_arrows.items():
        comp.setdefault((identities[d], a), a)
        comp.setdefault((a, identities[c]), a)

    for (a, b), c in sorted(comp.items()):
        if a not in all_arrows or b not in all_arrows or c not in all_arrows:
            report.append(Violation("closure", (a, b, c), "composition entry names an unknown arrow"))
        elif all_arrows[a][1] != all_arrows[b][0]:
            report.append(Violation("closure", (a, b, c), "entry for a non-composable pair"))
        elif all_arrows[c] != (all_arrows[a][0], all_arrows[b][1]):
            report.append(Violation("closure", (a, b, c), "composite has the wrong boundary"))
    if report:
        raise ValidationError(report, "category")

    for a, (_, ca) in all_arrows.items():
        for b, (db, _) in all_arrows.items():
            if ca == db and (a, b) not in comp:
                report.append(Violation("closure", (a, b), "composable pair has no composite"))
    for a, (d, c) in all_arrows.items():
        if comp[(identities[d], a)] != a or comp[(a, identities[c])] != a:
            report.append(Violation("identity", (a,), "identity law fails"))
    if report:
        raise ValidationError(report, "category")

    for a, b, c in itertools.product(all_arrows, repeat=3):
        if all_arrows[a][1] == all_arrows[b][0] and all_arrows[b][1] == all_arrows[c][0]:
            if comp[(comp[(a, b)], c)] != comp[(a, comp[(b, c)])]:
                report.append(Violation("associativity", (a, b, c), "(ab)c != a(bc)"))
    if report:
        raise ValidationError(report, "category")
    return FinCat(objects, dict(sorted(all_arrows.items())), dict(sorted(identities.items())),
                  dict(sorted(comp.items())))


def terminal_category(obj: str = "*") -> FinCat:
    return make_fincat([obj], {})


def discrete_category(objects: Iterable[str]) -> FinCat:
    return make_fincat(objects, {})


def span_category(left: str = "A", right: str = "B", apex: str = "C",
                  left_arrow: str = "l", right_arrow: str = "r") -> FinCat:
    """The cospan shape left -> apex <- right (a pullback diagram)."""
    return make_fincat([left, right, apex], {left_arrow: (left, apex), right_arrow: (right, apex)})


def free_category(objects: Iterable[str], edges: Mapping[str, tuple[str, str]], sep: str = ";") -> FinCat:
    """Free category on a finite acyclic graph; non-identity arrows are paths
    named by joining edge names with ``sep``."""
    objects = tuple(sorted(set(objects)))
    out = {o: [] for o in objects}
    for e, (d, c) in sorted(edges.items()):
        out[d].append((e, c))
    paths: dict[str, tuple[tuple[str, ...], str, str]] = {}

    def extend(path, start, end, depth):
        if depth > len(objects):
            raise ValidationError([Violation("cycle", path, "graph has a cycle; free category is infinite")],
                                  "free category")
        for e, c in out[end]:
            p = path + (e,)
            paths[sep.join(p)] = (p, start, c)
            extend(p, start, c, depth + 1)

    for o in objects:
        extend((), o, o, 0)
    arrows = {name: (d, c) for name, (_, d, c) in paths.items()}
    by_path = {p: name for name, (p, _, _) in paths.items()}
    comp = {}
    for a, (pa, _, ca) in paths.items():
        for b, (pb, db, _) in paths.items():
            if ca == db:
                comp[(a, b)] = by_path[pa + pb]
    return make_fincat(objects, arrows, comp)


def preorder_category(elements: Iterable[str], leq: Iterable[tuple[str, str]]) -> FinCat:
    """Category with one arrow ``a->b`` whenever a <= b in the reflexive-transitive
    closure of ``leq``; identities are the arrows ``a->a``."""
    elements = tuple(sorted(set(elements)))
    rel = {(a, a) for a in elements} | {(str(a), str(b)) for a, b in leq}
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    name = {(a, b): f"{a}->{b}" for a, b in rel}
    arrows = {name[p]: p for p in rel}
    comp = {(name[(a, b)], name[(b, c)]): name[(a, c)] for (a, b) in rel for (b2, c) in rel if b == b2}
    return make_fincat(elements, arrows, comp, {a: name[(a, a)] for a in elements})


def opposite(C: FinCat) -> FinCat:
    """Same objects and arrow names with boundaries swapped."""
    arrows = {a: (c, d) for a, (d, c) in C.arrows.items()}
    comp = {(b, a): c for (a, b), c in C.composition.items()}
    return FinCat(C.objects, arrows, dict(C.identities), dict(sorted(comp.items())))


@dataclass(frozen=True)
class TableDiagram:
    shape: FinCat
    tables: Mapping[str, Table]
    morphisms: Mapping[str, TableMorphism]
    cls: Classification

    __hash__ = None


def check_diagram(shape: FinCat, tables: Mapping[str, Table], morphisms: Mapping[str, TableMorphism],
                  cls: Classification | None = None) -> list:
    report = []
    if set(tables) != set(shape.objects):
        report.append(Violation("diagram", tuple(sorted(set(shape.objects) ^ set(tables))), "table assignment not total"))
        return report
    classes = {T.cls for T in tables.values()} | ({cls} if cls is not None else set())
    if len(classes) > 1:
        report.append(Violation("diagram", (), "tables do not share one classification"))
        return report
    missing = [a for a in shape.arrows if a not in morphisms and a not in shape.identities.values()]
    for a in missing:
        report.append(Violation("diagram", (a,), "no morphism assigned to arrow"))
    if report:
        return report
    full = dict(morphisms)
    for o, ida in shape.identities.items():
        full.setdefault(ida, identity_morphism(tables[o]))
    for a, (d, c) in shape.arrows.items():
        m = full[a]
        if m.src != tables[d] or m.dst != tables[c]:
            report.append(Violation("diagram", (a,), f"morphism does not run {d} -> {c}"))
            continue
        if m.info != identity_infomorphism(tables[d].cls):
            report.append(Violation("diagram", (a,), "morphism infomorphism is not the identity"))
            continue
        for v in check_table_morphism(m.src, m.dst, m.col_map, m.info.type_map, m.info.inst_map, m.key_map):
            report.append(Violation(v.kind, (a,) + v.where, v.message))
    if report:
        return report
    for o, ida in shape.identities.items():
        if not same_morphism(full[ida], identity_morphism(tables[o])):
            report.append(Violation("functor", (ida,), "identity arrow is not sent to an identity"))
    for (a, b), c in shape.composition.items():
        if not same_morphism(compose_table_morphisms(full[a], full[b]), full[c]):
            report.append(Violation("functor", (a, b, c), "image of composite differs from composite of images"))
    return report


def make_diagram(shape: FinCat, tables: Mapping[str, Table], morphisms: Mapping[str, TableMorphism],
                 cls: Classification | None = None) -> TableDiagram:
    """Validate morphism conditions and functoriality; ``cls`` is required
    only for the empty diagram."""
    report = check_diagram(shape, tables, morphisms, cls)
    if report:
        raise ValidationError(report, "diagram")
    if cls is None:
        if not tables:
            raise ValueError("the empty diagram needs an explicit classification")
        cls = next(iter(tables.values())).cls
    full = dict(morphisms)
    for o, ida in shape.identities.items():
        full.setdefault(ida, identity_morphism(tables[o]))
    return TableDiagram(shape, dict(sorted(tables.items())), dict(sorted(full.items())), cls)


def migrate_diagram(d: TableDiagram, m: Infomorphism) -> TableDiagram:
    """Base change of every table and fiber morphism of ``d`` along m."""
    E2 = m.source
    tables = {o: migrate(T, m) for o, T in d.tables.items()}
    morphisms = {}
    for a, mor in d.morphisms.items():
        src, dst = tables[d.shape.dom(a)], tables[d.shape.cod(a)]
        pairs = f_star_columns(mor.dst.sig, m.type_map, E2.types)
        h = {c: pair_name(mor.col_map[i], x2) for c, (i, x2) in pairs.items()}
        morphisms[a] = TableMorphism(src, dst, h, identity_infomorphism(E2), dict(mor.key_map))
    return make_diagram(d.shape, tables, morphisms, E2)


@dataclass(frozen=True)
class Cone:
    apex: Table
    legs: Mapping[str, TableMorphism]  # object -> apex -> tables[object]

    __hash__ = None


@dataclass(frozen=True)
class Cocone:
    apex: Table
    legs: Mapping[str, TableMorphism]  # object -> tables[object] -> apex

    __hash__ = None


def _check_legs(d: TableDiagram, apex: Table, legs: Mapping[str, TableMorphism], into_apex: bool) -> list:
    report = []
    if set(legs) != set(d.shape.objects):
        return [Violation("cone", tuple(sorted(set(legs) ^ set(d.shape.objects))), "legs not total over objects")]
    for o, leg in legs.items():
        src, dst = (d.tables[o], apex) if into_apex else (apex, d.tables[o])
        if leg.src != src or leg.dst != dst:
            report.append(Violation("leg", (o,), "leg has the wrong boundary"))
            continue
        for v in check_table_morphism(leg.src, leg.dst, leg.col_map, leg.info.type_map, leg.info.inst_map, leg.key_map):
            report.append(Violation("leg", (o,) + v.where, f"{v.kind}: {v.message}"))
    if report:
        return report
    for a, (j, j2) in d.shape.arrows.items():
        if into_apex:
            lhs = compose_table_morphisms(d.morphisms[a], legs[j2])
            rhs = legs[j]
        else:
            lhs = compose_table_morphisms(legs[j], d.morphisms[a])
            rhs = legs[j2]
        if not same_morphism(lhs, rhs):
            report.append(Violation("triangle", (a, j, j2), "triangle does not commute"))
    return report


def check_cone(d: TableDiagram, c: Cone) -> list:
    return _check_legs(d, c.apex, c.legs, into_apex=False)


def check_cocone(d: TableDiagram, c: Cocone) -> list:
    return _check_legs(d, c.apex, c.legs, into_apex=True)

