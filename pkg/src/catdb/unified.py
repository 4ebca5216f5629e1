"""Relation classification, unified form, sketches and referential integrity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import Classification
from .database import Database, DbSchema
from .errors import CatDBError, ValidationError, Violation


class NotUnifiedError(CatDBError):
    pass


def relation_classification(db: Database) -> Classification:
    """Relation symbols classify keys: k |= r iff k is a key of r."""
    keys = {k for T in db.tables.values() for k in T.keys}
    holds = {(k, r) for r, T in db.tables.items() for k in T.keys}
    return Classification(db.schema.rel_cat.objects, tuple(keys), frozenset(holds))


def is_unified(db: Database) -> tuple[bool, list[str]]:
    R, E = relation_classification(db), db.cls
    diagnostics = []
    for label, mine, theirs in (("type", R.types, E.types), ("instance", R.instances, E.instances)):
        for x in sorted(set(theirs) - set(mine)):
            diagnostics.append(f"entity {label} {x!r} is not a relation {'symbol' if label == 'type' else 'key'}")
        for x in sorted(set(mine) - set(theirs)):
            diagnostics.append(f"relation {'symbol' if label == 'type' else 'key'} {x!r} is not an entity {label}")
    if not diagnostics:
        for y, x in sorted(R.incidence ^ E.incidence):
            where = "relation" if (y, x) in R.incidence else "entity"
            diagnostics.append(f"incidence {y} |= {x} holds only in the {where} classification")
    return not diagnostics, diagnostics


@dataclass(frozen=True)
class SketchGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (relation, column, target node)
    constraint_arrows: Mapping[str, tuple[str, str]]
    datatype_nodes: tuple[str, ...] = ()

    __hash__ = None


def datatype_nodes(s: DbSchema) -> tuple[str, ...]:
    """Relations whose only column is sorted by the relation itself (values keyed by themselves)."""
    return tuple(r for r in s.rel_cat.objects if list(s.sig_at[r].sorts.values()) == [r])


def sketch_graph(s: DbSchema) -> SketchGraph:
    nodes = tuple(s.rel_cat.objects)
    if set(nodes) != set(s.universe):
        raise NotUnifiedError("schema is not in unified form: relation symbols differ from entity types")
    data = datatype_nodes(s)
    edges = tuple((r, i, sort) for r in nodes if r not in data for i, sort in s.sig_at[r].sorts.items())
    constraints = {a: s.rel_cat.arrows[a] for a in s.rel_cat.non_identity_arrows()}
    return SketchGraph(nodes, edges, constraints, data)


def check_referential_integrity(db: Database) -> list:
    """Every entry must be a key of the relation named by its sort.

    Only the schema needs unified form here (relation symbols are the types);
    a missing referenced row is reported as a violation, not a form error.
    """
    if set(db.schema.rel_cat.objects) != set(db.cls.types):
        raise NotUnifiedError("database is not in unified form: relation symbols differ from entity types")
    report = []
    for r, T in db.tables.items():
        for k in T.keys:
            for i, sort in T.sig.sorts.items():
                v = T.content[k][i]
                if v not in db.tables[sort].content:
                    report.append(Violation("referential-integrity", (r, k, i, v), f"{v} is not a key of {sort}"))
    return report


@dataclass(frozen=True)
class SketchInterpretation:
    nodes: Mapping[str, tuple[str, ...]]
    edges: Mapping[tuple[str, str], Mapping[str, str]]

    __hash__ = None


def sketch_interpretation(db: Database) -> SketchInterpretation:
    """Send each relation to its keys and each column to its foreign-key function."""
    report = check_referential_integrity(db)
    if report:
        raise ValidationError(report, "referential integrity")
    ok, diagnostics = is_unified(db)
    if not ok:
        raise NotUnifiedError("database is not in unified form: " + "; ".join(diagnostics[:5]))
    graph = sketch_graph(db.schema)
    nodes = {r: db.tables[r].keys for r in graph.nodes}
    edges = {(r, i): {k: db.tables[r].content[k][i] for k in db.tables[r].keys} for r, i, _ in graph.edges}
    return SketchInterpretation(nodes, edges)
