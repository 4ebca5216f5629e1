"""Canonical text renderings: csv, json, dsl and dot.

Every renderer sorts keys and columns so equal values give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from functools import singledispatch

from .colimits import ColimitResult
from .core import Classification, Infomorphism, Signature
from .database import Database, DbSchema
from .dsl import Workspace, export_dsl
from .errors import CatDBError
from .limits import LimitResult
from .table import Table, TableMorphism
from .unified import SketchGraph

FORMATS = ("csv", "json", "dsl", "dot")


class FormatError(CatDBError):
    pass


def export(value, fmt: str) -> str:
    if fmt not in FORMATS:
        raise FormatError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    return _render(value, fmt)


@singledispatch
def _render(value, fmt: str) -> str:
    raise FormatError(f"cannot export {type(value).__name__} as {fmt}")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def key_column_name(T: Table, preferred: str = "key") -> str:
    name = preferred
    while name in T.columns:
        name = "_" + name
    return name


def table_csv(T: Table, key_column: str = "key") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = sorted(T.columns)
    w.writerow([key_column_name(T, key_column), *cols])
    for k in sorted(T.keys):
        w.writerow([k, *(T.content[k][c] for c in cols)])
    return buf.getvalue()


def classification_data(E: Classification) -> dict:
    return {"types": list(E.types), "instances": list(E.instances),
            "incidence": sorted([y, x] for y, x in E.incidence)}


def signature_data(sig: Signature) -> dict:
    return {"sorts": dict(sorted(sig.sorts.items())), "universe": sorted(sig.universe)}


def table_data(T: Table) -> dict:
    return {"sig": signature_data(T.sig), "cls": classification_data(T.cls), "keys": sorted(T.keys),
            "content": {k: dict(sorted(T.content[k].items())) for k in sorted(T.keys)}}


def infomorphism_data(m: Infomorphism) -> dict:
    return {"source": classification_data(m.source), "target": classification_data(m.target),
            "type_map": dict(sorted(m.type_map.items())), "inst_map": dict(sorted(m.inst_map.items()))}


def schema_data(s: DbSchema) -> dict:
    C = s.rel_cat
    return {
        "rel_cat": {"objects": sorted(C.objects),
                    "arrows": {a: list(ends) for a, ends in sorted(C.arrows.items())},
                    "identities": dict(sorted(C.identities.items())),
                    "composition": sorted([a, b, c] for (a, b), c in C.composition.items())},
        "universe": sorted(s.universe),
        "sig_at": {r: signature_data(sig) for r, sig in sorted(s.sig_at.items())},
        "sig_morph_at": {a: dict(sorted(m.items())) for a, m in sorted(s.sig_morph_at.items())},
    }


def database_data(db: Database) -> dict:
    return {"schema": schema_data(db.schema), "cls": classification_data(db.cls),
            "key_at": {r: sorted(T.keys) for r, T in sorted(db.tables.items())},
            "key_map_at": {a: dict(sorted(m.items())) for a, m in sorted(db.key_map_at.items())},
            "tup_at": {r: table_data(T)["content"] for r, T in sorted(db.tables.items())}}


@_render.register
def _(T: Table, fmt: str) -> str:
    if fmt == "csv":
        return table_csv(T)
    if fmt == "json":
        return _json(table_data(T))
    return _render.dispatch(object)(T, fmt)


@_render.register
def _(r: LimitResult, fmt: str) -> str:
    if fmt == "json":
        data = table_data(r.table)
        data["column_classes"] = {c: [list(m) for m in ms] for c, ms in sorted(r.column_classes.items())}
        data["families"] = {k: list(f) for k, f in sorted(r.families.items())}
        return _json(data)
    return _render(r.table, fmt)


@_render.register
def _(r: ColimitResult, fmt: str) -> str:
    if fmt == "json":
        data = table_data(r.table)
        data["key_classes"] = {k: [list(m) for m in ms] for k, ms in sorted(r.key_classes.items())}
        data["column_families"] = {c: list(f) for c, f in sorted(r.column_families.items())}
        return _json(data)
    return _render(r.table, fmt)


@_render.register
def _(E: Classification, fmt: str) -> str:
    if fmt == "json":
        return _json(classification_data(E))
    return _render.dispatch(object)(E, fmt)


@_render.register
def _(m: Infomorphism, fmt: str) -> str:
    if fmt == "json":
        return _json(infomorphism_data(m))
    return _render.dispatch(object)(m, fmt)


@_render.register
def _(m: TableMorphism, fmt: str) -> str:
    if fmt == "json":
        return _json({"src": table_data(m.src), "dst": table_data(m.dst), "col_map": dict(sorted(m.col_map.items())),
                      "info": infomorphism_data(m.info), "key_map": dict(sorted(m.key_map.items()))})
    return _render.dispatch(object)(m, fmt)


@_render.register
def _(s: DbSchema, fmt: str) -> str:
    if fmt == "json":
        return _json(schema_data(s))
    return _render.dispatch(object)(s, fmt)


@_render.register
def _(db: Database, fmt: str) -> str:
    if fmt == "json":
        return _json(database_data(db))
    return _render.dispatch(object)(db, fmt)


def _dot_id(name: str) -> str:
    return json.dumps(name, ensure_ascii=False)


@_render.register
def _(g: SketchGraph, fmt: str) -> str:
    if fmt == "json":
        return _json({"nodes": sorted(g.nodes), "edges": sorted(list(e) for e in g.edges),
                      "constraint_arrows": {a: list(ends) for a, ends in sorted(g.constraint_arrows.items())},
                      "datatype_nodes": sorted(g.datatype_nodes)})
    if fmt == "dot":
        lines = ["digraph sketch {"]
        lines += [f"  {_dot_id(n)};" for n in sorted(g.nodes)]
        for r, i, target in sorted(g.edges):
            lines.append(f"  {_dot_id(r)} -> {_dot_id(target)} [label={_dot_id(i)}];")
        for a, (src, dst) in sorted(g.constraint_arrows.items()):
            lines.append(f"  {_dot_id(src)} -> {_dot_id(dst)} [label={_dot_id(a)}, style=dashed, constraint=false];")
        lines.append("}")
        return "\n".join(lines) + "\n"
    return _render.dispatch(object)(g, fmt)


@_render.register
def _(ws: Workspace, fmt: str) -> str:
    if fmt == "dsl":
        return export_dsl(ws)
    if fmt == "json":
        return _json({
            "classifications": {n: classification_data(E) for n, E in sorted(ws.classifications.items())},
            "tables": {n: table_data(T) for n, T in sorted(ws.tables.items())},
            "infomorphisms": {n: infomorphism_data(m) for n, m in sorted(ws.infomorphisms.items())},
            "schemas": {n: schema_data(s) for n, s in sorted(ws.schemas.items())},
            "databases": {n: database_data(db) for n, db in sorted(ws.databases.items())},
            "morphisms": {n: {"col_map": dict(sorted(m.col_map.items())), "key_map": dict(sorted(m.key_map.items())),
                              "refs": list(ws.refs[("morphisms", n)])} for n, m in sorted(ws.morphisms.items())},
            "db_morphisms": {n: {"obj_map": dict(sorted(m.obj_map.items())),
                                 "arrow_map": dict(sorted(m.arrow_map.items())),
                                 "theta": {r: dict(sorted(t.items())) for r, t in sorted(m.theta.items())},
                                 "kappa": {r: dict(sorted(k.items())) for r, k in sorted(m.kappa.items())},
                                 "refs": list(ws.refs[("db_morphisms", n)])}
                             for n, m in sorted(ws.db_morphisms.items())},
        })
    return _render.dispatch(object)(ws, fmt)
