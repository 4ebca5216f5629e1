"""Batch command line: ``catdb COMMAND --in FILE... [options]``.

Exit status is 0 on success, 1 when a value fails validation and 2 for usage
or parse errors.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import tempfile
import time
from pathlib import Path

from .colimits import colimit, coproduct
from .core import check_infomorphism
from .database import check_db_morphism, join
from .dsl import Workspace, export_dsl, load_workspace, parse_workspace
from .errors import CatDBError, ParseError, ValidationError
from .export import FormatError, export
from .limits import limit, select
from .random_data import brute_force_column_families, brute_force_families, random_diagram
from .table import check_table_morphism, migrate
from .unified import NotUnifiedError, check_referential_integrity, sketch_graph

OK, INVALID, USAGE = 0, 1, 2


class UsageError(CatDBError):
    pass


def write_atomic(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _get(ws: Workspace, kind: str, name: str):
    store = getattr(ws, kind)
    if name not in store:
        raise UsageError(f"no {kind[:-1].replace('_', ' ')} named {name!r}")
    return store[name]


def _emit_table(args, ws: Workspace, result, cls_of_result, table_name: str) -> None:
    """Write a table-valued result; ``dsl`` wraps it in a workspace with its classification."""
    if args.format == "dsl":
        out = Workspace()
        cls_name = ws.name_of("classifications", cls_of_result)
        out.add_classification(cls_name, cls_of_result)
        out.add_table(table_name, getattr(result, "table", result), cls_name)
        text = export_dsl(out)
    else:
        text = export(result, args.format)
    write_atomic(args.out, text)


def cmd_validate(args, ws: Workspace) -> int:
    if args.name:
        try:
            kind, _ = ws.lookup(args.name)
        except KeyError:
            raise UsageError(f"nothing named {args.name!r}") from None
        print(f"ok: {args.name} ({kind[:-1].replace('_', ' ')})")
    else:
        counts = ", ".join(f"{n} {k.replace('_', ' ')}" for k, n in ws.counts().items() if n)
        print(f"ok: {counts or 'empty workspace'}")
    return OK


def cmd_referential(args, ws: Workspace) -> int:
    db = _get(ws, "databases", args.db)
    report = check_referential_integrity(db)
    for v in report:
        print(v)
    if report:
        return INVALID
    print(f"ok: {args.db} satisfies referential integrity")
    return OK


def cmd_join(args, ws: Workspace) -> int:
    db = _get(ws, "databases", args.db)
    _emit_table(args, ws, join(db), db.cls, f"{args.db}_join")
    return OK


def cmd_union(args, ws: Workspace) -> int:
    T1, T2 = _get(ws, "tables", args.t1), _get(ws, "tables", args.t2)
    _emit_table(args, ws, coproduct(T1, T2, names=(args.t1, args.t2)), T1.cls, f"{args.t1}_{args.t2}_union")
    return OK


def cmd_migrate(args, ws: Workspace) -> int:
    T = _get(ws, "tables", args.table)
    m = _get(ws, "infomorphisms", args.info)
    if T.cls != m.target:
        raise ValidationError([], f"table {args.table} is not over the target classification of {args.info}")
    _emit_table(args, ws, migrate(T, m), m.source, f"{args.table}_{args.info}")
    return OK


def _binding(pairs: list[str]) -> dict[str, str]:
    out = {}
    for p in pairs:
        table_col, sep, ref_col = p.partition("=")
        if not sep or not table_col or not ref_col:
            raise UsageError(f"--on expects TABLECOL=REFCOL, got {p!r}")
        out[ref_col] = table_col
    return out


def cmd_select(args, ws: Workspace) -> int:
    T, ref = _get(ws, "tables", args.table), _get(ws, "tables", args.ref)
    _emit_table(args, ws, select(T, ref, _binding(args.on)), T.cls, f"{args.table}_select")
    return OK


def cmd_check_morphism(args, ws: Workspace) -> int:
    if args.name in ws.morphisms:
        m = ws.morphisms[args.name]
        report = check_table_morphism(m.src, m.dst, m.col_map, m.info.type_map, m.info.inst_map, m.key_map)
    elif args.name in ws.db_morphisms:
        m = ws.db_morphisms[args.name]
        report = check_db_morphism(m.src, m.dst, m.obj_map, m.arrow_map, m.theta,
                                   m.info.type_map, m.info.inst_map, m.kappa)
    elif args.name in ws.infomorphisms:
        m = ws.infomorphisms[args.name]
        report = check_infomorphism(m.source, m.target, m.type_map, m.inst_map)
    else:
        raise UsageError(f"no morphism named {args.name!r}")
    for v in report:
        print(v)
    if report:
        return INVALID
    print(f"ok: {args.name}")
    return OK


def cmd_sketch(args, ws: Workspace) -> int:
    db = _get(ws, "databases", args.db)
    write_atomic(args.out, export(sketch_graph(db.schema), args.format))
    return OK


def cmd_selftest(args, ws: Workspace) -> int:
    """Randomized consistency checks of joins, unions and the text format."""
    rng = random.Random(args.seed)
    start = time.perf_counter()
    failures = 0
    for n in range(args.count):
        d = random_diagram(rng)
        lim, col = limit(d), colimit(d)
        ok = sorted(lim.families.values()) == sorted(brute_force_families(d))
        ok &= sorted(col.column_families.values()) == sorted(brute_force_column_families(d))
        text_ws = Workspace()
        text_ws.add_classification("E", d.cls)
        for j, T in d.tables.items():
            text_ws.add_table(j, T, "E")
        text_ws.add_table("limit", lim.table, "E")
        text_ws.add_table("colimit", col.table, "E")
        text = export_dsl(text_ws)
        ok &= export_dsl(parse_workspace(text)) == text
        if not ok:
            failures += 1
            print(f"case {n}: mismatch")
    elapsed = time.perf_counter() - start
    print(f"selftest seed={args.seed}: {args.count - failures}/{args.count} passed in {elapsed:.2f}s")
    return OK if failures == 0 else INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catdb", description="Tables, joins and unions over classifications.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text, needs_input=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--in", dest="inputs", nargs="+", metavar="FILE", required=needs_input, default=[],
                       help="workspace files, read in order")
        p.set_defaults(func=func)
        return p

    def output(p, formats=("csv", "json", "dsl"), default="csv"):
        p.add_argument("--out", metavar="FILE", help="output file (default: stdout)")
        p.add_argument("--format", choices=formats, default=default)

    p = command("validate", cmd_validate, "parse and validate the workspace")
    p.add_argument("name", nargs="?")
    p = command("check-referential-integrity", cmd_referential, "check foreign keys of a unified database")
    p.add_argument("db")
    p = command("join", cmd_join, "limit of a database's diagram")
    p.add_argument("db")
    output(p)
    p = command("union", cmd_union, "distributed union of two tables")
    p.add_argument("t1")
    p.add_argument("t2")
    output(p)
    p = command("migrate", cmd_migrate, "base change of a table along an infomorphism")
    p.add_argument("table")
    p.add_argument("info")
    output(p)
    p = command("select", cmd_select, "rows of TABLE whose bound entries occur in REF")
    p.add_argument("table")
    p.add_argument("ref")
    p.add_argument("--on", action="append", required=True, metavar="TABLECOL=REFCOL")
    output(p)
    p = command("check-morphism", cmd_check_morphism, "check a declared morphism")
    p.add_argument("name")
    p = command("sketch", cmd_sketch, "sketch graph of a unified database")
    p.add_argument("db")
    output(p, formats=("dot", "json"), default="dot")
    p = command("selftest", cmd_selftest, "randomized self-checks", needs_input=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=50)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        ws = load_workspace(args.inputs)
        return args.func(args, ws)
    except (ParseError, UsageError, FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (ValidationError, NotUnifiedError, CatDBError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
