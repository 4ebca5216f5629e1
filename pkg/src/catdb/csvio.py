"""CSV ingestion: one row per key, one column per signature index."""

from __future__ import annotations

import csv
from pathlib import Path

from .core import Classification, Signature
from .errors import ValidationError, Violation
from .table import Table, make_table


def load_csv(path: str | Path, sig: Signature, E: Classification, key_column: str) -> Table:
    """Read a table whose header names ``key_column`` and every column of ``sig``.

    The classification is never extended: a cell naming an unknown instance is
    reported as a violation.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValidationError([Violation("missing-header", (str(path),), "file has no header row")], str(path))
        body = list(reader)
    report = []
    wanted = [key_column, *sig.arity]
    for c in wanted:
        if c not in header:
            report.append(Violation("missing-column", (c,), f"header lacks column {c!r}"))
    for c in header:
        if c not in wanted:
            report.append(Violation("extra-column", (c,), f"column {c!r} is not in the signature"))
    if len(set(header)) != len(header):
        report.append(Violation("duplicate-column", tuple(header), "header repeats a column name"))
    if report:
        raise ValidationError(report, str(path))
    pos = {c: n for n, c in enumerate(header)}
    known = set(E.instances)
    rows, seen = [], set()
    for lineno, cells in enumerate(body, start=2):
        if not cells:
            continue
        if len(cells) != len(header):
            report.append(Violation("ragged-row", (lineno,), f"line {lineno}: expected {len(header)} cells"))
            continue
        key = cells[pos[key_column]]
        if key in seen:
            report.append(Violation("duplicate-key", (key,), f"line {lineno}: key {key!r} repeats"))
            continue
        seen.add(key)
        tup = {c: cells[pos[c]] for c in sig.arity}
        for c, v in tup.items():
            if v not in known:
                report.append(Violation("unknown-instance", (key, c, v),
                                        f"line {lineno}: {v!r} is not an instance of the classification"))
        rows.append((key, tup))
    if report:
        raise ValidationError(report, str(path))
    return make_table(sig, E, rows)
