"""Text format for classifications, tables, schemas, databases and morphisms.

Example::

    classification C {
      types: Emp, Dept;
      instances: e1, d1;
      holds: e1:Emp, d1:Dept;
    }
    table Emp over C {
      cols: dept:Dept;
      rows: e1 -> (dept=d1);
    }
    schema S over C {
      relations Emp(dept:Dept), DRef(d:Dept);
      arrows p: DRef -> Emp { d -> dept };
    }
    database D over S, C {
      keymap p: e1 -> d1;
      rows Emp: e1 -> (dept=d1);
      rows DRef: d1 -> (d=d1);
    }
    morphism m : Emp -> DRef { cols: d -> dept; keys: e1 -> d1; }

Names are bare words (letters, digits, ``_ . @ ⋆``) or double-quoted JSON
strings. ``#`` starts a comment. In ``morphism`` blocks ``cols`` maps target
columns to source columns and ``keys`` maps source keys to target keys.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .core import Classification, Signature, make_infomorphism
from .errors import CatDBError, ParseError, ValidationError, Violation
from .fincat import identity_name, make_fincat
from .database import Database, DbSchema, make_database, make_db_morphism, make_db_schema
from .table import make_table, make_table_morphism

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\f]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<punct><->|->|[{}():;,=])
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<id>[\w.@⋆]+)
""", re.VERBOSE)

_BARE = re.compile(r"[\w.@⋆]+")


@dataclass
class Token:
    kind: str  # id, str, punct, eof
    value: str
    line: int
    col: int


def tokenize(text: str, source: str = "<text>") -> list[Token]:
    out, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1, source)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind == "str":
            try:
                value = json.loads(m.group())
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad string literal: {exc.msg}", line, pos - start + 1, source) from None
            out.append(Token("str", value, line, pos - start + 1))
        elif kind in ("id", "punct"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


def quote(name: str) -> str:
    return name if _BARE.fullmatch(name) else json.dumps(name, ensure_ascii=False)


class _Parser:
    def __init__(self, text: str, source: str):
        self.toks = tokenize(text, source)
        self.i = 0
        self.source = source

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col, self.source)

    def at(self, value: str) -> bool:
        t = self.tok
        return (t.kind == "punct" or t.kind == "id") and t.value == value

    def expect(self, value: str) -> Token:
        if not self.at(value):
            shown = self.tok.value or "end of input"
            raise self.error(f"expected {value!r}, found {shown!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.i += 1
            return True
        return False

    def name(self) -> str:
        t = self.tok
        if t.kind not in ("id", "str"):
            raise self.error(f"expected a name, found {t.value or 'end of input'!r}")
        self.i += 1
        return t.value

    def keyword(self) -> Token:
        t = self.tok
        if t.kind != "id":
            raise self.error(f"expected a keyword, found {t.value or 'end of input'!r}")
        self.i += 1
        return t

    def separated(self, item, end: str = ";") -> list:
        """Parse ``item (',' item)*`` up to (not consuming) ``end``; may be empty."""
        out = []
        if self.at(end):
            return out
        out.append(item())
        while self.accept(","):
            out.append(item())
        return out

    def pair(self, sep: str):
        line = self.tok.line
        a = self.name()
        self.expect(sep)
        return a, self.name(), line

    def row(self):
        line = self.tok.line
        key = self.name()
        self.expect("->")
        self.expect("(")
        entries = self.separated(lambda: self.pair("="), end=")")
        self.expect(")")
        return key, {c: v for c, v, _ in entries}, line


@dataclass
class Workspace:
    classifications: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    infomorphisms: dict = field(default_factory=dict)
    schemas: dict = field(default_factory=dict)
    databases: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    db_morphisms: dict = field(default_factory=dict)
    refs: dict = field(default_factory=dict)  # (kind, name) -> names this declaration refers to

    KINDS = ("classifications", "tables", "infomorphisms", "schemas", "databases", "morphisms", "db_morphisms")

    def lookup(self, name: str):
        hits = [(kind, getattr(self, kind)[name]) for kind in self.KINDS if name in getattr(self, kind)]
        if not hits:
            raise KeyError(name)
        return hits[0]

    def counts(self) -> dict[str, int]:
        return {kind: len(getattr(self, kind)) for kind in self.KINDS}

    def name_of(self, kind: str, value) -> str:
        for name, v in sorted(getattr(self, kind).items()):
            if v == value:
                return name
        raise KeyError(f"no {kind[:-1]} in the workspace equals the given value")

    def _add(self, kind: str, name: str, value, refs: tuple = ()):
        store = getattr(self, kind)
        if name in store:
            raise ValueError(f"duplicate {kind[:-1]} name {name!r}")
        store[name] = value
        self.refs[(kind, name)] = tuple(refs)

    def add_classification(self, name, E):
        self._add("classifications", name, E)

    def add_table(self, name, T, cls_name=None):
        self._add("tables", name, T, (cls_name or self.name_of("classifications", T.cls),))

    def add_infomorphism(self, name, m, src=None, dst=None):
        self._add("infomorphisms", name, m, (src or self.name_of("classifications", m.source),
                                              dst or self.name_of("classifications", m.target)))

    def merge(self, other: "Workspace") -> None:
        for kind in self.KINDS:
            for name, value in getattr(other, kind).items():
                self._add(kind, name, value, other.refs[(kind, name)])


class SourceValidationError(ValidationError):
    def __init__(self, report, line: int, source: str, context: str):
        self.line = line
        self.source = source
        super().__init__(report, f"{source}:{line}: {context}")


def _located(exc: ValidationError, source: str, decl_line: int, what: str, lines: dict | None = None):
    lines = lines or {}
    report = []
    first = None
    for v in exc.report:
        line = next((lines[w] for w in v.where if w in lines), decl_line)
        first = line if first is None else min(first, line)
        report.append(Violation(v.kind, v.where, f"line {line}: {v.message}"))
    return SourceValidationError(report, first or decl_line, source, what)


def parse_workspace(text: str, source: str = "<text>", base_dir: str | Path | None = None,
                    into: Workspace | None = None) -> Workspace:
    p = _Parser(text, source)
    ws = into if into is not None else Workspace()
    base = Path(base_dir) if base_dir is not None else (Path(source).parent if source != "<text>" else Path("."))
    while p.tok.kind != "eof":
        kw = p.keyword()
        handler = _DECLS.get(kw.value)
        if handler is None:
            raise p.error(f"unknown declaration {kw.value!r}", kw)
        handler(p, ws, kw, base)
    return ws


def _resolve(p: _Parser, ws: Workspace, kind: str, name: str, tok: Token):
    store = getattr(ws, kind)
    if name not in store:
        raise p.error(f"unresolved reference to {kind[:-1]} {name!r}", tok)
    return store[name]


def _declare(p: _Parser, ws: Workspace, kind: str, name: str, tok: Token):
    if name in getattr(ws, kind):
        raise p.error(f"duplicate {kind[:-1]} name {name!r}", tok)


def _body(p: _Parser, stmt):
    p.expect("{")
    while not p.accept("}"):
        if p.tok.kind == "eof":
            raise p.error("unterminated block")
        stmt(p.keyword())


def _classification(p: _Parser, ws: Workspace, kw: Token, base: Path):
    tok = p.tok
    name = p.name()
    _declare(p, ws, "classifications", name, tok)
    parts = {"types": [], "instances": [], "holds": []}

    def stmt(k: Token):
        if k.value not in parts:
            raise p.error(f"unknown classification section {k.value!r}", k)
        p.expect(":")
        if k.value == "holds":
            parts["holds"] += [(y, x) for y, x, _ in p.separated(lambda: p.pair(":"))]
        else:
            parts[k.value] += p.separated(p.name)
        p.expect(";")

    _body(p, stmt)
    try:
        E = Classification(tuple(parts["types"]), tuple(parts["instances"]), frozenset(parts["holds"]))
    except ValidationError as exc:
        raise _located(exc, p.source, kw.line, f"classification {name}") from None
    ws._add("classifications", name, E)


def _table(p: _Parser, ws: Workspace, kw: Token, base: Path):
    tok = p.tok
    name = p.name()
    _declare(p, ws, "tables", name, tok)
    p.expect("over")
    ctok = p.tok
    cls_name = p.name()
    E = _resolve(p, ws, "classifications", cls_name, ctok)
    cols, rows, lines = [], [], {}
    csv_source = []

    def stmt(k: Token):
        if k.value == "cols":
            p.expect(":")
            cols.extend(p.separated(lambda: p.pair(":")))
        elif k.value == "rows" and p.accept("from"):
            path = p.name()
            p.expect("key")
            csv_source.append((path, p.name(), k))
        elif k.value == "rows":
            p.expect(":")
            for key, tup, line in p.separated(p.row):
                rows.append((key, tup))
                lines.setdefault(key, line)
        else:
            raise p.error(f"unknown table section {k.value!r}", k)
        p.expect(";")

    _body(p, stmt)
    try:
        sig = Signature({c: s for c, s, _ in cols}, E.types)
        if csv_source:
            from .csvio import load_csv

            path, key_col, k = csv_source[0]
            T = load_csv(base / path, sig, E, key_col)
            if rows:
                raise p.error("a table takes rows from a file or inline, not both", k)
        else:
            T = make_table(sig, E, rows)
    except ValidationError as exc:
        raise _located(exc, p.source, kw.line, f"table {name}", lines) from None
    ws._add("tables", name, T, (cls_name,))


def _infomorphism(p: _Parser, ws: Workspace, kw: Token, base: Path):
    tok = p.tok
    name = p.name()
    _declare(p, ws, "infomorphisms", name, tok)
    p.expect(":")
    t2 = p.tok
    src = p.name()
    p.expect("<->")
    t1 = p.tok
    dst = p.name()
    E2 = _resolve(p, ws, "classifications", src, t2)
    E1 = _resolve(p, ws, "classifications", dst, t1)
    maps = {"f": {}, "g": {}}

    def stmt(k: Token):
        if k.value not in maps:
            raise p.error(f"unknown infomorphism section {k.value!r}", k)
        p.expect(":")
        maps[k.value].update((a, b) for a, b, _ in p.separated(lambda: p.pair("->")))
        p.expect(";")

    _body(p, stmt)
    try:
        m = make_infomorphism(E2, E1, maps["f"], maps["g"])
    except ValidationError as exc:
        raise _located(exc, p.source, kw.line, f"infomorphism {name}") from None
    ws._add("infomorphisms", name, m, (src, dst))


def _schema(p: _Parser, ws: Workspace, kw: Token, base: Path):
    tok = p.tok
    name = p.name()
    _declare(p, ws, "schemas", name, tok)
    p.expect("over")
    ctok = p.tok
    cls_name = p.name()
    E = _resolve(p, ws, "classifications", cls_name, ctok)
    relations, arrows, maps, comp, identities = {}, {}, {}, {}, {}

    def relation():
        t = p.tok
        r = p.name()
        if r in relations:
            raise p.error(f"duplicate relation {r!r}", t)
        p.expect("(")
        relations[r] = {c: s for c, s, _ in p.separated(lambda: p.pair(":"), end=")")}
        p.expect(")")

    def arrow():
        t = p.tok
        a = p.name()
        if a in arrows:
            raise p.error(f"duplicate arrow {a!r}", t)
        p.expect(":")
        d = p.name()
        p.expect("->")
        c = p.name()
        p.expect("{")
        maps[a] = {x: y for x, y, _ in p.separated(lambda: p.pair("->"), end="}")}
        p.expect("}")
        arrows[a] = (d, c)

    def composite():
        p.expect("(")
        a = p.name()
        p.expect(",")
        b = p.name()
        p.expect(")")
        p.expect("=")
        comp[(a, b)] = p.name()

    def identity():
        o, a, _ = p.pair("=")
        identities[o] = a

    def stmt(k: Token):
        handlers = {"relations": relation, "arrows": arrow, "compose": composite, "identities": identity}
        if k.value not in handlers:
            raise p.error(f"unknown schema section {k.value!r}", k)
        p.separated(handlers[k.value])
        p.expect(";")

    _body(p, stmt)
    try:
        ids = {o: identities.get(o, identity_name(o)) for o in relations}
        cat = make_fincat(relations, arrows, comp, ids)
        sig_at = {r: Signature(sorts, E.types) for r, sorts in relations.items()}
        s = make_db_schema(cat, E.types, sig_at, maps)
    except ValidationError as exc:
        raise _located(exc, p.source, kw.line, f"schema {name}") from None
    ws._add("schemas", name, s, (cls_name,))


def _database(p: _Parser, ws: Workspace, kw: Token, base: Path):
    tok = p.tok
    name = p.name()
    _declare(p, ws, "databases", name, tok)
    p.expect("over")
    stok = p.tok
    schema_name = p.name()
    p.expect(",")
    ctok = p.tok
    cls_name = p.name()
    schema = _resolve(p, ws, "schemas", schema_name, stok)
    E = _resolve(p, ws, "classifications", cls_name, ctok)
    keys, keymaps, rows, lines = {}, {}, {}, {}

    def stmt(k: Token):
        target = p.name()
        p.expect(":")
        if k.value == "keys":
            keys.setdefault(target, []).extend(p.separated(p.name))
        elif k.value == "keymap":
            keymaps.setdefault(target, {}).update((a, b) for a, b, _ in p.separated(lambda: p.pair("->")))
        elif k.value == "rows":
            for key, tup, line in p.separated(p.row):
                rows.setdefault(target, {})[key] = tup
                lines.setdefault(key, line)
        else:
            raise p.error(f"unknown database section {k.value!r}", k)
        p.expect(";")

    _body(p, stmt)
    key_at = None
    if keys:
        key_at = {r: list(keys.get(r, ())) + [k for k in rows.get(r, {}) if k not in keys.get(r, ())]
                  for r in schema.rel_cat.objects}
    try:
        db = make_database(schema, E, key_at, keymaps, rows)
    except ValidationError as exc:
        raise _located(exc, p.source, kw.line, f"database {name}", lines) from None
    except CatDBError as exc:
        raise p.error(str(exc), kw) from None
    ws._add("databases", name, db, (schema_name, cls_name))


def _morphism_head(p: _Parser, ws: Workspace, kind: str, target_kind: str):
    tok = p.tok
    name = p.name()
    _declare(p, ws, kind, name, tok)
    p.expect(":")
    t1 = p.tok
    src = p.name()
    p.expect("->")
    t2 = p.tok
    dst = p.name()
    a = _resolve(p, ws, target_kind, src, t1)
    b = _resolve(p, ws, target_kind, dst, t2)
    info_name, info = None, None
    if p.accept("via"):
        it = p.tok
        info_name = p.name()
        info = _resolve(p, ws, "infomorphisms", info_name, it)
    return name, src, dst, a, b, info_name, info


def _table_morphism(p: _Parser, ws: Workspace, kw: Token, base: Path):
    name, src, dst, T1, T2, info_name, info = _morphism_head(p, ws, "morphisms", "tables")
    maps = {"cols": {}, "keys": {}}

    def stmt(k: Token):
        if k.value not in maps:
            raise p.error(f"unknown morphism section {k.value!r}", k)
        p.expect(":")
        maps[k.value].update((a, b) for a, b, _ in p.separated(lambda: p.pair("->")))
        p.expect(";")

    _body(p, stmt)
    try:
        m = make_table_morphism(T1, T2, maps["cols"], maps["keys"], info)
    except ValidationError as exc:
        raise _located(exc, p.source, kw.line, f"morphism {name}") from None
    except CatDBError as exc:
        raise p.error(str(exc), kw) from None
    ws._add("morphisms", name, m, (src, dst, info_name or ""))


def _db_morphism(p: _Parser, ws: Workspace, kw: Token, base: Path):
    name, src, dst, D2, D1, info_name, info = _morphism_head(p, ws, "db_morphisms", "databases")
    objs, arrows, theta, kappa = {}, {}, {}, {}

    def stmt(k: Token):
        if k.value in ("relations", "arrows"):
            p.expect(":")
            (objs if k.value == "relations" else arrows).update(
                (a, b) for a, b, _ in p.separated(lambda: p.pair("->")))
        elif k.value in ("theta", "kappa"):
            r = p.name()
            p.expect(":")
            (theta if k.value == "theta" else kappa).setdefault(r, {}).update(
                (a, b) for a, b, _ in p.separated(lambda: p.pair("->")))
        else:
            raise p.error(f"unknown dbmorphism section {k.value!r}", k)
        p.expect(";")

    _body(p, stmt)
    for r in objs:
        theta.setdefault(r, {})
        kappa.setdefault(r, {})
    try:
        m = make_db_morphism(D2, D1, objs, arrows, theta, info, kappa)
    except ValidationError as exc:
        raise _located(exc, p.source, kw.line, f"dbmorphism {name}") from None
    except CatDBError as exc:
        raise p.error(str(exc), kw) from None
    ws._add("db_morphisms", name, m, (src, dst, info_name or ""))


_DECLS = {
    "classification": _classification,
    "table": _table,
    "infomorphism": _infomorphism,
    "schema": _schema,
    "database": _database,
    "morphism": _table_morphism,
    "dbmorphism": _db_morphism,
}


def load_workspace(paths) -> Workspace:
    ws = Workspace()
    for path in paths:
        path = Path(path)
        parse_workspace(path.read_text(encoding="utf-8"), str(path), path.parent, into=ws)
    return ws


# -- export -----------------------------------------------------------------

def _maplist(m) -> str:
    return ", ".join(f"{quote(a)} -> {quote(b)}" for a, b in sorted(m.items()))


def _rows(content, indent: str) -> str:
    lines = []
    for k in sorted(content):
        entries = ", ".join(f"{quote(c)}={quote(v)}" for c, v in sorted(content[k].items()))
        lines.append(f"{indent}{quote(k)} -> ({entries})")
    return ",\n".join(lines)


def _dsl_classification(name: str, E: Classification) -> str:
    holds = ", ".join(f"{quote(y)}:{quote(x)}" for y, x in sorted(E.incidence, key=lambda p: (p[1], p[0])))
    return (f"classification {quote(name)} {{\n"
            f"  types: {', '.join(map(quote, E.types))};\n"
            f"  instances: {', '.join(map(quote, E.instances))};\n"
            f"  holds: {holds};\n}}\n")


def _dsl_table(name: str, T, cls_name: str) -> str:
    cols = ", ".join(f"{quote(c)}:{quote(s)}" for c, s in T.sig.sorts.items())
    out = f"table {quote(name)} over {quote(cls_name)} {{\n  cols: {cols};\n"
    if T.keys:
        out += f"  rows:\n{_rows(T.content, '    ')};\n"
    return out + "}\n"


def _dsl_infomorphism(name: str, m, src: str, dst: str) -> str:
    return (f"infomorphism {quote(name)} : {quote(src)} <-> {quote(dst)} {{\n"
            f"  f: {_maplist(m.type_map)};\n  g: {_maplist(m.inst_map)};\n}}\n")


def _dsl_schema(name: str, s: DbSchema, cls_name: str) -> str:
    C = s.rel_cat
    out = f"schema {quote(name)} over {quote(cls_name)} {{\n"
    for r in C.objects:
        cols = ", ".join(f"{quote(c)}:{quote(x)}" for c, x in s.sig_at[r].sorts.items())
        out += f"  relations {quote(r)}({cols});\n"
    custom = {o: a for o, a in C.identities.items() if a != identity_name(o)}
    if custom:
        out += f"  identities {', '.join(f'{quote(o)}={quote(a)}' for o, a in sorted(custom.items()))};\n"
    ids = set(C.identities.values())
    for a in C.non_identity_arrows():
        d, c = C.arrows[a]
        out += f"  arrows {quote(a)}: {quote(d)} -> {quote(c)} {{ {_maplist(s.sig_morph_at[a])} }};\n"
    for (a, b), c in sorted(C.composition.items()):
        if a not in ids and b not in ids:
            out += f"  compose ({quote(a)}, {quote(b)}) = {quote(c)};\n"
    return out + "}\n"


def _dsl_database(name: str, db: Database, schema_name: str, cls_name: str) -> str:
    C = db.schema.rel_cat
    out = f"database {quote(name)} over {quote(schema_name)}, {quote(cls_name)} {{\n"
    for a in C.non_identity_arrows():
        if db.key_map_at[a]:
            out += f"  keymap {quote(a)}: {_maplist(db.key_map_at[a])};\n"
    for r, T in db.tables.items():
        if T.keys:
            out += f"  rows {quote(r)}:\n{_rows(T.content, '    ')};\n"
    return out + "}\n"


def _dsl_morphism(keyword: str, name: str, refs: tuple, body: list[str]) -> str:
    src, dst, info = refs
    via = f" via {quote(info)}" if info else ""
    inner = "".join(f"  {line};\n" for line in body)
    return f"{keyword} {quote(name)} : {quote(src)} -> {quote(dst)}{via} {{\n{inner}}}\n"


def export_dsl(ws: Workspace) -> str:
    parts = []
    for n, E in sorted(ws.classifications.items()):
        parts.append(_dsl_classification(n, E))
    for n, m in sorted(ws.infomorphisms.items()):
        parts.append(_dsl_infomorphism(n, m, *ws.refs[("infomorphisms", n)]))
    for n, T in sorted(ws.tables.items()):
        parts.append(_dsl_table(n, T, ws.refs[("tables", n)][0]))
    for n, m in sorted(ws.morphisms.items()):
        parts.append(_dsl_morphism("morphism", n, ws.refs[("morphisms", n)],
                                   [f"cols: {_maplist(m.col_map)}", f"keys: {_maplist(m.key_map)}"]))
    for n, s in sorted(ws.schemas.items()):
        parts.append(_dsl_schema(n, s, ws.refs[("schemas", n)][0]))
    for n, db in sorted(ws.databases.items()):
        parts.append(_dsl_database(n, db, *ws.refs[("databases", n)]))
    for n, m in sorted(ws.db_morphisms.items()):
        body = [f"relations: {_maplist(m.obj_map)}"]
        ids = set(m.src.schema.rel_cat.identities.values())
        arrows = {a: b for a, b in m.arrow_map.items() if a not in ids}
        if arrows:
            body.append(f"arrows: {_maplist(arrows)}")
        body += [f"theta {quote(r)}: {_maplist(t)}" for r, t in sorted(m.theta.items()) if t]
        body += [f"kappa {quote(r)}: {_maplist(k)}" for r, k in sorted(m.kappa.items()) if k]
        parts.append(_dsl_morphism("dbmorphism", n, ws.refs[("db_morphisms", n)], body))
    return "\n".join(parts)
