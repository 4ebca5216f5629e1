"""Database schemas and databases over a category of relation symbols.

Variance: an arrow p: r' -> r of the relation category carries a column map
I(r') -> I(r) (covariant) and a key map K(r) -> K(r') (contravariant).
Every relation's rows must agree with the rows they are sent to:

    tup[r'][K(p)(k)][i'] == tup[r][k][S(p)(i')]

A morphism D2 -> D1 carries a relation functor F: R2 -> R1, column maps
theta[r2]: I2(r2) -> I1(F r2), an infomorphism (f, g): E2 <-> E1 and key maps
kappa[r2]: K1(F r2) -> K2(r2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import Classification, Infomorphism, Signature, check_infomorphism, check_total, extent
from .core import compose_infomorphisms, identity_infomorphism
from .errors import InternalError, MismatchError, TotalityError, ValidationError, Violation
from .fincat import FinCat, TableDiagram, make_diagram, opposite, preorder_category, terminal_category
from .limits import LimitResult, UnionFind, limit, member_name
from .table import Table, TableMorphism, make_table


@dataclass(frozen=True)
class DbSchema:
    rel_cat: FinCat
    universe: tuple[str, ...]
    sig_at: Mapping[str, Signature]
    sig_morph_at: Mapping[str, Mapping[str, str]]

    __hash__ = None


def _with_identities(cat: FinCat, maps: Mapping[str, Mapping[str, str]], domain_of) -> dict:
    full = {a: dict(m) for a, m in maps.items()}
    for o, ida in cat.identities.items():
        full.setdefault(ida, {x: x for x in domain_of(o)})
    return full


def check_db_schema(rel_cat: FinCat, universe, sig_at, sig_morph_at) -> list:
    report = []
    universe = tuple(sorted(universe))
    for r in sorted(set(rel_cat.objects) ^ set(sig_at)):
        report.append(Violation("schema", (r,), "signature assignment not total on relation symbols"))
    if report:
        return report
    for r, sig in sig_at.items():
        if sig.universe != universe:
            report.append(Violation("schema", (r,), "signature is over a different type set"))
    full = _with_identities(rel_cat, sig_morph_at, lambda o: sig_at[o].arity)
    for a in rel_cat.arrows:
        if a not in full:
            report.append(Violation("schema", (a,), "no column map for arrow"))
    if report:
        return report
    for a, (r2, r) in rel_cat.arrows.items():
        h = full[a]
        try:
            check_total(f"S({a})", h, sig_at[r2].arity, sig_at[r].arity)
        except TotalityError as exc:
            report += exc.report
            continue
        for i2, i in h.items():
            if sig_at[r2].sorts[i2] != sig_at[r].sorts[i]:
                report.append(Violation("sort", (a, i2, i),
                                        f"{sig_at[r2].sorts[i2]} != {sig_at[r].sorts[i]}"))
    if report:
        return report
    for o, ida in rel_cat.identities.items():
        if full[ida] != {i: i for i in sig_at[o].arity}:
            report.append(Violation("functor", (ida,), "identity arrow is not sent to the identity map"))
    for (p, q), c in rel_cat.composition.items():
        composite = {i: full[q][full[p][i]] for i in full[p]}
        if composite != full[c]:
            report.append(Violation("functor", (p, q, c), "column map of composite differs"))
    return report


def make_db_schema(rel_cat: FinCat, universe, sig_at: Mapping[str, Signature],
                   sig_morph_at: Mapping[str, Mapping[str, str]]) -> DbSchema:
    report = check_db_schema(rel_cat, universe, sig_at, sig_morph_at)
    if report:
        raise ValidationError(report, "database schema")
    full = _with_identities(rel_cat, sig_morph_at, lambda o: sig_at[o].arity)
    return DbSchema(rel_cat, tuple(sorted(universe)), dict(sorted(sig_at.items())),
                    {a: dict(sorted(full[a].items())) for a in rel_cat.arrows})


@dataclass(frozen=True)
class ReferenceSchema:
    signature: Signature
    injections: Mapping[str, Mapping[str, str]]  # relation -> column -> merged column
    classes: Mapping[str, tuple[tuple[str, str], ...]]

    __hash__ = None


def reference_schema(s: DbSchema) -> ReferenceSchema:
    """Colimit of the schema's signatures: columns glued along the column maps."""
    uf = UnionFind((r, i) for r, sig in s.sig_at.items() for i in sig.arity)
    for a, (r2, r) in s.rel_cat.arrows.items():
        for i2, i in s.sig_morph_at[a].items():
            uf.union((r2, i2), (r, i))
    classes = {}
    for members in uf.classes().values():
        classes[min(member_name(r, i) for r, i in members)] = tuple(members)
    classes = dict(sorted(classes.items()))
    sorts = {}
    inj = {r: {} for r in s.rel_cat.objects}
    for name, members in classes.items():
        r0, i0 = members[0]
        sorts[name] = s.sig_at[r0].sorts[i0]
        for r, i in members:
            if s.sig_at[r].sorts[i] != sorts[name]:
                raise InternalError(f"reference column {name} mixes sorts")
            inj[r][i] = name
    return ReferenceSchema(Signature(sorts, s.universe), {r: dict(sorted(m.items())) for r, m in inj.items()}, classes)


@dataclass(frozen=True)
class Database:
    schema: DbSchema
    cls: Classification
    tables: Mapping[str, Table]
    key_map_at: Mapping[str, Mapping[str, str]]

    @property
    def key_at(self) -> dict[str, tuple[str, ...]]:
        return {r: T.keys for r, T in self.tables.items()}

    @property
    def tup_at(self) -> dict[str, Mapping[str, Mapping[str, str]]]:
        return {r: T.content for r, T in self.tables.items()}

    __hash__ = None


def check_database(schema: DbSchema, E: Classification, tables: Mapping[str, Table],
                   key_map_at: Mapping[str, Mapping[str, str]]) -> list:
    C = schema.rel_cat
    report = []
    full = _with_identities(C, key_map_at, lambda o: tables[o].keys)
    for a, (r2, r) in C.arrows.items():
        if a not in full:
            report.append(Violation("keys", (a,), "no key map for arrow"))
            continue
        try:
            check_total(f"K({a})", full[a], tables[r].keys, tables[r2].keys)
        except TotalityError as exc:
            report += exc.report
    if report:
        return report
    for o, ida in C.identities.items():
        if full[ida] != {k: k for k in tables[o].keys}:
            report.append(Violation("functor", (ida,), "key map of identity is not the identity"))
    for (p, q), c in C.composition.items():
        composite = {k: full[p][full[q][k]] for k in full[q]}
        if composite != full[c]:
            report.append(Violation("functor", (p, q, c), "key map of composite differs"))
    for a, (r2, r) in C.arrows.items():
        S, K = schema.sig_morph_at[a], full[a]
        for k in tables[r].keys:
            for i2 in tables[r2].columns:
                lhs = tables[r2].content[K[k]][i2]
                rhs = tables[r].content[k][S[i2]]
                if lhs != rhs:
                    report.append(Violation("naturality", (a, k, i2), f"{lhs} != {rhs}"))
    return report


def make_database(schema: DbSchema, E: Classification, key_at: Mapping[str, list[str]] | None,
                  key_map_at: Mapping[str, Mapping[str, str]] | None,
                  tup_at: Mapping[str, Mapping[str, Mapping[str, str]]]) -> Database:
    """Build and validate a database.

    ``key_at`` is only needed to declare keys not present in ``tup_at``
    (which is impossible for relations with columns) or to cross-check it.
    """
    if E.types != schema.universe:
        raise MismatchError("classification types differ from the schema's universe")
    report = []
    tables = {}
    for r in schema.rel_cat.objects:
        rows = dict(tup_at.get(r, {}))
        if key_at is not None:
            declared = set(key_at.get(r, ()))
            for k in sorted(declared - set(rows)):
                if schema.sig_at[r].arity:
                    report.append(Violation("keys", (r, k), "declared key has no row"))
                else:
                    rows[k] = {}
            for k in sorted(set(rows) - declared):
                report.append(Violation("keys", (r, k), "row key not declared"))
        try:
            tables[r] = make_table(schema.sig_at[r], E, rows.items())
        except ValidationError as exc:
            report += [Violation(v.kind, (r,) + v.where, v.message) for v in exc.report]
    for r in sorted(set(tup_at) - set(schema.rel_cat.objects)):
        report.append(Violation("keys", (r,), "rows given for an unknown relation"))
    if report:
        raise ValidationError(report, "database")
    report = check_database(schema, E, tables, key_map_at or {})
    if report:
        raise ValidationError(report, "database")
    full = _with_identities(schema.rel_cat, key_map_at or {}, lambda o: tables[o].keys)
    return Database(schema, E, tables, {a: dict(sorted(full[a].items())) for a in schema.rel_cat.arrows})


def db_to_diagram(db: Database) -> TableDiagram:
    """The diagram over the opposite relation category; p: r' -> r becomes T(r) -> T(r')."""
    shape = opposite(db.schema.rel_cat)
    ident = identity_infomorphism(db.cls)
    morphisms = {}
    for a, (r2, r) in db.schema.rel_cat.arrows.items():
        morphisms[a] = TableMorphism(db.tables[r], db.tables[r2], db.schema.sig_morph_at[a], ident, db.key_map_at[a])
    return make_diagram(shape, db.tables, morphisms, db.cls)


def database_of_diagram(d: TableDiagram) -> Database:
    rel_cat = opposite(d.shape)
    sig_at = {j: T.sig for j, T in d.tables.items()}
    schema = make_db_schema(rel_cat, d.cls.types, sig_at, {a: m.col_map for a, m in d.morphisms.items()})
    return make_database(schema, d.cls, {j: T.keys for j, T in d.tables.items()},
                         {a: m.key_map for a, m in d.morphisms.items()},
                         {j: T.content for j, T in d.tables.items()})


def join(db: Database) -> LimitResult:
    return limit(db_to_diagram(db))


def db_of_table(T: Table, name: str = "*") -> Database:
    schema = make_db_schema(terminal_category(name), T.cls.types, {name: T.sig}, {})
    return make_database(schema, T.cls, {name: T.keys}, {}, {name: T.content})


@dataclass(frozen=True)
class DatabaseMorphism:
    src: Database  # D2
    dst: Database  # D1
    obj_map: Mapping[str, str]
    arrow_map: Mapping[str, str]
    theta: Mapping[str, Mapping[str, str]]
    info: Infomorphism
    kappa: Mapping[str, Mapping[str, str]]

    @property
    def is_strict(self) -> bool:
        """Every column map keeps column names unchanged."""
        return all(i2 == i1 for m in self.theta.values() for i2, i1 in m.items())

    __hash__ = None


def _fill_identity_arrows(R2: FinCat, R1: FinCat, obj_map, arrow_map) -> dict:
    full = dict(arrow_map)
    for o, ida in R2.identities.items():
        if o in obj_map and obj_map[o] in R1.identities:
            full.setdefault(ida, R1.identities[obj_map[o]])
    return full


def check_db_morphism(db2: Database, db1: Database, obj_map: Mapping[str, str], arrow_map: Mapping[str, str],
                      theta: Mapping[str, Mapping[str, str]], f: Mapping[str, str], g: Mapping[str, str],
                      kappa: Mapping[str, Mapping[str, str]]) -> list:
    R2, R1 = db2.schema.rel_cat, db1.schema.rel_cat
    S2, S1 = db2.schema.sig_morph_at, db1.schema.sig_morph_at
    K2, K1 = db2.key_map_at, db1.key_map_at
    T2, T1 = db2.tables, db1.tables
    check_total("F", obj_map, R2.objects, R1.objects)
    F = _fill_identity_arrows(R2, R1, obj_map, arrow_map)
    check_total("F", F, R2.arrows, R1.arrows)
    check_total("theta", theta, R2.objects)
    check_total("kappa", kappa, R2.objects)
    for r2 in R2.objects:
        check_total(f"theta[{r2}]", theta[r2], T2[r2].columns, T1[obj_map[r2]].columns)
        check_total(f"kappa[{r2}]", kappa[r2], T1[obj_map[r2]].keys, T2[r2].keys)

    report = []
    for a, (d, c) in R2.arrows.items():
        if R1.arrows[F[a]] != (obj_map[d], obj_map[c]):
            report.append(Violation("functor", (a, F[a]), "image arrow has the wrong boundary"))
    if report:
        return report
    for o, ida in R2.identities.items():
        if F[ida] != R1.identities[obj_map[o]]:
            report.append(Violation("functor", (ida,), "identity not preserved"))
    for (p, q), c in R2.composition.items():
        if R1.then(F[p], F[q]) != F[c]:
            report.append(Violation("functor", (p, q, c), "composite not preserved"))

    report += check_infomorphism(db2.cls, db1.cls, f, g)

    for r2 in R2.objects:
        r1 = obj_map[r2]
        for i2, i1 in theta[r2].items():
            if T1[r1].sig.sorts[i1] != f[T2[r2].sig.sorts[i2]]:
                report.append(Violation("theta-sort", (r2, i2, i1),
                                        f"{T1[r1].sig.sorts[i1]} != f({T2[r2].sig.sorts[i2]})"))
    for p2, (r2a, r2b) in R2.arrows.items():
        for i in T2[r2a].columns:
            lhs = S1[F[p2]][theta[r2a][i]]
            rhs = theta[r2b][S2[p2][i]]
            if lhs != rhs:
                report.append(Violation("theta-natural", (p2, i), f"{lhs} != {rhs}"))
        for k1 in T1[obj_map[r2b]].keys:
            lhs = kappa[r2a][K1[F[p2]][k1]]
            rhs = K2[p2][kappa[r2b][k1]]
            if lhs != rhs:
                report.append(Violation("kappa-natural", (p2, k1), f"{lhs} != {rhs}"))
    for r2 in R2.objects:
        r1 = obj_map[r2]
        for k1 in T1[r1].keys:
            row2 = T2[r2].content[kappa[r2][k1]]
            row1 = T1[r1].content[k1]
            for i2 in T2[r2].columns:
                want = g[row1[theta[r2][i2]]]
                if row2[i2] != want:
                    report.append(Violation("commute", (r2, k1, i2), f"{row2[i2]} != {want}"))
    return report


def make_db_morphism(db2: Database, db1: Database, obj_map, arrow_map, theta, info: Infomorphism | None,
                     kappa) -> DatabaseMorphism:
    """Validate and build a morphism D2 -> D1. ``theta=None`` asks for the strict
    form, where each relation keeps its column names."""
    if theta is None:
        theta = {r2: {i: i for i in T.columns} for r2, T in db2.tables.items()}
    if info is None:
        if db2.cls != db1.cls:
            raise MismatchError("an infomorphism is required between databases over different classifications")
        info = identity_infomorphism(db1.cls)
    if info.source != db2.cls or info.target != db1.cls:
        raise MismatchError("infomorphism does not run between the databases' classifications")
    report = check_db_morphism(db2, db1, obj_map, arrow_map, theta, info.type_map, info.inst_map, kappa)
    if report:
        raise ValidationError(report, "database morphism")
    F = _fill_identity_arrows(db2.schema.rel_cat, db1.schema.rel_cat, obj_map, arrow_map)
    return DatabaseMorphism(db2, db1, dict(sorted(obj_map.items())), dict(sorted(F.items())),
                            {r: dict(sorted(m.items())) for r, m in sorted(theta.items())}, info,
                            {r: dict(sorted(m.items())) for r, m in sorted(kappa.items())})


def identity_db_morphism(db: Database) -> DatabaseMorphism:
    R = db.schema.rel_cat
    return DatabaseMorphism(db, db, {o: o for o in R.objects}, {a: a for a in R.arrows},
                            {r: {i: i for i in T.columns} for r, T in db.tables.items()},
                            identity_infomorphism(db.cls),
                            {r: {k: k for k in T.keys} for r, T in db.tables.items()})


def compose_db_morphisms(m1: DatabaseMorphism, m2: DatabaseMorphism) -> DatabaseMorphism:
    """Composite Da -> Dc of m1: Da -> Db followed by m2: Db -> Dc."""
    if m1.dst != m2.src:
        raise MismatchError("database morphisms are not composable: boundary databases differ")
    obj_map = {r: m2.obj_map[rb] for r, rb in m1.obj_map.items()}
    arrow_map = {a: m2.arrow_map[ab] for a, ab in m1.arrow_map.items()}
    theta = {r: {i: m2.theta[m1.obj_map[r]][ib] for i, ib in m1.theta[r].items()} for r in m1.theta}
    kappa = {r: {k: m1.kappa[r][kb] for k, kb in m2.kappa[m1.obj_map[r]].items()} for r in m1.kappa}
    info = compose_infomorphisms(m2.info, m1.info)
    return DatabaseMorphism(m1.src, m2.dst, obj_map, arrow_map, theta, info, kappa)


def same_db_morphism(m1: DatabaseMorphism, m2: DatabaseMorphism) -> bool:
    return (m1.src == m2.src and m1.dst == m2.dst and dict(m1.obj_map) == dict(m2.obj_map)
            and dict(m1.arrow_map) == dict(m2.arrow_map) and m1.theta == m2.theta
            and m1.info == m2.info and m1.kappa == m2.kappa)


def db_morphism_of_table_morphism(m: TableMorphism, name: str = "*") -> DatabaseMorphism:
    """A table morphism T1 -> T2 read as a morphism of one-relation databases D(T2) -> D(T1)."""
    db2, db1 = db_of_table(m.dst, name), db_of_table(m.src, name)
    return make_db_morphism(db2, db1, {name: name}, {}, {name: dict(m.col_map)}, m.info, {name: dict(m.key_map)})


def generality_order(E: Classification) -> list[tuple[str, str]]:
    """Pairs (x', x) with extent(x') a superset of extent(x)."""
    ext = {x: set(extent(E, x)) for x in E.types}
    return [(a, b) for a in E.types for b in E.types if ext[a] >= ext[b]]


def up_set(E: Classification, x: str) -> list[str]:
    ext = set(extent(E, x))
    return [a for a in E.types if set(extent(E, a)) >= ext]


def db_of_classification(E: Classification) -> Database:
    """A classification as a database: one relation per type, keyed by its extent,
    over the columns of its principal filter, every row a constant tuple."""
    rel_cat = preorder_category(E.types, generality_order(E))
    sig_at = {x: Signature({a: a for a in up_set(E, x)}, E.types) for x in E.types}
    sig_morph = {}
    key_maps = {}
    for a, (x2, x) in rel_cat.arrows.items():
        sig_morph[a] = {c: c for c in sig_at[x2].arity}
        key_maps[a] = {y: y for y in extent(E, x)}
    schema = make_db_schema(rel_cat, E.types, sig_at, sig_morph)
    tup_at = {x: {y: {c: y for c in sig_at[x].arity} for y in extent(E, x)} for x in E.types}
    return make_database(schema, E, {x: extent(E, x) for x in E.types}, key_maps, tup_at)


def db_morphism_of_infomorphism(m: Infomorphism) -> DatabaseMorphism:
    E2, E1 = m.source, m.target
    f, g = m.type_map, m.inst_map
    db2, db1 = db_of_classification(E2), db_of_classification(E1)
    R1 = db1.schema.rel_cat
    obj_map = dict(f)
    arrow_map = {}
    for a, (x2a, x2b) in db2.schema.rel_cat.arrows.items():
        image = R1.hom(f[x2a], f[x2b])
        if not image:
            raise InternalError(f"type map is not monotone on {a}")
        arrow_map[a] = image[0]
    theta = {x2: {c: f[c] for c in db2.tables[x2].columns} for x2 in E2.types}
    kappa = {x2: {y1: g[y1] for y1 in extent(E1, f[x2])} for x2 in E2.types}
    report = check_db_morphism(db2, db1, obj_map, arrow_map, theta, f, g, kappa)
    if report:
        raise InternalError("infomorphism did not yield a database morphism: " + "; ".join(map(str, report[:5])))
    return DatabaseMorphism(db2, db1, obj_map, arrow_map, theta, m, kappa)
