"""Seeded generators of small classifications, diagrams, cones and morphisms.

Everything is driven by a ``random.Random`` instance so that a seed fixes the
whole stream. Generators retry internally until they produce a valid value;
they never return something the validators would reject.
"""

from __future__ import annotations

import itertools
import random
from .core import Classification, Infomorphism, Signature, extent, make_infomorphism
from .database import Database, DatabaseMorphism, database_of_diagram, make_database, make_db_morphism, make_db_schema
from .fincat import Cocone, Cone, TableDiagram, free_category, make_diagram, make_fincat
from .limits import UnionFind
from .table import TableMorphism, compose_table_morphisms, make_table, make_table_morphism


def random_classification(rng: random.Random, max_types: int = 3, max_instances: int = 6,
                          prefix: str = "") -> Classification:
    nx = rng.randint(1, max_types)
    ny = rng.randint(nx, max(nx, max_instances))
    types = [f"{prefix}x{n}" for n in range(nx)]
    insts = [f"{prefix}y{n}" for n in range(ny)]
    holds = {(y, x) for y in insts for x in types if rng.random() < 0.5}
    for x in types:
        if not any(t == x for _, t in holds):
            holds.add((rng.choice(insts), x))
    return Classification(tuple(types), tuple(insts), frozenset(holds))


def random_infomorphism(rng: random.Random, E1: Classification, max_types: int = 3,
                        extra_instances: int = 2, prefix: str = "u") -> Infomorphism:
    """A valid infomorphism E2 <-> E1 with a freshly generated E2.

    Instances of E1 with the same profile {x2 : y1 |= f(x2)} may share an
    image under g; the incidence of each image is that profile.
    """
    types2 = [f"{prefix}x{n}" for n in range(rng.randint(1, max_types))]
    f = {x2: rng.choice(E1.types) for x2 in types2}
    profile = {y1: frozenset(x2 for x2 in types2 if E1.holds(y1, f[x2])) for y1 in E1.instances}
    g, holds, insts = {}, set(), []
    by_profile: dict = {}
    for y1 in E1.instances:
        p = profile[y1]
        pool = by_profile.setdefault(p, [])
        if pool and rng.random() < 0.6:
            g[y1] = rng.choice(pool)
            continue
        y2 = f"{prefix}y{len(insts)}"
        insts.append(y2)
        pool.append(y2)
        g[y1] = y2
        holds |= {(y2, x2) for x2 in p}
    for _ in range(rng.randint(0, extra_instances)):
        y2 = f"{prefix}y{len(insts)}"
        insts.append(y2)
        holds |= {(y2, x2) for x2 in types2 if rng.random() < 0.5}
    E2 = Classification(tuple(types2), tuple(insts), frozenset(holds))
    return make_infomorphism(E2, E1, f, g)


def random_dag(rng: random.Random, n: int, edge_prob: float = 0.45, parallel_prob: float = 0.1) -> dict:
    objs = [f"j{i}" for i in range(n)]
    edges = {}
    for a, b in itertools.combinations(range(n), 2):
        if rng.random() < edge_prob:
            edges[f"e{a}{b}"] = (objs[a], objs[b])
            if rng.random() < parallel_prob:
                edges[f"e{a}{b}b"] = (objs[a], objs[b])
    return edges


def _try_table(rng, E: Classification, out_edges, built: dict, max_keys: int, max_cols: int):
    cols: list[tuple[str, str]] = []
    col_maps = {}
    for e, target in out_edges:
        T = built[target]
        h = {}
        for c in T.columns:
            sort = T.sig.sorts[c]
            same = [name for name, s in cols if s == sort]
            if same and (rng.random() < 0.5 or len(cols) >= max_cols):
                h[c] = rng.choice(same)
            elif len(cols) < max_cols:
                name = f"c{len(cols)}"
                cols.append((name, sort))
                h[c] = name
            else:
                return None
        col_maps[e] = h
    while len(cols) < max_cols and rng.random() < 0.4:
        cols.append((f"c{len(cols)}", rng.choice(E.types)))
    sig = Signature(dict(cols), E.types)
    nkeys = rng.randint(0, max_keys)
    if any(not built[t].keys for _, t in out_edges):
        nkeys = 0
    rows, key_maps = [], {e: {} for e, _ in out_edges}
    for n in range(nkeys):
        key = f"k{n}"
        for _ in range(20):
            choice = {e: rng.choice(built[t].keys) for e, t in out_edges}
            row, ok = {}, True
            for e, t in out_edges:
                for c, mine in col_maps[e].items():
                    v = built[t].content[choice[e]][c]
                    if row.setdefault(mine, v) != v:
                        ok = False
            if ok:
                break
        else:
            return None
        for name, sort in cols:
            row.setdefault(name, rng.choice(extent(E, sort)))
        rows.append((key, row))
        for e in choice:
            key_maps[e][key] = choice[e]
    return make_table(sig, E, rows), col_maps, key_maps


def random_diagram(rng: random.Random, E: Classification | None = None, max_tables: int = 4, max_keys: int = 4,
                   max_cols: int = 3, edges: dict | None = None, n_objects: int | None = None) -> TableDiagram:
    """A diagram over the free category of a random DAG (edges j_a -> j_b with a < b)."""
    E = E or random_classification(rng)
    n = n_objects if n_objects is not None else rng.randint(1, max_tables)
    edges = random_dag(rng, n) if edges is None else edges
    objs = [f"j{i}" for i in range(n)]
    shape = free_category(objs, edges)
    for _ in range(200):
        built, gen_maps = {}, {}
        for o in reversed(objs):
            out = [(e, t) for e, (s, t) in sorted(edges.items()) if s == o]
            made = _try_table(rng, E, out, built, max_keys, max_cols)
            if made is None:
                break
            built[o], cmaps, kmaps = made
            for e, t in out:
                gen_maps[e] = make_table_morphism(built[o], built[t], cmaps[e], kmaps[e])
        else:
            morphisms = {}
            for a in shape.non_identity_arrows():
                parts = a.split(";")
                m = gen_maps[parts[0]]
                for p in parts[1:]:
                    m = compose_table_morphisms(m, gen_maps[p])
                morphisms[a] = m
            return make_diagram(shape, built, morphisms, E)
    raise RuntimeError("could not generate a diagram; loosen the size limits")


def brute_force_families(d: TableDiagram) -> list[tuple[str, ...]]:
    """All arrow-compatible key families, by filtering the full product."""
    objs = list(d.shape.objects)
    out = []
    for fam in itertools.product(*(d.tables[j].keys for j in objs)):
        chosen = dict(zip(objs, fam))
        if all(m.key_map[chosen[d.shape.dom(a)]] == chosen[d.shape.cod(a)] for a, m in d.morphisms.items()):
            out.append(fam)
    return out


def brute_force_column_families(d: TableDiagram) -> list[tuple[str, ...]]:
    objs = list(d.shape.objects)
    out = []
    for fam in itertools.product(*(d.tables[j].columns for j in objs)):
        chosen = dict(zip(objs, fam))
        if len({d.tables[j].sig.sorts[chosen[j]] for j in objs}) > 1:
            continue
        if all(m.col_map[chosen[d.shape.cod(a)]] == chosen[d.shape.dom(a)] for a, m in d.morphisms.items()):
            out.append(fam)
    return out


def random_cone(rng: random.Random, d: TableDiagram, max_keys: int = 3) -> Cone:
    E = d.cls
    objs = list(d.shape.objects)
    fams = brute_force_families(d)
    picks = [rng.choice(fams) for _ in range(rng.randint(0, max_keys))] if fams else []
    uf = UnionFind((j, i) for j in objs for i in d.tables[j].columns)
    for a, m in d.morphisms.items():
        for i2, i in m.col_map.items():
            uf.union((d.shape.dom(a), i), (d.shape.cod(a), i2))
    classes = list(uf.classes().values())
    apex_cols: dict[str, str] = {}
    assign = {}
    values: dict[str, list[str]] = {}
    for members in classes:
        j0, i0 = members[0]
        sort = d.tables[j0].sig.sorts[i0]
        vals = [d.tables[j0].content[fam[objs.index(j0)]][i0] for fam in picks]
        reuse = [c for c, s in apex_cols.items() if s == sort and values[c] == vals]
        if reuse and rng.random() < 0.5:
            target = rng.choice(reuse)
        else:
            target = f"a{len(apex_cols)}"
            apex_cols[target] = sort
            values[target] = vals
        for m in members:
            assign[m] = target
    if rng.random() < 0.3:
        extra = f"a{len(apex_cols)}"
        apex_cols[extra] = rng.choice(E.types)
        values[extra] = [rng.choice(extent(E, apex_cols[extra])) for _ in picks]
    rows = [(f"w{n}", {c: values[c][n] for c in apex_cols}) for n in range(len(picks))]
    apex = make_table(Signature(apex_cols, E.types), E, rows)
    legs = {}
    for n, j in enumerate(objs):
        h = {i: assign[(j, i)] for i in d.tables[j].columns}
        k = {f"w{r}": picks[r][n] for r in range(len(picks))}
        legs[j] = make_table_morphism(apex, d.tables[j], h, k)
    return Cone(apex, legs)


def random_cocone(rng: random.Random, d: TableDiagram, max_cols: int = 3, extra_keys: int = 2) -> Cocone:
    E = d.cls
    objs = list(d.shape.objects)
    fams = brute_force_column_families(d)
    if objs:
        chosen = [rng.choice(fams) for _ in range(rng.randint(0, max_cols))] if fams else []
        apex_sorts = {f"a{n}": d.tables[objs[0]].sig.sorts[fam[0]] for n, fam in enumerate(chosen)}
    else:
        chosen = []
        apex_sorts = {f"a{n}": rng.choice(E.types) for n in range(rng.randint(0, max_cols))}
    uf = UnionFind((j, k) for j in objs for k in d.tables[j].keys)
    for a, m in d.morphisms.items():
        for k, k2 in m.key_map.items():
            uf.union((d.shape.dom(a), k), (d.shape.cod(a), k2))
    rows: dict[str, dict[str, str]] = {}
    key_of = {}
    for members in uf.classes().values():
        j0, k0 = members[0]
        row = {f"a{n}": d.tables[j0].content[k0][fam[objs.index(j0)]] for n, fam in enumerate(chosen)}
        same = [w for w, r in rows.items() if r == row]
        if same and rng.random() < 0.5:
            w = rng.choice(same)
        else:
            w = f"w{len(rows)}"
            rows[w] = row
        for m in members:
            key_of[m] = w
    for _ in range(rng.randint(0, extra_keys)):
        rows[f"w{len(rows)}"] = {c: rng.choice(extent(E, s)) for c, s in apex_sorts.items()}
    apex = make_table(Signature(apex_sorts, E.types), E, rows.items())
    legs = {}
    for n, j in enumerate(objs):
        h = {f"a{r}": fam[n] for r, fam in enumerate(chosen)}
        k = {kk: key_of[(j, kk)] for kk in d.tables[j].keys}
        legs[j] = make_table_morphism(d.tables[j], apex, h, k)
    return Cocone(apex, legs)


def random_chain(rng: random.Random, length: int = 3, E: Classification | None = None, **sizes) -> list[TableMorphism]:
    """``length`` composable fiber morphisms T0 -> T1 -> ... -> T_length."""
    edges = {f"e{i}{i + 1}": (f"j{i}", f"j{i + 1}") for i in range(length)}
    d = random_diagram(rng, E, edges=edges, n_objects=length + 1, **sizes)
    return [d.morphisms[f"e{i}{i + 1}"] for i in range(length)]



def random_database(rng: random.Random, E: Classification | None = None, **sizes) -> Database:
    return database_of_diagram(random_diagram(rng, E, **sizes))


def full_subdatabase(db: Database, objects) -> Database:
    """Restriction of ``db`` to the full subcategory on ``objects``."""
    C = db.schema.rel_cat
    keep = set(objects)
    arrows = {a: ends for a, ends in C.arrows.items() if ends[0] in keep and ends[1] in keep}
    comp = {pair: c for pair, c in C.composition.items() if pair[0] in arrows and pair[1] in arrows}
    cat = make_fincat(keep, arrows, comp, {o: C.identities[o] for o in keep})
    schema = make_db_schema(cat, db.schema.universe, {r: db.schema.sig_at[r] for r in keep},
                            {a: db.schema.sig_morph_at[a] for a in arrows})
    return make_database(schema, db.cls, {r: db.tables[r].keys for r in keep},
                         {a: db.key_map_at[a] for a in arrows}, {r: db.tables[r].content for r in keep})


def inclusion_morphism(small: Database, big: Database) -> DatabaseMorphism:
    objs = small.schema.rel_cat.objects
    return make_db_morphism(small, big, {o: o for o in objs}, {a: a for a in small.schema.rel_cat.arrows},
                            None, None, {r: {k: k for k in small.tables[r].keys} for r in objs})


def random_db_chain(rng: random.Random, length: int = 3, **sizes) -> list[DatabaseMorphism]:
    """Composable inclusions D0 -> D1 -> ... of nested full sub-databases."""
    db = random_database(rng, **sizes)
    objs = list(db.schema.rel_cat.objects)
    cuts = sorted(rng.randint(1, len(objs)) for _ in range(length))
    levels = [full_subdatabase(db, objs[:n]) for n in cuts] + [db]
    return [inclusion_morphism(a, b) for a, b in zip(levels, levels[1:])]
