import itertools
import random

import pytest

from catdb import company
from catdb.core import Signature, compose_infomorphisms, identity_infomorphism, make_infomorphism
from catdb.errors import MismatchError, SizeCapError, ValidationError
from catdb.limits import pullback
from catdb.random_data import random_chain, random_classification, random_diagram, random_infomorphism
from catdb.table import (
    base_change_morphism, check_table_morphism, compose_table_morphisms, identity_morphism, make_table,
    migrate, same_morphism, tables_isomorphic,
)


def ident(E):
    m = identity_infomorphism(E)
    return m.type_map, m.inst_map


class TestMakeTable:
    def test_emp(self, E):
        T = company.emp(E)
        assert len(T.keys) == 3 and T.columns == ("addr", "dept", "name")

    def test_empty(self, E):
        T = make_table(Signature({"x": "Str"}, E.types), E, [])
        assert T.keys == () and T.content == {}

    def test_domain_violation(self, E):
        rows = dict(company.EMPLOYEES)
        rows["e1"] = dict(rows["e1"], dept="Greece")
        with pytest.raises(ValidationError) as exc:
            make_table(Signature({"name": "Str", "addr": "Str", "dept": "Dept"}, E.types), E, rows.items())
        assert [v.where for v in exc.value.report] == [("e1", "dept", "Greece")]

    def test_duplicate_key(self, E):
        sig = Signature({"d": "Dept"}, E.types)
        with pytest.raises(ValidationError) as exc:
            make_table(sig, E, [("a", {"d": "d1"}), ("a", {"d": "d2"})])
        assert exc.value.report[0].kind == "entity-integrity"

    def test_rows_classified(self, rng):
        for _ in range(30):
            d = random_diagram(rng)
            for T in d.tables.values():
                for k in T.keys:
                    assert all(T.cls.holds(T.content[k][c], s) for c, s in T.sig.sorts.items())


class TestTableMorphism:
    def test_identity(self, E):
        T = company.emp(E)
        f, g = ident(E)
        assert check_table_morphism(T, T, {c: c for c in T.columns}, f, g, {k: k for k in T.keys}) == []

    def test_emp_to_dref(self, E):
        f, g = ident(E)
        k = {"e1": "d1", "e2": "d2", "e3": "d1"}
        assert check_table_morphism(company.emp(E), company.dref(E), {"d": "dept"}, f, g, k) == []

    def test_broken_key(self, E):
        f, g = ident(E)
        k = {"e1": "d1", "e2": "d1", "e3": "d1"}
        report = check_table_morphism(company.emp(E), company.dref(E), {"d": "dept"}, f, g, k)
        assert [(v.where, v.message) for v in report] == [(("e2", "d"), "d1 != d2")]

    def test_figure_biconditional(self, rng):
        for _ in range(20):
            E1 = random_classification(rng)
            m = random_infomorphism(rng, E1)
            d = random_diagram(rng, E1, n_objects=1, edges={})
            T1 = d.tables["j0"]
            bc = base_change_morphism(T1, m)
            s2 = bc.dst.sig.sorts
            for k1 in T1.keys:
                for i2, i1 in bc.col_map.items():
                    v = T1.content[k1][i1]
                    assert m.source.holds(m.inst_map[v], s2[i2])
                    assert E1.holds(v, m.type_map[s2[i2]])


class TestComposition:
    def test_identity_identity(self, E):
        i = identity_morphism(company.emp(E))
        assert same_morphism(compose_table_morphisms(i, i), i)

    def test_unit(self, E):
        m = company.emp_to_dref(E)
        assert same_morphism(compose_table_morphisms(m, identity_morphism(m.dst)), m)
        assert same_morphism(compose_table_morphisms(identity_morphism(m.src), m), m)

    def test_join_projection(self, E):
        lim = pullback(company.emp_to_dref(E), company.dept_self_to_dref(E))
        via_emp = compose_table_morphisms(lim.projections["A"], company.emp_to_dref(E))
        assert same_morphism(via_emp, lim.projections["C"])

    def test_boundary_mismatch(self, E):
        with pytest.raises(MismatchError):
            compose_table_morphisms(company.emp_to_dref(E), company.emp_to_dref(E))

    def test_category_laws(self, rng):
        for _ in range(60):
            a, b, c = random_chain(rng)
            assert same_morphism(compose_table_morphisms(compose_table_morphisms(a, b), c),
                                 compose_table_morphisms(a, compose_table_morphisms(b, c)))
            assert same_morphism(compose_table_morphisms(identity_morphism(a.src), a), a)
            assert same_morphism(compose_table_morphisms(a, identity_morphism(a.dst)), a)
            ab = compose_table_morphisms(a, b)
            f, g = ident(a.src.cls)
            assert check_table_morphism(ab.src, ab.dst, ab.col_map, f, g, ab.key_map) == []


class TestMigrate:
    def test_identity(self, E):
        T = company.emp(E)
        M = migrate(T, identity_infomorphism(E))
        assert M.columns == ("addr@Str", "dept@Dept", "name@Str")
        assert tables_isomorphic(T, M) is not None

    def test_emp_person(self, E, person):
        P, f, g = person
        M = migrate(company.emp(E), make_infomorphism(P, E, f, g))
        assert M.columns == () and len(M.keys) == 3
        assert all(M.content[k] == {} for k in M.keys)

    def test_dept_person(self, E, person):
        P, f, g = person
        M = migrate(company.dept(E), make_infomorphism(P, E, f, g))
        assert M.columns == ("mngr@Person",)
        assert M.content == {"d1": {"mngr@Person": "p"}, "d2": {"mngr@Person": "p"}}

    def test_mismatch(self, E, person):
        P, f, g = person
        m = make_infomorphism(P, E, f, g)
        with pytest.raises(MismatchError):
            migrate(migrate(company.emp(E), m), m)

    def test_functoriality(self, rng):
        for _ in range(40):
            E1 = random_classification(rng)
            m1 = random_infomorphism(rng, E1, prefix="u")
            m2 = random_infomorphism(rng, m1.source, prefix="v")
            T = random_diagram(rng, E1, n_objects=1, edges={}).tables["j0"]
            stepwise = migrate(migrate(T, m1), m2)
            direct = migrate(T, compose_infomorphisms(m1, m2))
            assert tables_isomorphic(stepwise, direct) is not None
            assert tables_isomorphic(migrate(T, identity_infomorphism(E1)), T) is not None

    def test_base_change_is_morphism(self, rng):
        for _ in range(30):
            E1 = random_classification(rng)
            m = random_infomorphism(rng, E1)
            T = random_diagram(rng, E1, n_objects=1, edges={}).tables["j0"]
            bc = base_change_morphism(T, m)
            assert check_table_morphism(bc.src, bc.dst, bc.col_map, m.type_map, m.inst_map, bc.key_map) == []


def brute_iso(T1, T2):
    """Exhaustive search over all column and key bijections."""
    if len(T1.columns) != len(T2.columns) or len(T1.keys) != len(T2.keys):
        return False
    for cols in itertools.permutations(T2.columns):
        cm = dict(zip(T1.columns, cols))
        if any(T1.sig.sorts[c] != T2.sig.sorts[cm[c]] for c in T1.columns):
            continue
        for keys in itertools.permutations(T2.keys):
            km = dict(zip(T1.keys, keys))
            if all(T1.content[k][c] == T2.content[km[k]][cm[c]] for k in T1.keys for c in T1.columns):
                return True
    return False


class TestIsomorphism:
    def test_renamed_columns(self, E):
        T = company.emp(E)
        R = make_table(Signature({"n": "Str", "a": "Str", "x": "Dept"}, E.types), E,
                       [(k, {"n": r["name"], "a": r["addr"], "x": r["dept"]}) for k, r in company.EMPLOYEES.items()])
        w = tables_isomorphic(T, R)
        assert w.col_map == {"addr": "a", "dept": "x", "name": "n"}
        fwd, bwd = w.morphisms(T, R)
        assert same_morphism(compose_table_morphisms(fwd, bwd), identity_morphism(T))

    def test_different_arity(self, E):
        assert tables_isomorphic(company.emp(E), company.dept(E)) is None

    def test_rekeyed(self, E):
        T = company.emp(E)
        names = {"e1": "a", "e2": "b", "e3": "c"}
        R = make_table(T.sig, E, [(names[k], T.content[k]) for k in T.keys])
        assert tables_isomorphic(T, R).key_map == names

    def test_size_cap(self, E):
        sig = Signature({f"c{n}": "Str" for n in range(11)}, E.types)
        T = make_table(sig, E, [("k", {c: "Plato" for c in sig.arity})])
        with pytest.raises(SizeCapError):
            tables_isomorphic(T, T)

    def test_against_brute_force(self):
        rng = random.Random(7)
        E = random_classification(rng, max_types=2, max_instances=3)
        for _ in range(150):
            d = random_diagram(rng, E, n_objects=2, edges={}, max_keys=3, max_cols=3)
            T1, T2 = d.tables["j0"], d.tables["j1"]
            assert (tables_isomorphic(T1, T2) is not None) == brute_iso(T1, T2)
            shuffled = list(T1.keys)
            rng.shuffle(shuffled)
            T3 = make_table(T1.sig, E, [(f"z{k}", T1.content[k]) for k in shuffled])
            assert tables_isomorphic(T1, T3) is not None
