import pytest

from catdb import company
from catdb.core import Signature
from catdb.errors import MismatchError, ValidationError
from catdb.fincat import Cone, check_cone, discrete_category, free_category, make_diagram, terminal_category
from catdb.limits import TERMINAL_KEY, limit, mediating_morphism, pullback, select, terminal_table
from catdb.random_data import random_cone, random_diagram
from catdb.table import (
    check_table_morphism, compose_table_morphisms, identity_morphism, make_table, make_table_morphism,
    same_morphism, tables_isomorphic,
)
from oracles import all_maps, compatible_key_families, mediator_candidates


@pytest.fixture
def span(E):
    return pullback(company.emp_to_dref(E), company.dept_self_to_dref(E))


class TestTerminal:
    def test_shape(self, E):
        T = terminal_table(E)
        assert T.columns == () and T.keys == (TERMINAL_KEY,)

    def test_unique_morphism(self, E):
        emp, T = company.emp(E), terminal_table(E)
        valid = [k for k in all_maps(emp.keys, T.keys)
                 if not check_table_morphism(emp, T, {}, {x: x for x in E.types}, {y: y for y in E.instances}, k)]
        assert len(valid) == 1

    def test_empty_limit(self, E):
        d = make_diagram(discrete_category([]), {}, {}, E)
        assert tables_isomorphic(limit(d).table, terminal_table(E)) is not None


class TestPullback:
    def test_company_keys(self, span):
        assert span.table.keys == ("⟨e1,d1⟩", "⟨e2,d2⟩", "⟨e3,d1⟩")
        assert len(span.table.columns) == 5

    def test_company_row(self, span):
        row = span.table.content["⟨e1,d1⟩"]
        assert sorted(row.values()) == sorted(["Plato", "Greece", "d1", "Sales", "e3"])
        assert row["A.dept"] == "d1" and row["B.name"] == "Sales" and row["A.name"] == "Plato"

    def test_against_nested_loop(self, E, span):
        emp, dself = company.emp(E), company.dept_self(E)
        expected = {}
        for e in emp.keys:
            for d in dself.keys:
                if emp.content[e]["dept"] == dself.content[d]["d"]:
                    expected[(e, d)] = dict(emp.content[e], **{"B." + c: v for c, v in dself.content[d].items()})
        got = {span.families[k][:2]: span.table.content[k] for k in span.table.keys}
        assert set(got) == set(expected)
        for pair, row in got.items():
            assert row["A.name"] == expected[pair]["name"]
            assert row["A.addr"] == expected[pair]["addr"]
            assert row["B.mngr"] == expected[pair]["B.mngr"]

    def test_identity_legs(self, E):
        i = identity_morphism(company.emp(E))
        assert tables_isomorphic(pullback(i, i).table, company.emp(E)) is not None

    def test_disjoint_images(self, E):
        dref = company.dref(E)
        one = make_table(dref.sig, E, [("a", {"d": "d1"})])
        two = make_table(dref.sig, E, [("b", {"d": "d2"})])
        lim = pullback(make_table_morphism(one, dref, {"d": "d"}, {"a": "d1"}),
                       make_table_morphism(two, dref, {"d": "d"}, {"b": "d2"}))
        assert lim.table.keys == ()

    def test_mismatch(self, E):
        with pytest.raises(MismatchError):
            pullback(company.emp_to_dref(E), identity_morphism(company.emp(E)))


class TestLimit:
    def test_single_table(self, E):
        d = make_diagram(terminal_category("x"), {"x": company.emp(E)}, {})
        assert tables_isomorphic(limit(d).table, company.emp(E)) is not None

    def test_span_matches_pullback(self, E, span):
        from catdb.fincat import span_category
        d = make_diagram(span_category("Emp", "DeptSelf", "DRef", "p", "q"),
                         {"Emp": company.emp(E), "DeptSelf": company.dept_self(E), "DRef": company.dref(E)},
                         {"p": company.emp_to_dref(E), "q": company.dept_self_to_dref(E)})
        assert tables_isomorphic(limit(d).table, span.table) is not None

    def test_chain(self, E):
        d = make_diagram(free_category(["a", "b"], {"e": ("a", "b")}),
                         {"a": company.emp(E), "b": company.dref(E)}, {"e": company.emp_to_dref(E)})
        lim = limit(d)
        assert tables_isomorphic(lim.table, company.emp(E)) is not None
        assert sorted(lim.families.values()) == [("e1", "d1"), ("e2", "d2"), ("e3", "d1")]

    def test_oracle_equivalence(self, rng):
        for _ in range(100):
            d = random_diagram(rng)
            assert set(limit(d).families.values()) == compatible_key_families(d)

    def test_columns_are_sort_consistent_classes(self, rng):
        for _ in range(50):
            d = random_diagram(rng)
            lim = limit(d)
            members = [m for ms in lim.column_classes.values() for m in ms]
            assert sorted(members) == sorted((j, i) for j, T in d.tables.items() for i in T.columns)
            for col, ms in lim.column_classes.items():
                assert {d.tables[j].sig.sorts[i] for j, i in ms} == {lim.table.sig.sorts[col]}
                assert col == min(f"{j}.{i}" for j, i in ms)

    def test_projections_form_cone(self, rng):
        for _ in range(50):
            d = random_diagram(rng)
            lim = limit(d)
            assert check_cone(d, Cone(lim.table, lim.projections)) == []

    def test_idempotent(self, rng):
        for _ in range(20):
            lim = limit(random_diagram(rng))
            again = limit(make_diagram(terminal_category("L"), {"L": lim.table}, {}))
            assert tables_isomorphic(again.table, lim.table) is not None


class TestMediating:
    def test_limit_cone_gives_identity(self, rng):
        for _ in range(20):
            d = random_diagram(rng)
            lim = limit(d)
            m = mediating_morphism(d, lim, Cone(lim.table, lim.projections))
            assert same_morphism(m, identity_morphism(lim.table))

    def test_one_row_apex(self, E, span):
        from catdb.fincat import span_category
        d = make_diagram(span_category("A", "B", "C", "l", "r"),
                         {"A": company.emp(E), "B": company.dept_self(E), "C": company.dref(E)},
                         {"l": company.emp_to_dref(E), "r": company.dept_self_to_dref(E)})
        apex = make_table(Signature({"n": "Str", "a": "Str", "x": "Dept", "dn": "Str", "m": "Emp"}, E.types), E,
                          [("w", {"n": "Plato", "a": "Greece", "x": "d1", "dn": "Sales", "m": "e3"})])
        legs = {
            "A": make_table_morphism(apex, d.tables["A"], {"name": "n", "addr": "a", "dept": "x"}, {"w": "e1"}),
            "B": make_table_morphism(apex, d.tables["B"], {"name": "dn", "mngr": "m", "d": "x"}, {"w": "d1"}),
            "C": make_table_morphism(apex, d.tables["C"], {"d": "x"}, {"w": "d1"}),
        }
        m = mediating_morphism(d, span, Cone(apex, legs))
        assert m.key_map == {"w": "⟨e1,d1⟩"}

    def test_invalid_cone(self, E, span):
        from catdb.fincat import span_category
        d = make_diagram(span_category("A", "B", "C", "l", "r"),
                         {"A": company.emp(E), "B": company.dept_self(E), "C": company.dref(E)},
                         {"l": company.emp_to_dref(E), "r": company.dept_self_to_dref(E)})
        with pytest.raises(ValidationError):
            mediating_morphism(d, span, Cone(span.table, {}))

    def test_universal_property(self, rng):
        for _ in range(40):
            d = random_diagram(rng)
            lim = limit(d)
            for _ in range(5):
                cone = random_cone(rng, d)
                m = mediating_morphism(d, lim, cone)
                ident = m.info
                assert check_table_morphism(m.src, m.dst, m.col_map, ident.type_map, ident.inst_map, m.key_map) == []
                for j in d.shape.objects:
                    assert same_morphism(compose_table_morphisms(m, lim.projections[j]), cone.legs[j])
                cols, keys = mediator_candidates(d, lim.table, lim.projections, cone)
                assert all(len(v) == 1 for v in cols.values()) and all(len(v) == 1 for v in keys.values())
                assert {c: v[0] for c, v in cols.items()} == dict(m.col_map)
                assert {w: v[0] for w, v in keys.items()} == dict(m.key_map)


class TestSelect:
    def test_restricted_ref(self, E):
        ref = make_table(company.dref(E).sig, E, [("d1", {"d": "d1"})])
        res = select(company.emp(E), ref, {"d": "dept"})
        assert sorted(f[0] for f in res.families.values()) == ["e1", "e3"]

    def test_full_ref(self, E):
        res = select(company.emp(E), company.dref(E), {"d": "dept"})
        assert len(res.table.keys) == 3

    def test_empty_ref(self, E):
        ref = make_table(company.dref(E).sig, E, [])
        assert select(company.emp(E), ref, {"d": "dept"}).table.keys == ()

    def test_sort_mismatch(self, E):
        with pytest.raises(ValidationError):
            select(company.emp(E), company.dref(E), {"d": "name"})

    def test_filter_oracle(self, rng):
        for _ in range(40):
            d = random_diagram(rng, n_objects=2, edges={})
            T, ref = d.tables["j0"], d.tables["j1"]
            pairs = [(rc, tc) for rc in ref.columns for tc in T.columns if ref.sig.sorts[rc] == T.sig.sorts[tc]]
            if not pairs:
                continue
            binding = dict([rng.choice(pairs)])
            res = select(T, ref, binding)
            cols = sorted(binding)
            pairs_expected = sorted((t, r) for t in T.keys for r in ref.keys
                                    if all(T.content[t][binding[c]] == ref.content[r][c] for c in cols))
            assert sorted(res.families[k][:2] for k in res.table.keys) == pairs_expected
