import pytest

from catdb import company
from catdb.core import Signature
from catdb.database import generality_order
from catdb.errors import ValidationError
from catdb.fincat import (
    Cone, check_cone, check_diagram, discrete_category, free_category, make_diagram, make_fincat, opposite,
    preorder_category, span_category, terminal_category,
)
from catdb.limits import limit
from catdb.random_data import random_diagram
from catdb.table import TableMorphism, compose_table_morphisms, identity_morphism, make_table, make_table_morphism, same_morphism


def span_diagram(E, emp_keys=None):
    emp, dref, dself = company.emp(E), company.dref(E), company.dept_self(E)
    k = emp_keys or {"e1": "d1", "e2": "d2", "e3": "d1"}
    return span_category("Emp", "DeptSelf", "DRef", "p", "q"), {"Emp": emp, "DeptSelf": dself, "DRef": dref}, k


class TestMakeFincat:
    def test_terminal(self):
        C = terminal_category("1")
        assert C.objects == ("1",) and list(C.arrows) == ["1_1"]

    def test_span(self):
        C = span_category()
        assert len(C.objects) == 3 and len(C.non_identity_arrows()) == 2
        assert C.then("1_A", "l") == "l"

    def test_preorder_from_ab(self, AB):
        C = preorder_category(AB.types, generality_order(AB))
        assert C.non_identity_arrows() == ["B->A"]
        assert C.arrows["B->A"] == ("B", "A")

    def test_missing_composite(self):
        with pytest.raises(ValidationError) as exc:
            make_fincat(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c")})
        assert ("f", "g") in [v.where for v in exc.value.report]

    def test_associativity_failure(self):
        # one object, two non-identity idempotent-ish arrows with a non-associative table
        arrows = {"x": ("o", "o"), "y": ("o", "o")}
        comp = {("x", "x"): "y", ("x", "y"): "x", ("y", "x"): "y", ("y", "y"): "y"}
        with pytest.raises(ValidationError) as exc:
            make_fincat(["o"], arrows, comp)
        assert any(v.kind == "associativity" for v in exc.value.report)

    def test_identity_law_failure(self):
        with pytest.raises(ValidationError):
            make_fincat(["o"], {"x": ("o", "o")}, {("1_o", "x"): "1_o", ("x", "x"): "x"})

    def test_free_category_paths(self):
        C = free_category(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c"), "h": ("a", "c")})
        assert set(C.hom("a", "c")) == {"f;g", "h"}
        assert C.then("f", "g") == "f;g"

    def test_free_category_rejects_cycles(self):
        with pytest.raises(ValidationError):
            free_category(["a", "b"], {"f": ("a", "b"), "g": ("b", "a")})

    def test_opposite_involution(self):
        C = free_category(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c")})
        assert opposite(opposite(C)) == C
        assert opposite(C).then("g", "f") == "f;g"

    def test_laws_exhaustive(self, rng):
        for _ in range(30):
            d = random_diagram(rng)
            C = d.shape
            for a in C.arrows:
                assert C.then(C.identities[C.dom(a)], a) == a == C.then(a, C.identities[C.cod(a)])
            for a, b in C.composable_pairs():
                for c in C.arrows:
                    if C.cod(b) == C.dom(c):
                        assert C.then(C.then(a, b), c) == C.then(a, C.then(b, c))


class TestDiagram:
    def test_single_table(self, E):
        d = make_diagram(terminal_category("Emp"), {"Emp": company.emp(E)}, {})
        assert same_morphism(d.morphisms["1_Emp"], identity_morphism(company.emp(E)))

    def test_span(self, E):
        shape, tables, k = span_diagram(E)
        d = make_diagram(shape, tables, {"p": company.emp_to_dref(E), "q": company.dept_self_to_dref(E)})
        assert set(d.tables) == {"Emp", "DeptSelf", "DRef"}

    def test_broken_key_map(self, E):
        shape, tables, _ = span_diagram(E)
        broken = TableMorphism(tables["Emp"], tables["DRef"], {"d": "dept"}, company.emp_to_dref(E).info,
                               {"e1": "d1", "e2": "d1", "e3": "d1"})
        report = check_diagram(shape, tables, {"p": broken, "q": company.dept_self_to_dref(E)})
        assert any(v.where[0] == "p" and "e2" in v.where for v in report)

    def test_functoriality_failure(self, E):
        C = free_category(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c")})
        T = company.dref(E)
        swap = make_table_morphism(T, T, {"d": "d"}, {"d1": "d1", "d2": "d2"})
        report = check_diagram(C, {"a": T, "b": T, "c": T}, {"f": swap, "g": swap, "f;g": swap})
        assert report == []
        collapse = TableMorphism(T, T, {"d": "d"}, swap.info, {"d1": "d2", "d2": "d2"})
        report = check_diagram(C, {"a": T, "b": T, "c": T}, {"f": swap, "g": swap, "f;g": collapse})
        assert report

    def test_random_diagrams_are_functors(self, rng):
        for _ in range(30):
            d = random_diagram(rng)
            for (a, b), c in d.shape.composition.items():
                assert same_morphism(compose_table_morphisms(d.morphisms[a], d.morphisms[b]), d.morphisms[c])


class TestCone:
    def test_limit_cone(self, E):
        shape, tables, _ = span_diagram(E)
        d = make_diagram(shape, tables, {"p": company.emp_to_dref(E), "q": company.dept_self_to_dref(E)})
        lim = limit(d)
        assert check_cone(d, Cone(lim.table, lim.projections)) == []

    def _apex_cone(self, E, dept_key="d1", dept_col="d", row_extra=None):
        shape, tables, _ = span_diagram(E)
        d = make_diagram(shape, tables, {"p": company.emp_to_dref(E), "q": company.dept_self_to_dref(E)})
        sig = Signature({"n": "Str", "a": "Str", "d": "Dept", "dd": "Dept", "dn": "Str", "m": "Emp"}, E.types)
        row = {"n": "Plato", "a": "Greece", "d": "d1", "dd": "d1", "dn": "Sales", "m": "e3", **(row_extra or {})}
        apex = make_table(sig, E, [("w", row)])
        ident = company.emp_to_dref(E).info
        legs = {
            "Emp": TableMorphism(apex, tables["Emp"], {"name": "n", "addr": "a", "dept": "d"}, ident, {"w": "e1"}),
            "DeptSelf": TableMorphism(apex, tables["DeptSelf"], {"name": "dn", "mngr": "m", "d": dept_col},
                                      ident, {"w": dept_key}),
            "DRef": TableMorphism(apex, tables["DRef"], {"d": "d"}, ident, {"w": "d1"}),
        }
        return d, Cone(apex, legs)

    def test_one_row_apex(self, E):
        d, c = self._apex_cone(E)
        assert check_cone(d, c) == []

    def test_bad_leg(self, E):
        d, c = self._apex_cone(E, dept_key="d2")
        assert {v.kind for v in check_cone(d, c)} == {"leg"}

    def test_mismatched_legs_break_a_triangle(self, E):
        # every leg is a valid morphism, but DeptSelf and DRef disagree on the department
        d, c = self._apex_cone(E, dept_key="d2", dept_col="dd",
                               row_extra={"dd": "d2", "dn": "Production", "m": "e2"})
        report = check_cone(d, c)
        assert report and {v.kind for v in report} == {"triangle"}
        assert ("q", "DeptSelf", "DRef") in [v.where for v in report]

    def test_discrete_cone_has_no_triangles(self, E):
        d = make_diagram(discrete_category(["x"]), {"x": company.dref(E)}, {})
        assert check_cone(d, Cone(company.dref(E), {"x": identity_morphism(company.dref(E))})) == []
