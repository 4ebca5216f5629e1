import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catdb import company
from catdb.core import (
    Classification, Signature, check_infomorphism, check_signature_morphism, classify_tuple, compose_infomorphisms,
    extent, f_star, f_star_columns, identity_infomorphism, make_classification, make_infomorphism, sigma_f,
    tuple_transport, tuples_of,
)
from catdb.errors import TotalityError, ValidationError
from strategies import classification_with_infomorphism, classifications, infomorphisms_into

EMP_SIG = {"name": "Str", "addr": "Str", "dept": "Dept"}


class TestExtent:
    def test_company_emp(self, E):
        assert extent(E, "Emp") == ("e1", "e2", "e3")

    def test_empty_incidence(self):
        E = make_classification(["A"], ["y"], [])
        assert extent(E, "A") == ()

    def test_ab_fixture(self, AB):
        assert set(extent(AB, "B")) == {"y1", "y2"}
        assert extent(AB, "A") == ("y1",)

    def test_unknown_type(self, E):
        with pytest.raises(KeyError):
            extent(E, "Nope")

    @given(classifications())
    def test_extent_is_incidence(self, E):
        for x in E.types:
            for y in E.instances:
                assert (y in extent(E, x)) == ((y, x) in E.incidence)


class TestClassification:
    def test_rejects_undeclared(self):
        with pytest.raises(ValidationError):
            make_classification(["A"], ["y"], [("z", "A")])

    def test_rejects_duplicates(self):
        with pytest.raises(ValidationError):
            Classification(("A", "A"), (), frozenset())

    def test_canonical_order(self):
        E = make_classification(["b", "a"], ["z", "y"], [])
        assert E.types == ("a", "b") and E.instances == ("y", "z")


class TestClassifyTuple:
    def test_row_e1(self, E):
        sig = Signature(EMP_SIG, E.types)
        assert classify_tuple(E, sig, {"name": "Plato", "addr": "Greece", "dept": "d1"})

    def test_empty(self, E):
        assert classify_tuple(E, Signature({}, E.types), {})

    def test_wrong_sort(self, E):
        sig = Signature(EMP_SIG, E.types)
        assert not classify_tuple(E, sig, {"name": "Plato", "addr": "Greece", "dept": "e2"})

    def test_arity_mismatch_is_false(self, E):
        assert not classify_tuple(E, Signature(EMP_SIG, E.types), {"name": "Plato"})

    @given(classifications(max_types=3, max_instances=4), st.data())
    def test_pointwise(self, E, data):
        if not E.types:
            return
        cols = data.draw(st.dictionaries(st.sampled_from(["a", "b", "c"]), st.sampled_from(E.types), max_size=3))
        sig = Signature(cols, E.types)
        tup = {c: data.draw(st.sampled_from(E.instances)) for c in cols} if E.instances else {}
        if cols and not E.instances:
            return
        expected = all(tup[c] in extent(E, s) for c, s in cols.items())
        assert classify_tuple(E, sig, tup) == expected

    def test_tuples_of_enumerates_product(self, E):
        sig = Signature({"d": "Dept", "m": "Emp"}, E.types)
        tups = list(tuples_of(E, sig))
        assert len(tups) == 6 and tups[0] == {"d": "d1", "m": "e1"}
        assert all(classify_tuple(E, sig, t) for t in tups)


class TestInfomorphism:
    def test_identity(self, E):
        assert check_infomorphism(E, E, {x: x for x in E.types}, {y: y for y in E.instances}) == []

    def test_person(self, E, person):
        P, f, g = person
        assert check_infomorphism(P, E, f, g) == []

    def test_person_broken(self, E, person):
        P, f, g = person
        report = check_infomorphism(P, E, f, dict(g, Greece="p"))
        assert [v.where for v in report] == [("Greece", "Person")]

    def test_partial_map(self, E, person):
        P, f, g = person
        g = dict(g)
        del g["e1"]
        with pytest.raises(TotalityError):
            check_infomorphism(P, E, f, g)

    def test_escaping_map(self, E, person):
        P, f, g = person
        with pytest.raises(TotalityError):
            check_infomorphism(P, E, {"Person": "Robot"}, g)

    @settings(max_examples=60)
    @given(classification_with_infomorphism(), st.data())
    def test_composition_valid(self, pair, data):
        E1, m = pair
        m2 = data.draw(infomorphisms_into(m.source))
        c = compose_infomorphisms(m, m2)
        assert c.source == m2.source and c.target == E1
        assert check_infomorphism(c.source, c.target, c.type_map, c.inst_map) == []

    @given(classification_with_infomorphism())
    def test_identity_units(self, pair):
        _, m = pair
        assert compose_infomorphisms(m, identity_infomorphism(m.source)) == m
        assert compose_infomorphisms(identity_infomorphism(m.target), m) == m


class TestSignatures:
    def test_sigma_identity(self, E):
        sig = Signature(EMP_SIG, E.types)
        assert sigma_f(sig, {x: x for x in E.types}, E.types) == sig

    def test_sigma_person(self, E):
        assert sigma_f(Signature({"a": "Person"}, ["Person"]), {"Person": "Emp"}, E.types).sorts == {"a": "Emp"}

    def test_sigma_empty(self, E):
        assert sigma_f(Signature({}, ["Person"]), {"Person": "Emp"}, E.types) == Signature({}, E.types)

    def test_f_star_identity(self, E):
        cols = f_star_columns(Signature(EMP_SIG, E.types), {x: x for x in E.types}, E.types)
        assert set(cols.values()) == {("name", "Str"), ("addr", "Str"), ("dept", "Dept")}
        sig = f_star(Signature(EMP_SIG, E.types), {x: x for x in E.types}, E.types)
        assert sig.sorts == {"addr@Str": "Str", "dept@Dept": "Dept", "name@Str": "Str"}

    def test_f_star_emp_person(self, E):
        assert f_star(Signature(EMP_SIG, E.types), {"Person": "Emp"}, ["Person"]).arity == ()

    def test_f_star_dept_person(self, E):
        sig = f_star(Signature({"name": "Str", "mngr": "Emp"}, E.types), {"Person": "Emp"}, ["Person"])
        assert sig.sorts == {"mngr@Person": "Person"}

    def test_signature_morphism(self, E):
        emp = Signature(EMP_SIG, E.types)
        assert check_signature_morphism({c: c for c in EMP_SIG}, emp, emp) == []
        dref = Signature({"d": "Dept"}, E.types)
        assert check_signature_morphism({"d": "dept"}, dref, emp, {x: x for x in E.types}) == []
        bad = check_signature_morphism({"d": "name"}, dref, emp)
        assert [v.where for v in bad] == [("d", "name")]

    def test_signature_morphism_partial(self, E):
        with pytest.raises(TotalityError):
            check_signature_morphism({}, Signature({"d": "Dept"}, E.types), Signature(EMP_SIG, E.types))


class TestTransport:
    def test_identity(self):
        t = dict(company.EMPLOYEES["e1"])
        assert tuple_transport(t, {c: c for c in t}, {v: v for v in t.values()}) == t

    def test_dept_entry(self):
        assert tuple_transport(company.EMPLOYEES["e1"], {"d": "dept"}) == {"d": "d1"}

    def test_empty(self):
        assert tuple_transport(company.EMPLOYEES["e1"], {}) == {}

    @given(st.lists(st.sampled_from("abcd"), min_size=1, max_size=4, unique=True), st.data())
    def test_functoriality(self, cols, data):
        t1 = {c: f"v{n}" for n, c in enumerate(cols)}
        mid = data.draw(st.lists(st.sampled_from("pqr"), max_size=3, unique=True))
        h1 = {m: data.draw(st.sampled_from(cols)) for m in mid}
        last = data.draw(st.lists(st.sampled_from("uvw"), max_size=3, unique=True)) if mid else []
        h2 = {u: data.draw(st.sampled_from(mid)) for u in last}
        vals = sorted(set(t1.values()))
        g1 = {v: v.upper() for v in vals}
        g2 = {v.upper(): v.upper() + "!" for v in vals}
        direct = tuple_transport(t1, {u: h1[h2[u]] for u in h2}, {v: g2[g1[v]] for v in vals})
        stepwise = tuple_transport(tuple_transport(t1, h1, g1), h2, g2)
        assert direct == stepwise

    @settings(max_examples=60)
    @given(classification_with_infomorphism(), st.data())
    def test_preserves_classification(self, pair, data):
        E1, m = pair
        E2 = m.source
        src_cols = {f"c{n}": data.draw(st.sampled_from(E2.types)) for n in range(data.draw(st.integers(0, 3)))}
        src = Signature(src_cols, E2.types)
        dst = Signature({f"i{c}": m.type_map[s] for c, s in src_cols.items()}, E1.types)
        h = {c: f"i{c}" for c in src_cols}
        assert check_signature_morphism(h, src, dst, m.type_map) == []
        for t1 in list(tuples_of(E1, dst))[:20]:
            assert classify_tuple(E2, src, tuple_transport(t1, h, m.inst_map))

    def test_make_infomorphism_raises(self, E, person):
        P, f, g = person
        with pytest.raises(ValidationError):
            make_infomorphism(P, E, f, dict(g, Greece="p"))
