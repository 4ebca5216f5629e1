"""The employee/department example as ready-made values.

Used by the test-suite, the ``selftest`` command and the README.
"""

from __future__ import annotations

from .core import Classification, Signature, make_classification
from .table import Table, make_table, make_table_morphism

EMPLOYEES = {
    "e1": {"name": "Plato", "addr": "Greece", "dept": "d1"},
    "e2": {"name": "Aquinus", "addr": "Italy", "dept": "d2"},
    "e3": {"name": "Decartes", "addr": "France", "dept": "d1"},
}
DEPARTMENTS = {
    "d1": {"name": "Sales", "mngr": "e3"},
    "d2": {"name": "Production", "mngr": "e2"},
}
STRINGS = ("Aquinus", "Decartes", "France", "Greece", "Italy", "Plato", "Production", "Sales")


def classification() -> Classification:
    holds = [(e, "Emp") for e in EMPLOYEES] + [(d, "Dept") for d in DEPARTMENTS] + [(s, "Str") for s in STRINGS]
    return make_classification(["Emp", "Dept", "Str"], list(EMPLOYEES) + list(DEPARTMENTS) + list(STRINGS), holds)


def emp(E: Classification | None = None) -> Table:
    E = E or classification()
    sig = Signature({"name": "Str", "addr": "Str", "dept": "Dept"}, E.types)
    return make_table(sig, E, EMPLOYEES.items())


def dept(E: Classification | None = None) -> Table:
    E = E or classification()
    sig = Signature({"name": "Str", "mngr": "Emp"}, E.types)
    return make_table(sig, E, DEPARTMENTS.items())


def dref(E: Classification | None = None) -> Table:
    """Single column d:Dept listing each department."""
    E = E or classification()
    return make_table(Signature({"d": "Dept"}, E.types), E, [(d, {"d": d}) for d in DEPARTMENTS])


def dept_self(E: Classification | None = None) -> Table:
    """Dept plus a self-reference column d."""
    E = E or classification()
    sig = Signature({"name": "Str", "mngr": "Emp", "d": "Dept"}, E.types)
    return make_table(sig, E, [(d, dict(row, d=d)) for d, row in DEPARTMENTS.items()])


def strings(E: Classification | None = None) -> Table:
    """The Str datatype as a one-column table keyed by its own values."""
    E = E or classification()
    return make_table(Signature({"str": "Str"}, E.types), E, [(s, {"str": s}) for s in STRINGS])


def emp_to_dref(E: Classification | None = None):
    E = E or classification()
    k = {e: row["dept"] for e, row in EMPLOYEES.items()}
    return make_table_morphism(emp(E), dref(E), {"d": "dept"}, k)


def dept_self_to_dref(E: Classification | None = None):
    E = E or classification()
    return make_table_morphism(dept_self(E), dref(E), {"d": "d"}, {d: d for d in DEPARTMENTS})
