import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from catdb import company
from catdb.core import Classification, make_classification
from catdb.dsl import load_workspace

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "catdb" / "fixtures"


@pytest.fixture
def E() -> Classification:
    return company.classification()


@pytest.fixture
def AB() -> Classification:
    return make_classification(["A", "B"], ["y1", "y2"], [("y1", "A"), ("y1", "B"), ("y2", "B")])


@pytest.fixture
def person(E):
    """Person <-> COMPANY: f(Person)=Emp, employees go to p, everything else to q."""
    P = make_classification(["Person"], ["p", "q"], [("p", "Person")])
    g = {y: ("p" if y.startswith("e") else "q") for y in E.instances}
    return P, {"Person": "Emp"}, g


@pytest.fixture
def ws():
    return load_workspace([FIXTURES / "company.catdb", FIXTURES / "company_span.catdb"])


@pytest.fixture
def rng():
    return random.Random(20240607)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
