import random
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
sys.path.insert(0, str(TESTS))

from mtx import parse_class_model  # noqa: E402
from oracle import Rejected, nesting_depth  # noqa: E402
from randmodels import random_description, render  # noqa: E402

GOLDEN = TESTS / "golden"
FIXTURES = TESTS / "fixtures"
CORPUS = TESTS / "corpus"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def load(name: str):
    path = FIXTURES / name if (FIXTURES / name).exists() else GOLDEN / name
    return parse_class_model(path.read_text(), str(path))


def valid_descriptions(count: int, seed: int = 0, max_depth: int = 3, require_tables: bool = False):
    """First ``count`` random descriptions the reference accepts, with nesting <= max_depth.

    With ``require_tables`` only models with at least one persistent class count.
    """
    out = []
    s = seed
    while len(out) < count:
        desc = random_description(random.Random(s))
        s += 1
        if require_tables and not any(c["persistent"] for c in desc["classes"]):
            continue
        try:
            if nesting_depth(desc) <= max_depth:
                out.append(desc)
        except Rejected:
            pass
    return out


@pytest.fixture
def golden_model():
    return parse_class_model((GOLDEN / "benchmark.cm").read_text())


@pytest.fixture(scope="session")
def random_corpus():
    return [(d, render(d)) for d in valid_descriptions(200, seed=10_000)]


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.summary_lines():
        terminalreporter.write_line(line)
