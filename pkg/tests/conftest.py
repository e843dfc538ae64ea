from pathlib import Path

import pytest
from hypothesis import assume, settings

from mapfdl.generator import PlacementError, generate_random_instance
from mapfdl.instance import make_instance

# property tests draw the same examples on every run
settings.register_profile("repro", derandomize=True)
settings.load_profile("repro")

FIXTURES = Path(__file__).parent / "fixtures"

ACCEPTANCE_LINES: list[str] = []

# running example: v1..v5 -> ids 0..4; a1 (v1 -> v5) is 3 steps away, a2 (v2 -> v4) one
V1, V2, V3, V4, V5 = range(5)
RUNNING_EDGES = [(V1, V2), (V2, V3), (V2, V4), (V3, V5), (V4, V5)]


@pytest.fixture
def running_example():
    return make_instance(5, RUNNING_EDGES, [(V1, V5), (V2, V4)], 2)


@pytest.fixture
def single_edge():
    return make_instance(2, [(0, 1)], [(0, 1)], 1)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def generate_or_reject(*args, **kwargs):
    """Random instance for a property test; draws that cannot be placed are rejected."""
    try:
        return generate_random_instance(*args, **kwargs)
    except PlacementError:
        assume(False)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
