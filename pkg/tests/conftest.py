import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dagsched.datagen import random_instance  # noqa: E402
from dagsched.formats import load_instance  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
P0_PATH = ROOT / "fixtures" / "p0.json"


@pytest.fixture(scope="session")
def p0():
    return load_instance(P0_PATH)


@pytest.fixture(scope="session")
def small_instances():
    return [random_instance(seed) for seed in range(40)]


@pytest.fixture(scope="session")
def tiny_instances():
    return [random_instance(1000 + seed, n_range=(1, 4), max_pools=3) for seed in range(25)]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
