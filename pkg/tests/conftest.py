import os

import pytest
from hypothesis import settings

from seedtree.addressing import hash_bit

settings.register_profile("ci", max_examples=60, deadline=None)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-scale reproductions")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def items_with_prefix(prefix, seed, count=1, start=0, exclude=()):
    """Brute-force item ids whose address starts with ``prefix``."""
    found = []
    v = start
    while len(found) < count:
        if v not in exclude and all(hash_bit(v, seed, i) == b for i, b in enumerate(prefix)):
            found.append(v)
        v += 1
    return found


class ScriptedRandom:
    """Stand-in rng whose randrange() replays a fixed script of choices."""

    def __init__(self, script):
        self.script = list(script)
        self.calls = []

    def randrange(self, n, *args, **kwargs):
        k = self.script.pop(0)
        assert 0 <= k < n, (k, n)
        self.calls.append(n)
        return k


@pytest.fixture
def prefix_items():
    return items_with_prefix


ACCEPTANCE_LINES = []


def record_criterion(name, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
