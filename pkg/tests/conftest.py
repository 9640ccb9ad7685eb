import re

import numpy as np
import pytest

from entroland.experiments import build_problem, load_spec

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def problems():
    """Bundled problems built once per session, keyed by config name."""
    cache = {}

    def get(name, **kw):
        key = (name, tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = (load_spec(name), build_problem(load_spec(name), **kw))
        return cache[key]

    return get


class Verdict:
    """Collects the checks of one acceptance criterion."""

    def __init__(self, number):
        self.number = number
        self.checks = []
        self.done = False

    def check(self, ok, detail):
        self.checks.append((bool(ok), detail))
        return bool(ok)

    def finish(self):
        self.done = True
        failed = [d for ok, d in self.checks if not ok]
        assert not failed, "; ".join(failed)

    def line(self):
        ok = self.done and all(ok for ok, _ in self.checks)
        shown = [d for c, d in self.checks if not c] if not ok else [d for _, d in self.checks]
        if not self.done and not shown:
            shown = ["did not complete"]
        return f"criterion {self.number:>2}: {'PASS' if ok else 'FAIL'}  " + "; ".join(shown)


@pytest.fixture
def criterion(request):
    number = int(re.search(r"criterion_(\d+)", request.node.name).group(1))
    v = Verdict(number)
    yield v
    line = v.line()
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
