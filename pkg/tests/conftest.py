import time
from contextlib import contextmanager

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_CRITERIA = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


class _Checks:
    def __init__(self):
        self.failures = []
        self.notes = []

    def note(self, text):
        self.notes.append(text)

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)
        return ok


@pytest.fixture
def criterion(request):
    """``with criterion(k, title, budget_s) as ck: ck.check(cond, msg)``; one summary line per use."""
    lines = request.config.stash.setdefault(_CRITERIA, [])

    @contextmanager
    def run(number, title, budget=None):
        ck = _Checks()
        start = time.perf_counter()
        try:
            yield ck
        except Exception as exc:
            ck.failures.append(f"{type(exc).__name__}: {exc}")
        elapsed = time.perf_counter() - start
        if budget is not None and elapsed > budget:
            ck.failures.append(f"took {elapsed:.2f} s, budget {budget} s")
        status = "PASS" if not ck.failures else "FAIL"
        line = f"criterion {number:>2} {status}  {title}  ({elapsed:.2f} s)"
        if ck.failures:
            line += "  " + "; ".join(ck.failures[:3])
        elif ck.notes:
            line += "  " + "; ".join(ck.notes)
        lines.append((number, line))
        print("\n" + line)
        assert not ck.failures, line

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
