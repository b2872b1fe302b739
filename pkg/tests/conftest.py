import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- acceptance verdicts --------------------------------------------------------------

_VERDICTS = pytest.StashKey[dict]()


class Criterion:
    """Named sub-checks of one acceptance criterion plus its runtime budget."""

    def __init__(self, number: int, title: str, budget: float, sink: dict):
        import time

        self.number, self.title, self.budget = number, title, budget
        self.checks: dict[str, bool] = {}
        self.values: dict[str, object] = {}
        self._sink = sink
        self._clock = time.perf_counter
        self._start = self._clock()
        self.done = False

    def check(self, name: str, ok, value=None) -> None:
        self.checks[name] = bool(ok)
        if value is not None:
            self.values[name] = value

    def _line(self, elapsed: float, error: str = "") -> str:
        failed = [k for k, v in self.checks.items() if not v]
        verdict = "PASS" if self.checks and not failed and not error else "FAIL"
        if error:
            tail = f"error: {error}"
        elif failed:
            tail = "failed: " + ", ".join(f"{k}={self.values[k]!r}" if k in self.values else k for k in failed)
        else:
            tail = f"{len(self.checks)} checks"
        return f"{verdict} criterion {self.number:2d} ({self.title}) {elapsed:.1f}s/{self.budget:.0f}s  {tail}"

    def finish(self) -> None:
        elapsed = self._clock() - self._start
        self.check("runtime", elapsed < self.budget, round(elapsed, 1))
        line = self._line(elapsed)
        self._sink[self.number] = line
        self.done = True
        print(line)
        assert line.startswith("PASS"), line

    def abort(self, error: str) -> None:
        self._sink[self.number] = self._line(self._clock() - self._start, error)


@pytest.fixture
def criterion(request):
    made = []
    sink = request.config.stash.setdefault(_VERDICTS, {})

    def make(number: int, title: str, budget: float) -> Criterion:
        c = Criterion(number, title, budget, sink)
        made.append(c)
        return c

    yield make
    for c in made:
        if not c.done:
            c.abort("exception before completion")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = config.stash.get(_VERDICTS, {})
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for k in sorted(verdicts):
            terminalreporter.write_line(verdicts[k])
