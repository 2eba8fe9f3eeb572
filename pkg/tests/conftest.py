import time

import pytest

RESULTS = []


class Criterion:
    """Times one acceptance criterion and records a pass/fail line for the summary."""

    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.detail = ""

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is None and elapsed >= self.limit:
            self._record("FAIL", elapsed, f"runtime {elapsed:.2f}s over the {self.limit}s limit")
            raise AssertionError(f"criterion {self.number} took {elapsed:.2f}s, limit {self.limit}s")
        if exc_type is None:
            self._record("PASS", elapsed, self.detail)
        else:
            self._record("FAIL", elapsed, str(exc).splitlines()[0] if str(exc) else exc_type.__name__)
        return False

    def _record(self, status, elapsed, detail):
        line = f"{status} criterion {self.number:>2} [{elapsed:6.2f}s < {self.limit}s] {self.title}"
        if detail:
            line += f" :: {detail}"
        RESULTS.append(line)
        print(line)


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
