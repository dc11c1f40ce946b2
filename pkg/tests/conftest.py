import numpy as np
import pytest

from subrates.subordinators import SubordinatorSampler


@pytest.fixture
def unit_stable():
    """phi(u) = u^0.5."""
    return SubordinatorSampler.stable(0.5, 1.0, seed=20240611)


@pytest.fixture
def geometric_grid():
    return np.geomspace(1e-4, 1e4, 64)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one pass/fail line per acceptance criterion, then assert it."""

    def record(label, ok, detail, elapsed=None):
        timing = f" [{elapsed:.2f} s]" if elapsed is not None else ""
        line = f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}{timing}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
