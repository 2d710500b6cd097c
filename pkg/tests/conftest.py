import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def random_descending(rng, n, low=-3.0, high=3.0):
    """A random strictly positive non-increasing sequence of length n."""
    return np.sort(np.exp(rng.uniform(low, high, size=n)))[::-1]


def record_acceptance(number, label, passed, detail):
    """Collect one acceptance verdict for the terminal summary."""
    verdict = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"criterion {number:2d}: {verdict}  {label}  [{detail}]")


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
