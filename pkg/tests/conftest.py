import numpy as np
import pytest

from chronon.ensembles import ginibre, random_density
from chronon.mmalg import AlgElement


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rand_herm(n, rng):
    g = ginibre(n, n, rng)
    return (g + g.conj().T) / 2


def rand_state(n, rng, env=None):
    return AlgElement.from_matrix(random_density(n, env or n, rng))


def epr():
    v = np.array([0, 1, -1, 0]) / np.sqrt(2)
    return np.outer(v, v).astype(complex)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion; echoed in the terminal summary."""
    def record(number, title, checks):
        failed = [name for name, ok in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"{status} criterion {number}: {title}"
        if failed:
            line += " (failed: " + "; ".join(failed) + ")"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return not failed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
