import numpy as np
import pytest

from ramsia.model import ProblemInstance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def sparse_instance(rng, n=100, m=60, s=10, diffs=(), normalize=True):
    """Small random instance used across the solver tests."""
    x = np.zeros(n)
    x[rng.choice(n, s, replace=False)] = rng.standard_normal(s)
    zs = []
    for d in diffs:
        dd = np.zeros(n)
        dd[rng.choice(n, d, replace=False)] = rng.standard_normal(d)
        zs.append(x - dd)
    phi = rng.standard_normal((m, n))
    if normalize:
        phi /= np.sqrt(m)
    return ProblemInstance(phi, phi @ x, tuple(zs), x)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
