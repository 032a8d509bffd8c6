import numpy as np
import pytest

from geometa.manifold import ProductPoint

ACCEPTANCE_LINES: list[str] = []


def random_orthogonal(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_spd(rng, d, floor=0.5):
    a = rng.standard_normal((d, d))
    return a @ a.T / d + floor * np.eye(d)


def random_point(rng, d):
    return ProductPoint(random_orthogonal(rng, d), random_orthogonal(rng, d), random_spd(rng, d))


def unit_columns(m):
    return m / np.linalg.norm(m, axis=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
