import numpy as np
import pytest


def random_rank(m, n, r, rng):
    """m x n matrix of exact rank r with well-spread singular values."""
    U, _ = np.linalg.qr(rng.standard_normal((m, r)))
    V, _ = np.linalg.qr(rng.standard_normal((n, r)))
    s = rng.uniform(1.0, 5.0, r)
    return (U * s) @ V.T


def random_sym_rank(n, r, rng):
    U, _ = np.linalg.qr(rng.standard_normal((n, r)))
    s = rng.uniform(1.0, 5.0, r) * rng.choice([-1.0, 1.0], r)
    A = (U * s) @ U.T
    return 0.5 * (A + A.T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_criteria = {}


@pytest.fixture(scope="session")
def criteria():
    return _criteria


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: int(k.split()[0])):
        ok, detail = _criteria[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
