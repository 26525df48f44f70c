import math

import numpy as np
import pytest

from framelab import VectorSystem


def random_vectors(rng, N, d, c1=None, c2=None):
    """Gaussian vectors, or vectors with |v|^2 ~ U[c1, c2] when bounds are given."""
    V = rng.standard_normal((N, d))
    if c1 is not None:
        V /= np.linalg.norm(V, axis=1)[:, None]
        V *= np.sqrt(rng.uniform(c1, c2, size=N))[:, None]
    return V


def random_corpus(seed, n, max_d=6, max_N=12):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        d = int(rng.integers(1, max_d + 1))
        N = int(rng.integers(1, max_N + 1))
        out.append(VectorSystem(random_vectors(rng, N, d)))
    return out


@pytest.fixture
def mercedes():
    s = math.sqrt(3) / 2
    return VectorSystem([[1.0, 0.0], [-0.5, s], [-0.5, -s]])


@pytest.fixture
def square_frame():
    return VectorSystem([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])


@pytest.fixture
def onb2():
    return VectorSystem(np.eye(2))


@pytest.fixture
def corpus():
    return random_corpus(20240601, 200)


#: (criterion, passed, detail) lines collected by the acceptance suite
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for name, ok, detail in ACCEPTANCE_LINES:
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
