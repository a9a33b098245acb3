import numpy as np
import pytest

from sbmbp.model import BlockModelSpec, Network, SymmetricFamily, sample_network

ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    """Collect one pass/fail line per acceptance criterion for the summary."""

    def _record(number, name, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {name} {detail}".rstrip())
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


def random_tree(n, rng):
    """Uniform random recursive tree on ``n`` nodes."""
    edges = [(int(rng.integers(0, k)), k) for k in range(1, n)]
    return np.array(edges, dtype=np.int64).reshape(-1, 2)


def random_spec(n, q, rng, c_max=5.0):
    gamma = rng.dirichlet(np.full(q, 2.0))
    gamma = np.clip(gamma, 0.05, None)
    gamma /= gamma.sum()
    a = rng.uniform(0.2, c_max, size=(q, q))
    return BlockModelSpec(n, gamma, (a + a.T) / 2)


@pytest.fixture
def tree_factory():
    def make(n, q, seed):
        rng = np.random.default_rng(seed)
        spec = random_spec(n, q, rng)
        return Network(n, random_tree(n, rng), rng.integers(0, q, size=n), spec)

    return make


@pytest.fixture(scope="session")
def small_sbm():
    fam = SymmetricFamily(q=3, c=4.0, epsilon=3.0, delta=0.2)
    return sample_network(fam.spec(600), 11)
