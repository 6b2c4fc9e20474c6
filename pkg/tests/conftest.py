import numpy as np
import pytest

from pcstar import CIStatement, Dag, GenConfig, WeightedDag, random_weighted_dag


def shift(*nodes):
    """Shift 1-based example labels to the 0-based node ids used by the package."""
    return tuple(v - 1 for v in nodes)


def stmt(i, j, *k):
    return CIStatement(i - 1, j - 1, frozenset(x - 1 for x in k))


def weighted(n, weights, exact=False):
    """Weighted DAG from a ``{(u, v): w}`` map given in 1-based labels."""
    return WeightedDag.from_weights(n, {shift(u, v): w for (u, v), w in weights.items()}, exact=exact)


def dag(n, *edges):
    return Dag(n, frozenset(shift(u, v) for u, v in edges))


# The 21-diamond: 2->1->3->4 and 2->4, with c24 < c21 c13 c34.
DIAMOND21 = {(2, 1): 2.0, (1, 3): 2.0, (3, 4): 2.0, (2, 4): 1.0}
# The diamond: 1->2->4, 1->3->4 with c12 c24 < c13 c34.
DIAMOND = {(1, 2): 1.0, (2, 4): 1.5, (1, 3): 2.0, (3, 4): 2.0}
CASSIOPEIA = ((1, 4), (2, 4), (2, 5), (3, 5))

DIAMOND21_CSTAR = {
    stmt(1, 4, 3),
    stmt(1, 4, 2, 3),
    stmt(2, 3, 1),
    stmt(2, 3, 1, 4),
    stmt(2, 4, 1),
    stmt(2, 4, 3),
    stmt(2, 4, 1, 3),
}
DIAMOND_CSTAR = {stmt(1, 4, 3), stmt(1, 4, 2, 3), stmt(2, 3, 1)}


@pytest.fixture
def diamond21():
    return weighted(4, DIAMOND21)


@pytest.fixture
def diamond():
    return weighted(4, DIAMOND)


@pytest.fixture
def cassiopeia():
    return dag(5, *CASSIOPEIA)


def random_dag(rng, n, p=0.4):
    """Erdos-Renyi DAG under a random node order."""
    order = rng.permutation(n)
    edges = [(int(order[a]), int(order[b])) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    return Dag(n, frozenset(edges))


def random_weights(rng, g, low=0.5, high=2.0):
    return {e: float(np.exp(rng.uniform(np.log(low), np.log(high)))) for e in sorted(g.edges)}


def random_model(seed, n, d):
    return random_weighted_dag(GenConfig(n=n, d=d, seed=seed))


def collider_cycle(m, source, rng, low=0.5, high=2.0):
    """Weighted m-cycle on nodes 0..m-1 whose only collider is node 0.

    ``source`` (1..m-1) is where both directed paths to node 0 start. When the
    source is a neighbour of node 0 the direct edge is made heavier than the
    long way round, so the cycle survives transitive reduction.
    """
    weights = {}
    for a, b in zip(range(source, m - 1), range(source + 1, m)):
        weights[(a, b)] = rng.uniform(low, high)
    weights[(m - 1, 0)] = rng.uniform(low, high)
    for a, b in zip(range(source, 1, -1), range(source - 1, 0, -1)):
        weights[(a, b)] = rng.uniform(low, high)
    weights[(1, 0)] = rng.uniform(low, high)
    if (source, 0) in weights:
        rest = [x for e, x in weights.items() if e != (source, 0)]
        weights[(source, 0)] = 2.0 * float(np.prod(rest))
    return WeightedDag.from_weights(m, {e: float(x) for e, x in weights.items()})


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def record():
    """Log one PASS/FAIL line per acceptance criterion; returns ``ok``."""

    def _record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
