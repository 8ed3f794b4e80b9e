import numpy as np
import pytest
from hypothesis import strategies as st

from corescore.graph import WeightedGraph, build_graph, from_arrays


def path(n: int, weights=None) -> WeightedGraph:
    weights = weights or [1.0] * (n - 1)
    labels = "abcdefghijklmnopqrstuvwxyz"
    return build_graph([(labels[i], labels[i + 1], w) for i, w in zip(range(n - 1), weights)])


def star(leaves: int) -> WeightedGraph:
    return build_graph([("c", f"l{i}") for i in range(leaves)])


def cycle(n: int) -> WeightedGraph:
    return from_arrays([str(i) for i in range(n)], [(i, (i + 1) % n, 1.0) for i in range(n)])


def complete(n: int) -> WeightedGraph:
    return from_arrays([str(i) for i in range(n)], [(i, j, 1.0) for i in range(n) for j in range(i + 1, n)])


def random_graph(rng: np.random.Generator, n: int, density: float, weighted: bool = False) -> WeightedGraph:
    iu, ju = np.triu_indices(n, 1)
    hit = rng.random(len(iu)) < density
    w = rng.uniform(0.1, 3.0, hit.sum()) if weighted else np.ones(hit.sum())
    return from_arrays([str(i) for i in range(n)], zip(iu[hit], ju[hit], w))


def to_nx(g: WeightedGraph):
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_weighted_edges_from(g.edges())
    return h


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def exhaustive_max(g: WeightedGraph, values) -> tuple[float, np.ndarray]:
    """Maximum of v^T A v over all value-to-node assignments, by enumeration."""
    from itertools import permutations

    values = np.asarray(values, dtype=float)
    perms = np.array(list(permutations(range(g.n))))
    v = values[perms]
    r = np.einsum("pi,ij,pj->p", v, g.to_dense(), v)
    best = int(np.argmax(r))
    return float(r[best]), v[best]


@st.composite
def graphs(draw, max_n=12, weighted=True):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    if weighted:
        ws = draw(st.lists(st.floats(0.1, 5.0), min_size=len(chosen), max_size=len(chosen)))
    else:
        ws = [1.0] * len(chosen)
    return from_arrays([f"n{i}" for i in range(n)], [(i, j, w) for (i, j), w in zip(chosen, ws)])


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
