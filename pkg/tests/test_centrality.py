import math

import networkx as nx
import numpy as np
import pytest

from corescore.centrality import (
    ConvergenceError,
    Method,
    betweenness,
    closeness,
    compute,
    eigenvector_centrality,
)
from corescore.graph import build_graph, from_arrays

from conftest import complete, path, random_graph, star, to_nx


class TestCloseness:
    def test_path_middle(self):
        assert closeness(path(3)).values[1] == pytest.approx(2 / 3)

    def test_path_end(self):
        assert closeness(path(3)).values[0] == pytest.approx(1.0)

    def test_single_node(self):
        g = build_graph([], nodes=["x"])
        assert closeness(g).values.tolist() == [0.0]

    def test_weighted_mode(self):
        g = path(3, [2, 3])
        assert closeness(g, "weights").values.tolist() == pytest.approx([7 / 3, 5 / 3, 8 / 3])

    def test_disconnected_is_inf(self):
        g = build_graph([("a", "b"), ("c", "d")])
        assert all(math.isinf(x) for x in closeness(g).values)

    def test_matches_networkx(self, rng):
        # networkx reports (N-1) / sum of distances
        g = random_graph(rng, 20, 0.3)
        h = to_nx(g)
        ours = closeness(g).values
        ref = nx.closeness_centrality(h)
        for i in range(g.n):
            assert ours[i] == pytest.approx((g.n - 1) / ref[i] / g.n)


class TestBetweenness:
    def test_path(self):
        assert betweenness(path(3)).values.tolist() == [0, 2, 0]

    def test_complete(self):
        assert not betweenness(complete(4)).values.any()

    def test_star_center(self):
        g = star(3)
        assert betweenness(g).values[g.index("c")] == 6

    def test_weights_ignored(self):
        assert betweenness(path(3, [5, 0.1])).values.tolist() == [0, 2, 0]

    def test_matches_networkx(self, rng):
        for _ in range(10):
            g = random_graph(rng, 25, rng.uniform(0.08, 0.3))
            ref = nx.betweenness_centrality(to_nx(g), normalized=False)
            assert betweenness(g).values == pytest.approx([2 * ref[i] for i in range(g.n)])


class TestEigenvector:
    def test_triangle(self):
        assert eigenvector_centrality(complete(3)).values == pytest.approx([1, 1, 1])

    def test_star(self):
        g = star(3)
        v = eigenvector_centrality(g).values
        assert v[g.index("c")] == pytest.approx(1.0)
        assert v[g.index("l0")] == pytest.approx(1 / math.sqrt(3), abs=1e-8)

    def test_disconnected_names_components(self):
        g = build_graph([("a", "b"), ("c", "d")])
        with pytest.raises(ValueError, match="components"):
            eigenvector_centrality(g)

    def test_non_convergence(self):
        with pytest.raises(ConvergenceError):
            eigenvector_centrality(path(12), tol=1e-15, max_iter=3)

    def test_matches_dense_eigh(self, rng):
        for weighted in (False, True):
            g = random_graph(rng, 30, 0.25, weighted=weighted)
            vals, vecs = np.linalg.eigh(g.to_dense())
            ref = np.abs(vecs[:, -1])
            assert eigenvector_centrality(g).values == pytest.approx(ref / ref.max(), abs=1e-7)


def test_compute_dispatch():
    g = from_arrays(list("abc"), [(0, 1, 2.0), (1, 2, 1.0)])
    assert compute(g, "strength").values.tolist() == [2, 3, 1]
    assert compute(g, Method.BETWEENNESS).method is Method.BETWEENNESS
