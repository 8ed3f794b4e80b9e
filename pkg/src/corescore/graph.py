"""Weighted undirected graphs and the structural primitives built on them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph


class GraphError(ValueError):
    """Raised for invalid graph input (self-loops, negative weights, bad labels)."""


class PathMode(str, Enum):
    HOPS = "hops"
    WEIGHTS = "weights"


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric nonnegative weighted adjacency over labeled nodes.

    Stored as CSR arrays; ``indptr``/``indices``/``weights`` give neighbor
    lists, so ``indices[indptr[i]:indptr[i + 1]]`` are the neighbors of ``i``.
    Instances are immutable and should be built with :func:`build_graph`.
    """

    labels: tuple[str, ...]
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    _index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        for arr in (self.indptr, self.indices, self.weights):
            arr.setflags(write=False)
        if not self._index:
            self._index.update({lab: i for i, lab in enumerate(self.labels)})

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def index(self, label: str) -> int:
        return self._index[label]

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def neighbor_weights(self, i: int) -> np.ndarray:
        return self.weights[self.indptr[i]:self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def strengths(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return np.bincount(rows, weights=self.weights, minlength=self.n)

    def total_weight(self) -> float:
        return float(self.weights.sum()) / 2.0

    def edges(self) -> list[tuple[int, int, float]]:
        """Undirected edges as ``(i, j, w)`` with ``i < j``."""
        out = []
        for i in range(self.n):
            for j, w in zip(self.neighbors(i), self.neighbor_weights(i)):
                if i < j:
                    out.append((i, int(j), float(w)))
        return out

    def to_sparse(self) -> sparse.csr_array:
        return sparse.csr_array((self.weights, self.indices, self.indptr), shape=(self.n, self.n))

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def relabel(self, perm: Sequence[int]) -> "WeightedGraph":
        """Graph with node ``i`` moved to position ``perm[i]`` (labels travel with nodes)."""
        perm = np.asarray(perm)
        labels = [""] * self.n
        for i, p in enumerate(perm):
            labels[p] = self.labels[i]
        return from_arrays(labels, [(perm[i], perm[j], w) for i, j, w in self.edges()])


def from_arrays(labels: Sequence[str], edges: Iterable[tuple[int, int, float]]) -> WeightedGraph:
    """Build a graph from integer endpoints; duplicates are summed."""
    labels = tuple(str(x) for x in labels)
    n = len(labels)
    if n == 0:
        raise GraphError("graph must have at least one node")
    if len(set(labels)) != n:
        raise GraphError("node labels must be unique")
    rows, cols, vals = [], [], []
    for i, j, w in edges:
        i, j, w = int(i), int(j), float(w)
        if i == j:
            raise GraphError(f"self-loop on node {labels[i]!r}")
        if not w >= 0 or not np.isfinite(w):
            raise GraphError(f"invalid weight {w} on edge ({labels[i]!r}, {labels[j]!r})")
        rows += [i, j]
        cols += [j, i]
        vals += [w, w]
    mat = sparse.coo_array((vals, (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    mat.eliminate_zeros()
    mat.sort_indices()
    return WeightedGraph(
        labels,
        mat.indptr.astype(np.int64),
        mat.indices.astype(np.int64),
        mat.data.astype(np.float64),
    )


def build_graph(
    edges: Iterable[tuple[str, str, float] | tuple[str, str]],
    nodes: Sequence[str] | None = None,
) -> WeightedGraph:
    """Build a graph from labeled edges.

    Node order is ``nodes`` (if given) followed by labels in first-appearance
    order. Duplicate pairs are summed and zero-weight edges are dropped.
    """
    order: dict[str, int] = {}
    for lab in nodes or ():
        order.setdefault(str(lab), len(order))
    idx_edges = []
    for e in edges:
        u, v = str(e[0]), str(e[1])
        w = float(e[2]) if len(e) > 2 else 1.0
        for lab in (u, v):
            order.setdefault(lab, len(order))
        idx_edges.append((order[u], order[v], w))
    return from_arrays(list(order), idx_edges)


def from_dense(matrix: np.ndarray, labels: Sequence[str] | None = None) -> WeightedGraph:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise GraphError("adjacency must be square")
    if not np.allclose(a, a.T):
        raise GraphError("adjacency must be symmetric")
    if np.any(np.diag(a) != 0):
        raise GraphError("self-loops are not allowed")
    n = a.shape[0]
    labels = labels if labels is not None else [str(i + 1) for i in range(n)]
    iu, ju = np.nonzero(np.triu(a, 1))
    return from_arrays(labels, zip(iu, ju, a[iu, ju]))


def strength(g: WeightedGraph, i: int) -> float:
    return float(g.neighbor_weights(i).sum())


def shortest_paths(g: WeightedGraph, source: int, mode: PathMode | str = PathMode.HOPS) -> np.ndarray:
    """Distances from ``source``; unreachable nodes get ``inf``."""
    return all_pairs_shortest_paths(g, mode, sources=[source])[0]


def all_pairs_shortest_paths(
    g: WeightedGraph, mode: PathMode | str = PathMode.HOPS, sources: Sequence[int] | None = None
) -> np.ndarray:
    mode = PathMode(mode)
    mat = g.to_sparse()
    if mode is PathMode.HOPS:
        return csgraph.shortest_path(mat, method="D", directed=False, unweighted=True, indices=sources)
    return csgraph.shortest_path(mat, method="D", directed=False, indices=sources)


def connected_components(g: WeightedGraph) -> list[list[int]]:
    n_comp, lab = csgraph.connected_components(g.to_sparse(), directed=False)
    comps: list[list[int]] = [[] for _ in range(n_comp)]
    for i, c in enumerate(lab):
        comps[c].append(i)
    return comps


def is_connected(g: WeightedGraph) -> bool:
    return len(connected_components(g)) == 1


def k_core_nodes(g: WeightedGraph, k: int) -> np.ndarray:
    """Boolean mask of nodes surviving iterative peeling of degree < k."""
    deg = g.degrees().copy()
    alive = np.ones(g.n, dtype=bool)
    queue = deque(int(i) for i in np.flatnonzero(deg < k))
    alive[deg < k] = False
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if alive[v]:
                deg[v] -= 1
                if deg[v] < k:
                    alive[v] = False
                    queue.append(int(v))
    return alive


def k_core(g: WeightedGraph, k: int) -> list[frozenset[int]]:
    """Connected components of the k-core of the binary skeleton."""
    if k < 1:
        raise ValueError("k must be >= 1")
    alive = k_core_nodes(g, k)
    if not alive.any():
        return []
    keep = np.flatnonzero(alive)
    sub = g.to_sparse()[keep][:, keep]
    _, lab = csgraph.connected_components(sub, directed=False)
    comps: dict[int, set[int]] = {}
    for node, c in zip(keep, lab):
        comps.setdefault(int(c), set()).add(int(node))
    return [frozenset(c) for c in comps.values()]


def core_numbers(g: WeightedGraph) -> np.ndarray:
    """Largest k for which each node belongs to the k-core."""
    out = np.zeros(g.n, dtype=np.int64)
    k = 1
    while True:
        alive = k_core_nodes(g, k)
        if not alive.any():
            return out
        out[alive] = k
        k += 1


def binary_skeleton(g: WeightedGraph) -> WeightedGraph:
    return WeightedGraph(g.labels, g.indptr, g.indices, np.ones_like(g.weights))


def threshold_binarize(g: WeightedGraph, t: float) -> WeightedGraph:
    """Keep edges with weight >= t, each with weight 1."""
    return from_arrays(g.labels, [(i, j, 1.0) for i, j, w in g.edges() if w >= t])


def degree_preserving_randomize(
    g: WeightedGraph,
    swaps: int | None = None,
    seed: int | np.random.Generator | None = None,
    max_tries: int | None = None,
) -> WeightedGraph:
    """Randomize the binary skeleton by accepted double-edge swaps.

    Edges ``(a, b), (c, d)`` become ``(a, d), (c, b)`` unless that would make
    a self-loop or a multi-edge. ``swaps`` defaults to ten times the edge
    count; ``max_tries`` bounds attempts (default ``100 * swaps``), after which
    the graph is returned with however many swaps were accepted.
    """
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i, j, _ in g.edges()]
    m = len(edges)
    if swaps is None:
        swaps = 10 * m
    if m < 2 or swaps <= 0:
        return binary_skeleton(g)
    if max_tries is None:
        max_tries = 100 * swaps
    present = set(edges)
    edges_arr = [list(e) for e in edges]
    done = tries = 0
    batch = []
    while done < swaps and tries < max_tries:
        if not batch:
            # random draws in blocks: per-try generator calls dominate otherwise
            size = min(4096, max_tries - tries)
            batch = list(zip(rng.integers(m, size=size).tolist(), rng.integers(m, size=size).tolist(),
                             (rng.random(size) < 0.5).tolist()))[::-1]
        x, y, flip = batch.pop()
        tries += 1
        if x == y:
            continue
        a, b = edges_arr[x]
        c, d = edges_arr[y]
        if flip:
            c, d = d, c
        if a == d or c == b or len({a, b, c, d}) < 4:
            continue
        e1, e2 = (min(a, d), max(a, d)), (min(c, b), max(c, b))
        if e1 in present or e2 in present:
            continue
        present.discard((min(a, b), max(a, b)))
        present.discard((min(c, d), max(c, d)))
        present.add(e1)
        present.add(e2)
        edges_arr[x] = list(e1)
        edges_arr[y] = list(e2)
        done += 1
    return from_arrays(g.labels, [(i, j, 1.0) for i, j in edges_arr])
