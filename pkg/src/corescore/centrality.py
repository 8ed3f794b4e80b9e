"""Comparator centralities: strength, closeness, betweenness, eigenvector."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .graph import PathMode, WeightedGraph, all_pairs_shortest_paths, connected_components


class Method(str, Enum):
    STRENGTH = "strength"
    CLOSENESS = "closeness"
    BETWEENNESS = "betweenness"
    EIGENVECTOR = "eigenvector"


class ConvergenceError(RuntimeError):
    pass


@dataclass
class CentralityVector:
    method: Method
    values: np.ndarray
    parameters: dict = field(default_factory=dict)


def strength_centrality(g: WeightedGraph) -> CentralityVector:
    return CentralityVector(Method.STRENGTH, g.strengths())


def closeness(g: WeightedGraph, mode: PathMode | str = PathMode.HOPS) -> CentralityVector:
    """Mean distance to all N nodes, the node itself included (smaller = more central).

    Any unreachable node makes the value ``inf``.
    """
    dist = all_pairs_shortest_paths(g, mode)
    return CentralityVector(Method.CLOSENESS, dist.sum(axis=0) / g.n, {"mode": PathMode(mode).value})


def betweenness(g: WeightedGraph) -> CentralityVector:
    """Shortest-path betweenness of the binary skeleton.

    Brandes accumulation over ordered source/target pairs, endpoints excluded,
    unnormalized: on a path a-b-c the middle node scores 2.
    """
    n = g.n
    bc = np.zeros(n)
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in g.neighbors(v):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(int(w))
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return CentralityVector(Method.BETWEENNESS, bc)


def eigenvector_centrality(g: WeightedGraph, tol: float = 1e-10, max_iter: int = 10000) -> CentralityVector:
    """Leading eigenvector of the weight matrix, scaled to unit maximum.

    Power iteration on ``A + I``: same eigenvectors as ``A``, but the shift
    stops the oscillation that plain iteration shows on bipartite graphs.
    """
    comps = connected_components(g)
    if len(comps) > 1:
        named = [[g.labels[i] for i in c] for c in comps]
        raise ValueError(f"eigenvector centrality needs a connected graph; components: {named}")
    if g.n == 1:
        return CentralityVector(Method.EIGENVECTOR, np.ones(1), {"tol": tol, "iterations": 0})
    a = g.to_sparse()
    x = np.ones(g.n)
    for it in range(1, max_iter + 1):
        y = a @ x + x
        y /= y.max()
        if np.max(np.abs(y - x)) < tol:
            return CentralityVector(Method.EIGENVECTOR, y, {"tol": tol, "iterations": it})
        x = y
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")


def compute(g: WeightedGraph, method: Method | str, **kwargs) -> CentralityVector:
    method = Method(method)
    if method is Method.STRENGTH:
        return strength_centrality(g)
    if method is Method.CLOSENESS:
        return closeness(g, **kwargs)
    if method is Method.BETWEENNESS:
        return betweenness(g)
    return eigenvector_centrality(g, **kwargs)
