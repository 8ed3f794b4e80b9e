"""Planted core-periphery ensembles, block models and the recovery benchmark."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import centrality
from .annealing import AnnealSchedule
from .baselines import minres_coreness
from .graph import WeightedGraph, from_arrays
from .scoring import ParameterGrid, core_score

METHODS = ("core_score", "minres", "strength", "closeness", "betweenness", "eigenvector")
DEFAULT_K_VALUES = tuple(round(1.0 + 0.1 * i, 1) for i in range(11))


@dataclass(frozen=True)
class CPEnsembleParams:
    """CP(n, d, p, k): core fraction d, edge probabilities p, kp, k^2 p."""

    n: int
    d: float
    p: float
    k: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0 <= self.d <= 1 or not 0 <= self.p <= 1:
            raise ValueError("d and p must lie in [0, 1]")
        if self.k < 1 or self.k * self.k * self.p > 1 + 1e-12:
            raise ValueError(f"k must lie in [1, (1/p)^(1/2)]; got k={self.k}, p={self.p}")

    @property
    def core_size(self) -> int:
        # floor(d n); the small epsilon guards 0.3 * 10 -> 2.9999999999999996
        return int(math.floor(self.d * self.n + 1e-9))


@dataclass
class PlantedGraph:
    graph: WeightedGraph
    true_core: frozenset[int]
    blocks: np.ndarray | None = None


def _sample_blocks(block_of: np.ndarray, density: np.ndarray, rng: np.random.Generator) -> list[tuple[int, int, float]]:
    n = len(block_of)
    iu, ju = np.triu_indices(n, 1)
    prob = density[block_of[iu], block_of[ju]]
    hit = rng.random(len(iu)) < prob
    return [(int(i), int(j), 1.0) for i, j in zip(iu[hit], ju[hit])]


def generate_cp(params: CPEnsembleParams, seed=None, shuffle: bool = False) -> PlantedGraph:
    """Draw one CP graph; the first floor(d n) nodes are core unless ``shuffle``."""
    rng = np.random.default_rng(seed)
    n, c = params.n, params.core_size
    is_core = np.arange(n) < c
    if shuffle:
        is_core = rng.permutation(is_core)
    block_of = is_core.astype(np.int64)
    p, k = params.p, params.k
    density = np.array([[p, k * p], [k * p, min(k * k * p, 1.0)]])
    edges = _sample_blocks(block_of, density, rng)
    g = from_arrays([str(i) for i in range(n)], edges)
    return PlantedGraph(g, frozenset(int(i) for i in np.flatnonzero(is_core)), block_of)


def block_model(
    block_sizes: Sequence[int],
    density: Sequence[Sequence[float]] | np.ndarray,
    seed=None,
    core_blocks: Iterable[int] = (),
) -> PlantedGraph:
    """Stochastic block model; nodes of ``core_blocks`` form the recorded core."""
    dens = np.asarray(density, dtype=float)
    b = len(block_sizes)
    if dens.shape != (b, b):
        raise ValueError(f"density matrix shape {dens.shape} does not match {b} blocks")
    if not np.allclose(dens, dens.T):
        raise ValueError("density matrix must be symmetric")
    if np.any(dens < 0) or np.any(dens > 1):
        raise ValueError("densities must lie in [0, 1]")
    if any(s < 0 for s in block_sizes):
        raise ValueError("block sizes must be nonnegative")
    rng = np.random.default_rng(seed)
    block_of = np.repeat(np.arange(b), block_sizes)
    edges = _sample_blocks(block_of, dens, rng)
    g = from_arrays([str(i) for i in range(len(block_of))], edges)
    core_set = set(core_blocks)
    core = frozenset(int(i) for i in np.flatnonzero(np.isin(block_of, list(core_set))))
    return PlantedGraph(g, core, block_of)


def ideal_core_periphery(n_core: int, n_periphery: int) -> PlantedGraph:
    """Complete core, complete core-periphery ties, empty periphery."""
    return block_model([n_core, n_periphery], [[1, 1], [1, 0]], seed=0, core_blocks=[0])


@dataclass(frozen=True)
class BlockPreset:
    name: str
    block_sizes: tuple[int, ...]
    density: np.ndarray
    core_blocks: tuple[int, ...]
    # community and core flags per block
    community: tuple[int, ...] = ()
    is_core: tuple[bool, ...] = ()


def _mixed_density(community, is_core, p_in, p_out, k):
    b = len(community)
    dens = np.empty((b, b))
    for x in range(b):
        for y in range(b):
            base = p_in if community[x] == community[y] else p_out
            dens[x, y] = min(1.0, base * k ** (int(is_core[x]) + int(is_core[y])))
    return dens


def preset(name: str, block_size: int = 10, p_in: float = 0.5, p_out: float = 0.05, k: float = 1.4,
           p: float = 0.25) -> BlockPreset:
    """Block-model archetypes.

    ``community``: two dense diagonal blocks. ``core_periphery``: CP(2 blocks)
    with densities p, kp, k^2 p. ``global_cp_local_communities`` orders four
    blocks as (core A, core B, periphery A, periphery B) and
    ``global_communities_local_cp`` as (core A, periphery A, core B,
    periphery B); both use the same block-pair densities, so they differ only
    by a node permutation.
    """
    if name == "community":
        dens = np.array([[p_in, p_out], [p_out, p_in]])
        return BlockPreset(name, (block_size, block_size), dens, (), (0, 1), (False, False))
    if name == "core_periphery":
        dens = np.array([[min(1.0, k * k * p), k * p], [k * p, p]])
        return BlockPreset(name, (block_size, block_size), dens, (0,), (0, 0), (True, False))
    if name == "global_cp_local_communities":
        community, is_core = (0, 1, 0, 1), (True, True, False, False)
    elif name == "global_communities_local_cp":
        community, is_core = (0, 0, 1, 1), (True, False, True, False)
    else:
        raise ValueError(f"unknown preset {name!r}")
    dens = _mixed_density(community, is_core, p_in, p_out, k)
    cores = tuple(i for i, c in enumerate(is_core) if c)
    return BlockPreset(name, (block_size,) * 4, dens, cores, community, is_core)


PRESETS = ("community", "core_periphery", "global_cp_local_communities", "global_communities_local_cp")


def sample_preset(bp: BlockPreset, seed=None) -> PlantedGraph:
    return block_model(bp.block_sizes, bp.density, seed, bp.core_blocks)


def recovery_fraction(scores: Sequence[float], true_core: Iterable[int], tie_seed=None) -> float:
    """Overlap of the top-|core| nodes (by descending score) with the true core.

    Ties are broken uniformly at random using ``tie_seed``.
    """
    scores = np.asarray(scores, dtype=float)
    truth = set(true_core)
    if not truth:
        raise ValueError("true core must be nonempty")
    rng = np.random.default_rng(tie_seed)
    order = np.lexsort((rng.random(len(scores)), -scores))
    top = order[: len(truth)]
    return len(truth.intersection(int(i) for i in top)) / len(truth)


def method_scores(g: WeightedGraph, method: str, *, grid: ParameterGrid, schedule: AnnealSchedule,
                  jobs: int = 1) -> np.ndarray:
    """Score vector where larger means more core-like."""
    if method == "core_score":
        return core_score(g, grid, schedule, jobs=jobs).scores
    if method == "minres":
        return minres_coreness(g).values
    if method == "strength":
        return g.strengths()
    if method == "closeness":
        return -centrality.closeness(g).values
    if method == "betweenness":
        return centrality.betweenness(g).values
    if method == "eigenvector":
        try:
            return centrality.eigenvector_centrality(g).values
        except ValueError:
            # disconnected sample: score within the whole graph via the dense eigenvector
            return _eigvec_fallback(g)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def _eigvec_fallback(g: WeightedGraph) -> np.ndarray:
    w, v = np.linalg.eigh(g.to_dense())
    x = np.abs(v[:, -1])
    return x / x.max() if x.max() > 0 else x


@dataclass
class BenchmarkReport:
    k_values: list[float]
    methods: list[str]
    replicates: int
    recoveries: dict[str, np.ndarray] = field(default_factory=dict)  # method -> (len(k), replicates)

    def mean(self, method: str) -> np.ndarray:
        return self.recoveries[method].mean(axis=1)

    def std(self, method: str) -> np.ndarray:
        return self.recoveries[method].std(axis=1, ddof=1) if self.replicates > 1 \
            else np.zeros(len(self.k_values))

    def sem(self, method: str) -> np.ndarray:
        return self.std(method) / math.sqrt(self.replicates)

    def rows(self) -> list[dict]:
        out = []
        for m in self.methods:
            mean, std = self.mean(m), self.std(m)
            for i, k in enumerate(self.k_values):
                out.append({"method": m, "k": k, "mean": float(mean[i]), "std": float(std[i]),
                            "replicates": self.replicates})
        return out


def run_benchmark(
    k_values: Sequence[float] = DEFAULT_K_VALUES,
    replicates: int = 100,
    methods: Sequence[str] = METHODS,
    schedule: AnnealSchedule = AnnealSchedule(),
    seed: int = 0,
    *,
    n: int = 100,
    d: float = 0.5,
    p: float = 0.25,
    grid: ParameterGrid | None = None,
    jobs: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> BenchmarkReport:
    """Recovery fraction of each method on CP(n, d, p, k) over replicates.

    Graph and tie-break seeds derive from (seed, k index, replicate), so
    results do not depend on evaluation order.
    """
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    params = [CPEnsembleParams(n, d, p, k) for k in k_values]
    grid = grid or ParameterGrid.midpoints(100)
    report = BenchmarkReport(list(k_values), list(methods), replicates,
                             {m: np.zeros((len(k_values), replicates)) for m in methods})
    total, done = len(k_values) * replicates, 0
    for ki, cp in enumerate(params):
        for rep in range(replicates):
            graph_seed, tie_seed, sa_seed = np.random.SeedSequence([seed, ki, rep]).generate_state(3)
            planted = generate_cp(cp, int(graph_seed))
            sched = AnnealSchedule(**{**schedule.__dict__, "seed": int(sa_seed)})
            for m in methods:
                scores = method_scores(planted.graph, m, grid=grid, schedule=sched, jobs=jobs)
                report.recoveries[m][ki, rep] = recovery_fraction(scores, planted.true_core, int(tie_seed))
            done += 1
            if progress is not None:
                progress(done, total)
    return report
