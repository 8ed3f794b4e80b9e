"""Core Score: local core values, core quality and the (alpha, beta) sweep."""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from .annealing import AnnealSchedule, anneal_kernel, quadratic_form
from .graph import WeightedGraph


@dataclass(frozen=True)
class TransitionParams:
    """``alpha`` sets boundary sharpness, ``beta`` sets core size (both in [0, 1])."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ValueError(f"alpha and beta must lie in [0, 1], got {self.alpha}, {self.beta}")


@dataclass(frozen=True)
class ParameterGrid:
    alphas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self) -> None:
        for name in ("alphas", "betas"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
            arr = np.asarray(getattr(self, name))
            if arr.size == 0:
                raise ValueError(f"{name} must be nonempty")
            if np.any(np.diff(arr) <= 0):
                raise ValueError(f"{name} must be strictly ascending")
            if arr[0] < 0 or arr[-1] > 1:
                raise ValueError(f"{name} must lie in [0, 1]")

    @classmethod
    def midpoints(cls, n_alpha: int = 100, n_beta: int | None = None) -> "ParameterGrid":
        """Cell midpoints of a uniform partition of [0, 1]^2, e.g. 0.005, ..., 0.995."""
        n_beta = n_alpha if n_beta is None else n_beta
        return cls(
            tuple((np.arange(n_alpha) + 0.5) / n_alpha),
            tuple((np.arange(n_beta) + 0.5) / n_beta),
        )

    @classmethod
    def single(cls, alpha: float, beta: float) -> "ParameterGrid":
        return cls((float(alpha),), (float(beta),))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.alphas), len(self.betas)

    def cells(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(len(self.alphas)) for b in range(len(self.betas))]


@dataclass
class CoreAssignment:
    params: TransitionParams
    assigned_values: np.ndarray
    core_quality: float


@dataclass
class SweepResult:
    """Per-cell assignments; ``r_landscape`` holds R of the sum-to-one vectors."""

    grid: ParameterGrid
    assignments: list[list[CoreAssignment]]
    r_landscape: np.ndarray
    top_node: np.ndarray


@dataclass
class CoreScoreResult:
    labels: tuple[str, ...]
    scores: np.ndarray
    grid: ParameterGrid
    r_landscape: np.ndarray
    top_node: np.ndarray
    top_fractions: np.ndarray = field(default=None)

    def __post_init__(self) -> None:
        if self.top_fractions is None:
            counts = np.bincount(self.top_node.ravel(), minlength=len(self.labels))
            self.top_fractions = counts / self.top_node.size

    def ranking(self) -> list[int]:
        """Node indices by descending score, ties by label."""
        return sorted(range(len(self.labels)), key=lambda i: (-self.scores[i], self.labels[i]))


def local_core_values(n: int, params: TransitionParams) -> np.ndarray:
    """Sorted logistic profile ``C*_m`` for m = 1..n (nondecreasing)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.arange(1, n + 1) - n * params.beta
    if params.alpha >= 1.0:
        return np.where(x > 0, 1.0, np.where(x < 0, 0.0, 0.5))
    slope = np.tan(np.pi * params.alpha / 2.0)
    return expit(x * slope)


def core_quality(g: WeightedGraph, values: Sequence[float]) -> float:
    """``sum_ij A_ij c_i c_j`` over ordered pairs."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (g.n,):
        raise ValueError(f"expected {g.n} values, got shape {values.shape}")
    return float(quadratic_form(g.indptr, g.indices, g.weights, values))


def _normalized(values: np.ndarray) -> np.ndarray:
    total = values.sum()
    return values / total if total > 0 else values


def _strength_order_start(g: WeightedGraph, values: np.ndarray) -> np.ndarray:
    # largest value to the strongest node, ties by index
    order = np.lexsort((np.arange(g.n), -g.strengths()))
    start = np.empty_like(values)
    start[order] = np.sort(values)[::-1]
    return start


def anneal_assignment(
    g: WeightedGraph,
    params: TransitionParams,
    schedule: AnnealSchedule = AnnealSchedule(),
    *,
    seed: int | None = None,
    warm_start: bool = False,
) -> CoreAssignment:
    """Assign the local core values to nodes so that core quality is maximal.

    The annealer works on the sum-to-one normalized values, which leaves the
    optimal permutation unchanged. The returned assignment holds the raw
    values and their core quality. ``seed`` overrides ``schedule.seed``.
    """
    if g.n < 2:
        raise ValueError("annealing needs at least two nodes")
    raw = local_core_values(g.n, params)
    norm = _normalized(raw)
    if params.alpha == 0.0 or np.all(raw == raw[0]):
        # constant profile: every permutation has the same quality
        return CoreAssignment(params, raw.copy(), core_quality(g, raw))
    start = _strength_order_start(g, norm) if warm_start else np.zeros(0)
    seed = schedule.seed if seed is None else seed
    best, _ = anneal_kernel(
        g.indptr, g.indices, g.weights, norm, start, np.uint32(seed & 0xFFFFFFFF),
        schedule.initial_temperature, schedule.stop_temperature, schedule.cooling_factor,
        schedule.max_consecutive_rejections, schedule.max_tries_per_temperature,
        schedule.max_successes_per_temperature, schedule.restarts,
    )
    assigned = _map_back(best, norm, raw)
    return CoreAssignment(params, assigned, core_quality(g, assigned))


def _ranks_of(assigned_norm: np.ndarray, norm: np.ndarray) -> np.ndarray:
    """Index into the sorted value vector for each node's assigned value."""
    order = np.argsort(assigned_norm, kind="stable")
    idx = np.empty(len(norm), dtype=np.int64)
    idx[order] = np.arange(len(norm))
    return idx


def _map_back(assigned_norm: np.ndarray, norm: np.ndarray, raw: np.ndarray) -> np.ndarray:
    # exact raw values: the k-th smallest assigned value is the k-th raw value
    return raw[_ranks_of(assigned_norm, norm)]


def _normalized_quality(ca: CoreAssignment) -> float:
    total = ca.assigned_values.sum()
    return ca.core_quality / total ** 2 if total > 0 else ca.core_quality


def cell_seed(seed: int, ia: int, ib: int) -> int:
    return int(np.random.SeedSequence([seed, ia, ib]).generate_state(1)[0])


def neighbor_products(g: WeightedGraph, values: np.ndarray, weighted: bool = False) -> np.ndarray:
    """Per-node ``c_i * sum_{j in N(i)} c_j`` (edge-weighted sum if ``weighted``)."""
    w = g.weights if weighted else np.ones_like(g.weights)
    rows = np.repeat(np.arange(g.n), np.diff(g.indptr))
    nb = np.bincount(rows, weights=w * values[g.indices], minlength=g.n)
    return values * nb


def top_node_of(g: WeightedGraph, values: np.ndarray) -> int:
    # np.argmax returns the first maximum, i.e. the lowest index among ties
    return int(np.argmax(neighbor_products(g, values)))


def sweep_grid(
    g: WeightedGraph,
    grid: ParameterGrid,
    schedule: AnnealSchedule = AnnealSchedule(),
    *,
    jobs: int | None = None,
    warm_start: bool = False,
    cell_order: Sequence[tuple[int, int]] | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> SweepResult:
    """Anneal every grid cell; each cell seeds its own RNG from (seed, ia, ib)."""
    na, nb = grid.shape
    cells = list(cell_order) if cell_order is not None else grid.cells()
    if sorted(cells) != grid.cells():
        raise ValueError("cell_order must enumerate every grid cell exactly once")
    jobs = jobs or os.cpu_count() or 1

    def run(cell: tuple[int, int]) -> tuple[tuple[int, int], CoreAssignment]:
        ia, ib = cell
        params = TransitionParams(grid.alphas[ia], grid.betas[ib])
        return cell, anneal_assignment(g, params, schedule, seed=cell_seed(schedule.seed, ia, ib),
                                       warm_start=warm_start)

    out: list[list[CoreAssignment | None]] = [[None] * nb for _ in range(na)]
    done = 0
    if jobs == 1:
        results = map(run, cells)
    else:
        pool = ThreadPoolExecutor(max_workers=jobs)
        results = pool.map(run, cells)
    try:
        for (ia, ib), ca in results:
            out[ia][ib] = ca
            done += 1
            if progress is not None:
                progress(done, len(cells))
    finally:
        if jobs != 1:
            pool.shutdown()

    # landscape R is on the sum-to-one scale so cells compare across beta
    r_land = np.array([[_normalized_quality(out[a][b]) for b in range(nb)] for a in range(na)])
    top = np.array([[top_node_of(g, out[a][b].assigned_values) for b in range(nb)]
                    for a in range(na)], dtype=np.int64)
    return SweepResult(grid, out, r_land, top)


def aggregate_core_scores(sweep: SweepResult, g: WeightedGraph, *, weighted: bool = False) -> CoreScoreResult:
    """Sum ``c_i * sum_{j in N(i)} c_j`` over cells and scale to unit maximum.

    Raw (unnormalized) assigned values are used. With ``weighted`` the
    neighbor sum is weighted by edge weight (off by default).
    """
    total = np.zeros(g.n)
    for row in sweep.assignments:
        for ca in row:
            total += neighbor_products(g, ca.assigned_values, weighted)
    peak = total.max()
    if peak > 0:
        scores = total / peak
    else:
        warnings.warn("graph has no edges; core scores are all zero", RuntimeWarning, stacklevel=2)
        scores = total
    return CoreScoreResult(g.labels, scores, sweep.grid, sweep.r_landscape, sweep.top_node)


def core_score(
    g: WeightedGraph,
    grid: ParameterGrid | None = None,
    schedule: AnnealSchedule = AnnealSchedule(),
    **kwargs,
) -> CoreScoreResult:
    """Full pipeline: sweep the grid then aggregate."""
    grid = grid or ParameterGrid.midpoints(100)
    weighted = kwargs.pop("weighted", False)
    return aggregate_core_scores(sweep_grid(g, grid, schedule, **kwargs), g, weighted=weighted)
