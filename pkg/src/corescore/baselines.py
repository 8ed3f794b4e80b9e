"""Earlier core-periphery methods used as comparators.

* Borgatti-Everett discrete partition (rho and its z-score) and the pattern
  variant with a partial weight for core-periphery ties.
* A minres-style continuous coreness fit of ``A_ij ~ c_i c_j``.
* Holme's k-core closeness coefficient against a degree-preserving null.
* Da Silva et al.'s network capacity and core coefficient.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .annealing import AnnealSchedule
from .centrality import closeness
from .graph import (
    PathMode,
    WeightedGraph,
    all_pairs_shortest_paths,
    binary_skeleton,
    degree_preserving_randomize,
    from_dense,
    is_connected,
    k_core,
)


# --- Borgatti-Everett -------------------------------------------------------

@dataclass
class DiscretePartition:
    core_mask: np.ndarray
    rho: float
    z_score: float


def _mask(g: WeightedGraph, core_mask) -> np.ndarray:
    m = np.asarray(core_mask, dtype=bool)
    if m.shape != (g.n,):
        raise ValueError(f"core mask must have length {g.n}")
    return m


def be_rho(g: WeightedGraph, core_mask) -> float:
    """Ordered-pair weight with at least one endpoint in the core."""
    m = _mask(g, core_mask)
    return be_pattern_score(g, m, 1.0)


def be_pattern_score(g: WeightedGraph, core_mask, a: float) -> float:
    """Ordered-pair weight scored 1 (core-core), ``a`` (exactly one core), 0 otherwise."""
    if not 0 <= a <= 1:
        raise ValueError("a must lie in [0, 1]")
    m = _mask(g, core_mask)
    rows = np.repeat(np.arange(g.n), np.diff(g.indptr))
    both = m[rows] & m[g.indices]
    one = m[rows] ^ m[g.indices]
    return float(g.weights[both].sum() + a * g.weights[one].sum())


def be_expected_rho(total: float, n: int, n_periphery: int) -> float:
    """Mean rho over random masks with ``n_periphery`` periphery nodes."""
    if n < 2:
        return total
    return total * (1.0 - n_periphery * (n_periphery - 1) / (n * (n - 1)))


class _NullSigma:
    """Monte Carlo standard deviation of rho for each core size (lazy, cached)."""

    def __init__(self, g: WeightedGraph, shuffles: int, rng: np.random.Generator):
        self.adj = g.to_dense()
        self.total = self.adj.sum()
        self.shuffles = shuffles
        self.rng = rng
        self.cache: dict[int, float] = {}

    def __call__(self, core_size: int) -> float:
        if core_size not in self.cache:
            n = len(self.adj)
            keys = self.rng.random((self.shuffles, n))
            periph = np.argsort(keys, axis=1) >= core_size
            pp = np.einsum("si,ij,sj->s", periph, self.adj, periph)
            self.cache[core_size] = float(np.std(self.total - pp, ddof=1))
        return self.cache[core_size]


def be_z_score(g: WeightedGraph, core_mask, sigma) -> float:
    m = _mask(g, core_mask)
    n_core = int(m.sum())
    s = sigma(n_core)
    mu = be_expected_rho(2 * g.total_weight(), g.n, g.n - n_core)
    rho = be_rho(g, m)
    if s <= 0:
        return math.inf if rho > mu else 0.0
    return (rho - mu) / s


def be_discrete(
    g: WeightedGraph,
    shuffles: int = 1000,
    schedule: AnnealSchedule = AnnealSchedule(),
    *,
    sigma=None,
) -> DiscretePartition:
    """Core mask with the highest rho z-score.

    The null mean is exact; the null standard deviation per core size comes
    from ``shuffles`` random masks of that size. Annealing alternates bit
    flips and core/periphery swaps; empty and full cores are never visited.
    ``sigma`` may supply a precomputed core-size -> std callable.
    """
    n = g.n
    if n < 3:
        raise ValueError("be_discrete needs at least 3 nodes")
    rng = np.random.default_rng(schedule.seed)
    sigma = sigma or _NullSigma(g, shuffles, rng)
    adj = g.to_dense()
    total = adj.sum()

    def z_of(pp: float, n_core: int) -> float:
        s = sigma(n_core)
        mu = be_expected_rho(total, n, n - n_core)
        rho = total - pp
        if s <= 0:
            return math.inf if rho > mu else 0.0
        return (rho - mu) / s

    best_mask, best_z = None, -math.inf
    for _ in range(schedule.restarts):
        core = rng.random(n) < 0.5
        if core.all() or not core.any():
            core[:] = False
            core[rng.integers(n)] = True
        periph = ~core
        # weight from each node into the current periphery
        into_p = adj @ periph
        pp = float(periph @ into_p)
        z = z_of(pp, int(core.sum()))
        if z > best_z:
            best_z, best_mask = z, core.copy()
        temp = schedule.initial_temperature
        tries = successes = consec = 0
        while True:
            if tries >= schedule.max_tries_per_temperature or successes >= schedule.max_successes_per_temperature:
                if temp < schedule.stop_temperature or consec >= schedule.max_consecutive_rejections:
                    break
                temp *= schedule.cooling_factor
                tries = successes = 0
            tries += 1
            n_core = int(core.sum())
            if rng.random() < 0.5:
                u = int(rng.integers(n))
                flips = [u]
                if (core[u] and n_core == 1) or (not core[u] and n_core == n - 1):
                    continue
            else:
                if n_core in (0, n):
                    continue
                u = int(rng.choice(np.flatnonzero(core)))
                v = int(rng.choice(np.flatnonzero(periph)))
                flips = [u, v]
            diff = np.zeros(n)
            diff[flips] = np.where(periph[flips], -1.0, 1.0)
            delta_into = adj[:, flips] @ diff[flips]
            new_pp = pp + 2.0 * float(diff @ into_p) + float(diff[flips] @ delta_into[flips])
            new_core = n_core - int(diff[flips].sum())
            new_z = z_of(new_pp, new_core)
            dz = new_z - z
            if dz > 0:
                consec = 0
            elif not (rng.random() < math.exp(max(dz / temp, -700.0))):
                consec += 1
                continue
            successes += 1
            core[flips] = ~core[flips]
            periph[flips] = ~periph[flips]
            into_p += delta_into
            pp, z = new_pp, new_z
            if z > best_z:
                best_z, best_mask = z, core.copy()
    return DiscretePartition(best_mask, be_rho(g, best_mask), best_z)


# --- minres continuous coreness ---------------------------------------------

@dataclass
class MinresCoreness:
    values: np.ndarray
    residual: float
    iterations: int
    converged: bool = True


def minres_residual(adj: np.ndarray, c: np.ndarray) -> float:
    diff = adj - np.outer(c, c)
    np.fill_diagonal(diff, 0.0)
    return float((diff ** 2).sum())


def minres_coreness(g: WeightedGraph, tol: float = 1e-10, max_iter: int = 10000) -> MinresCoreness:
    """Fit ``A_ij ~ c_i c_j`` off the diagonal by cyclic coordinate descent.

    Each update is the exact nonnegative minimizer in one coordinate, so the
    residual never increases. Starts from strengths scaled to unit maximum.
    """
    adj = g.to_dense()
    c = g.strengths().astype(float)
    if c.max() <= 0:
        return MinresCoreness(np.zeros(g.n), 0.0, 0)
    c /= c.max()
    sq_total = float(c @ c)
    for it in range(1, max_iter + 1):
        change = 0.0
        for i in range(g.n):
            denom = sq_total - c[i] ** 2
            new = max(0.0, float(adj[i] @ c) / denom) if denom > 0 else 0.0
            change = max(change, abs(new - c[i]))
            sq_total += new ** 2 - c[i] ** 2
            c[i] = new
        if change < tol:
            return MinresCoreness(c, minres_residual(adj, c), it)
    warnings.warn(f"minres did not converge in {max_iter} sweeps", RuntimeWarning, stacklevel=2)
    return MinresCoreness(c, minres_residual(adj, c), max_iter, converged=False)


def largest_gap_core(values) -> np.ndarray:
    """Core mask: nodes above the largest gap in the sorted values."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(-v, kind="stable")
    gaps = -np.diff(v[order])
    cut = int(np.argmax(gaps)) + 1
    mask = np.zeros(len(v), dtype=bool)
    mask[order[:cut]] = True
    return mask


# --- Holme ------------------------------------------------------------------

@dataclass
class HolmeResult:
    coefficient: float
    best_k: int
    core_nodes: frozenset[int]
    observed_ratio: float
    null_samples: list[float] = field(default_factory=list)


def closeness_of_set(dist: np.ndarray, nodes) -> float:
    """Reciprocal of the mean over ``nodes`` of the mean distance to all other nodes."""
    nodes = np.fromiter(nodes, dtype=np.int64)
    n = dist.shape[0]
    if n < 2 or len(nodes) == 0:
        return 0.0
    per_node = dist[nodes].sum(axis=1) / (n - 1)
    mean = per_node.mean()
    return 1.0 / mean if mean > 0 else math.inf


def _best_core(g: WeightedGraph, mode: PathMode) -> tuple[float, int, frozenset[int]]:
    dist = all_pairs_shortest_paths(g, mode)
    cc_all = closeness_of_set(dist, range(g.n))
    best = (-math.inf, 0, frozenset())
    k = 1
    while True:
        comps = k_core(g, k)
        if not comps:
            break
        for comp in comps:
            cc = closeness_of_set(dist, sorted(comp))
            if cc > best[0]:
                best = (cc, k, comp)
        k += 1
    return best[0] / cc_all, best[1], best[2]


def holme_coefficient(
    g: WeightedGraph,
    ensemble_size: int = 100,
    swaps_per_edge: int = 10,
    seed=None,
    mode: PathMode | str = PathMode.HOPS,
    max_redraws: int = 100,
) -> HolmeResult:
    """Closeness ratio of the best k-core minus its mean over degree-preserving nulls.

    Runs on the binary skeleton. A disconnected input raises; a disconnected
    null sample is redrawn, at most ``max_redraws`` times in total.
    """
    mode = PathMode(mode)
    skel = binary_skeleton(g) if mode is PathMode.HOPS else g
    if not is_connected(skel):
        raise ValueError("Holme's coefficient needs a connected graph")
    ratio, best_k, core = _best_core(skel, mode)
    rng = np.random.default_rng(seed)
    samples: list[float] = []
    redraws = 0
    while len(samples) < ensemble_size:
        null = degree_preserving_randomize(skel, swaps_per_edge * skel.edge_count, rng)
        if not is_connected(null):
            redraws += 1
            if redraws > max_redraws:
                raise RuntimeError(f"more than {max_redraws} disconnected null samples")
            continue
        samples.append(_best_core(null, PathMode.HOPS)[0])
    return HolmeResult(ratio - float(np.mean(samples)), best_k, core, ratio, samples)


# --- Da Silva ---------------------------------------------------------------

@dataclass
class CapacityResult:
    capacity: float
    core_coefficient: float
    removal_order: list[int]
    capacity_trace: list[float]


def _capacity_from(dist: np.ndarray) -> float:
    iu = np.triu_indices(dist.shape[0], 1)
    d = dist[iu]
    d = d[np.isfinite(d) & (d > 0)]
    return float((1.0 / d).sum())


def capacity(g: WeightedGraph, mode: PathMode | str = PathMode.HOPS) -> float:
    """Sum of reciprocal distances over connected unordered pairs."""
    return _capacity_from(all_pairs_shortest_paths(g, mode))


def core_coefficient(g: WeightedGraph, mode: PathMode | str = PathMode.HOPS, fraction: float = 0.9) -> CapacityResult:
    """Fraction of central-node removals needed to accumulate 90% of total capacity.

    Nodes are removed in ascending mean-distance closeness (most central
    first, ties by index) computed on the intact graph. ``K_m`` is the
    capacity after ``m`` removals; ``N'`` is the smallest ``m`` whose
    cumulative sum reaches ``fraction`` of the full cumulative sum.
    """
    if g.n < 2:
        raise ValueError("core coefficient needs at least two nodes")
    cc = closeness(g, mode).values
    order = sorted(range(g.n), key=lambda i: (cc[i], i))
    dense = g.to_dense()
    trace = []
    for m in range(g.n + 1):
        keep = np.array(sorted(order[m:]), dtype=np.int64)
        if len(keep) < 2:
            trace.append(0.0)
            continue
        sub = from_dense(dense[np.ix_(keep, keep)], [g.labels[i] for i in keep])
        trace.append(capacity(sub, mode))
    cum = np.cumsum(trace)
    if cum[-1] <= 0:
        n_prime = 0
    else:
        n_prime = int(np.flatnonzero(cum >= fraction * cum[-1] - 1e-12 * cum[-1])[0])
    return CapacityResult(trace[0], n_prime / g.n, order, trace)
