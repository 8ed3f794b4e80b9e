"""Simulated annealing over value-to-node assignments.

The state is a permutation of a fixed value vector over the nodes; a move
swaps the values held by two random nodes. The objective is the quadratic
form ``sum_ij A_ij c_i c_j`` and is maximized. Kernels are compiled with
numba and release the GIL so cells of a parameter sweep can run on threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@dataclass(frozen=True)
class AnnealSchedule:
    """Cooling schedule and stopping rules.

    Defaults: start at T=1, multiply by 0.8 per level, stop below 1e-8 or
    after 1000 consecutive rejections; a level ends after 300 tries or 20
    accepted moves.
    """

    initial_temperature: float = 1.0
    stop_temperature: float = 1e-8
    cooling_factor: float = 0.8
    max_consecutive_rejections: int = 1000
    max_tries_per_temperature: int = 300
    max_successes_per_temperature: int = 20
    restarts: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.cooling_factor < 1:
            raise ValueError("cooling_factor must lie in (0, 1)")
        if not 0 < self.stop_temperature < self.initial_temperature:
            raise ValueError("need 0 < stop_temperature < initial_temperature")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if min(self.max_consecutive_rejections, self.max_tries_per_temperature,
               self.max_successes_per_temperature) < 1:
            raise ValueError("iteration limits must be positive")


# Relative |dR| below which a swap counts as neutral: always accepted, but
# not counted as a success, so no-op swaps cannot end a temperature level.
NEUTRAL_TOL = 1e-9
# Moves with dR / T below this are rejected without drawing (p < 2e-22).
REJECT_EXPONENT = -50.0


@njit(cache=True, nogil=True)
def quadratic_form(indptr, indices, weights, values):
    r = 0.0
    for i in range(len(indptr) - 1):
        s = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            s += weights[p] * values[indices[p]]
        r += values[i] * s
    return r


@njit(cache=True, nogil=True)
def _edge_weight(indptr, indices, weights, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        if indices[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    if lo < indptr[u + 1] and indices[lo] == v:
        return weights[lo]
    return 0.0


@njit(cache=True, nogil=True)
def _anneal_once(indptr, indices, weights, assign, t0, t_stop, cooling,
                 max_consec, max_tries, max_success, trace):
    """Anneal ``assign`` in place; return the best assignment and its objective.

    If ``trace`` has nonzero length, the best objective after each temperature
    level is written into it (up to its length).
    """
    n = len(assign)
    nbsum = np.zeros(n)
    for i in range(n):
        s = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            s += weights[p] * assign[indices[p]]
        nbsum[i] = s
    current = 0.0
    for i in range(n):
        current += assign[i] * nbsum[i]
    best = current
    best_assign = assign.copy()
    scale = max(abs(current), 1e-300)

    temp = t0
    tries = 0
    successes = 0
    consec = 0
    level = 0
    while True:
        if tries >= max_tries or successes >= max_success:
            if level < len(trace):
                trace[level] = best
            level += 1
            if temp < t_stop or consec >= max_consec:
                break
            temp *= cooling
            tries = 0
            successes = 0
        tries += 1
        u = np.random.randint(n)
        v = np.random.randint(n - 1)
        if v >= u:
            v += 1
        d = assign[v] - assign[u]
        if d == 0.0:
            continue
        delta = 2.0 * d * (nbsum[u] - nbsum[v])
        # the edge term is never positive, so this bound allows an early reject
        if delta < REJECT_EXPONENT * temp and delta < -NEUTRAL_TOL * scale:
            consec += 1
            continue
        delta -= 2.0 * d * d * _edge_weight(indptr, indices, weights, u, v)
        neutral = abs(delta) <= NEUTRAL_TOL * scale
        if delta > 0.0 and not neutral:
            consec = 0
        elif not neutral and (delta < REJECT_EXPONENT * temp
                              or np.random.random() >= np.exp(delta / temp)):
            consec += 1
            continue
        if not neutral:
            successes += 1
        assign[u] += d
        assign[v] -= d
        for p in range(indptr[u], indptr[u + 1]):
            nbsum[indices[p]] += weights[p] * d
        for p in range(indptr[v], indptr[v + 1]):
            nbsum[indices[p]] -= weights[p] * d
        current += delta
        if current > best:
            best = current
            best_assign[:] = assign
            scale = max(abs(best), 1e-300)
    return best_assign, best


@njit(cache=True, nogil=True)
def anneal_kernel(indptr, indices, weights, values, warm_start, seed, t0, t_stop,
                  cooling, max_consec, max_tries, max_success, restarts):
    """Best assignment of ``values`` over all restarts.

    ``values`` is the value multiset. If ``warm_start`` is nonempty it gives the
    starting assignment of the first restart; every other restart starts from
    a random permutation.
    """
    np.random.seed(seed)
    n = len(values)
    best_assign = values.copy()
    best = -np.inf
    trace = np.zeros(0)
    for r in range(restarts):
        if r == 0 and len(warm_start) == n:
            start = warm_start.copy()
        else:
            start = values[np.random.permutation(n)]
        cand, cand_r = _anneal_once(indptr, indices, weights, start, t0, t_stop, cooling,
                                    max_consec, max_tries, max_success, trace)
        exact = quadratic_form(indptr, indices, weights, cand)
        if exact > best:
            best = exact
            best_assign = cand
    return best_assign, best


def anneal_trace(indptr, indices, weights, start, seed, schedule: AnnealSchedule, levels: int = 200):
    """Single anneal from ``start`` returning the per-level best-so-far trace."""
    _seed_only(seed)
    trace = np.full(levels, np.nan)
    assign, best = _anneal_once(indptr, indices, weights, np.array(start, dtype=np.float64),
                                schedule.initial_temperature, schedule.stop_temperature,
                                schedule.cooling_factor, schedule.max_consecutive_rejections,
                                schedule.max_tries_per_temperature,
                                schedule.max_successes_per_temperature, trace)
    return assign, best, trace[~np.isnan(trace)]


@njit(cache=True)
def _seed_only(seed):
    np.random.seed(seed)
