"""Structural quantities of a potential landscape and of a social graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetError, GraphError
from .game import SocialGraph, all_profiles, check_budget, hamming_edges, space_size

CUTWIDTH_MAX_VERTICES = 24


@dataclass(frozen=True)
class PotentialStats:
    delta_global: float
    delta_local: float
    global_witness: tuple[int, int]  # (argmax, argmin) flat indices
    local_witness: tuple[int, int] | None  # adjacent pair, higher potential first


def potential_stats(potential, radices: Sequence[int]) -> PotentialStats:
    phi = np.asarray(potential, dtype=np.float64)
    hi, lo = int(np.argmax(phi)), int(np.argmin(phi))
    a, b = hamming_edges(radices)
    if a.size == 0:
        return PotentialStats(float(phi[hi] - phi[lo]), 0.0, (hi, lo), None)
    gap = np.abs(phi[a] - phi[b])
    k = int(np.argmax(gap))
    u, v = int(a[k]), int(b[k])
    if phi[u] < phi[v]:
        u, v = v, u
    return PotentialStats(float(phi[hi] - phi[lo]), float(gap[k]), (hi, lo), (u, v))


# ---------------------------------------------------------------------------
# hill metric


class _DisjointSet:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size
        self.low = list(range(size))  # member of minimum potential per root

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a: int, b: int, low: int) -> int:
        if self.rank[a] < self.rank[b]:
            a, b = b, a
        self.parent[b] = a
        if self.rank[a] == self.rank[b]:
            self.rank[a] += 1
        self.low[a] = low
        return a


@dataclass(frozen=True)
class HillReport:
    zeta: float
    x: int  # start, higher-potential endpoint
    y: int
    peak: int  # highest profile on a best path from x to y


def zeta(potential, radices: Sequence[int]) -> HillReport:
    """Worst unavoidable climb between two profiles, by a union-find sweep.

    Profiles are inserted in increasing potential (ties by index) and joined
    to inserted Hamming neighbours.  Two components merging at the insertion
    of ``v`` means every path between them peaks at ``phi(v)`` or above, and
    some path peaks exactly there.  The climb charged to the merge is
    ``phi(v)`` minus the larger of the two component minima, which is the
    cheapest start among ordered pairs with ``phi(x) >= phi(y)``.
    """
    phi = np.asarray(potential, dtype=np.float64)
    size = phi.size
    check_budget(size)
    if size != space_size(radices):
        raise ValueError("potential size does not match radices")
    strides = [1]
    for m in radices[:-1]:
        strides.append(strides[-1] * int(m))
    order = np.lexsort((np.arange(size), phi))
    inserted = np.zeros(size, dtype=bool)
    ds = _DisjointSet(size)
    best = HillReport(0.0, int(order[0]), int(order[0]), int(order[0]))
    for v in order.tolist():
        inserted[v] = True
        root = v
        h = phi[v]
        for s, m in zip(strides, radices):
            xi = (v // s) % m
            for a in range(m):
                if a == xi:
                    continue
                w = v + (a - xi) * s
                if not inserted[w]:
                    continue
                rw = ds.find(w)
                if rw == root:
                    continue
                lr, lw = ds.low[root], ds.low[rw]
                hi_low, lo_low = (lr, lw) if phi[lr] >= phi[lw] else (lw, lr)
                climb = h - phi[hi_low]
                if climb > best.zeta:
                    best = HillReport(float(climb), int(hi_low), int(lo_low), int(v))
                root = ds.union(root, rw, lo_low)
    return best


# ---------------------------------------------------------------------------
# cutwidth


@dataclass(frozen=True)
class CutwidthReport:
    cutwidth: int
    ordering: tuple[int, ...]
    cuts: tuple[int, ...]


def cutwidth_of_ordering(graph: SocialGraph, ordering: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Edges crossing each prefix cut of ``ordering`` and their maximum.

    Position ``k`` counts edges with one endpoint among the first ``k+1``
    vertices and the other after them; the final, always-empty cut is omitted.
    """
    order = [int(v) for v in ordering]
    if sorted(order) != list(range(graph.n)):
        raise GraphError(f"{ordering!r} is not a permutation of the {graph.n} vertices")
    pos = {v: k for k, v in enumerate(order)}
    diff = [0] * (graph.n + 1)
    for u, v in graph.edges:
        a, b = sorted((pos[u], pos[v]))
        diff[a] += 1
        diff[b] -= 1
    cuts = []
    running = 0
    for k in range(graph.n - 1):
        running += diff[k]
        cuts.append(running)
    return tuple(cuts), max(cuts, default=0)


def cutwidth(graph: SocialGraph) -> CutwidthReport:
    """Exact cutwidth by dynamic programming over vertex subsets.

    ``f(T)`` is the best achievable maximum cut over orderings whose first
    ``|T|`` vertices are ``T``: ``f(T) = max(cut(T), min_v f(T - v))``.
    """
    n = graph.n
    if n > CUTWIDTH_MAX_VERTICES:
        raise BudgetError(f"cutwidth DP supports at most {CUTWIDTH_MAX_VERTICES} vertices, got {n}")
    full = (1 << n) - 1
    subsets = np.arange(1 << n, dtype=np.int64)
    cut = np.zeros(1 << n, dtype=np.int32)
    for u, v in graph.edges:
        cut += (((subsets >> u) ^ (subsets >> v)) & 1).astype(np.int32)
    pop = np.zeros(1 << n, dtype=np.int8)
    for v in range(n):
        pop += ((subsets >> v) & 1).astype(np.int8)
    big = np.iinfo(np.int32).max
    f = np.full(1 << n, big, dtype=np.int32)
    f[0] = 0
    for k in range(1, n + 1):
        layer = subsets[pop == k]
        best = np.full(layer.size, big, dtype=np.int32)
        for v in range(n):
            has = ((layer >> v) & 1).astype(bool)
            cand = f[layer[has] ^ (1 << v)]
            best[has] = np.minimum(best[has], cand)
        f[layer] = np.maximum(best, cut[layer])
    # the last prefix (all vertices) has cut 0 so f(V) is the cutwidth
    width = int(f[full])
    order = []
    T = full
    while T:
        for v in range(n):
            if T >> v & 1 and f[T ^ (1 << v)] <= width and cut[T] <= width:
                order.append(v)
                T ^= 1 << v
                break
    order.reverse()
    cuts, check = cutwidth_of_ordering(graph, order)
    assert check == width
    return CutwidthReport(width, tuple(order), cuts)


def weights(radices: Sequence[int]) -> np.ndarray:
    """Number of nonzero entries of every profile."""
    return (all_profiles(radices) != 0).sum(axis=1)
