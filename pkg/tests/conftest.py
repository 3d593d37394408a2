"""Shared test helpers: brute-force oracles and hypothesis strategies."""

from __future__ import annotations

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hublab.graph_core import WeightedGraph

settings.register_profile(
    "hublab",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("hublab")


# -- brute-force oracles -------------------------------------------------------


def oracle_distances(g: WeightedGraph) -> list[list[int]]:
    """All-pairs distances by exhaustive enumeration of simple paths.

    Independent of the search code under test. -1 means unreachable. Only for
    tiny graphs.
    """
    n = g.n
    best = [[-1] * n for _ in range(n)]

    def dfs(start: int, v: int, used: list[bool], wsum: int):
        if best[start][v] < 0 or wsum < best[start][v]:
            best[start][v] = wsum
        for y, w in g.adj(v):
            if not used[y]:
                used[y] = True
                dfs(start, y, used, wsum + w)
                used[y] = False

    for s in range(n):
        used = [False] * n
        used[s] = True
        dfs(s, s, used, 0)
    return best


def oracle_simple_paths(g: WeightedGraph, u: int, v: int) -> list[tuple[int, list[int]]]:
    """(weight, vertex list) of every simple u-v path."""
    out = []

    def dfs(x: int, used: list[bool], wsum: int, trail: list[int]):
        if x == v:
            out.append((wsum, list(trail)))
            return
        for y, w in g.adj(x):
            if not used[y]:
                used[y] = True
                trail.append(y)
                dfs(y, used, wsum + w, trail)
                trail.pop()
                used[y] = False

    used = [False] * g.n
    used[u] = True
    dfs(u, used, 0, [u])
    return out


def oracle_count_shortest(g: WeightedGraph, u: int, v: int) -> int:
    """Number of minimum-weight simple u-v paths. Positive weights only."""
    paths = oracle_simple_paths(g, u, v)
    if not paths:
        return 0
    lo = min(w for w, _ in paths)
    return sum(1 for w, _ in paths if w == lo)


# -- strategies ----------------------------------------------------------------


@st.composite
def small_graphs(draw, max_n: int = 8, min_weight: int = 0, max_weight: int = 4):
    """Sparse-ish random graph with weights in [min_weight, max_weight]."""
    n = draw(st.integers(min_value=1, max_value=max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(
        st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 2 * n))
        if pairs
        else st.just([])
    )
    edges = [
        (u, v, draw(st.integers(min_value=min_weight, max_value=max_weight)))
        for u, v in chosen
    ]
    return WeightedGraph(n, edges)


def seeded_sparse_graph(n: int, m: int, seed: int, *, min_w: int = 0, max_w: int = 4) -> WeightedGraph:
    """Deterministic random sparse weighted graph for fixed-size cases."""
    rng = np.random.default_rng(seed)
    total = n * (n - 1) // 2
    m = min(m, total)
    picks = sorted(rng.choice(total, size=m, replace=False).tolist())
    edges = []
    k = 0
    idx = 0
    for u in range(n):
        for v in range(u + 1, n):
            if idx < len(picks) and picks[idx] == k:
                edges.append((u, v, int(rng.integers(min_w, max_w + 1))))
                idx += 1
            k += 1
    return WeightedGraph(n, edges)
