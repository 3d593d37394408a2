"""Weighted graph core: representation, shortest-path searches, distance
matrices, and hub candidate sets used by every other module."""

from __future__ import annotations

import heapq
from collections import OrderedDict, deque
from dataclasses import dataclass

import numpy as np

try:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components, dijkstra

    _HAVE_SCIPY = True
except ImportError:  # pragma: no cover
    _HAVE_SCIPY = False

#: Largest number of distance entries a dense all-pairs matrix may hold.
DEFAULT_PAIR_CAP = 250_000_000

#: Internal stand-in for "no path" inside int64 arrays. Chosen so that the sum
#: of two of them still fits comfortably in int64 and can never collide with a
#: real distance.
_INF64 = 1 << 40


class _Unreachable:
    """Sentinel for missing paths.

    Distinct from every integer, so it can never silently wrap into a
    distance sum.
    """

    __slots__ = ()

    def __repr__(self) -> str:
        return "UNREACHABLE"


UNREACHABLE = _Unreachable()


class GraphFormatError(ValueError):
    """Malformed graph or label file."""


class ResourceLimitError(RuntimeError):
    """A configured vertex or pair cap would be exceeded."""


class UnreachablePairError(ValueError):
    """Operation requires mutually reachable endpoints."""


class ZeroWeightError(ValueError):
    """Operation requires strictly positive edge weights."""


class WeightedGraph:
    """Immutable undirected graph with nonnegative integer edge weights.

    Vertices are ids 0..n-1. No self loops, at most one edge per unordered
    pair. Edges are normalized to (min, max, w) and kept in sorted order, so
    two graphs built from the same edge multiset compare and serialize
    identically. Instances are never mutated after construction and are safe
    to share across workers.
    """

    __slots__ = ("n", "_eu", "_ev", "_ew", "_degrees", "_kind", "_edges", "_adj", "_nbrs")

    def __init__(self, n: int, edges, *, validate: bool = True):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        self.n = int(n)
        if isinstance(edges, np.ndarray):
            arr = edges.reshape(-1, 3).astype(np.int64, copy=True)
        else:
            seq = list(edges)
            if seq:
                arr = np.array(seq, dtype=np.int64).reshape(-1, 3)
            else:
                arr = np.zeros((0, 3), dtype=np.int64)
        if arr.shape[0]:
            u = np.minimum(arr[:, 0], arr[:, 1])
            v = np.maximum(arr[:, 0], arr[:, 1])
            w = arr[:, 2]
            order = np.lexsort((w, v, u))
            u, v, w = u[order], v[order], w[order]
        else:
            u = v = w = np.zeros(0, dtype=np.int64)
        if validate and arr.shape[0]:
            if u.min() < 0 or v.max() >= self.n:
                raise ValueError("edge endpoint out of range")
            if (u == v).any():
                raise ValueError("self loops are not allowed")
            if (w < 0).any():
                raise ValueError("edge weights must be nonnegative")
            keys = u * self.n + v
            if np.unique(keys).shape[0] != keys.shape[0]:
                raise ValueError("duplicate edge for an unordered pair")
        for a in (u, v, w):
            a.flags.writeable = False
        self._eu, self._ev, self._ew = u, v, w
        deg = np.zeros(self.n, dtype=np.int64)
        if u.shape[0]:
            np.add.at(deg, u, 1)
            np.add.at(deg, v, 1)
        deg.flags.writeable = False
        self._degrees = deg
        if w.shape[0] == 0 or (w == 1).all():
            self._kind = "unit"
        elif ((w == 0) | (w == 1)).all():
            self._kind = "01"
        else:
            self._kind = "general"
        self._edges = None
        self._adj = None
        self._nbrs = None

    # -- basic accessors ---------------------------------------------------

    @property
    def m(self) -> int:
        return int(self._eu.shape[0])

    @property
    def edges(self) -> tuple[tuple[int, int, int], ...]:
        if self._edges is None:
            self._edges = tuple(
                zip(self._eu.tolist(), self._ev.tolist(), self._ew.tolist())
            )
        return self._edges

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Read-only (u, v, w) arrays with u < v, lexicographically sorted."""
        return self._eu, self._ev, self._ew

    def degree(self, v: int) -> int:
        return int(self._degrees[v])

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    @property
    def max_degree(self) -> int:
        return int(self._degrees.max()) if self.n else 0

    @property
    def weight_kind(self) -> str:
        """One of "unit", "01", "general"."""
        return self._kind

    @property
    def has_zero_weights(self) -> bool:
        return bool(self.m) and bool((self._ew == 0).any())

    def _build_adj(self) -> None:
        adj = [[] for _ in range(self.n)]
        nbrs = [[] for _ in range(self.n)]
        for u, v, w in zip(self._eu.tolist(), self._ev.tolist(), self._ew.tolist()):
            adj[u].append((v, w))
            adj[v].append((u, w))
            nbrs[u].append(v)
            nbrs[v].append(u)
        self._adj = adj
        self._nbrs = nbrs

    def adj(self, v: int) -> list[tuple[int, int]]:
        """Neighbors of v as (neighbor, weight) pairs."""
        if self._adj is None:
            self._build_adj()
        return self._adj[v]

    def neighbors(self, v: int) -> list[int]:
        if self._nbrs is None:
            self._build_adj()
        return self._nbrs[v]

    def edge_weight(self, u: int, v: int) -> int:
        for x, w in self.adj(u):
            if x == v:
                return w
        raise ValueError(f"no edge between {u} and {v}")

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m}, weights={self._kind})"


# -- graph file format -----------------------------------------------------
# Header line "n m", then m lines "u v w". '#' starts a comment.


def write_graph(g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v, w in zip(*(a.tolist() for a in g.edge_arrays())):
            fh.write(f"{u} {v} {w}\n")


def read_graph(path) -> WeightedGraph:
    header = None
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                nums = [int(p) for p in parts]
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: non-integer field") from exc
            if header is None:
                if len(nums) != 2:
                    raise GraphFormatError(f"line {lineno}: header must be 'n m'")
                header = nums
            else:
                if len(nums) != 3:
                    raise GraphFormatError(f"line {lineno}: edge must be 'u v w'")
                edges.append(tuple(nums))
    if header is None:
        raise GraphFormatError("empty graph file")
    n, m = header
    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(edges)}")
    return WeightedGraph(n, edges)


# -- single-source searches ------------------------------------------------


def _bfs_unit(g: WeightedGraph, src: int) -> list[int]:
    dist = [-1] * g.n
    dist[src] = 0
    if g._nbrs is None:
        g._build_adj()
    nbrs = g._nbrs
    queue = deque([src])
    while queue:
        x = queue.popleft()
        dx = dist[x] + 1
        for y in nbrs[x]:
            if dist[y] < 0:
                dist[y] = dx
                queue.append(y)
    return dist


def _bfs_01(g: WeightedGraph, src: int) -> list[int]:
    dist = [-1] * g.n
    dist[src] = 0
    if g._adj is None:
        g._build_adj()
    adj = g._adj
    queue = deque([src])
    while queue:
        x = queue.popleft()
        dx = dist[x]
        for y, w in adj[x]:
            nd = dx + w
            if dist[y] < 0 or nd < dist[y]:
                dist[y] = nd
                if w == 0:
                    queue.appendleft(y)
                else:
                    queue.append(y)
    return dist


def _dijkstra(g: WeightedGraph, src: int) -> list[int]:
    dist = [-1] * g.n
    if g._adj is None:
        g._build_adj()
    adj = g._adj
    heap = [(0, src)]
    dist[src] = 0
    while heap:
        dx, x = heapq.heappop(heap)
        if dx > dist[x]:
            continue
        for y, w in adj[x]:
            nd = dx + w
            if dist[y] < 0 or nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist


def _single_source(g: WeightedGraph, src: int) -> list[int]:
    if src < 0 or src >= g.n:
        raise ValueError(f"source {src} out of range")
    kind = g.weight_kind
    if kind == "unit":
        return _bfs_unit(g, src)
    if kind == "01":
        return _bfs_01(g, src)
    return _dijkstra(g, src)


def distances_from(g: WeightedGraph, src: int) -> np.ndarray:
    """Exact distances from src as an int64 array, -1 for unreachable."""
    arr = np.array(_single_source(g, src), dtype=np.int64)
    arr.flags.writeable = False
    return arr


def distance_between(g: WeightedGraph, s: int, t: int):
    """Distance between two vertices, UNREACHABLE when no path exists.

    Unit-weight searches stop as soon as the target is settled.
    """
    if s == t:
        return 0
    if g.weight_kind == "unit":
        dist = [-1] * g.n
        dist[s] = 0
        if g._nbrs is None:
            g._build_adj()
        nbrs = g._nbrs
        queue = deque([s])
        while queue:
            x = queue.popleft()
            dx = dist[x] + 1
            for y in nbrs[x]:
                if dist[y] < 0:
                    if y == t:
                        return dx
                    dist[y] = dx
                    queue.append(y)
        return UNREACHABLE
    d = _single_source(g, s)[t]
    return UNREACHABLE if d < 0 else d


@dataclass(frozen=True)
class ShortestPathTree:
    """Shortest-path tree with deterministic parents.

    parents[root] == root; unreachable vertices carry -1 in both arrays.
    """

    root: int
    parents: tuple[int, ...]
    dists: tuple[int, ...]

    def dist(self, v: int):
        d = self.dists[v]
        return UNREACHABLE if d < 0 else d

    def parent(self, v: int):
        p = self.parents[v]
        return None if p < 0 else p

    def path_from_root(self, v: int) -> list[int]:
        if self.dists[v] < 0:
            raise UnreachablePairError(f"{v} unreachable from root {self.root}")
        out = [v]
        while v != self.root:
            v = self.parents[v]
            out.append(v)
        out.reverse()
        return out


def _assign_parents(g: WeightedGraph, dists: list[int], root: int) -> list[int]:
    # Positive weights: every valid parent is strictly closer to the root, so a
    # single pass picking the lowest-id tight neighbor yields a tree. With
    # 0-weight ties the lowest-id rule can create parent cycles, so those
    # graphs fall back to a deterministic fixpoint that only attaches to
    # already-rooted vertices.
    n = g.n
    parents = [-1] * n
    parents[root] = root
    if g._adj is None:
        g._build_adj()
    adj = g._adj
    if not g.has_zero_weights:
        for v in range(n):
            dv = dists[v]
            if v == root or dv < 0:
                continue
            best = -1
            for u, w in adj[v]:
                du = dists[u]
                if du >= 0 and du + w == dv and (best < 0 or u < best):
                    best = u
            parents[v] = best
        return parents
    pending = [v for v in range(n) if v != root and dists[v] >= 0]
    pending.sort(key=lambda v: (dists[v], v))
    while pending:
        rest = []
        changed = False
        for v in pending:
            dv = dists[v]
            best = -1
            for u, w in adj[v]:
                if dists[u] >= 0 and dists[u] + w == dv and parents[u] != -1:
                    if best < 0 or u < best:
                        best = u
            if best >= 0:
                parents[v] = best
                changed = True
            else:
                rest.append(v)
        if not changed:
            break
        pending = rest
    return parents


def shortest_paths_from(g: WeightedGraph, src: int) -> ShortestPathTree:
    """Single-source shortest paths with lowest-id parent tie-breaks."""
    dists = _single_source(g, src)
    parents = _assign_parents(g, dists, src)
    return ShortestPathTree(root=src, parents=tuple(parents), dists=tuple(dists))


def canonical_trees(g: WeightedGraph) -> dict[int, ShortestPathTree]:
    """The deterministic shortest-path tree rooted at every vertex."""
    return {v: shortest_paths_from(g, v) for v in range(g.n)}


# -- distance matrices -----------------------------------------------------


class DenseDistanceMatrix:
    """All-pairs distances in a dense int64 matrix, -1 for unreachable."""

    __slots__ = ("n", "_mat", "_inf")

    def __init__(self, mat: np.ndarray):
        mat = mat.astype(np.int64, copy=False)
        mat.flags.writeable = False
        self._mat = mat
        self.n = mat.shape[0]
        self._inf = None

    def d(self, u: int, v: int):
        val = int(self._mat[u, v])
        return UNREACHABLE if val < 0 else val

    def row(self, u: int) -> np.ndarray:
        return self._mat[u]

    def matrix(self) -> np.ndarray:
        return self._mat

    def inf_matrix(self) -> np.ndarray:
        """Copy of the matrix with -1 replaced by a large finite value, for
        vectorized sums. Cached."""
        if self._inf is None:
            inf = np.where(self._mat < 0, np.int64(_INF64), self._mat)
            inf.flags.writeable = False
            self._inf = inf
        return self._inf

    def diameter(self) -> int:
        finite = self._mat[self._mat >= 0]
        return int(finite.max()) if finite.size else 0


class LazyDistanceMatrix:
    """Distance matrix computed per source on demand with an LRU row cache.

    Suitable for instances whose n^2 footprint exceeds the pair cap.
    """

    __slots__ = ("n", "_g", "_cache", "_max_rows")

    def __init__(self, g: WeightedGraph, *, max_rows: int = 64):
        self._g = g
        self.n = g.n
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()
        self._max_rows = max_rows

    def row(self, u: int) -> np.ndarray:
        hit = self._cache.get(u)
        if hit is not None:
            self._cache.move_to_end(u)
            return hit
        arr = distances_from(self._g, u)
        self._cache[u] = arr
        if len(self._cache) > self._max_rows:
            self._cache.popitem(last=False)
        return arr

    def d(self, u: int, v: int):
        val = int(self.row(u)[v])
        return UNREACHABLE if val < 0 else val


def _zero_contracted_components(g: WeightedGraph) -> np.ndarray:
    u, v, w = g.edge_arrays()
    zero = w == 0
    data = np.ones(int(zero.sum()) * 2, dtype=np.int8)
    rows = np.concatenate([u[zero], v[zero]])
    cols = np.concatenate([v[zero], u[zero]])
    mat = csr_matrix((data, (rows, cols)), shape=(g.n, g.n))
    _, labels = connected_components(mat, directed=False)
    return labels


def _scipy_all_pairs(g: WeightedGraph) -> np.ndarray:
    u, v, w = g.edge_arrays()
    if g.has_zero_weights:
        # Contract 0-weight components, run on the quotient, expand back.
        labels = _zero_contracted_components(g)
        k = int(labels.max()) + 1 if g.n else 0
        cu, cv, cw = labels[u], labels[v], w
        keep = cu != cv
        cu, cv, cw = cu[keep], cv[keep], cw[keep]
        lo = np.minimum(cu, cv)
        hi = np.maximum(cu, cv)
        order = np.lexsort((cw, hi, lo))
        lo, hi, cw = lo[order], hi[order], cw[order]
        if lo.size:
            keys = lo * k + hi
            first = np.ones(lo.size, dtype=bool)
            first[1:] = keys[1:] != keys[:-1]
            lo, hi, cw = lo[first], hi[first], cw[first]
        sub = _scipy_all_pairs(WeightedGraph(k, np.stack([lo, hi, cw], axis=1), validate=False))
        return sub[np.ix_(labels, labels)]
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    data = np.concatenate([w, w]).astype(np.float64)
    mat = csr_matrix((data, (rows, cols)), shape=(g.n, g.n))
    dist = dijkstra(mat, directed=True, unweighted=(g.weight_kind == "unit"))
    out = np.where(np.isinf(dist), -1.0, dist)
    return out.astype(np.int64)


def all_pairs(g: WeightedGraph, *, pair_cap: int = DEFAULT_PAIR_CAP) -> DenseDistanceMatrix:
    """All-pairs shortest-path distances as a dense matrix.

    Equals n invocations of shortest_paths_from; raises ResourceLimitError
    when n^2 entries would exceed pair_cap.
    """
    if g.n * g.n > pair_cap:
        raise ResourceLimitError(
            f"all-pairs matrix needs {g.n * g.n} entries, cap is {pair_cap}"
        )
    total_weight = int(g._ew.sum()) if g.m else 0
    if _HAVE_SCIPY and g.n > 1 and total_weight < (1 << 52):
        return DenseDistanceMatrix(_scipy_all_pairs(g))
    mat = np.empty((g.n, g.n), dtype=np.int64)
    for src in range(g.n):
        mat[src] = _single_source(g, src)
    return DenseDistanceMatrix(mat)


def verify_metric(dm, *, samples: int | None = None, seed: int = 0) -> bool:
    """Check symmetry and the triangle inequality.

    Full check when samples is None (dense matrices only), otherwise a seeded
    sample of that many triples.
    """
    if samples is None:
        mat = dm.matrix()
        if not (mat == mat.T).all():
            return False
        inf = dm.inf_matrix()
        for x in range(dm.n):
            via = inf[:, x][:, None] + inf[x, :][None, :]
            if (np.minimum(via, _INF64) < inf).any():
                return False
        return True
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        u, v, x = (int(t) for t in rng.integers(0, dm.n, size=3))
        duv, dux, dxv = dm.d(u, v), dm.d(u, x), dm.d(x, v)
        if dm.d(v, u) is not UNREACHABLE and duv is not UNREACHABLE and dm.d(v, u) != duv:
            return False
        if dux is not UNREACHABLE and dxv is not UNREACHABLE:
            if duv is UNREACHABLE or duv > dux + dxv:
                return False
    return True


# -- hub candidates and path uniqueness -------------------------------------


def hub_candidates(dm, u: int, v: int) -> set[int]:
    """All x with d(u,x) + d(x,v) = d(u,v). Always contains u and v."""
    ru = dm.row(u)
    duv = int(ru[v])
    if duv < 0:
        raise UnreachablePairError(f"{u} and {v} are not mutually reachable")
    rv = dm.row(v)
    mask = (ru >= 0) & (rv >= 0) & (ru + rv == duv)
    return {int(x) for x in np.flatnonzero(mask)}


def count_shortest_paths(g: WeightedGraph, u: int, v: int, *, dists_u=None) -> int:
    """Exact number of shortest u-v paths via the tight-edge DAG.

    Requires strictly positive weights; counts are exact big integers.
    """
    if g.has_zero_weights:
        raise ZeroWeightError("path counting requires positive edge weights")
    if dists_u is None:
        dists_u = distances_from(g, u)
    dlist = dists_u.tolist() if isinstance(dists_u, np.ndarray) else list(dists_u)
    target = dlist[v]
    if target < 0:
        raise UnreachablePairError(f"{u} and {v} are not mutually reachable")
    if u == v:
        return 1
    nodes = [x for x in range(g.n) if 0 <= dlist[x] <= target]
    nodes.sort(key=lambda x: dlist[x])
    cnt = [0] * g.n
    cnt[u] = 1
    if g._adj is None:
        g._build_adj()
    adj = g._adj
    for x in nodes:
        cx = cnt[x]
        if cx == 0:
            continue
        dx = dlist[x]
        for y, w in adj[x]:
            if dlist[y] == dx + w and dlist[y] <= target:
                cnt[y] += cx
    return cnt[v]


def is_unique_shortest_path(dm, g: WeightedGraph, u: int, v: int):
    """(True, path) when exactly one shortest u-v path exists, else (False, None)."""
    dists_u = dm.row(u) if dm is not None else distances_from(g, u)
    dlist = dists_u.tolist()
    target = dlist[v]
    if target < 0:
        raise UnreachablePairError(f"{u} and {v} are not mutually reachable")
    if u == v:
        return True, [u]
    if g.has_zero_weights:
        raise ZeroWeightError("path counting requires positive edge weights")
    nodes = [x for x in range(g.n) if 0 <= dlist[x] <= target]
    nodes.sort(key=lambda x: dlist[x])
    cnt = [0] * g.n
    cnt[u] = 1
    if g._adj is None:
        g._build_adj()
    adj = g._adj
    for x in nodes:
        cx = cnt[x]
        if cx == 0:
            continue
        dx = dlist[x]
        for y, w in adj[x]:
            if dlist[y] == dx + w and dlist[y] <= target:
                cnt[y] += cx
    if cnt[v] != 1:
        return False, None
    path = [v]
    y = v
    while y != u:
        for x, w in adj[y]:
            if dlist[x] >= 0 and dlist[x] + w == dlist[y] and cnt[x] == 1:
                y = x
                break
        else:  # pragma: no cover - impossible when cnt[v] == 1
            raise RuntimeError("path reconstruction failed")
        path.append(y)
    path.reverse()
    return True, path


def path_weight(g: WeightedGraph, path: list[int]) -> int:
    """Total weight of an explicit vertex path; rejects non-edges."""
    return sum(g.edge_weight(a, b) for a, b in zip(path, path[1:]))
