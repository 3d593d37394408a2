"""Constructive hub-labeling pipeline for sparse graphs.

Stages: a random cover set for pairs with many hub candidates, a random
coloring whose conflicts are stored outright, per-(a,b,h) bucket matchings
whose endpoints collect hubs, and final assembly with verification. Includes
the average-degree to max-degree reduction via zero-weight vertex splitting.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .graph_core import (
    DEFAULT_PAIR_CAP,
    WeightedGraph,
    all_pairs,
)
from .hub_labeling import CoverReport, HubLabeling, bit_estimate, verify_cover


class ResampleExhausted(RuntimeError):
    """No sample met its size budget within max_resamples attempts."""


class CoverVerificationError(RuntimeError):
    """An assembled or projected labeling failed cover verification.

    Indicates an implementation bug, not an input condition.
    """


class InducedMatchingViolation(RuntimeError):
    """A bucket matching failed the induced-matching invariant."""

    def __init__(self, a, b, h, other, u, v):
        self.bucket = (a, b, h)
        self.other = other
        self.pair = (u, v)
        super().__init__(
            f"matching of bucket (a={a}, b={b}, h={h}) is not induced: "
            f"pair ({u},{v}) from h'={other} joins its endpoint sides"
        )


@dataclass(frozen=True)
class BuilderConfig:
    """Threshold D (None selects max(2, ceil(sqrt(ln n)))), RNG seed, and the
    resampling budget."""

    D: int | None = None
    seed: int = 0
    max_resamples: int = 32

    def __post_init__(self):
        if self.D is not None and self.D < 1:
            raise ValueError("D must be >= 1")
        if self.max_resamples < 1:
            raise ValueError("max_resamples must be >= 1")


@dataclass
class BuilderArtifacts:
    S: frozenset[int]
    Q: dict[int, frozenset[int]]
    R: dict[int, frozenset[int]]
    F: dict[int, frozenset[int]]
    colors: tuple[int, ...]
    matchings_log: dict[tuple[int, int, int], int]


def resolve_threshold(n: int, D: int | None) -> int:
    if D is not None:
        return D
    if n < 2:
        return 2
    return max(2, math.ceil(math.sqrt(math.log(n))))


def _rng(seed: int, stage: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), stage, attempt]))


# -- shared pair classification ----------------------------------------------


@dataclass
class PairIndex:
    """Per-graph classification of vertex pairs by candidate-set size.

    small holds the explicit candidate set for every pair with |H_uv| <= D
    (keys u < v). Pairs with |H_uv| >= D are "big": on {0,1}-weight graphs a
    pair is big whenever d(u,v) >= D because |H_uv| >= d(u,v) + 1, so only
    close pairs need explicit sets; general weights require exact counts and
    also produce "forced" pairs (|H_uv| < D at distance > D) that no other
    stage would cover.
    """

    n: int
    D: int
    zero_one: bool
    small: dict[tuple[int, int], tuple[int, ...]]
    small_dist: dict[tuple[int, int], int]
    forced: tuple[tuple[int, int], ...]
    big_extra: dict[int, np.ndarray] | None
    big_rows: np.ndarray | None


def build_pair_index(dm, D: int, *, zero_one: bool = False) -> PairIndex:
    n = dm.n
    mat = dm.matrix()
    inf = dm.inf_matrix()
    small: dict[tuple[int, int], tuple[int, ...]] = {}
    small_dist: dict[tuple[int, int], int] = {}
    if zero_one:
        big_extra: dict[int, np.ndarray] = {}
        for u in range(n):
            ru = mat[u]
            close = np.flatnonzero((ru >= 0) & (ru <= D - 1))
            close = close[close > u]
            if close.size == 0:
                continue
            sums = inf[:, close] + inf[u][:, None]
            mask = sums == ru[close][None, :]
            counts = mask.sum(axis=0)
            extra = []
            for j, v in enumerate(close.tolist()):
                c = int(counts[j])
                if c <= D:
                    small[(u, v)] = tuple(int(x) for x in np.flatnonzero(mask[:, j]))
                    small_dist[(u, v)] = int(ru[v])
                if c >= D:
                    extra.append(v)
            if extra:
                big_extra[u] = np.array(extra, dtype=np.int64)
        return PairIndex(n, D, True, small, small_dist, (), big_extra, None)
    big_rows = np.zeros((n, n), dtype=bool)
    ids = np.arange(n)
    for u in range(n):
        ru = mat[u]
        sums = inf[u][:, None] + inf
        mask = sums == inf[u][None, :]
        counts = mask.sum(axis=0)
        reach = (ru >= 0) & (ids > u)
        big_rows[u] = reach & (counts >= D)
        for v in np.flatnonzero(reach & (counts <= D)).tolist():
            small[(u, v)] = tuple(int(x) for x in np.flatnonzero(mask[:, v]))
            small_dist[(u, v)] = int(ru[v])
    forced = tuple(
        sorted(
            (u, v)
            for (u, v), H in small.items()
            if len(H) < D and small_dist[(u, v)] > D
        )
    )
    return PairIndex(n, D, False, small, small_dist, forced, None, big_rows)


def _index_for(dm, D: int, g: WeightedGraph | None = None) -> PairIndex:
    zero_one = g is not None and g.weight_kind in ("unit", "01")
    return build_pair_index(dm, D, zero_one=zero_one)


# -- stage 1: random cover set ------------------------------------------------


@dataclass
class _CoverStats:
    attempts: int
    q_random: int
    q_forced: int


def _sample_cover(dm, cfg: BuilderConfig, index: PairIndex):
    n = dm.n
    D = index.D
    if D == 1 or n == 0:
        # Degenerate threshold: the stage is skipped and all pairs flow to the
        # coloring and matching stages.
        return frozenset(), {}, _CoverStats(attempts=0, q_random=0, q_forced=0)
    mat = dm.matrix()
    inf = dm.inf_matrix()
    s_size = math.ceil((n / D) * math.log(D))
    budget = 2 * n * n
    for attempt in range(cfg.max_resamples):
        rng = _rng(cfg.seed, 1, attempt)
        if s_size:
            s_arr = np.sort(rng.choice(n, size=s_size, replace=False))
            sm = inf[s_arr, :]
        else:
            s_arr = np.zeros(0, dtype=np.int64)
            sm = None
        q: dict[int, np.ndarray] = {}
        q_random = 0
        for u in range(n):
            if index.zero_one:
                idx = np.flatnonzero(mat[u] >= D)
                idx = idx[idx > u]
                extra = index.big_extra.get(u)
                if extra is not None:
                    idx = np.union1d(idx, extra)
            else:
                idx = np.flatnonzero(index.big_rows[u])
            if idx.size == 0:
                continue
            if sm is not None:
                lhs = inf[u, s_arr]
                hits = (lhs[:, None] + sm[:, idx] == inf[u, idx][None, :]).any(axis=0)
                missed = idx[~hits]
            else:
                missed = idx
            if missed.size:
                q[u] = missed
                q_random += int(missed.size)
        if q_random * D <= budget:
            out = {u: set(vs.tolist()) for u, vs in q.items()}
            for (u, v) in index.forced:
                out.setdefault(u, set()).add(v)
            final = {u: frozenset(vs) for u, vs in out.items()}
            return (
                frozenset(int(x) for x in s_arr),
                final,
                _CoverStats(attempts=attempt + 1, q_random=q_random, q_forced=len(index.forced)),
            )
    raise ResampleExhausted(
        f"cover-set stage missed the {2 * n * n}/{D} budget {cfg.max_resamples} times"
    )


def sample_cover_set(dm, cfg: BuilderConfig, *, index: PairIndex | None = None):
    """(S, Q): a uniform cover set of size ceil((n/D) ln D) plus the pairs it
    leaves uncovered, resampled until sum |Q_v| <= 2 n^2 / D."""
    D = resolve_threshold(dm.n, cfg.D)
    if index is None:
        index = build_pair_index(dm, D)
    S, Q, _ = _sample_cover(dm, cfg, index)
    return S, Q


# -- stage 2: random coloring --------------------------------------------------


@dataclass
class _ColorStats:
    attempts: int
    r_total: int


def _has_conflict(colors: list[int], H) -> bool:
    seen = set()
    for h in H:
        c = colors[h]
        if c in seen:
            return True
        seen.add(c)
    return False


def _sample_colors(dm, cfg: BuilderConfig, index: PairIndex):
    n = dm.n
    D = index.D
    if D == 1:
        # One color: every candidate set of two or more vertices conflicts, so
        # every reachable pair is stored outright.
        mat = dm.matrix()
        r = {}
        total = 0
        for u in range(n):
            vs = np.flatnonzero(mat[u] >= 0)
            vs = vs[vs > u]
            if vs.size:
                r[u] = frozenset(int(v) for v in vs)
                total += int(vs.size)
        return (1,) * n, r, _ColorStats(attempts=1, r_total=total)
    budget = 2 * n * n
    n_colors = D**3
    for attempt in range(cfg.max_resamples):
        rng = _rng(cfg.seed, 2, attempt)
        colors = rng.integers(1, n_colors + 1, size=n).tolist() if n else []
        r: dict[int, set[int]] = {}
        total = 0
        for (u, v), H in index.small.items():
            if _has_conflict(colors, H):
                r.setdefault(u, set()).add(v)
                total += 1
        if total * D <= budget:
            return (
                tuple(colors),
                {u: frozenset(vs) for u, vs in r.items()},
                _ColorStats(attempts=attempt + 1, r_total=total),
            )
    raise ResampleExhausted(
        f"coloring stage missed the {2 * n * n}/{D} budget {cfg.max_resamples} times"
    )


def sample_coloring(dm, cfg: BuilderConfig, *, index: PairIndex | None = None):
    """(colors, R): uniform colors in [1, D^3] and, for every pair with a
    small candidate set, the partners whose set got a repeated color."""
    D = resolve_threshold(dm.n, cfg.D)
    if index is None:
        index = build_pair_index(dm, D)
    colors, R, _ = _sample_colors(dm, cfg, index)
    return colors, R


# -- stage 3: bucket matchings --------------------------------------------------


def _check_induced(groups):
    for (a, b, _color), items in groups.items():
        union: dict[tuple[int, int], int] = {}
        for h, mm in items:
            for e in mm:
                union.setdefault(e, h)
        for h, mm in items:
            mmset = set(mm)
            left = {x for x, _ in mm}
            right = {y for _, y in mm}
            for (x, y), origin in union.items():
                if x in left and y in right and (x, y) not in mmset:
                    raise InducedMatchingViolation(a, b, h, origin, x, y)


def build_matchings(dm, colors, cfg: BuilderConfig, *, index: PairIndex | None = None):
    """(F, matchings_log): greedy maximal matchings per (a, b, h) bucket over
    conflict-free small pairs; matched endpoints collect h, and every vertex
    holds itself. Runtime-checks the induced-matching invariant."""
    n = dm.n
    D = resolve_threshold(n, cfg.D)
    if index is None:
        index = build_pair_index(dm, D)
    colors = list(colors)
    mat = dm.matrix()
    buckets: dict[tuple[int, int, int], list[tuple[int, int]]] = defaultdict(list)
    for (u, v) in sorted(index.small):
        d = index.small_dist[(u, v)]
        if d > D:
            continue  # routed through the cover stage as a forced pair
        H = index.small[(u, v)]
        if _has_conflict(colors, H):
            continue
        for h in H:
            a = int(mat[u, h])
            b = int(mat[h, v])
            buckets[(a, b, h)].append((u, v))
            buckets[(b, a, h)].append((v, u))
    F: dict[int, set[int]] = {v: {v} for v in range(n)}
    log: dict[tuple[int, int, int], int] = {}
    groups: dict[tuple[int, int, int], list] = defaultdict(list)
    for key in sorted(buckets):
        a, b, h = key
        left_used: set[int] = set()
        right_used: set[int] = set()
        mm = []
        for x, y in sorted(buckets[key]):
            if x not in left_used and y not in right_used:
                mm.append((x, y))
                left_used.add(x)
                right_used.add(y)
        log[key] = len(mm)
        for x, y in mm:
            F[x].add(h)
            F[y].add(h)
        groups[(a, b, colors[h])].append((h, mm))
    _check_induced(groups)
    return {v: frozenset(s) for v, s in F.items()}, log


# -- stage 4: assembly -----------------------------------------------------------


def _closed_neighborhoods(F, g: WeightedGraph) -> dict[int, set[int]]:
    out = {}
    for v in range(g.n):
        base = F.get(v, frozenset((v,)))
        ball = set(base)
        for x in base:
            ball.update(g.neighbors(x))
        out[v] = ball
    return out


@dataclass
class SizeLedger:
    total_size: int
    n_times_s: int
    sum_q: int
    sum_r: int
    sum_nf: int
    sum_f: int
    degree_bound: int | None  # (max degree + 1) * sum_f, positive weights only

    @property
    def bound_ok(self) -> bool:
        ok = self.total_size <= self.n_times_s + self.sum_q + self.sum_r + self.sum_nf
        if self.degree_bound is not None:
            ok = ok and self.sum_nf <= self.degree_bound
        return ok


def size_ledger(S, Q, R, F, g: WeightedGraph, hl: HubLabeling) -> SizeLedger:
    nf = _closed_neighborhoods(F, g)
    sum_f = sum(len(s) for s in F.values())
    return SizeLedger(
        total_size=hl.total_size,
        n_times_s=g.n * len(S),
        sum_q=sum(len(s) for s in Q.values()),
        sum_r=sum(len(s) for s in R.values()),
        sum_nf=sum(len(s) for s in nf.values()),
        sum_f=sum_f,
        degree_bound=None if g.has_zero_weights else (g.max_degree + 1) * sum_f,
    )


def _assemble(S, Q, R, F, g: WeightedGraph, dm) -> tuple[HubLabeling, CoverReport]:
    mat = dm.matrix()
    neigh = _closed_neighborhoods(F, g)
    sets = []
    for v in range(g.n):
        members = set(S)
        members.update(Q.get(v, ()))
        members.update(R.get(v, ()))
        members.update(neigh[v])
        row = mat[v]
        sets.append([(h, int(row[h])) for h in sorted(members) if row[h] >= 0])
    hl = HubLabeling(g.n, sets)
    ledger = size_ledger(S, Q, R, F, g, hl)
    if not ledger.bound_ok:
        raise CoverVerificationError(f"size ledger bound violated: {ledger}")
    report = verify_cover(hl, dm)
    if not report.valid:
        raise CoverVerificationError(
            f"assembled labeling fails cover verification on "
            f"{report.uncovered_total} pairs, first {report.uncovered[:5]}"
        )
    return hl, report


def assemble(S, Q, R, F, g: WeightedGraph, dm) -> HubLabeling:
    """hubs(v) = S union Q_v union R_v union N(F_v), distances filled from the
    matrix. Verifies the cover and the size-ledger bound; failures raise."""
    hl, _ = _assemble(S, Q, R, F, g, dm)
    return hl


# -- degree reduction -------------------------------------------------------------


def reduce_degree(g: WeightedGraph):
    """Split high-degree vertices of a unit-weight graph into zero-weight
    chains of clones so that every clone has degree at most 2 + ceil(m/n).

    Returns (reduced graph, representative: original -> clone,
    origin: clone -> original). Distances between representatives equal the
    original distances.
    """
    if g.weight_kind != "unit":
        raise ValueError("degree reduction expects a unit-weight graph")
    n, m = g.n, g.m
    t = -(-m // n) if n else 0
    thresh = 2 + t
    counts = []
    for v in range(n):
        deg = g.degree(v)
        counts.append(1 if deg <= thresh else -(-deg // t))
    starts = [0] * n
    acc = 0
    for v in range(n):
        starts[v] = acc
        acc += counts[v]
    representative = {v: starts[v] for v in range(n)}
    origin = {}
    for v in range(n):
        for i in range(counts[v]):
            origin[starts[v] + i] = v
    slot: dict[tuple[int, int], int] = {}
    for v in range(n):
        if counts[v] > 1:
            for idx, u in enumerate(sorted(g.neighbors(v))):
                slot[(v, u)] = idx // t
    edges = []
    for u, v, _w in g.edges:
        cu = starts[u] + slot.get((u, v), 0)
        cv = starts[v] + slot.get((v, u), 0)
        edges.append((cu, cv, 1))
    for v in range(n):
        for i in range(counts[v] - 1):
            edges.append((starts[v] + i, starts[v] + i + 1, 0))
    return WeightedGraph(acc, edges), representative, origin


def _project(hl_reduced: HubLabeling, representative, origin, dm) -> tuple[HubLabeling, CoverReport]:
    n = dm.n
    mat = dm.matrix()
    sets = []
    for v in range(n):
        rep = representative[v]
        hubs = {origin[h] for h, _ in hl_reduced.hubs[rep]}
        row = mat[v]
        sets.append([(h, int(row[h])) for h in sorted(hubs) if row[h] >= 0])
    hl = HubLabeling(n, sets)
    report = verify_cover(hl, dm)
    if not report.valid:
        raise CoverVerificationError(
            f"projected labeling fails cover verification on {report.uncovered_total} pairs"
        )
    return hl, report


def project_back(hl_reduced: HubLabeling, representative, origin, dm) -> HubLabeling:
    """Pull a labeling of the reduced graph back to the original vertices,
    recomputing distances from the original matrix. Verifies the cover."""
    hl, _ = _project(hl_reduced, representative, origin, dm)
    return hl


# -- driver -----------------------------------------------------------------------


@dataclass
class BuildReport:
    n: int
    m: int
    max_degree: int
    D: int
    seed: int
    reduced: dict | None
    s_size: int
    q_total: int
    q_random: int
    q_forced: int
    r_total: int
    f_total: int
    cover_resamples: int
    color_resamples: int
    bucket_count: int
    matching_hist: dict[int, int]
    ledger: SizeLedger
    cover: CoverReport
    diameter: int

    def to_dict(self) -> dict:
        return {
            "graph": {"n": self.n, "m": self.m, "max_degree": self.max_degree},
            "D": self.D,
            "seed": self.seed,
            "reduced": self.reduced,
            "stages": {
                "S_size": self.s_size,
                "Q_total": self.q_total,
                "Q_random": self.q_random,
                "Q_forced": self.q_forced,
                "R_total": self.r_total,
                "F_total": self.f_total,
                "cover_resamples": self.cover_resamples,
                "color_resamples": self.color_resamples,
                "bucket_count": self.bucket_count,
                "matching_size_hist": {str(k): v for k, v in sorted(self.matching_hist.items())},
            },
            "ledger": {
                "total_size": self.ledger.total_size,
                "n_times_S": self.ledger.n_times_s,
                "sum_Q": self.ledger.sum_q,
                "sum_R": self.ledger.sum_r,
                "sum_NF": self.ledger.sum_nf,
                "sum_F": self.ledger.sum_f,
                "degree_bound": self.ledger.degree_bound,
                "bound_ok": self.ledger.bound_ok,
            },
            "labeling": {
                "valid": self.cover.valid,
                "total_size": self.cover.total_size,
                "avg_hub_size": str(self.cover.avg_hub_size),
                "avg_hub_size_float": float(self.cover.avg_hub_size),
                "bit_estimate": self.cover.bit_estimate,
                "diameter": self.diameter,
            },
        }


@dataclass
class BuildResult:
    graph: WeightedGraph
    labeling: HubLabeling
    artifacts: BuilderArtifacts
    report: BuildReport
    dm: object


def needs_reduction(g: WeightedGraph) -> bool:
    if g.weight_kind != "unit" or g.m == 0:
        return False
    return g.max_degree > 2 + (-(-g.m // g.n))


def _run_stages(g: WeightedGraph, dm, cfg: BuilderConfig):
    D = resolve_threshold(g.n, cfg.D)
    index = _index_for(dm, D, g)
    S, Q, cover_stats = _sample_cover(dm, cfg, index)
    colors, R, color_stats = _sample_colors(dm, cfg, index)
    F, log = build_matchings(dm, colors, cfg, index=index)
    hl, cover = _assemble(S, Q, R, F, g, dm)
    artifacts = BuilderArtifacts(S=S, Q=Q, R=R, F=F, colors=colors, matchings_log=log)
    return hl, cover, artifacts, cover_stats, color_stats, D


def build_for_graph(
    g: WeightedGraph,
    cfg: BuilderConfig | None = None,
    *,
    pair_cap: int = DEFAULT_PAIR_CAP,
) -> BuildResult:
    """Run the full pipeline, inserting the degree reduction when the graph's
    maximum degree exceeds 2 + ceil(m/n)."""
    cfg = cfg or BuilderConfig()
    dm = all_pairs(g, pair_cap=pair_cap)
    reduced_info = None
    if needs_reduction(g):
        g2, representative, origin = reduce_degree(g)
        dm2 = all_pairs(g2, pair_cap=pair_cap)
        hl2, _, artifacts, cover_stats, color_stats, D = _run_stages(g2, dm2, cfg)
        hl, cover = _project(hl2, representative, origin, dm)
        stage_graph, stage_dm, stage_hl = g2, dm2, hl2
        reduced_info = {"n": g2.n, "m": g2.m, "t": -(-g.m // g.n)}
    else:
        hl, cover, artifacts, cover_stats, color_stats, D = _run_stages(g, dm, cfg)
        stage_graph, stage_dm, stage_hl = g, dm, hl
    ledger = size_ledger(artifacts.S, artifacts.Q, artifacts.R, artifacts.F, stage_graph, stage_hl)
    hist: dict[int, int] = defaultdict(int)
    for size in artifacts.matchings_log.values():
        hist[size] += 1
    report = BuildReport(
        n=g.n,
        m=g.m,
        max_degree=g.max_degree,
        D=D,
        seed=cfg.seed,
        reduced=reduced_info,
        s_size=len(artifacts.S),
        q_total=sum(len(s) for s in artifacts.Q.values()),
        q_random=cover_stats.q_random,
        q_forced=cover_stats.q_forced,
        r_total=sum(len(s) for s in artifacts.R.values()),
        f_total=sum(len(s) for s in artifacts.F.values()),
        cover_resamples=cover_stats.attempts,
        color_resamples=color_stats.attempts,
        bucket_count=len(artifacts.matchings_log),
        matching_hist=dict(hist),
        ledger=ledger,
        cover=cover,
        diameter=dm.diameter(),
    )
    return BuildResult(graph=g, labeling=hl, artifacts=artifacts, report=report, dm=dm)
