"""Machine checks of the family's structural guarantees: unique midpoint
paths for parity-matching endpoint pairs, and the closure-counting bound for
arbitrary valid labelings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .family_gen import KIND_G, KIND_H, FamilyInstance, LevelCoord
from .graph_core import (
    ShortestPathTree,
    WeightedGraph,
    all_pairs,
    canonical_trees,
    count_shortest_paths,
    distances_from,
)
from .hub_labeling import HubLabeling, monotone_closure, verify_cover


@dataclass(frozen=True)
class TripletReport:
    checked: int
    unique_ok: int
    midpoint_ok: int
    failures: tuple[tuple, ...]

    @property
    def passed(self) -> bool:
        return not self.failures and self.checked == self.unique_ok == self.midpoint_ok


def parity_pairs(params) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (x, z) coordinate pairs whose difference is even in every
    coordinate; there are s^ell * (s/2)^ell of them."""
    s = params.s
    for x in itertools.product(range(s), repeat=params.ell):
        steps = [range(xk % 2, s, 2) for xk in x]
        for z in itertools.product(*steps):
            yield x, z


def expected_unique_length(params, x, z) -> int:
    """Length of the point-symmetric midpoint path between v_{0,x} and
    v_{2*ell,z}: 2*ell*A plus twice the squared half-differences."""
    half = [(zk - xk) // 2 for xk, zk in zip(x, z)]
    return 2 * params.ell * params.base_weight + 2 * sum(d * d for d in half)


def _audit_one_pair(g: WeightedGraph, inst: FamilyInstance, x, z):
    params = inst.params
    u = inst.id_of(0, x)
    v = inst.id_of(2 * params.ell, z)
    mid_coords = tuple((xk + zk) // 2 for xk, zk in zip(x, z))
    mid = inst.id_of(params.ell, mid_coords)
    du = distances_from(g, u)
    problems = []
    duv = int(du[v])
    if duv != expected_unique_length(params, x, z):
        problems.append("length")
    count = count_shortest_paths(g, u, v, dists_u=du)
    unique = count == 1
    if not unique:
        problems.append(f"count={count}")
    dv = distances_from(g, v)
    midpoint = int(du[mid]) >= 0 and int(dv[mid]) >= 0 and int(du[mid]) + int(dv[mid]) == duv
    if not midpoint:
        problems.append("midpoint")
    return unique, midpoint, problems


def audit_lemma1(
    inst: FamilyInstance,
    *,
    sample: int | None = None,
    seed: int = 0,
) -> TripletReport:
    """Check uniqueness and midpoint membership for parity-matching endpoint
    pairs, exhaustively or on a seeded sample of the pairs."""
    if inst.kind not in (KIND_H, KIND_G):
        raise ValueError("audit applies to H or G instances, not deleted variants")
    pairs = list(parity_pairs(inst.params))
    if sample is not None and sample < len(pairs):
        rng = np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), 7]))
        picks = rng.choice(len(pairs), size=sample, replace=False)
        pairs = [pairs[int(i)] for i in sorted(picks)]
    g = inst.graph
    checked = unique_ok = midpoint_ok = 0
    failures = []
    for x, z in pairs:
        checked += 1
        unique, midpoint, problems = _audit_one_pair(g, inst, x, z)
        unique_ok += unique
        midpoint_ok += midpoint
        if problems:
            failures.append((x, z, tuple(problems)))
    failures.sort()
    return TripletReport(
        checked=checked,
        unique_ok=unique_ok,
        midpoint_ok=midpoint_ok,
        failures=tuple(failures),
    )


@dataclass(frozen=True)
class CountingReport:
    lhs: int
    rhs: int
    triplets: int
    membership_failures: tuple[tuple, ...]

    @property
    def passed(self) -> bool:
        return self.lhs >= self.rhs and not self.membership_failures


def counting_rhs(params) -> int:
    """(s^ell)^2 / 2^ell, the closure-size floor forced by the triplets."""
    return (params.level_size**2) >> params.ell


def audit_counting(
    inst: FamilyInstance,
    hl: HubLabeling,
    trees: Mapping[int, ShortestPathTree] | None = None,
) -> CountingReport:
    """Closure-counting audit: every triplet's midpoint must sit in the closure
    of one endpoint, and total closure size must reach the counting floor.

    The labeling must pass cover verification first; an invalid labeling is an
    error, not a reported failure.
    """
    g = inst.graph
    dm = all_pairs(g)
    report = verify_cover(hl, dm)
    if not report.valid:
        raise ValueError(
            f"labeling is not a valid cover ({report.uncovered_total} uncovered pairs)"
        )
    if trees is None:
        trees = canonical_trees(g)
    closed = monotone_closure(hl, trees)
    closure_sets = [frozenset(h for h, _ in closed.hubs[v]) for v in range(g.n)]
    lhs = sum(len(s) for s in closure_sets)
    params = inst.params
    failures = []
    count = 0
    for x, z in parity_pairs(params):
        count += 1
        y = tuple((xk + zk) // 2 for xk, zk in zip(x, z))
        xv = inst.id_of(0, x)
        zv = inst.id_of(2 * params.ell, z)
        yv = inst.id_of(params.ell, y)
        if yv not in closure_sets[xv] and yv not in closure_sets[zv]:
            failures.append((x, y, z))
    return CountingReport(
        lhs=lhs,
        rhs=counting_rhs(params),
        triplets=count,
        membership_failures=tuple(sorted(failures)),
    )
