"""Simulated three-party sum-index protocol driven by distance labels.

Alice and Bob share a bit string, encode it as mid-level deletions of the
expanded family graph, and send the referee one vertex label plus their index.
The referee compares the measured distance with the ideal unique-path length
to recover the bit at the summed index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .family_gen import (
    DEFAULT_VERTEX_CAP,
    KIND_G_PRIME,
    FamilyInstance,
    FamilyParams,
    LevelCoord,
    build_H,
    delete_level_mid,
    expand_to_G,
)
from .graph_core import UNREACHABLE, WeightedGraph, distance_between, distances_from
from .hub_labeling import query as hub_query
from .upperbound_builder import BuilderConfig, build_for_graph


@dataclass(frozen=True)
class SumIndexInstance:
    params: FamilyParams
    bits: str

    def __post_init__(self):
        if set(self.bits) - {"0", "1"}:
            raise ValueError("bits must be a 0/1 string")
        if len(self.bits) != self.m:
            raise ValueError(f"bit string must have length m = {self.m}")

    @property
    def m(self) -> int:
        return (self.params.s // 2) ** self.params.ell


@dataclass(frozen=True)
class SumIndexTranscript:
    a: int
    b: int
    alice_vertex: LevelCoord
    bob_vertex: LevelCoord
    alice_label_bits: int
    bob_label_bits: int
    measured_dist: object
    ideal_dist: int
    decoded: int
    expected: int


def repr_value(vec, params: FamilyParams) -> int:
    """Mixed-radix value of a coordinate vector, digits base s/2, coordinate 1
    least significant, reduced mod m."""
    base = params.s // 2
    m = base**params.ell
    total = 0
    for k in range(params.ell - 1, -1, -1):
        total = total * base + vec[k]
    return total % m


def repr_decode(a: int, params: FamilyParams) -> tuple[int, ...]:
    """The unique vector in [0, s/2 - 1]^ell whose representation equals a."""
    base = params.s // 2
    m = base**params.ell
    if not 0 <= a < m:
        raise ValueError(f"index {a} out of range [0, {m})")
    out = []
    for _ in range(params.ell):
        out.append(a % base)
        a //= base
    return tuple(out)


def build_base_graph(params: FamilyParams, *, vertex_cap: int = DEFAULT_VERTEX_CAP) -> FamilyInstance:
    """The undeleted expanded instance the deletions start from."""
    return expand_to_G(build_H(params, vertex_cap=vertex_cap), vertex_cap=vertex_cap)


def build_instance_graph(
    inst: SumIndexInstance,
    *,
    base: FamilyInstance | None = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> FamilyInstance:
    """Deleted variant encoding the bit string: mid-level vertex v_{ell,x}
    survives iff bits[repr(x)] is 1. Each bit controls 2^ell mid vertices."""
    params = inst.params
    if base is None:
        base = build_base_graph(params, vertex_cap=vertex_cap)
    bits = inst.bits

    def keep(coord: LevelCoord) -> bool:
        return bits[repr_value(coord.coords, params)] == "1"

    return delete_level_mid(base, keep)


def ideal_distance(params: FamilyParams, xs, zs) -> int:
    """Unique-path length between v_{0,2x} and v_{2*ell,2z} when the midpoint
    survives: 2*ell*A + 2*sum (z_i - x_i)^2."""
    return 2 * params.ell * params.base_weight + 2 * sum(
        (z - x) * (z - x) for x, z in zip(xs, zs)
    )


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length() if x >= 1 else 0


def _oracle_label_bits(params: FamilyParams, n: int) -> int:
    # Accounting convention for the no-labeling baseline: a full distance row,
    # each entry wide enough for the largest finite distance plus a
    # reachability flag.
    upper = (2 * params.ell + 1) * (params.base_weight + (params.s - 1) ** 2)
    return n * (_ceil_log2(upper + 1) + 1)


def run_protocol(
    inst: SumIndexInstance,
    a: int,
    b: int,
    *,
    mode: str = "oracle",
    base: FamilyInstance | None = None,
    gprime: FamilyInstance | None = None,
    builder: BuilderConfig | None = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> SumIndexTranscript:
    """One protocol round. The decoded bit is 1 iff the measured distance
    equals the ideal unique-path length; disconnection decodes 0.

    mode "oracle" measures exact distances; mode "hub" builds a hub labeling
    of the deleted graph and answers the query from labels, pricing messages
    by the labeling's bit convention.
    """
    params = inst.params
    m = inst.m
    if not 0 <= a < m or not 0 <= b < m:
        raise ValueError(f"indices must lie in [0, {m})")
    if mode not in ("oracle", "hub"):
        raise ValueError(f"unknown labeling mode {mode!r}")
    xs = repr_decode(a, params)
    zs = repr_decode(b, params)
    alice = LevelCoord(0, tuple(2 * x for x in xs))
    bob = LevelCoord(2 * params.ell, tuple(2 * z for z in zs))
    if gprime is None:
        gprime = build_instance_graph(inst, base=base, vertex_cap=vertex_cap)
    if gprime.kind != KIND_G_PRIME:
        raise ValueError("protocol runs on the deleted instance")
    u = gprime.coord_to_id[alice]
    v = gprime.coord_to_id[bob]
    index_bits = _ceil_log2(m) if m > 1 else 1
    if mode == "oracle":
        measured = distance_between(gprime.graph, u, v)
        label_bits = _oracle_label_bits(params, gprime.graph.n)
        alice_bits = bob_bits = label_bits + index_bits
    else:
        result = build_for_graph(gprime.graph, builder or BuilderConfig())
        hl = result.labeling
        measured = hub_query(hl, u, v)
        per_entry = _ceil_log2(hl.n) + _ceil_log2(result.report.diameter + 1)
        alice_bits = hl.size(u) * per_entry + index_bits
        bob_bits = hl.size(v) * per_entry + index_bits
    ideal = ideal_distance(params, xs, zs)
    decoded = 1 if measured == ideal else 0
    expected = int(inst.bits[(a + b) % m])
    return SumIndexTranscript(
        a=a,
        b=b,
        alice_vertex=alice,
        bob_vertex=bob,
        alice_label_bits=alice_bits,
        bob_label_bits=bob_bits,
        measured_dist=measured,
        ideal_dist=ideal,
        decoded=decoded,
        expected=expected,
    )


def sweep(
    inst: SumIndexInstance,
    *,
    mode: str = "oracle",
    base: FamilyInstance | None = None,
    pairs=None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    builder: BuilderConfig | None = None,
) -> list[SumIndexTranscript]:
    """Run the protocol on every (a, b) pair, or on the given pairs, against a
    single deleted graph."""
    gprime = build_instance_graph(inst, base=base, vertex_cap=vertex_cap)
    if pairs is None:
        pairs = itertools.product(range(inst.m), repeat=2)
    return [
        run_protocol(inst, a, b, mode=mode, gprime=gprime, builder=builder)
        for a, b in pairs
    ]


def measure_message_size(
    inst: SumIndexInstance,
    *,
    mode: str = "oracle",
    base: FamilyInstance | None = None,
    builder: BuilderConfig | None = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> tuple[int, float]:
    """(max, average) message size in bits over the endpoint vertices of the
    deleted graph, including the transmitted index."""
    params = inst.params
    gprime = build_instance_graph(inst, base=base, vertex_cap=vertex_cap)
    endpoints = [
        vid
        for coord, vid in gprime.coord_to_id.items()
        if coord.level in (0, 2 * params.ell)
    ]
    index_bits = _ceil_log2(inst.m) if inst.m > 1 else 1
    sizes = []
    if mode == "oracle":
        for vid in endpoints:
            ecc = int(distances_from(gprime.graph, vid).max())
            sizes.append(gprime.graph.n * (_ceil_log2(max(ecc, 0) + 1) + 1) + index_bits)
    elif mode == "hub":
        result = build_for_graph(gprime.graph, builder or BuilderConfig())
        per_entry = _ceil_log2(result.labeling.n) + _ceil_log2(result.report.diameter + 1)
        for vid in endpoints:
            sizes.append(result.labeling.size(vid) * per_entry + index_bits)
    else:
        raise ValueError(f"unknown labeling mode {mode!r}")
    return max(sizes), sum(sizes) / len(sizes)
