import itertools

import pytest

from hublab.family_gen import FamilyParams, LevelCoord
from hublab.graph_core import UNREACHABLE, distance_between
from hublab.sumindex_protocol import (
    SumIndexInstance,
    build_base_graph,
    build_instance_graph,
    ideal_distance,
    measure_message_size,
    repr_decode,
    repr_value,
    run_protocol,
    sweep,
)
from hublab.upperbound_builder import BuilderConfig

P22 = FamilyParams(2, 2)


def test_instance_validation():
    with pytest.raises(ValueError):
        SumIndexInstance(P22, "10")  # m = 4
    with pytest.raises(ValueError):
        SumIndexInstance(P22, "10x0")
    assert SumIndexInstance(P22, "1010").m == 4


def test_repr_decode_values():
    assert repr_decode(0, P22) == (0, 0)
    assert repr_decode(3, P22) == (1, 1)  # 1 * 2^0 + 1 * 2^1
    assert repr_value((1, 1), P22) == 3


def test_repr_round_trip_and_homomorphism():
    for params in (P22, FamilyParams(1, 2), FamilyParams(2, 3)):
        m = (params.s // 2) ** params.ell
        for a in range(m):
            assert repr_value(repr_decode(a, params), params) == a
        half = params.s // 2
        for xs in itertools.product(range(half), repeat=params.ell):
            for zs in itertools.product(range(half), repeat=params.ell):
                s = tuple(x + z for x, z in zip(xs, zs))
                assert repr_value(s, params) == (repr_value(xs, params) + repr_value(zs, params)) % m


def test_repr_decode_range_error():
    with pytest.raises(ValueError):
        repr_decode(4, P22)
    with pytest.raises(ValueError):
        repr_decode(-1, P22)


def test_all_ones_keeps_everything():
    base = build_base_graph(P22)
    gp = build_instance_graph(SumIndexInstance(P22, "1111"), base=base)
    assert gp.graph.n == base.graph.n
    assert not gp.removed


def test_all_zeros_disconnects_endpoints():
    p = FamilyParams(1, 1)
    gp = build_instance_graph(SumIndexInstance(p, "0"))
    assert not any(c.level == 1 for c in gp.coord_to_id)
    u = gp.id_of(0, (0,))
    v = gp.id_of(2, (0,))
    assert distance_between(gp.graph, u, v) is UNREACHABLE


def test_bit_pattern_controls_surviving_mid_coords():
    base = build_base_graph(P22)
    gp = build_instance_graph(SumIndexInstance(P22, "1010"), base=base)
    survivors = {c.coords for c in gp.coord_to_id if c.level == 2}
    expected = {
        coords
        for coords in itertools.product(range(4), repeat=2)
        if repr_value(coords, P22) in (0, 2)
    }
    assert survivors == expected
    assert len(survivors) == 8  # each bit controls 2^ell mid vertices


def test_protocol_all_ones_decodes_one():
    base = build_base_graph(P22)
    inst = SumIndexInstance(P22, "1111")
    gp = build_instance_graph(inst, base=base)
    for a, b in [(0, 0), (1, 2), (3, 3)]:
        t = run_protocol(inst, a, b, gprime=gp)
        assert t.measured_dist == t.ideal_dist
        assert t.decoded == 1 == t.expected


def test_protocol_removed_midpoint_decodes_zero():
    base = build_base_graph(P22)
    inst = SumIndexInstance(P22, "0111")
    t = run_protocol(inst, 0, 0, base=base)
    assert t.ideal_dist == 4 * 96
    assert t.measured_dist is UNREACHABLE or t.measured_dist > t.ideal_dist
    assert t.decoded == 0 == t.expected


def test_protocol_index_range_errors():
    inst = SumIndexInstance(P22, "1111")
    with pytest.raises(ValueError):
        run_protocol(inst, 4, 0)
    with pytest.raises(ValueError):
        run_protocol(inst, 0, -1)


def test_protocol_matches_lemma_length_formula():
    assert ideal_distance(P22, (0, 1), (1, 1)) == 4 * 96 + 2 * 1
    assert ideal_distance(FamilyParams(1, 1), (0,), (1,)) == 2 * 12 + 2


def test_hub_mode_small_instance():
    p = FamilyParams(1, 1)
    for bits, expected in (("1", 1), ("0", 0)):
        inst = SumIndexInstance(p, bits)
        t = run_protocol(inst, 0, 0, mode="hub", builder=BuilderConfig(seed=2))
        assert t.decoded == expected == t.expected
        assert t.alice_label_bits > 0 and t.bob_label_bits > 0


def test_message_size_measurement():
    p = FamilyParams(1, 1)
    inst = SumIndexInstance(p, "1")
    mx, avg = measure_message_size(inst, mode="oracle")
    assert mx >= avg > 0
    mx_hub, avg_hub = measure_message_size(inst, mode="hub", builder=BuilderConfig(seed=2))
    assert mx_hub >= avg_hub > 0
    assert mx_hub < mx  # hub labels beat shipping a distance table here


def test_sweep_small_exhaustive():
    p = FamilyParams(1, 2)  # m = 1, tiny
    inst = SumIndexInstance(p, "1")
    transcripts = sweep(inst)
    assert len(transcripts) == 1
    assert all(t.decoded == t.expected for t in transcripts)
