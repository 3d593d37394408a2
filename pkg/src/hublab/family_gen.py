"""Layered hard-instance families: the weighted level graph, its max-degree-3
expansion, and mid-level deletion variants, all with coordinate-addressable
vertices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .graph_core import ResourceLimitError, WeightedGraph

DEFAULT_VERTEX_CAP = 5_000_000

ROLE_LEVEL = "level"
ROLE_TREE_INTERNAL = "tree-internal"
ROLE_TREE_LEAF = "tree-leaf"
ROLE_AUX = "path-auxiliary"

KIND_H = "H"
KIND_G = "G"
KIND_G_PRIME = "G_prime"


@dataclass(frozen=True)
class FamilyParams:
    """Side-length exponent b (s = 2^b) and level count parameter ell
    (levels 0..2*ell)."""

    b: int
    ell: int

    def __post_init__(self):
        if self.b < 1 or self.ell < 1:
            raise ValueError("b and ell must be >= 1")

    @property
    def s(self) -> int:
        return 1 << self.b

    @property
    def num_levels(self) -> int:
        return 2 * self.ell + 1

    @property
    def level_size(self) -> int:
        return self.s**self.ell

    @property
    def base_weight(self) -> int:
        """The constant additive weight A = 3 * ell * s^2."""
        return 3 * self.ell * self.s * self.s


class LevelCoord(NamedTuple):
    level: int
    coords: tuple[int, ...]


@dataclass
class _ExpansionInfo:
    """Bookkeeping for mid-level deletions: which expansion vertices belong to
    each level vertex and each subdivided edge."""

    tree_ids: dict[int, list[int]]
    edge_aux: dict[tuple[int, int], list[int]]
    h_edges: tuple[tuple[int, int, int], ...]


@dataclass
class FamilyInstance:
    graph: WeightedGraph
    params: FamilyParams
    kind: str
    coord_to_id: dict[LevelCoord, int]
    id_roles: list[str]
    removed: frozenset[LevelCoord] = frozenset()
    expansion: _ExpansionInfo | None = field(default=None, repr=False)

    def id_of(self, level: int, coords) -> int:
        return self.coord_to_id[LevelCoord(level, tuple(coords))]

    def level_coords(self, level: int) -> Iterator[LevelCoord]:
        for key in self.coord_to_id:
            if key.level == level:
                yield key


def coords_of_index(idx: int, params: FamilyParams) -> tuple[int, ...]:
    """Mixed-radix decode: coordinate 1 is the least significant digit."""
    s = params.s
    out = []
    for _ in range(params.ell):
        out.append(idx % s)
        idx //= s
    return tuple(out)


def index_of_coords(coords, params: FamilyParams) -> int:
    s = params.s
    idx = 0
    for k in range(params.ell - 1, -1, -1):
        idx = idx * s + coords[k]
    return idx


def _gap_coordinate(i: int, ell: int) -> int:
    """1-indexed coordinate that may change between level i and i+1."""
    return i + 1 if i < ell else 2 * ell - i


def monotone_coordinate_window(i: int, j: int, ell: int) -> set[int]:
    """Coordinates (1-indexed) changeable on a level-monotone walk i -> j.

    Cross-level distances survive the degree-3 expansion exactly for pairs
    whose differing coordinates lie in this window; other pairs force a
    turning point that the expansion's trees shortcut.
    """
    if not 0 <= i < j <= 2 * ell:
        raise ValueError("need 0 <= i < j <= 2*ell")
    return {_gap_coordinate(g, ell) for g in range(i, j)}


def build_H(params: FamilyParams, *, vertex_cap: int = DEFAULT_VERTEX_CAP) -> FamilyInstance:
    """The weighted level graph on (2*ell+1) * s^ell vertices.

    An edge joins consecutive-level vertices whose coordinate vectors agree
    except possibly on the gap coordinate; its weight is A + delta^2 where
    delta is the change on that coordinate.
    """
    s = params.s
    ell = params.ell
    per_level = params.level_size
    n = params.num_levels * per_level
    if n > vertex_cap:
        raise ResourceLimitError(f"level graph needs {n} vertices, cap is {vertex_cap}")
    A = params.base_weight

    def vid(level: int, idx: int) -> int:
        return level * per_level + idx

    edges = []
    for i in range(2 * ell):
        c = _gap_coordinate(i, ell)
        stride = s ** (c - 1)
        for idx in range(per_level):
            jc = (idx // stride) % s
            base = vid(i, idx)
            for jc2 in range(s):
                nid = idx + (jc2 - jc) * stride
                delta = jc - jc2
                edges.append((base, vid(i + 1, nid), A + delta * delta))

    coord_to_id = {}
    for level in range(params.num_levels):
        for idx in range(per_level):
            coord_to_id[LevelCoord(level, coords_of_index(idx, params))] = vid(level, idx)
    graph = WeightedGraph(n, edges)
    return FamilyInstance(
        graph=graph,
        params=params,
        kind=KIND_H,
        coord_to_id=coord_to_id,
        id_roles=[ROLE_LEVEL] * n,
    )


def expand_to_G(inst: FamilyInstance, *, vertex_cap: int = DEFAULT_VERTEX_CAP) -> FamilyInstance:
    """Unit-weight, max-degree-3 realization of the level graph.

    Every level vertex gains balanced fan-in/fan-out binary trees with s
    leaves and depth b; every weighted edge becomes a leaf-to-leaf path whose
    length restores the original weight end to end.
    """
    if inst.kind != KIND_H:
        raise ValueError("expansion starts from a level-graph instance")
    params = inst.params
    b, ell, s = params.b, params.ell, params.s
    per_level = params.level_size
    n_level = params.num_levels * per_level
    tree_size = 2 * s - 1  # perfectly balanced binary tree with s leaves
    path_edge_deficit = 2 * b + 2

    eu, ev, ew = inst.graph.edge_arrays()
    total_w = int(ew.sum())
    n_trees = 2 * n_level - 2 * per_level  # no fan-in at level 0, no fan-out on top
    est = n_level + n_trees * tree_size + (total_w - (path_edge_deficit + 1) * len(ew))
    if est > vertex_cap:
        raise ResourceLimitError(f"expansion needs about {est} vertices, cap is {vertex_cap}")

    edges: list[tuple[int, int, int]] = []
    tree_ids: dict[int, list[int]] = {v: [] for v in range(n_level)}
    in_block: dict[int, int] = {}
    out_block: dict[int, int] = {}
    roles = [ROLE_LEVEL] * n_level
    next_id = n_level

    def add_tree(owner: int) -> int:
        nonlocal next_id
        block = next_id
        next_id += tree_size
        tree_ids[owner].extend(range(block, block + tree_size))
        roles.extend([ROLE_TREE_INTERNAL] * (s - 1))
        roles.extend([ROLE_TREE_LEAF] * s)
        edges.append((owner, block, 1))
        # Heap layout: node h at block + h - 1, children 2h and 2h + 1.
        for h in range(1, s):
            edges.append((block + h - 1, block + 2 * h - 1, 1))
            edges.append((block + h - 1, block + 2 * h, 1))
        return block

    for level in range(params.num_levels):
        for idx in range(per_level):
            v = level * per_level + idx
            if level > 0:
                in_block[v] = add_tree(v)
            if level < params.num_levels - 1:
                out_block[v] = add_tree(v)

    def leaf_id(block: int, k: int) -> int:
        return block + s - 1 + k

    edge_aux: dict[tuple[int, int], list[int]] = {}
    h_edges = []
    for u, v, w in zip(eu.tolist(), ev.tolist(), ew.tolist()):
        # u sits one level below v by construction of build_H.
        i = u // per_level
        c = _gap_coordinate(i, ell)
        stride = s ** (c - 1)
        ku = (v % per_level) // stride % s  # leaf of u's fan-out: v's coordinate
        kv = (u % per_level) // stride % s  # leaf of v's fan-in: u's coordinate
        start = leaf_id(out_block[u], ku)
        end = leaf_id(in_block[v], kv)
        n_aux = w - path_edge_deficit - 1
        aux = list(range(next_id, next_id + n_aux))
        next_id += n_aux
        roles.extend([ROLE_AUX] * n_aux)
        prev = start
        for a in aux:
            edges.append((prev, a, 1))
            prev = a
        edges.append((prev, end, 1))
        edge_aux[(u, v)] = aux
        h_edges.append((u, v, w))

    graph = WeightedGraph(next_id, edges)
    return FamilyInstance(
        graph=graph,
        params=params,
        kind=KIND_G,
        coord_to_id=dict(inst.coord_to_id),
        id_roles=roles,
        expansion=_ExpansionInfo(tree_ids=tree_ids, edge_aux=edge_aux, h_edges=tuple(h_edges)),
    )


def delete_level_mid(inst: FamilyInstance, keep: Callable[[LevelCoord], bool]) -> FamilyInstance:
    """Remove middle-level vertices failing the keep predicate.

    Each removal drops the level vertex, both of its trees, and every
    auxiliary vertex on its subdivided incident edges. Remaining vertices are
    renumbered compactly; distances can only grow.
    """
    if inst.kind != KIND_G:
        raise ValueError("deletion applies to expanded instances")
    params = inst.params
    per_level = params.level_size
    mid = params.ell
    info = inst.expansion
    removed_coords = []
    dropped = np.zeros(inst.graph.n, dtype=bool)
    for idx in range(per_level):
        coord = LevelCoord(mid, coords_of_index(idx, params))
        if keep(coord):
            continue
        removed_coords.append(coord)
        v = inst.coord_to_id[coord]
        dropped[v] = True
        dropped[info.tree_ids[v]] = True
        for (a, b_), aux in info.edge_aux.items():
            if a == v or b_ == v:
                if aux:
                    dropped[aux] = True
    if not removed_coords:
        return FamilyInstance(
            graph=inst.graph,
            params=params,
            kind=KIND_G_PRIME,
            coord_to_id=dict(inst.coord_to_id),
            id_roles=list(inst.id_roles),
            removed=frozenset(),
        )
    keep_mask = ~dropped
    new_ids = np.cumsum(keep_mask) - 1
    eu, ev, ew = inst.graph.edge_arrays()
    emask = keep_mask[eu] & keep_mask[ev]
    new_edges = np.stack([new_ids[eu[emask]], new_ids[ev[emask]], ew[emask]], axis=1)
    n_new = int(keep_mask.sum())
    graph = WeightedGraph(n_new, new_edges, validate=False)
    coord_to_id = {
        coord: int(new_ids[old])
        for coord, old in inst.coord_to_id.items()
        if keep_mask[old]
    }
    roles_arr = np.array(inst.id_roles, dtype=object)[keep_mask]
    return FamilyInstance(
        graph=graph,
        params=params,
        kind=KIND_G_PRIME,
        coord_to_id=coord_to_id,
        id_roles=list(roles_arr),
        removed=frozenset(removed_coords),
    )


# -- sidecar metadata --------------------------------------------------------
# JSON with the parameters, the coordinate map for level vertices, removals,
# and a run-length encoding of vertex roles.


def _coord_key(coord: LevelCoord) -> str:
    return f"{coord.level}:{','.join(str(c) for c in coord.coords)}"


def _parse_coord_key(key: str) -> LevelCoord:
    level, _, rest = key.partition(":")
    return LevelCoord(int(level), tuple(int(c) for c in rest.split(",")))


def _roles_rle(roles: list[str]) -> list[list]:
    runs = []
    start = 0
    for i in range(1, len(roles) + 1):
        if i == len(roles) or roles[i] != roles[start]:
            runs.append([start, i, roles[start]])
            start = i
    return runs


def write_metadata(inst: FamilyInstance, path) -> None:
    payload = {
        "schema": 1,
        "kind": inst.kind,
        "b": inst.params.b,
        "ell": inst.params.ell,
        "s": inst.params.s,
        "base_weight": inst.params.base_weight,
        "n": inst.graph.n,
        "m": inst.graph.m,
        "coord_to_id": {_coord_key(c): i for c, i in sorted(inst.coord_to_id.items())},
        "removed": sorted(_coord_key(c) for c in inst.removed),
        "roles_rle": _roles_rle(inst.id_roles),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_metadata(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def instance_from_files(graph: WeightedGraph, meta: dict) -> FamilyInstance:
    params = FamilyParams(b=meta["b"], ell=meta["ell"])
    if graph.n != meta["n"] or graph.m != meta["m"]:
        raise ValueError("graph file does not match metadata")
    roles = [None] * graph.n
    for start, end, role in meta["roles_rle"]:
        for i in range(start, end):
            roles[i] = role
    return FamilyInstance(
        graph=graph,
        params=params,
        kind=meta["kind"],
        coord_to_id={_parse_coord_key(k): v for k, v in meta["coord_to_id"].items()},
        id_roles=roles,
        removed=frozenset(_parse_coord_key(k) for k in meta["removed"]),
    )
