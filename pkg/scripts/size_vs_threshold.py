#!/usr/bin/env python3
"""Sweep the builder threshold D over a small corpus and tabulate label sizes.

Usage:
    python scripts/size_vs_threshold.py [--seed N] [--d-values 2,3,4,8]

Prints one CSV row per (graph, D) with the stage breakdown, so the tradeoff
between the random cover stage (dominates at small D) and the bucket stage
(grows with D) is visible directly.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

from hublab.corpus import erdos_renyi_m, grid_graph, path_graph, random_regular_graph
from hublab.upperbound_builder import BuilderConfig, build_for_graph


def corpus(seed: int):
    return [
        ("3reg-400", random_regular_graph(400, 3, seed=seed)),
        ("er-400", erdos_renyi_m(400, 800, seed=seed)),
        ("grid-20x20", grid_graph(20, 20)),
        ("path-400", path_graph(400)),
    ]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--d-values", default="2,3,4,6,8")
    args = ap.parse_args()
    d_values = [int(x) for x in args.d_values.split(",")]

    writer = csv.writer(sys.stdout)
    writer.writerow(
        ["graph", "n", "D", "valid", "avg_hub_size", "S_size", "Q_total", "R_total",
         "F_total", "buckets", "wall_s"]
    )
    for name, g in corpus(args.seed):
        for d in d_values:
            t0 = time.perf_counter()
            res = build_for_graph(g, BuilderConfig(D=d, seed=args.seed))
            rep = res.report
            writer.writerow(
                [name, g.n, d, rep.cover.valid, f"{float(rep.cover.avg_hub_size):.2f}",
                 rep.s_size, rep.q_total, rep.r_total, rep.f_total, rep.bucket_count,
                 f"{time.perf_counter() - t0:.2f}"]
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
