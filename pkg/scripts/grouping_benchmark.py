#!/usr/bin/env python3
"""Interval-pruning wall-clock benchmark: grouped vs per-interval bounds.

Times the pruning phase with and without shared-prefix group bounds across a
ladder of timeline lengths, printing the speedup ratio and the growth factor
between successive lengths.
"""

import argparse
import gc
import time

from tempocom.graph import NormalizationConfig
from tempocom.pruning import BoundsTable, build_groups, precompute, prune_all
from tempocom.synth import SynthConfig, generate


def best_of(reps, fn):
    out = float("inf")
    for _ in range(reps):
        gc.collect()
        gc.disable()
        t0 = time.perf_counter()
        fn()
        out = min(out, time.perf_counter() - t0)
        gc.enable()
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=200)
    ap.add_argument("--timelines", type=int, nargs="+",
                    default=[128, 256, 512])
    ap.add_argument("--phi-star", type=float, default=0.02,
                    help="incumbent conductance used for pruning")
    ap.add_argument("--alpha", type=float, default=0.2)
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()

    norm = NormalizationConfig(args.alpha)
    print("T,precompute_s,grouped_s,plain_s,ratio")
    prev_grouped = None
    for T in args.timelines:
        g, _ = generate(SynthConfig(n=args.nodes, attachment=5, timeline=T,
                                    planted_nodes=20, planted_length=10,
                                    contrast=8.0, seed=1), norm)
        t0 = time.perf_counter()
        bt = precompute(g, 2)
        pre = time.perf_counter() - t0
        groups = build_groups(T, 0.5)

        def run(use_groups):
            fresh = BoundsTable(g, 2, bt.entries)
            prune_all(fresh, groups, args.phi_star, norm,
                      use_groups=use_groups)

        tg = best_of(args.reps, lambda: run(True))
        tn = best_of(args.reps, lambda: run(False))
        line = f"{T},{pre:.2f},{tg:.4f},{tn:.4f},{tg / tn:.3f}"
        if prev_grouped is not None:
            line += f"  # grouped growth vs previous T: {tg / prev_grouped:.2f}"
        prev_grouped = tg
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
