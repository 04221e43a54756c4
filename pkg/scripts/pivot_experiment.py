#!/usr/bin/env python3
"""Perfect-partition probability as a function of the pivot count.

Monte Carlo estimate of the probability that random timeline pivots isolate a
period of a given length (one pivot in each unit-width flanking slot, none
inside), swept over pivot counts around the closed-form optimum 2T/period.
"""

import argparse

from tempocom.tlsh import optimal_pivots, perfect_partition_counts


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--timeline", type=int, default=1000)
    ap.add_argument("--period", type=int, default=10)
    ap.add_argument("--draws", type=int, default=50000)
    ap.add_argument("--seed", type=int, default=2)
    args = ap.parse_args()

    T, d = args.timeline, args.period
    k_star = optimal_pivots(d, T)
    ks = sorted({max(2, k_star // 4), k_star // 2, k_star,
                 2 * k_star, 4 * k_star})
    counts = perfect_partition_counts(d, T, ks, args.draws, args.seed)
    print(f"# T={T} period={d} k*={k_star} draws={args.draws}")
    print("k,perfect_partitions,probability")
    for k in ks:
        mark = "  # k*" if k == k_star else ""
        print(f"{k},{counts[k]},{counts[k] / args.draws:.6f}{mark}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
