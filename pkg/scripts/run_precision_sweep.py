"""Minimum precision for perfect simulation as the graph grows.

    python scripts/run_precision_sweep.py --sizes 50,100,200,400,800,1600,3000
"""

import argparse
import time

from wlmpnn.harness import draw_gammas, precision_sweep
from wlmpnn.report import emit_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="50,100,200,400,800,1600")
    ap.add_argument("--num-gammas", type=int, default=10)
    ap.add_argument("--gamma-max", type=float, default=0.5)
    ap.add_argument("--p-max", type=int, default=1024)
    ap.add_argument("--avg-degree", type=float, default=4.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="sweep.csv")
    ap.add_argument("--summary", default="sweep_summary.csv")
    args = ap.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    gammas = draw_gammas(args.num_gammas, 7, args.gamma_max)
    t0 = time.perf_counter()
    records, summary = precision_sweep(sizes, gammas, args.seed, args.p_max, args.avg_degree,
                                       workers=args.workers)
    emit_report(records, "csv", args.out, vars(args))
    emit_report(summary, "csv", args.summary, vars(args))
    for s in summary:
        print(f"n={s.n:5d}  bits {s.mean_bits:6.2f} +- {s.sd_bits:5.2f}  ({s.num_found}/{s.num_gammas} found)")
    print(f"{time.perf_counter() - t0:.0f}s -> {args.out}, {args.summary}")


if __name__ == "__main__":
    main()
