#!/usr/bin/env python3
"""Desk-scale strategy benchmark on a synthetic uniform cloud.

Times the vanilla per-query mode against the precomputed-matrix mode
across thread counts, after verifying both emit identical graphs, and
prints the timing table as CSV. Defaults reproduce the acceptance
benchmark (50k x 256, 100 intervals).
"""

import argparse
import sys

from nervemap.filters import FilterSpec
from nervemap.pipeline import MapperParams, run_benchmark, uniform_cloud


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=50_000)
    ap.add_argument("--dims", type=int, default=256)
    ap.add_argument("--intervals", type=int, default=100)
    ap.add_argument("--overlap", type=float, default=0.3)
    ap.add_argument("--eps", type=float, default=6.5)
    ap.add_argument("--min-pts", type=int, default=5)
    ap.add_argument("--threads", default="1,8",
                    help="comma-separated worker counts")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    pc = uniform_cloud(args.rows, args.dims, seed=args.seed)
    params = MapperParams(
        filters=[FilterSpec(kind="column", column="x0")],
        n=[args.intervals], p=[args.overlap],
        eps=args.eps, min_pts=args.min_pts)
    threads = [int(t) for t in args.threads.split(",")]
    print(f"# {args.rows} rows x {args.dims} dims, n={args.intervals}, "
          f"p={args.overlap}, eps={args.eps}", file=sys.stderr)
    rows, _ = run_benchmark(pc, params, thread_counts=threads)
    print("mode,threads,seconds,peak_matrix_bytes")
    for row in rows:
        print(f"{row.mode},{row.threads},{row.seconds:.3f},{row.peak_matrix_bytes}")


if __name__ == "__main__":
    main()
