"""Batch command line: data wrangling, mapper parameter sweeps, benchmark
mode, and the HTTP server launcher.

Exit codes: 0 success, 2 usage error, 3 data error, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .clustering import DistanceStrategy, effective_mem_budget
from .dataset import load_csv, read_csv_text, wrangle, write_clean_csv
from .errors import DataError
from .filters import FilterSpec, uses_reference_subsample
from .pipeline import MapperParams, compute_mapper, run_benchmark


def _filter_arg(text: str) -> FilterSpec:
    try:
        return FilterSpec.from_json_obj(json.loads(text))
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"--filter is not valid JSON: {e}")
    except DataError as e:
        raise argparse.ArgumentTypeError(str(e))


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _num_token(v) -> str:
    """Float rendered filename-safe: '.' becomes 'p' (0.3 -> 0p3)."""
    return format(v, "g").replace(".", "p")


def _add_mapper_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--input", required=True)
    sp.add_argument("--output-dir", default=None)
    sp.add_argument("--norm", choices=["none", "minmax", "l2"], default="none")
    sp.add_argument("--filter", dest="filters", type=_filter_arg,
                    action="append", metavar="JSON",
                    help='e.g. \'{"kind": "l2-norm"}\'; repeatable, up to 2')
    sp.add_argument("--intervals", type=_int_list, default=[10])
    sp.add_argument("--overlaps", type=_float_list, default=[0.3])
    sp.add_argument("--eps", type=_float_list, default=None, required=True)
    sp.add_argument("--min-pts", type=int, default=5)
    sp.add_argument("--threads", type=_int_list,
                    default=[os.cpu_count() or 1])
    sp.add_argument("--strategy", choices=["precomputed", "on-the-fly"],
                    default="precomputed")
    sp.add_argument("--precompute-threshold", type=int, default=20_000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nervemap",
        description="Mapper graphs for high-dimensional point clouds")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    w = sub.add_parser("wrangle", help="clean a CSV and report column kinds")
    w.add_argument("input")
    w.add_argument("output")

    m = sub.add_parser("mapper", help="compute a folder of mapper graphs")
    _add_mapper_flags(m)
    m.add_argument("--bench", action="store_true",
                   help="benchmark both strategies instead of writing graphs")

    b = sub.add_parser("bench", help="time precomputed vs vanilla strategies")
    _add_mapper_flags(b)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--port", type=int, default=8800)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--graphs-dir", default=None)
    s.add_argument("--static-dir", default=None,
                   help="UI bundle to serve at / (default: ./frontend/dist if present)")
    return parser


def cmd_wrangle(args) -> int:
    with open(args.input, encoding="utf-8") as f:
        rows, header = read_csv_text(f.read())
    pc, report = wrangle(rows, header)
    write_clean_csv(args.output, rows, header, report)
    print(json.dumps(report.to_json_obj(), indent=2))
    return 0


def _mapper_params(args, n: int, p: float, eps: float) -> MapperParams:
    filters = args.filters or [FilterSpec(kind="l2-norm")]
    if len(filters) > 2:
        raise DataError("at most 2 filters")
    axes = len(filters)
    return MapperParams(
        filters=filters,
        n=[n] * axes,
        p=[p] * axes,
        eps=eps,
        min_pts=args.min_pts,
        norm=args.norm,
        strategy=DistanceStrategy(mode=args.strategy,
                                  threshold=args.precompute_threshold),
    )


def cmd_mapper(args) -> int:
    if len(args.threads) != 1:
        raise DataError("mapper takes a single --threads value")
    if not args.output_dir:
        raise DataError("mapper needs --output-dir")
    pc, report = load_csv(args.input)
    os.makedirs(args.output_dir, exist_ok=True)
    runs = []
    peak = 0
    t0 = time.perf_counter()
    filters = args.filters or [FilterSpec(kind="l2-norm")]
    for n in args.intervals:
        for p in args.overlaps:
            for eps in args.eps:
                params = _mapper_params(args, n, p, eps)
                run = compute_mapper(pc, params, threads=args.threads[0])
                name = f"mapper_n{n}_p{_num_token(p)}_e{_num_token(eps)}.json"
                with open(os.path.join(args.output_dir, name), "wb") as f:
                    f.write(run.graph_bytes)
                peak = max(peak, run.peak_matrix_bytes)
                runs.append({
                    "file": name, "n": n, "p": p, "eps": eps,
                    "seconds": run.seconds,
                    "peak_matrix_bytes": run.peak_matrix_bytes,
                    "nodes": run.graph.n_nodes,
                    "edges": len(run.graph.edges),
                })
                print(f"wrote {name}: {run.graph.n_nodes} nodes, "
                      f"{len(run.graph.edges)} edges in {run.seconds:.3f}s",
                      file=sys.stderr)
    manifest = {
        "input": args.input,
        "norm": args.norm,
        "filters": [s.to_json_obj() for s in filters],
        "n": args.intervals,
        "p": args.overlaps,
        "eps": args.eps,
        "min_pts": args.min_pts,
        "threads": args.threads[0],
        "strategy": {"mode": args.strategy,
                     "threshold": args.precompute_threshold},
        "mem_budget_bytes": effective_mem_budget(),
        "version": __version__,
        "wrangle": report.to_json_obj(),
        "filter_reference_subsample": uses_reference_subsample(pc, filters),
        "wall_seconds": time.perf_counter() - t0,
        "peak_matrix_bytes": peak,
        "runs": runs,
    }
    with open(os.path.join(args.output_dir, "manifest.json"), "w",
              encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
    return 0


def cmd_bench(args) -> int:
    pc, _ = load_csv(args.input)
    if len(args.intervals) != 1 or len(args.overlaps) != 1 or len(args.eps) != 1:
        raise DataError("bench takes single-valued --intervals/--overlaps/--eps")
    params = _mapper_params(args, args.intervals[0], args.overlaps[0], args.eps[0])
    rows, _ = run_benchmark(pc, params, thread_counts=args.threads)
    print("mode,threads,seconds,peak_matrix_bytes")
    for row in rows:
        print(f"{row.mode},{row.threads},{row.seconds:.6f},{row.peak_matrix_bytes}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    static_dir = args.static_dir
    if static_dir is None and os.path.isdir("frontend/dist"):
        static_dir = "frontend/dist"
    app = create_app(graphs_dir=args.graphs_dir, static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "wrangle":
            return cmd_wrangle(args)
        if args.command == "mapper":
            if args.bench:
                return cmd_bench(args)
            return cmd_mapper(args)
        if args.command == "bench":
            return cmd_bench(args)
        return cmd_serve(args)
    except (DataError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except Exception as e:  # noqa: BLE001 - boundary: anything else is a bug
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
