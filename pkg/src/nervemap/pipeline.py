"""One shared mapper pipeline: normalize -> filters -> cover -> pullback
clustering -> nerve. The CLI and the HTTP server both call compute_mapper,
which is what makes their graph outputs byte-identical for identical
parameters.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .clustering import (
    ClusterRunStats,
    DbscanParams,
    DistanceStrategy,
    cluster_all,
)
from .cover import Cover, build_cover, membership
from .dataset import NORMALIZATIONS, PointCloud, normalize
from .errors import DataError, InternalError
from .filters import FilterSpec, FilterValues, evaluate_multi
from .nerve import MapperGraph, build_graph, graph_to_json


@dataclass(frozen=True)
class MapperParams:
    filters: list[FilterSpec]
    n: list[int]  # per filter axis
    p: list[float]
    eps: float
    min_pts: int = 5
    norm: str = "none"
    strategy: DistanceStrategy = DistanceStrategy()

    def __post_init__(self):
        if not 1 <= len(self.filters) <= 2:
            raise DataError("need 1 or 2 filters")
        if len(self.n) != len(self.filters) or len(self.p) != len(self.filters):
            raise DataError("n and p must have one entry per filter")
        if self.norm not in NORMALIZATIONS:
            raise DataError(f"unknown normalization {self.norm!r}")
        DbscanParams(self.eps, self.min_pts)  # validates

    def manifest(self) -> dict:
        """Parameter provenance embedded in graph JSON. Deterministic and
        strategy-mode-free: the graph is identical under either distance
        strategy, and its bytes must be too. No timings belong here."""
        return {
            "filters": [s.to_json_obj() for s in self.filters],
            "n": list(self.n),
            "p": list(self.p),
            "eps": self.eps,
            "min_pts": self.min_pts,
            "norm": self.norm,
            "strategy": {"threshold": self.strategy.threshold},
        }


@dataclass
class MapperRun:
    graph: MapperGraph
    graph_bytes: bytes
    fv: FilterValues
    cover: Cover
    seconds: float
    peak_matrix_bytes: int
    vanilla_workingset_bytes: int
    cluster_stats: ClusterRunStats = field(repr=False, default_factory=ClusterRunStats)


def vanilla_workingset_estimate(pc: PointCloud, memberships) -> int:
    """Peak working set a per-query run needs: the dataset plus, for the
    largest element, its point slice and one broadcast temp of equal size."""
    base = pc.points.nbytes
    per_el = max((int(r.size) for r in memberships), default=0)
    return base + 2 * per_el * pc.n_dims * 8


def compute_mapper(pc: PointCloud, params: MapperParams, threads: int = 1,
                   budget_bytes: int | None = None,
                   cancel_check=None) -> MapperRun:
    t0 = time.perf_counter()
    norm_pc = normalize(pc, params.norm)
    fv = evaluate_multi(norm_pc, params.filters)
    cover = build_cover(fv, params.n, params.p)
    members = membership(fv, cover)
    stats = ClusterRunStats()
    clusterings = cluster_all(
        norm_pc, members, DbscanParams(params.eps, params.min_pts),
        params.strategy, threads=threads, budget_bytes=budget_bytes,
        stats_out=stats, cancel_check=cancel_check)
    manifest = params.manifest()
    # interval endpoints ride along for UI tooltips; deterministic, so the
    # byte-stability contract holds
    manifest["intervals"] = [
        [[iv.lo, iv.hi] for iv in axis] for axis in cover.axes]
    graph = build_graph(clusterings, norm_pc, fv, cover, manifest)
    graph_bytes = graph_to_json(graph)
    return MapperRun(
        graph=graph,
        graph_bytes=graph_bytes,
        fv=fv,
        cover=cover,
        seconds=time.perf_counter() - t0,
        peak_matrix_bytes=stats.peak_matrix_bytes,
        vanilla_workingset_bytes=vanilla_workingset_estimate(norm_pc, members),
        cluster_stats=stats,
    )


@dataclass
class BenchRow:
    mode: str
    threads: int
    seconds: float
    peak_matrix_bytes: int


def run_benchmark(pc: PointCloud, params: MapperParams,
                  thread_counts: list[int],
                  budget_bytes: int | None = None) -> tuple[list[BenchRow], MapperRun]:
    """Time both strategies across thread counts.

    Refuses to report timings unless every run produced byte-identical
    graph JSON (correctness precedes speed); returns the rows plus the
    reference precomputed single-thread run.
    """
    rows: list[BenchRow] = []
    reference: MapperRun | None = None
    baseline_bytes: bytes | None = None
    for mode in ("vanilla", "precomputed"):
        strategy = DistanceStrategy(
            mode="on-the-fly" if mode == "vanilla" else "precomputed",
            threshold=params.strategy.threshold)
        mode_params = MapperParams(
            filters=params.filters, n=params.n, p=params.p, eps=params.eps,
            min_pts=params.min_pts, norm=params.norm, strategy=strategy)
        for threads in thread_counts:
            run = compute_mapper(pc, mode_params, threads=threads,
                                 budget_bytes=budget_bytes)
            if baseline_bytes is None:
                baseline_bytes = run.graph_bytes
            elif run.graph_bytes != baseline_bytes:
                raise InternalError(
                    f"graph mismatch between modes ({mode}, threads={threads}); "
                    "refusing to report timings")
            if mode == "precomputed" and threads == thread_counts[0]:
                reference = run
            rows.append(BenchRow(mode=mode, threads=threads,
                                 seconds=run.seconds,
                                 peak_matrix_bytes=run.peak_matrix_bytes))
    assert reference is not None
    return rows, reference


def uniform_cloud(n_rows: int, n_dims: int, seed: int = 0) -> PointCloud:
    """Synthetic uniform point cloud for benchmarks."""
    from .dataset import ColumnSpec

    rng = np.random.default_rng(seed)
    pts = rng.random((n_rows, n_dims))
    cols = [ColumnSpec(f"x{j}", "numerical", j) for j in range(n_dims)]
    return PointCloud(points=pts, categorical={}, columns=cols)
