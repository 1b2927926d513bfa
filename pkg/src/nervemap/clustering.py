"""DBSCAN over pullback sets with the precomputed-distance-matrix strategy.

Two interchangeable distance sources drive one DBSCAN implementation:

* precomputed -- the element's full pairwise matrix is materialized once
  (a single optimized cdist call) and every neighborhood query is a row
  lookup;
* on-the-fly -- every neighborhood query recomputes its distance row at
  query time (the vanilla per-query behavior; no caching).

Both sources evaluate the same Euclidean distance, so the resulting
partitions are identical; the strategies trade memory for speed only.
Parallelism is per cover element, via forked worker processes (the flag
is named "threads" throughout for CLI compatibility, but workers are
processes: the clustering loop is pure Python and threads would serialize
on the GIL). Outputs are collected by element index, so results never
depend on worker count or scheduling.
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field

import multiprocessing as mp

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import PointCloud
from .errors import DataError, MatrixBudgetExceeded

DEFAULT_PRECOMPUTE_THRESHOLD = 20_000
DEFAULT_MEM_BUDGET_BYTES = 8 << 30
MEM_BUDGET_ENV = "MAPPER_MEM_BUDGET_BYTES"

STRATEGY_MODES = ("precomputed", "on-the-fly")


def effective_mem_budget() -> int:
    raw = os.environ.get(MEM_BUDGET_ENV)
    if raw is None:
        return DEFAULT_MEM_BUDGET_BYTES
    try:
        budget = int(raw)
    except ValueError:
        raise DataError(f"{MEM_BUDGET_ENV} must be an integer, got {raw!r}") from None
    if budget <= 0:
        raise DataError(f"{MEM_BUDGET_ENV} must be positive")
    return budget


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_pts: int

    def __post_init__(self):
        if not self.eps > 0:
            raise DataError("eps must be positive")
        if self.min_pts < 1:
            raise DataError("min-pts must be >= 1")


@dataclass(frozen=True)
class DistanceStrategy:
    mode: str = "precomputed"
    threshold: int = DEFAULT_PRECOMPUTE_THRESHOLD  # max pullback size to materialize

    def __post_init__(self):
        if self.mode not in STRATEGY_MODES:
            raise DataError(f"unknown strategy mode {self.mode!r}")
        if self.threshold < 1:
            raise DataError("precompute threshold must be >= 1")


@dataclass
class PullbackClustering:
    element_index: int
    clusters: list[list[int]]  # sorted global row ids, ordered by smallest row
    noise: list[int]


@dataclass
class ClusterRunStats:
    """Telemetry a caller may collect from cluster_all."""

    peak_matrix_bytes: int = 0
    matrix_elements: int = 0  # elements that got a precomputed matrix
    fallback_elements: int = 0  # precomputed requested but streamed instead
    per_element_rows: list[int] = field(default_factory=list)


def pairwise_distances(pc: PointCloud, rows: np.ndarray,
                       budget_bytes: int | None = None) -> np.ndarray:
    """Full Euclidean distance matrix over the given rows.

    Symmetric with zero diagonal; raises MatrixBudgetExceeded when the
    matrix would not fit the memory budget (callers fall back to
    on-the-fly distances).
    """
    rows = np.asarray(rows)
    if rows.size == 0:
        raise DataError("rows must be nonempty")
    budget = effective_mem_budget() if budget_bytes is None else budget_bytes
    need = int(rows.size) * int(rows.size) * 8
    if need > budget:
        raise MatrixBudgetExceeded(
            f"{rows.size}^2 distance matrix needs {need} bytes, budget {budget}")
    pts = pc.points[rows]
    return cdist(pts, pts)


class PrecomputedDistances:
    """Neighborhood queries answered by row lookups in a materialized matrix."""

    def __init__(self, matrix: np.ndarray):
        self.matrix = matrix
        self.n = matrix.shape[0]

    def neighbor_counts(self, eps: float) -> np.ndarray:
        return np.count_nonzero(self.matrix <= eps, axis=1)

    def neighbors(self, i: int, eps: float) -> np.ndarray:
        return np.flatnonzero(self.matrix[i] <= eps)


class OnDemandDistances:
    """Neighborhood queries recompute their distance row every time."""

    def __init__(self, points: np.ndarray):
        self.points = points
        self.n = points.shape[0]

    def _row(self, i: int) -> np.ndarray:
        diff = self.points - self.points[i]
        return np.sqrt((diff * diff).sum(axis=1))

    def neighbor_counts(self, eps: float) -> np.ndarray:
        counts = np.empty(self.n, dtype=np.int64)
        for i in range(self.n):
            counts[i] = np.count_nonzero(self._row(i) <= eps)
        return counts

    def neighbors(self, i: int, eps: float) -> np.ndarray:
        return np.flatnonzero(self._row(i) <= eps)


def dbscan(rows: np.ndarray, dist, params: DbscanParams,
           element_index: int = 0) -> PullbackClustering:
    """Deterministic DBSCAN over one pullback set.

    Neighborhoods are inclusive (d <= eps) and count the point itself.
    Clusters are the connected components of core points under the
    eps-neighbor relation; a non-core point with a core neighbor joins
    the cluster of its smallest-index core neighbor, the rest is noise.
    Clusters are reported sorted internally and ordered by smallest row.
    """
    rows = np.asarray(rows)
    n = int(rows.size)
    if n == 0:
        return PullbackClustering(element_index, [], [])

    counts = dist.neighbor_counts(params.eps)
    core = counts >= params.min_pts

    labels = np.full(n, -1, dtype=np.int64)
    n_clusters = 0
    for start in range(n):
        if not core[start] or labels[start] >= 0:
            continue
        labels[start] = n_clusters
        queue = deque([start])
        while queue:
            c = queue.popleft()
            for j in dist.neighbors(c, params.eps):
                if core[j] and labels[j] < 0:
                    labels[j] = n_clusters
                    queue.append(j)
        n_clusters += 1

    for i in range(n):
        if core[i]:
            continue
        nbrs = dist.neighbors(i, params.eps)
        core_nbrs = nbrs[core[nbrs]]
        if core_nbrs.size:
            labels[i] = labels[core_nbrs[0]]  # ascending, so first = smallest

    clusters = [
        [int(rows[i]) for i in np.flatnonzero(labels == c)]
        for c in range(n_clusters)
    ]
    clusters.sort(key=lambda members: members[0])
    noise = [int(rows[i]) for i in np.flatnonzero(labels < 0)]
    return PullbackClustering(element_index, clusters, noise)


def _element_uses_matrix(n_rows: int, strategy: DistanceStrategy, budget: int) -> bool:
    """Mode choice is a pure function of size/threshold/budget so outputs
    never depend on runtime memory pressure or scheduling."""
    if strategy.mode != "precomputed":
        return False
    if n_rows > strategy.threshold:
        return False
    return n_rows * n_rows * 8 <= budget


def _cluster_element(points: np.ndarray, rows: np.ndarray, k: int,
                     params: DbscanParams, use_matrix: bool) -> PullbackClustering:
    if rows.size == 0:
        return PullbackClustering(k, [], [])
    pts = points[rows]
    if use_matrix:
        dist = PrecomputedDistances(cdist(pts, pts))
    else:
        dist = OnDemandDistances(pts)
    return dbscan(rows, dist, params, element_index=k)


# Worker-side state inherited through fork (copy-on-write; nothing is
# pickled per task beyond the element index).
_WORKER_CTX: dict = {}


def _init_worker(ctx: dict) -> None:
    _WORKER_CTX.update(ctx)


def _run_element(k: int) -> PullbackClustering:
    c = _WORKER_CTX
    return _cluster_element(c["points"], c["memberships"][k], k,
                            c["params"], c["use_matrix"][k])


def cluster_all(pc: PointCloud, memberships: list[np.ndarray],
                params: DbscanParams, strategy: DistanceStrategy,
                threads: int = 1, budget_bytes: int | None = None,
                stats_out: ClusterRunStats | None = None,
                cancel_check=None) -> list[PullbackClustering]:
    """One PullbackClustering per cover element.

    Elements run in parallel up to `threads` workers; matrix-bearing
    elements are admitted only while their summed matrix bytes stay under
    the budget, the rest queue. cancel_check, when given, is polled
    between elements and aborts via whatever it raises.
    """
    if threads < 1:
        raise DataError("threads must be >= 1")
    budget = effective_mem_budget() if budget_bytes is None else budget_bytes
    use_matrix = [
        _element_uses_matrix(int(rows.size), strategy, budget)
        for rows in memberships
    ]
    est_bytes = [
        int(rows.size) * int(rows.size) * 8 if use_matrix[k] else 0
        for k, rows in enumerate(memberships)
    ]
    if stats_out is not None:
        stats_out.matrix_elements = sum(use_matrix)
        stats_out.fallback_elements = sum(
            1 for k, rows in enumerate(memberships)
            if strategy.mode == "precomputed" and rows.size and not use_matrix[k])
        stats_out.per_element_rows = [int(r.size) for r in memberships]

    results: list[PullbackClustering | None] = [None] * len(memberships)

    if threads == 1 or len(memberships) <= 1:
        peak = 0
        for k, rows in enumerate(memberships):
            if cancel_check is not None:
                cancel_check()
            peak = max(peak, est_bytes[k])
            results[k] = _cluster_element(pc.points, rows, k, params, use_matrix[k])
        if stats_out is not None:
            stats_out.peak_matrix_bytes = peak
        return results  # type: ignore[return-value]

    ctx = {
        "points": pc.points,
        "memberships": memberships,
        "params": params,
        "use_matrix": use_matrix,
    }
    pending = deque(range(len(memberships)))
    in_flight: dict = {}
    in_flight_bytes = 0
    peak = 0
    with ProcessPoolExecutor(
            max_workers=threads,
            mp_context=mp.get_context("fork"),
            initializer=_init_worker, initargs=(ctx,)) as pool:
        while pending or in_flight:
            if cancel_check is not None:
                cancel_check()
            while pending and len(in_flight) < 2 * threads:
                k = pending[0]
                # A lone element always fits (mode choice capped its bytes
                # at the budget); otherwise queue until matrices drain.
                if in_flight and in_flight_bytes + est_bytes[k] > budget:
                    break
                pending.popleft()
                fut = pool.submit(_run_element, k)
                in_flight[fut] = k
                in_flight_bytes += est_bytes[k]
                peak = max(peak, in_flight_bytes)
            done, _ = wait(in_flight, return_when=FIRST_COMPLETED)
            for fut in done:
                k = in_flight.pop(fut)
                in_flight_bytes -= est_bytes[k]
                results[k] = fut.result()
    if stats_out is not None:
        stats_out.peak_matrix_bytes = peak
    return results  # type: ignore[return-value]
