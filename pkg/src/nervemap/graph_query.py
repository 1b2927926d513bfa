"""Selection queries over a mapper graph: components, shortest paths with
extension, and detail aggregation for selected nodes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .dataset import PointCloud
from .errors import DataError
from .nerve import MapperGraph

SELECTION_MODES = ("nodes", "cluster", "path")


@dataclass(frozen=True)
class Selection:
    node_ids: list[int]  # sorted for nodes/cluster; path order for paths
    mode: str

    def __post_init__(self):
        if self.mode not in SELECTION_MODES:
            raise DataError(f"unknown selection mode {self.mode!r}")


def _check_id(g: MapperGraph, node_id) -> int:
    if not isinstance(node_id, int) or isinstance(node_id, bool) \
            or not 0 <= node_id < g.n_nodes:
        raise DataError(f"unknown node id {node_id!r}")
    return node_id


def connected_component(g: MapperGraph, seed: int) -> Selection:
    """All nodes reachable from the seed."""
    _check_id(g, seed)
    adj = g.adjacency()
    seen = {seed}
    queue = deque([seed])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return Selection(node_ids=sorted(seen), mode="cluster")


def _bfs_dist(adj: list[list[int]], src: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def shortest_path(g: MapperGraph, start: int, end: int) -> list[int] | None:
    """Minimum-hop path, ties broken toward lexicographically smaller id
    sequences; None when disconnected."""
    _check_id(g, start)
    _check_id(g, end)
    if start == end:
        return [start]
    adj = g.adjacency()
    dist_s = _bfs_dist(adj, start)
    if dist_s[end] < 0:
        return None
    dist_e = _bfs_dist(adj, end)
    total = dist_s[end]
    path = [start]
    u = start
    for step in range(1, total + 1):
        # adjacency lists are ascending, so the first admissible neighbor
        # is the smallest id that still lies on some shortest path
        u = next(v for v in adj[u]
                 if dist_s[v] == step and dist_e[v] == total - step)
        path.append(u)
    return path


def _validate_path(g: MapperGraph, path: list[int]) -> None:
    if not path:
        raise DataError("empty path")
    for node_id in path:
        _check_id(g, node_id)
    edge_set = {(s, t) for s, t, _ in g.edges}
    for a, b in zip(path, path[1:]):
        if (min(a, b), max(a, b)) not in edge_set or a == b:
            raise DataError(f"not a path: no edge between {a} and {b}")


def extend_path(g: MapperGraph, current: list[int], new_end: int) -> list[int] | None:
    """Re-plan from the old endpoint only; None when unreachable."""
    _validate_path(g, current)
    _check_id(g, new_end)
    tail = shortest_path(g, current[-1], new_end)
    if tail is None:
        return None
    return current + tail[1:]


def selection_details(g: MapperGraph, sel: Selection, pc: PointCloud | None):
    """Per-node stats, union of rows, and union label counts.

    pc may be None for graphs loaded without their dataset; label counts
    are then unavailable (None) since they need per-row labels.
    """
    per_node = []
    union: set[int] = set()
    for node_id in sel.node_ids:
        node = g.node_by_id(_check_id(g, node_id))
        per_node.append({
            "id": node.id,
            "size": len(node.rows),
            "stats": node.stats,
            "composition": node.composition,
            "filter_mean": node.filter_mean,
        })
        union.update(node.rows)
    union_rows = sorted(union)
    if pc is None:
        union_labels = None
    else:
        union_labels = {}
        for name in pc.categorical_columns:
            labels = pc.categorical[name]
            counts: dict[str, int] = {}
            for r in union_rows:
                lab = labels[r]
                counts[lab] = counts.get(lab, 0) + 1
            union_labels[name] = counts
    return {
        "mode": sel.mode,
        "node_ids": list(sel.node_ids),
        "per_node": per_node,
        "union_rows": union_rows,
        "union_labels": union_labels,
    }
