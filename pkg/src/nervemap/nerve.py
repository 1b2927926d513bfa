"""The mapper graph: one node per pullback cluster, one edge per
nonempty pairwise intersection (the 1D nerve of the cluster cover).

Graph JSON is canonical and byte-stable: sorted keys, no whitespace,
floats printed with 9 significant digits. Reruns with identical inputs
produce identical bytes, which the CLI/server parity and determinism
contracts rely on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .clustering import PullbackClustering
from .cover import Cover
from .dataset import PointCloud
from .errors import DataError
from .filters import FilterValues


@dataclass(frozen=True)
class MapperNode:
    id: int
    element: int | list[int]  # cover element index ([i, j] for 2D covers)
    rows: list[int]
    stats: dict[str, float]  # per numerical column mean
    composition: dict[str, dict[str, int]]  # per categorical column label counts
    filter_mean: list[float]


@dataclass(frozen=True)
class MapperGraph:
    nodes: list[MapperNode]
    edges: list[tuple[int, int, int]]  # (s, t, shared point count), s < t
    manifest: dict

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def node_by_id(self, node_id: int) -> MapperNode:
        if 0 <= node_id < len(self.nodes):
            return self.nodes[node_id]
        raise DataError(f"unknown node id {node_id}")

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.nodes]
        for s, t, _ in self.edges:
            adj[s].append(t)
            adj[t].append(s)
        for nbrs in adj:
            nbrs.sort()
        return adj


def _node_stats(pc: PointCloud, rows: np.ndarray) -> dict[str, float]:
    means = pc.points[rows].mean(axis=0)
    return {name: float(means[i]) for i, name in enumerate(pc.numerical_columns)}


def _node_composition(pc: PointCloud, rows: np.ndarray) -> dict[str, dict[str, int]]:
    comp: dict[str, dict[str, int]] = {}
    for name in pc.categorical_columns:
        labels = pc.categorical[name]
        counts: dict[str, int] = {}
        for r in rows:
            lab = labels[r]
            counts[lab] = counts.get(lab, 0) + 1
        comp[name] = counts
    return comp


def build_graph(clusterings: list[PullbackClustering], pc: PointCloud,
                fv: FilterValues, cover: Cover, manifest: dict) -> MapperGraph:
    """Assemble nodes (dense ids in element, cluster order) and edges.

    Edge candidates are restricted to geometrically overlapping cover
    elements: clusters of disjoint elements cannot share rows.
    """
    nodes: list[MapperNode] = []
    by_element: dict[int, list[int]] = {}
    for pbc in clusterings:
        ids = []
        for members in pbc.clusters:
            rows = np.asarray(members, dtype=np.int64)
            node = MapperNode(
                id=len(nodes),
                element=cover.element_key(pbc.element_index),
                rows=list(map(int, members)),
                stats=_node_stats(pc, rows),
                composition=_node_composition(pc, rows),
                filter_mean=[float(fv.values[rows, a].mean()) for a in range(fv.m)],
            )
            ids.append(node.id)
            nodes.append(node)
        by_element[pbc.element_index] = ids
    if not nodes:
        raise DataError("empty mapper graph")

    edges: list[tuple[int, int, int]] = []
    row_arrays = [np.asarray(n.rows, dtype=np.int64) for n in nodes]
    for k1, k2 in cover.overlapping_pairs():
        for i in by_element.get(k1, ()):
            for j in by_element.get(k2, ()):
                shared = np.intersect1d(row_arrays[i], row_arrays[j],
                                        assume_unique=True).size
                if shared:
                    edges.append((i, j, int(shared)))
    edges.sort()
    return MapperGraph(nodes=nodes, edges=edges, manifest=manifest)


# --- canonical JSON -------------------------------------------------------

def _fmt_float(v: float) -> str:
    if not math.isfinite(v):
        raise DataError("non-finite value in graph JSON")
    s = format(v, ".9g")
    # "1e+05" style is valid JSON; normalize the one ambiguous case
    return "0" if s == "-0" else s


def _write_canonical(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            if not isinstance(key, str):
                raise DataError("non-string key in graph JSON")
            out.append(json.dumps(key, ensure_ascii=True))
            out.append(":")
            _write_canonical(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write_canonical(item, out)
        out.append("]")
    else:
        raise DataError(f"unserializable value of type {type(obj).__name__}")


def to_canonical_json(obj) -> bytes:
    out: list[str] = []
    _write_canonical(obj, out)
    return "".join(out).encode("ascii")


def graph_to_obj(g: MapperGraph) -> dict:
    return {
        "manifest": g.manifest,
        "nodes": [
            {
                "id": n.id,
                "element": n.element,
                "rows": n.rows,
                "size": len(n.rows),
                "stats": n.stats,
                "composition": n.composition,
                "filter_mean": n.filter_mean,
            }
            for n in g.nodes
        ],
        "edges": [{"s": s, "t": t, "w": w} for s, t, w in g.edges],
    }


def graph_to_json(g: MapperGraph) -> bytes:
    return to_canonical_json(graph_to_obj(g))


_NODE_KEYS = {"id", "element", "rows", "size", "stats", "composition", "filter_mean"}
_EDGE_KEYS = {"s", "t", "w"}


def parse_graph_json(data: bytes | str) -> MapperGraph:
    """Parse and validate graph JSON; round-trips byte-identically."""
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise DataError(f"malformed graph JSON: {e}") from None
    if not isinstance(obj, dict) or set(obj) != {"manifest", "nodes", "edges"}:
        raise DataError("graph JSON must have exactly manifest/nodes/edges")
    if not isinstance(obj["nodes"], list) or not isinstance(obj["edges"], list):
        raise DataError("graph nodes/edges must be arrays")
    nodes = []
    for raw in obj["nodes"]:
        if not isinstance(raw, dict) or set(raw) != _NODE_KEYS:
            raise DataError("graph node with wrong key set")
        if raw["size"] != len(raw["rows"]) or not raw["rows"]:
            raise DataError("graph node size/rows mismatch")
        nodes.append(MapperNode(
            id=raw["id"], element=raw["element"], rows=raw["rows"],
            stats=raw["stats"], composition=raw["composition"],
            filter_mean=raw["filter_mean"],
        ))
    if [n.id for n in nodes] != list(range(len(nodes))):
        raise DataError("graph node ids must be dense and ordered")
    edges = []
    seen = set()
    for raw in obj["edges"]:
        if not isinstance(raw, dict) or set(raw) != _EDGE_KEYS:
            raise DataError("graph edge with wrong key set")
        s, t, w = raw["s"], raw["t"], raw["w"]
        if not (0 <= s < t < len(nodes)) or w < 1 or (s, t) in seen:
            raise DataError(f"bad graph edge ({s}, {t})")
        seen.add((s, t))
        edges.append((s, t, w))
    return MapperGraph(nodes=nodes, edges=edges, manifest=obj["manifest"])
