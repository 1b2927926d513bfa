"""nervemap: scalable mapper graphs for high-dimensional point clouds."""

__version__ = "0.1.0"

from .dataset import ColumnSpec, PointCloud, WrangleReport, normalize, wrangle
from .filters import FilterSpec, FilterValues, evaluate, evaluate_multi
from .cover import Cover, Interval, build_cover, membership
from .clustering import (
    DbscanParams,
    DistanceStrategy,
    PullbackClustering,
    cluster_all,
    dbscan,
    pairwise_distances,
)
from .nerve import MapperGraph, MapperNode, build_graph, graph_to_json, parse_graph_json
from .graph_query import (
    Selection,
    connected_component,
    extend_path,
    selection_details,
    shortest_path,
)
from .analysis import PcaResult, RegressionResult, linear_regression, pca

__all__ = [
    "ColumnSpec", "PointCloud", "WrangleReport", "normalize", "wrangle",
    "FilterSpec", "FilterValues", "evaluate", "evaluate_multi",
    "Cover", "Interval", "build_cover", "membership",
    "DbscanParams", "DistanceStrategy", "PullbackClustering",
    "cluster_all", "dbscan", "pairwise_distances",
    "MapperGraph", "MapperNode", "build_graph", "graph_to_json", "parse_graph_json",
    "Selection", "connected_component", "extend_path", "selection_details",
    "shortest_path",
    "PcaResult", "RegressionResult", "linear_regression", "pca",
]
