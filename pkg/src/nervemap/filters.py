"""Filter functions f: X -> R^m (m = 1 or 2) evaluated per point."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import PointCloud
from .errors import DataError

FILTER_KINDS = ("column", "l2-norm", "linf-norm", "density", "eccentricity")

# Density/eccentricity are O(N^2); above this many rows they are evaluated
# against a fixed-seed reference subsample of this size instead.
PAIRWISE_REFERENCE_LIMIT = 50_000
SUBSAMPLE_SEED = 1729

# Distance rows are computed against at most this many points at a time to
# bound temporary memory.
_BLOCK_ROWS = 2048


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    column: str | None = None
    bandwidth: float | None = None  # density only; None -> data-driven default
    p: float | None = None  # eccentricity only; math.inf allowed; None -> 1

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise DataError(f"unknown filter kind {self.kind!r}")
        if self.kind == "column":
            if not self.column:
                raise DataError("column filter needs a column name")
        elif self.column is not None:
            raise DataError(f"{self.kind} filter takes no column")
        if self.bandwidth is not None:
            if self.kind != "density":
                raise DataError(f"{self.kind} filter takes no bandwidth")
            if not self.bandwidth > 0:
                raise DataError("bandwidth must be positive")
        if self.p is not None:
            if self.kind != "eccentricity":
                raise DataError(f"{self.kind} filter takes no exponent")
            if not self.p >= 1:
                raise DataError("eccentricity exponent must be >= 1")

    def to_json_obj(self) -> dict:
        obj: dict = {"kind": self.kind}
        if self.kind == "column":
            obj["column"] = self.column
        if self.kind == "density":
            obj["bandwidth"] = self.bandwidth
        if self.kind == "eccentricity":
            obj["p"] = "inf" if self.p == math.inf else (1.0 if self.p is None else self.p)
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FilterSpec":
        if not isinstance(obj, dict):
            raise DataError("filter spec must be a JSON object")
        extra = set(obj) - {"kind", "column", "bandwidth", "p"}
        if extra:
            raise DataError(f"unknown filter spec keys: {sorted(extra)}")
        kind = obj.get("kind")
        if not isinstance(kind, str):
            raise DataError("filter spec needs a string 'kind'")
        p = obj.get("p")
        if isinstance(p, str):
            if p.lower() in ("inf", "infinity"):
                p = math.inf
            else:
                raise DataError(f"bad eccentricity exponent {p!r}")
        return cls(kind=kind, column=obj.get("column"),
                   bandwidth=obj.get("bandwidth"), p=p)


@dataclass(frozen=True)
class FilterValues:
    values: np.ndarray  # (N, m)
    specs: list[FilterSpec]

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def m(self) -> int:
        return self.values.shape[1]


def _reference_rows(n: int) -> np.ndarray | None:
    """Fixed-seed reference subsample for N beyond the pairwise limit."""
    if n <= PAIRWISE_REFERENCE_LIMIT:
        return None
    rng = np.random.default_rng(SUBSAMPLE_SEED)
    return np.sort(rng.choice(n, size=PAIRWISE_REFERENCE_LIMIT, replace=False))


def default_density_bandwidth(pc: PointCloud) -> float:
    """Mean nearest-neighbor distance over a <=1000-point fixed-seed subsample."""
    n = pc.n_rows
    if n > 1000:
        rng = np.random.default_rng(SUBSAMPLE_SEED)
        rows = np.sort(rng.choice(n, size=1000, replace=False))
        pts = pc.points[rows]
    else:
        pts = pc.points
    if len(pts) < 2:
        return 1.0
    d = cdist(pts, pts)
    np.fill_diagonal(d, np.inf)
    sigma = float(d.min(axis=1).mean())
    return sigma if sigma > 0 else 1.0


def _pairwise_aggregate(pc: PointCloud, fn) -> np.ndarray:
    """Apply fn(row_of_distances) per point, against all points or the
    fixed reference subsample when N is too large; blocked for memory."""
    ref = _reference_rows(pc.n_rows)
    target = pc.points if ref is None else pc.points[ref]
    out = np.empty(pc.n_rows, dtype=np.float64)
    for start in range(0, pc.n_rows, _BLOCK_ROWS):
        block = pc.points[start:start + _BLOCK_ROWS]
        d = cdist(block, target)
        out[start:start + _BLOCK_ROWS] = fn(d)
    return out


def evaluate(pc: PointCloud, spec: FilterSpec) -> np.ndarray:
    """One filter column of N reals."""
    if spec.kind == "column":
        return pc.column_values(spec.column).copy()
    if spec.kind == "l2-norm":
        return np.sqrt((pc.points ** 2).sum(axis=1))
    if spec.kind == "linf-norm":
        return np.abs(pc.points).max(axis=1)
    if spec.kind == "density":
        sigma = spec.bandwidth if spec.bandwidth is not None else default_density_bandwidth(pc)
        return _pairwise_aggregate(
            pc, lambda d: np.exp(-(d * d) / (2.0 * sigma * sigma)).sum(axis=1))
    # eccentricity
    p = 1.0 if spec.p is None else spec.p
    if p == math.inf:
        return _pairwise_aggregate(pc, lambda d: d.max(axis=1))
    return _pairwise_aggregate(
        pc, lambda d: ((d ** p).mean(axis=1)) ** (1.0 / p))


def evaluate_multi(pc: PointCloud, specs: list[FilterSpec]) -> FilterValues:
    """Stack 1 or 2 filter columns in spec order."""
    if not 1 <= len(specs) <= 2:
        raise DataError(f"need 1 or 2 filters, got {len(specs)}")
    cols = [evaluate(pc, s) for s in specs]
    return FilterValues(values=np.column_stack(cols), specs=list(specs))


def uses_reference_subsample(pc: PointCloud, specs: list[FilterSpec]) -> bool:
    """True when any filter was evaluated against the reference subsample."""
    return pc.n_rows > PAIRWISE_REFERENCE_LIMIT and any(
        s.kind in ("density", "eccentricity") for s in specs)
