"""Overlapping interval covers of filter space (rectangles for m=2).

Per axis with range R = f_max - f_min, n intervals, overlap fraction p:
length l = R / (n - (n-1)p), left endpoints a_k = f_min + k*l*(1-p); the
closed interval V_k = [a_k, a_k + l]. Consecutive intervals then overlap
by exactly p*l and the union covers [f_min, f_max] with no slack.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .filters import FilterValues

MAX_OVERLAP = 0.95


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    axis: int
    index: int

    def contains(self, v: float) -> bool:
        return self.lo <= v <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        # Closed intervals: touching endpoints count (a shared boundary
        # point belongs to both).
        return self.lo <= other.hi and other.lo <= self.hi


@dataclass(frozen=True)
class Cover:
    n: list[int]  # per-axis interval counts (post degenerate-range collapse)
    p: list[float]
    axes: list[list[Interval]]
    filter_range: list[tuple[float, float]]

    @property
    def m(self) -> int:
        return len(self.axes)

    @property
    def n_elements(self) -> int:
        count = 1
        for axis in self.axes:
            count *= len(axis)
        return count

    def element(self, k: int) -> tuple[Interval, ...]:
        """Element k as its per-axis intervals; row-major (axis 0 outer)."""
        if self.m == 1:
            return (self.axes[0][k],)
        n1 = len(self.axes[1])
        return (self.axes[0][k // n1], self.axes[1][k % n1])

    def element_key(self, k: int) -> int | list[int]:
        """Serialized element identity: int for m=1, [i, j] for m=2."""
        if self.m == 1:
            return k
        ivs = self.element(k)
        return [ivs[0].index, ivs[1].index]

    def elements_overlap(self, k1: int, k2: int) -> bool:
        e1, e2 = self.element(k1), self.element(k2)
        return all(a.overlaps(b) for a, b in zip(e1, e2))

    def overlapping_pairs(self) -> list[tuple[int, int]]:
        """All element pairs (k1 < k2) that intersect geometrically."""
        pairs = []
        for k1 in range(self.n_elements):
            for k2 in range(k1 + 1, self.n_elements):
                if self.elements_overlap(k1, k2):
                    pairs.append((k1, k2))
        return pairs


def _build_axis(values: np.ndarray, n: int, p: float, axis: int) -> list[Interval]:
    if n < 1:
        raise DataError("interval count must be >= 1")
    if not 0.0 <= p <= MAX_OVERLAP:
        raise DataError(f"overlap must be in [0, {MAX_OVERLAP}]")
    f_min = float(values.min())
    f_max = float(values.max())
    span = f_max - f_min
    if span == 0.0:
        warnings.warn(
            f"constant filter on axis {axis}; emitting a single unit interval")
        return [Interval(f_min - 0.5, f_min + 0.5, axis, 0)]
    length = span / (n - (n - 1) * p)
    step = length * (1.0 - p)
    intervals = []
    for k in range(n):
        lo = f_min + k * step
        hi = lo + length
        if k == n - 1 and hi < f_max:  # float guard: the max point stays covered
            hi = f_max
        intervals.append(Interval(lo, hi, axis, k))
    return intervals


def build_cover(fv: FilterValues, n: list[int], p: list[float]) -> Cover:
    m = fv.m
    if len(n) != m or len(p) != m:
        raise DataError(f"need {m} per-axis counts and overlaps")
    axes = [_build_axis(fv.values[:, a], n[a], p[a], a) for a in range(m)]
    return Cover(
        n=[len(ax) for ax in axes],
        p=list(p),
        axes=axes,
        filter_range=[(float(fv.values[:, a].min()), float(fv.values[:, a].max()))
                      for a in range(m)],
    )


def membership(fv: FilterValues, cover: Cover) -> list[np.ndarray]:
    """Row indices (ascending) inside each cover element.

    Row i belongs to element k iff its filter value lies in the closed
    interval on every axis.
    """
    per_axis: list[list[np.ndarray]] = []
    for a, axis in enumerate(cover.axes):
        col = fv.values[:, a]
        per_axis.append([
            np.flatnonzero((iv.lo <= col) & (col <= iv.hi)) for iv in axis
        ])
    if cover.m == 1:
        return per_axis[0]
    out = []
    for i_rows in per_axis[0]:
        for j_rows in per_axis[1]:
            out.append(np.intersect1d(i_rows, j_rows, assume_unique=True))
    return out
