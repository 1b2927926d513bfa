"""Tabular ingestion: wrangling, normalization, and stable row addressing.

A wrangled PointCloud is immutable; the row index assigned here is the
identity of a point everywhere downstream (cover membership, clusters,
graph nodes, selections).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

# Cell texts treated as missing, compared case-insensitively.
MISSING_MARKERS = frozenset({"", "na", "nan", "null"})

NORMALIZATIONS = ("none", "minmax", "l2")


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str  # "numerical" | "categorical"
    index: int  # ordinal in the original header


@dataclass(frozen=True)
class WrangleReport:
    n_input_rows: int
    n_rows: int
    dropped: int
    columns: list[ColumnSpec]
    kept_indices: list[int] = field(repr=False)

    def to_json_obj(self) -> dict:
        return {
            "n_input_rows": self.n_input_rows,
            "n_rows": self.n_rows,
            "dropped": self.dropped,
            "columns": [
                {"name": c.name, "kind": c.kind, "index": c.index}
                for c in self.columns
            ],
        }


@dataclass(frozen=True)
class PointCloud:
    """The dataset X: numerical coordinates plus per-row labels.

    points[i] is row i's coordinate vector over the numerical columns, in
    header order. categorical maps column name -> list of N label strings.
    """

    points: np.ndarray
    categorical: dict[str, list[str]]
    columns: list[ColumnSpec]
    metric: str = "euclidean"

    def __post_init__(self):
        self.points.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.points.shape[0]

    @property
    def n_dims(self) -> int:
        return self.points.shape[1]

    @property
    def numerical_columns(self) -> list[str]:
        return [c.name for c in self.columns if c.kind == "numerical"]

    @property
    def categorical_columns(self) -> list[str]:
        return [c.name for c in self.columns if c.kind == "categorical"]

    def numerical_index(self, name: str) -> int:
        """Position of a numerical column inside the points matrix."""
        i = 0
        for c in self.columns:
            if c.kind == "numerical":
                if c.name == name:
                    return i
                i += 1
        if any(c.name == name for c in self.columns):
            raise DataError(f"column {name!r} is categorical")
        raise DataError(f"unknown column {name!r}")

    def column_values(self, name: str) -> np.ndarray:
        return self.points[:, self.numerical_index(name)]


def _is_missing(cell: str) -> bool:
    return cell.strip().lower() in MISSING_MARKERS


def _parse_real(cell: str) -> float | None:
    """float(cell) when it yields a finite real, else None."""
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def wrangle(rows: list[list[str]], header: list[str]) -> tuple[PointCloud, WrangleReport]:
    """Type the columns, drop rows missing a numerical cell, build X.

    A column is numerical iff every non-missing cell parses as a finite
    real; one non-parsable non-missing cell makes it categorical. Rows
    with a missing cell in any numerical column are dropped.
    """
    if len(set(header)) != len(header):
        raise DataError("duplicate column names in header")
    ncols = len(header)
    for r, row in enumerate(rows):
        if len(row) != ncols:
            raise DataError(f"row {r} has {len(row)} cells, header has {ncols}")

    numerical = [True] * ncols
    for row in rows:
        for j, cell in enumerate(row):
            if numerical[j] and not _is_missing(cell) and _parse_real(cell) is None:
                numerical[j] = False

    columns = [
        ColumnSpec(name, "numerical" if numerical[j] else "categorical", j)
        for j, name in enumerate(header)
    ]
    num_idx = [j for j in range(ncols) if numerical[j]]
    cat_idx = [j for j in range(ncols) if not numerical[j]]
    if not num_idx:
        raise DataError("no numerical columns")

    kept = [
        r for r, row in enumerate(rows)
        if not any(_is_missing(row[j]) for j in num_idx)
    ]
    if not kept:
        raise DataError("no usable rows")

    points = np.array(
        [[float(rows[r][j]) for j in num_idx] for r in kept], dtype=np.float64
    )
    categorical = {header[j]: [rows[r][j] for r in kept] for j in cat_idx}

    pc = PointCloud(points=points, categorical=categorical, columns=columns)
    report = WrangleReport(
        n_input_rows=len(rows),
        n_rows=len(kept),
        dropped=len(rows) - len(kept),
        columns=columns,
        kept_indices=kept,
    )
    return pc, report


def normalize(pc: PointCloud, scheme: str) -> PointCloud:
    """Return a rescaled copy; categorical columns untouched.

    minmax maps each column affinely onto [0,1] (constant columns to 0);
    l2 scales each row to unit norm (all-zero rows stay zero).
    """
    if scheme not in NORMALIZATIONS:
        raise DataError(f"unknown normalization {scheme!r}")
    if scheme == "none":
        return pc
    pts = pc.points.copy()
    if scheme == "minmax":
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        span = hi - lo
        span[span == 0.0] = 1.0
        pts = (pts - lo) / span
    else:  # l2
        norms = np.sqrt((pts * pts).sum(axis=1))
        norms[norms == 0.0] = 1.0
        pts = pts / norms[:, None]
    return PointCloud(points=pts, categorical=pc.categorical, columns=pc.columns)


def read_csv_text(text: str) -> tuple[list[list[str]], list[str]]:
    """First line is the header; comma separated, UTF-8.

    Quoted commas are not supported (csv.reader tolerates simple quotes,
    but the format contract is plain comma-separated cells).
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty CSV") from None
    rows = [row for row in reader if row]
    return rows, header


def load_csv(path: str) -> tuple[PointCloud, WrangleReport]:
    # utf-8-sig: tolerate a BOM without corrupting the first header name
    with open(path, encoding="utf-8-sig") as f:
        rows, header = read_csv_text(f.read())
    return wrangle(rows, header)


def write_clean_csv(path: str, rows: list[list[str]], header: list[str],
                    report: WrangleReport) -> None:
    """Write the kept input rows verbatim under the original header."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for r in report.kept_indices:
            w.writerow(rows[r])
