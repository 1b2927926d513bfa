import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nervemap.dataset import (
    normalize,
    read_csv_text,
    wrangle,
)
from nervemap.errors import DataError

from conftest import snowman_points


def test_wrangle_basic_types():
    pc, report = wrangle([["1", "a"], ["2", "b"]], ["x", "lab"])
    assert pc.n_rows == 2 and pc.n_dims == 1
    assert pc.numerical_columns == ["x"]
    assert pc.categorical_columns == ["lab"]
    assert pc.categorical["lab"] == ["a", "b"]
    assert report.dropped == 0


def test_wrangle_drops_bad_numerical_rows():
    # "oops" cannot make x categorical here: it's a missing-free parse miss
    pc, report = wrangle([["1"], ["NA"], ["3"]], ["x"])
    assert pc.n_rows == 2
    assert report.dropped == 1
    assert list(pc.points[:, 0]) == [1.0, 3.0]


def test_wrangle_strict_detection_one_bad_cell():
    # one non-parsable non-missing cell makes the column categorical; with
    # no other numerical column left, wrangling refuses the table outright
    with pytest.raises(DataError, match="no numerical columns"):
        wrangle([["1"], ["oops"], ["3"]], ["x"])


def test_wrangle_strict_detection_with_other_columns():
    pc, report = wrangle([["1", "1"], ["oops", "2"], ["3", "3"]], ["a", "b"])
    assert [c.kind for c in report.columns] == ["categorical", "numerical"]
    assert pc.n_rows == 3 and report.dropped == 0


def test_wrangle_no_numerical_columns_error():
    with pytest.raises(DataError, match="no numerical columns"):
        wrangle([["a"], ["b"]], ["lab"])


def test_wrangle_no_usable_rows_error():
    with pytest.raises(DataError, match="no usable rows"):
        wrangle([["NA"], ["null"]], ["x"])


def test_wrangle_missing_markers_case_insensitive():
    pc, report = wrangle(
        [["1", "2"], ["NaN", "3"], ["4", "NULL"], ["5", "6"]], ["a", "b"])
    assert report.dropped == 2
    assert pc.n_rows == 2


def test_wrangle_inf_cell_is_not_numerical():
    _, report = wrangle([["1", "1"], ["inf", "2"]], ["a", "b"])
    assert report.columns[0].kind == "categorical"
    assert report.columns[1].kind == "numerical"


def test_wrangle_ragged_row_rejected():
    with pytest.raises(DataError, match="cells"):
        wrangle([["1", "2"], ["3"]], ["a", "b"])


def test_wrangle_snowman_fixture():
    pts = snowman_points()
    rows = [[f"{x}", f"{y}"] for x, y in pts]
    pc, report = wrangle(rows, ["x", "y"])
    assert pc.n_rows == len(pts) == 640
    assert pc.n_dims == 2
    assert pc.categorical_columns == []
    assert report.dropped == 0


def test_row_identity_preserved_after_drops():
    rows = [["0", "keep0"], ["NA", "gone"], ["2", "keep1"]]
    pc, report = wrangle(rows, ["x", "lab"])
    # post-wrangle row i is the identity used downstream
    assert pc.points[1, 0] == 2.0
    assert pc.categorical["lab"][1] == "keep1"
    assert report.kept_indices == [0, 2]


def test_normalize_minmax_endpoints():
    pc, _ = wrangle([["2"], ["4"], ["6"]], ["x"])
    out = normalize(pc, "minmax")
    assert list(out.points[:, 0]) == [0.0, 0.5, 1.0]
    # original untouched
    assert list(pc.points[:, 0]) == [2.0, 4.0, 6.0]


def test_normalize_l2_rows():
    pc, _ = wrangle([["3", "4"]], ["x", "y"])
    out = normalize(pc, "l2")
    assert out.points[0].tolist() == [0.6, 0.8]


def test_normalize_degenerate_cases():
    pc, _ = wrangle([["5", "0"], ["5", "0"], ["5", "0"]], ["a", "b"])
    mm = normalize(pc, "minmax")
    assert (mm.points == 0.0).all()
    l2 = normalize(pc, "l2")
    assert (l2.points[:, 1] == 0.0).all()  # b column all zero stays zero


def test_normalize_unknown_scheme():
    pc, _ = wrangle([["1"]], ["x"])
    with pytest.raises(DataError):
        normalize(pc, "zscore")


clean_cell = st.floats(allow_nan=False, allow_infinity=False,
                       min_value=-1e9, max_value=1e9).map(lambda v: repr(v))


@given(st.lists(st.lists(clean_cell, min_size=2, max_size=2),
                min_size=1, max_size=30))
@settings(max_examples=60, deadline=None)
def test_wrangle_idempotent_on_clean_tables(rows):
    pc, report = wrangle(rows, ["a", "b"])
    assert report.dropped == 0
    assert pc.n_rows == len(rows)


@given(st.lists(st.lists(st.floats(allow_nan=False, allow_infinity=False,
                                   min_value=-1e6, max_value=1e6),
                         min_size=3, max_size=3),
                min_size=2, max_size=40))
@settings(max_examples=60, deadline=None)
def test_normalize_bounds_properties(raw):
    rows = [[repr(v) for v in row] for row in raw]
    pc, _ = wrangle(rows, ["a", "b", "c"])
    mm = normalize(pc, "minmax")
    assert mm.points.min() >= 0.0 and mm.points.max() <= 1.0
    l2 = normalize(pc, "l2")
    norms = np.sqrt((l2.points ** 2).sum(axis=1))
    nonzero = norms > 0
    assert np.all(np.abs(norms[nonzero] - 1.0) <= 1e-12)


def test_read_csv_text():
    rows, header = read_csv_text("x,y\n1,2\n3,4\n")
    assert header == ["x", "y"]
    assert rows == [["1", "2"], ["3", "4"]]


def test_read_csv_empty():
    with pytest.raises(DataError):
        read_csv_text("")
