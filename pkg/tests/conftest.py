import numpy as np
import pytest

from nervemap.dataset import ColumnSpec, PointCloud


def cloud_from_array(pts, names=None, labels=None):
    """PointCloud straight from a numeric matrix (tests bypass wrangling)."""
    pts = np.asarray(pts, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    names = names or [f"x{j}" for j in range(pts.shape[1])]
    cols = [ColumnSpec(n, "numerical", j) for j, n in enumerate(names)]
    categorical = {}
    if labels:
        for name, values in labels.items():
            cols.append(ColumnSpec(name, "categorical", len(cols)))
            categorical[name] = list(values)
    return PointCloud(points=pts, categorical=categorical, columns=cols)


def snowman_points(seed=7, body_n=400, head_n=240):
    """Outline of two stacked circles: body r=1 at origin, head r=0.5 at
    (0, 1.3). Heights span [-1, 1.8]."""
    rng = np.random.default_rng(seed)
    tb = rng.uniform(0.0, 2.0 * np.pi, body_n)
    th = rng.uniform(0.0, 2.0 * np.pi, head_n)
    body = np.column_stack([np.cos(tb), np.sin(tb)])
    head = np.column_stack([0.5 * np.cos(th), 1.3 + 0.5 * np.sin(th)])
    return np.vstack([body, head])


@pytest.fixture
def snowman_cloud():
    return cloud_from_array(snowman_points(), names=["x", "y"])


@pytest.fixture
def blob_cloud():
    """Three well-separated Gaussian blobs in 2D, 200 points."""
    rng = np.random.default_rng(11)
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    pts = np.vstack([
        centers[i] + 0.3 * rng.standard_normal((67 if i < 2 else 66, 2))
        for i in range(3)
    ])
    return cloud_from_array(pts, names=["x", "y"])
