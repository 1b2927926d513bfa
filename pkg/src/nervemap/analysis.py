"""Selection-level analysis: OLS linear regression with inference
statistics, and PCA projection.

The Student-t tail needed for p-values is computed from the regularized
incomplete beta function (Lentz continued fraction); the PCA eigensolve
is a cyclic Jacobi sweep. Both are self-contained so results do not
depend on a statistics package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import PointCloud
from .errors import DataError


# --- regularized incomplete beta / Student-t ------------------------------

def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), accurate to ~1e-13."""
    if not 0.0 <= x <= 1.0:
        raise DataError("incomplete beta needs x in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    ln_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
             + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for T ~ t(df)."""
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))


# --- cyclic Jacobi eigensolve ---------------------------------------------

def jacobi_eigh(a: np.ndarray, tol: float = 1e-14,
                max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors (columns) of a symmetric matrix.

    Cyclic sweeps of Givens rotations until the off-diagonal norm falls
    under tol times the Frobenius norm.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.sqrt((a * a).sum())
    if scale == 0.0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = math.sqrt(max((a * a).sum() - (np.diag(a) ** 2).sum(), 0.0))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:  # theta^2 would overflow; t ~ 1/(2 theta)
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    return np.diag(a).copy(), v


# --- regression -------------------------------------------------------------

@dataclass(frozen=True)
class RegressionResult:
    names: list[str]  # "const" first, then regressors
    coefficients: list[float]
    std_errors: list[float]
    t_values: list[float]
    p_values: list[float]
    r_squared: float
    n_observations: int

    def to_json_obj(self) -> dict:
        def clean(xs):
            return [x if math.isfinite(x) else None for x in xs]
        return {
            "names": self.names,
            "coef": clean(self.coefficients),
            "std_err": clean(self.std_errors),
            "t": clean(self.t_values),
            "p": clean(self.p_values),
            "r_squared": self.r_squared,
            "n_observations": self.n_observations,
        }


def _select_rows(pc: PointCloud, rows) -> np.ndarray:
    if rows is None:
        return np.arange(pc.n_rows)
    idx = np.asarray(rows, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= pc.n_rows):
        raise DataError("row index out of range")
    return idx


def linear_regression(pc: PointCloud, rows, dependent: str,
                      independents: list[str]) -> RegressionResult:
    """OLS of dependent on independents with an intercept.

    Normal equations with a symmetric solve; rank deficiency surfaces
    as an explicit error rather than a silently damped solution.
    """
    if not independents:
        raise DataError("need at least one independent column")
    idx = _select_rows(pc, rows)
    y = pc.column_values(dependent)[idx]
    cols = [pc.column_values(name)[idx] for name in independents]
    n = int(idx.size)
    k = len(independents)
    if n <= k + 1:
        raise DataError(f"too few rows: {n} for {k} regressors")
    x = np.column_stack([np.ones(n)] + cols)
    if np.linalg.matrix_rank(x) < k + 1:
        raise DataError("singular design matrix")
    xtx = x.T @ x
    beta = np.linalg.solve(xtx, x.T @ y)
    resid = y - x @ beta
    rss = float(resid @ resid)
    df = n - k - 1
    sigma2 = rss / df
    cov = sigma2 * np.linalg.inv(xtx)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    t_vals, p_vals = [], []
    for b, s in zip(beta, se):
        if s == 0.0:
            t = 0.0 if b == 0.0 else math.copysign(math.inf, b)
        else:
            t = float(b / s)
        t_vals.append(t)
        p_vals.append(student_t_two_sided_p(t, df))
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - rss / tss if tss > 0.0 else 0.0
    return RegressionResult(
        names=["const"] + list(independents),
        coefficients=[float(b) for b in beta],
        std_errors=[float(s) for s in se],
        t_values=t_vals,
        p_values=p_vals,
        r_squared=float(r2),
        n_observations=n,
    )


# --- PCA --------------------------------------------------------------------

@dataclass(frozen=True)
class PcaResult:
    components: np.ndarray  # (k, d) orthonormal rows
    explained_variance: list[float]  # nonincreasing
    projected: np.ndarray  # (n, k)

    def to_json_obj(self) -> dict:
        return {
            "components": self.components.tolist(),
            "explained_variance": list(self.explained_variance),
            "projected": self.projected.tolist(),
        }


def pca(pc: PointCloud, rows, k: int) -> PcaResult:
    """Top-k principal directions of the selected rows.

    Sign convention: the largest-magnitude entry of each component is
    positive, so results are deterministic.
    """
    idx = _select_rows(pc, rows)
    d = pc.n_dims
    if not 1 <= k <= d:
        raise DataError(f"k must be in [1, {d}]")
    if idx.size < 2:
        raise DataError("need at least 2 rows for PCA")
    x = pc.points[idx]
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (idx.size - 1)
    evals, evecs = jacobi_eigh(cov)
    order = np.argsort(-evals, kind="stable")
    comps = []
    variances = []
    for j in order[:k]:
        vec = evecs[:, j].copy()
        lead = int(np.argmax(np.abs(vec)))
        if vec[lead] < 0:
            vec = -vec
        comps.append(vec)
        variances.append(max(float(evals[j]), 0.0))
    components = np.vstack(comps)
    return PcaResult(
        components=components,
        explained_variance=variances,
        projected=centered @ components.T,
    )
