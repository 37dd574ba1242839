"""Low-dimensional collocation points and one-dimensional Lagrange proxies."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
from scipy.stats import norm
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, column_or_1d

from ._blas import BLAS_LOCK

__all__ = [
    "CollocationSet1D",
    "CorrelatedGrid",
    "LagrangeInterpolant",
    "standard_normal_points",
    "normal_collocation_points",
    "quantile_collocation_points",
    "empirical_inverse_points",
    "correlated_grid",
    "lagrange_proxy_1d",
    "LagrangeInterpolator",
]


@dataclass(frozen=True, eq=False)
class CollocationSet1D:
    points: np.ndarray
    source: str
    mean: float | None = None
    variance: float | None = None

    def __len__(self) -> int:
        return len(self.points)


def standard_normal_points(n: int) -> np.ndarray:
    """Gauss quadrature abscissas for N(0, 1) via the Golub-Welsch eigenproblem.

    The Jacobi matrix of the probabilists' Hermite polynomials has a zero
    diagonal and off-diagonal ``sqrt(k)``, ``k = 1..n-1``.
    """
    if n < 1:
        raise ValueError("need at least one collocation point")
    if n == 1:
        return np.zeros(1)
    off = np.sqrt(np.arange(1, n, dtype=float))
    with BLAS_LOCK:
        x = scipy.linalg.eigh_tridiagonal(np.zeros(n), off, eigvals_only=True)
    x = np.sort(x)
    return 0.5 * (x - x[::-1])


def normal_collocation_points(n1: int, mean: float = 0.0, variance: float = 1.0) -> CollocationSet1D:
    """``mean + sqrt(variance) * x_j`` with ``x_j`` the N(0,1) collocation points."""
    if variance < 0:
        raise ValueError(f"variance must be non-negative, got {variance}")
    pts = mean + np.sqrt(variance) * standard_normal_points(n1)
    return CollocationSet1D(pts, "normal", float(mean), float(variance))


def quantile_collocation_points(n1: int, quantile_fn: Callable[[np.ndarray], np.ndarray]) -> CollocationSet1D:
    """Points at equally spaced interior quantile levels ``i / (n1 + 1)``."""
    if n1 < 1:
        raise ValueError("need at least one collocation point")
    levels = np.arange(1, n1 + 1) / (n1 + 1)
    pts = np.asarray([quantile_fn(p) for p in levels], dtype=float).ravel()
    if np.any(np.diff(pts) <= 0):
        raise ValueError("quantile function is not strictly increasing on the requested levels")
    return CollocationSet1D(pts, "quantile")


def empirical_inverse_points(samples, n1: int) -> CollocationSet1D:
    """Normal-kernel points mapped through ``F_emp^{-1}(Phi(x))``.

    The empirical quantile interpolates linearly between order statistics
    and is flat beyond the sample extremes.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError("samples must be non-empty")
    if n1 < 1:
        raise ValueError("need at least one collocation point")
    n_distinct = np.unique(samples).size
    if 1 < n_distinct < n1:
        raise ValueError(f"cannot place {n1} points on {n_distinct} distinct sample values")
    levels = norm.cdf(standard_normal_points(n1))
    pts = np.quantile(samples, levels, method="linear")
    return CollocationSet1D(np.maximum.accumulate(pts), "empirical")


@dataclass(frozen=True, eq=False)
class CorrelatedGrid:
    """Copula collocation grid; rows of ``points`` follow ``indices`` order."""

    counts: tuple[int, ...]
    cholesky: np.ndarray
    indices: np.ndarray
    normal_points: np.ndarray
    points: np.ndarray

    @property
    def size(self) -> int:
        return self.points.shape[0]


def correlated_grid(
    marginal_quantile_fns: Sequence[Callable[[np.ndarray], np.ndarray]],
    counts: Sequence[int],
    correlation,
) -> CorrelatedGrid:
    """Gaussian-copula grid of ``prod(counts)`` collocation points.

    For every index tuple the normal-space point is ``L @ x`` with ``x`` the
    per-dimension N(0,1) collocation points, so dimension ``j`` is
    conditioned on the preceding ones.  Target-space points invert the
    marginals at ``Phi`` of each coordinate.
    """
    corr = np.atleast_2d(np.asarray(correlation, dtype=float))
    d = len(counts)
    if len(marginal_quantile_fns) != d or corr.shape != (d, d):
        raise ValueError("marginals, counts and correlation must agree in dimension")
    if not np.allclose(corr, corr.T) or not np.allclose(np.diag(corr), 1.0):
        raise ValueError("correlation matrix must be symmetric with unit diagonal")
    try:
        with BLAS_LOCK:
            chol = np.linalg.cholesky(corr)
    except np.linalg.LinAlgError as exc:
        raise ValueError("correlation matrix is not positive definite") from exc

    per_dim = [standard_normal_points(n) for n in counts]
    idx = np.array(list(itertools.product(*(range(n) for n in counts))), dtype=int).reshape(-1, d)
    base = np.column_stack([per_dim[k][idx[:, k]] for k in range(d)])
    with BLAS_LOCK:
        normal_pts = base @ chol.T
    uniforms = norm.cdf(normal_pts)
    target = np.column_stack([
        np.asarray(marginal_quantile_fns[k](uniforms[:, k]), dtype=float) for k in range(d)
    ])
    return CorrelatedGrid(tuple(int(n) for n in counts), chol, idx, normal_pts, target)


# ---------------------------------------------------------------------------
# Lagrange proxy
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LagrangeInterpolant:
    """Polynomial through ``(points, values)`` in barycentric form."""

    points: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x).ravel()
        diff = x[:, None] - self.points[None, :]
        exact = diff == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = self.weights / diff
            with BLAS_LOCK:
                out = terms @ self.values
            out = out / terms.sum(axis=1)
        hit_rows = exact.any(axis=1)
        if hit_rows.any():
            out[hit_rows] = self.values[exact[hit_rows].argmax(axis=1)]
        return float(out[0]) if scalar else out

    def extrapolation_mask(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        return (x < self.points[0]) | (x > self.points[-1])


def lagrange_proxy_1d(points, values) -> LagrangeInterpolant:
    """Interpolating polynomial of degree ``n - 1`` through ``n`` distinct points."""
    if isinstance(points, CollocationSet1D):
        points = points.points
    pts = np.asarray(points, dtype=float).ravel()
    vals = np.asarray(values, dtype=float).ravel()
    if pts.shape != vals.shape:
        raise ValueError("points and values must have the same length")
    if pts.size == 0:
        raise ValueError("need at least one point")
    order = np.argsort(pts)
    pts, vals = pts[order], vals[order]
    if np.any(np.diff(pts) <= 0):
        raise ValueError("collocation points must be distinct")
    diff = pts[:, None] - pts[None, :]
    np.fill_diagonal(diff, 1.0)
    # rescale by the spread to keep the weights in floating range
    scale = (pts[-1] - pts[0]) / 4.0 if pts.size > 1 else 1.0
    weights = 1.0 / np.prod(diff / scale, axis=1)
    return LagrangeInterpolant(pts, vals, weights)


class LagrangeInterpolator(RegressorMixin, BaseEstimator):
    """Estimator wrapper: ``fit(x, y)`` on distinct nodes, ``predict(x)``."""

    def fit(self, X, y):
        x = column_or_1d(np.asarray(X, dtype=float).reshape(-1), warn=False)
        self.interpolant_ = lagrange_proxy_1d(x, column_or_1d(y))
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "interpolant_")
        return self.interpolant_(np.asarray(X, dtype=float).reshape(-1))
