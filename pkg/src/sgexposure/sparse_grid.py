"""Smolyak sparse grids on Clenshaw-Curtis nodes with a Chebyshev basis.

The grid is built from disjoint blocks: for every level multi-index ``w``
with ``d <= |w| <= d + mu`` the block contributes the tensor product of the
nodes that are *new* at each one-dimensional level ``w_k`` together with the
Chebyshev degrees ``m(w_k - 1) .. m(w_k) - 1``.  Node and basis counts agree
block by block, so the collocation matrix is square.

Node coordinates are keyed by exact rational angles (``x = -cos(pi * f)``
with ``f`` a :class:`fractions.Fraction`), which makes deduplication and
nestedness exact rather than tolerance based.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._blas import BLAS_LOCK

__all__ = [
    "IllConditionedError",
    "DomainBox",
    "SparseGrid",
    "Interpolant",
    "level_size",
    "chebyshev_extrema",
    "chebyshev_eval",
    "chebyshev_table",
    "smolyak_multi_indices",
    "build_sparse_grid",
    "count_sparse_grid_nodes",
    "fit_interpolant",
    "eval_interpolant",
    "scale_to_box",
    "scale_from_box",
    "dump_interpolant",
    "load_interpolant",
    "SmolyakInterpolator",
]

_HALF = Fraction(1, 2)


class IllConditionedError(np.linalg.LinAlgError):
    """Raised when the collocation system cannot be solved accurately."""


# ---------------------------------------------------------------------------
# One-dimensional building blocks
# ---------------------------------------------------------------------------


def level_size(j: int) -> int:
    """Number of Clenshaw-Curtis nodes at one-dimensional level ``j``.

    ``m(0) = 0`` (convenience for disjoint ranges), ``m(1) = 1`` and
    ``m(j) = 2**(j - 1) + 1`` for ``j >= 2``, i.e. 1, 3, 5, 9, 17, ...
    """
    if j < 0:
        raise ValueError(f"level must be non-negative, got {j}")
    if j == 0:
        return 0
    if j == 1:
        return 1
    return 2 ** (j - 1) + 1


def _angle_fractions(n: int) -> list[Fraction]:
    if n == 1:
        return [_HALF]
    return [Fraction(i, n - 1) for i in range(n)]


def _coordinate(f: Fraction) -> float:
    # sin(pi*(f - 1/2)) == -cos(pi*f), but exactly antisymmetric and exact at 0, +-1
    return float(np.sin(np.pi * float(f - _HALF)))


def chebyshev_extrema(n: int) -> np.ndarray:
    """Extrema of the Chebyshev polynomial of degree ``n - 1``, ascending.

    ``x_i = -cos(pi * (i - 1) / (n - 1))`` for ``i = 1..n``; a single node
    at 0 when ``n == 1``.
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    return np.array([_coordinate(f) for f in _angle_fractions(n)])


def _new_fractions(level: int) -> list[Fraction]:
    """Angle fractions introduced at ``level`` and absent from ``level - 1``."""
    current = _angle_fractions(level_size(level))
    if level == 1:
        return current
    previous = set(_angle_fractions(level_size(level - 1)))
    return [f for f in current if f not in previous]


def chebyshev_eval(degree: int, x):
    """Chebyshev polynomial ``T_degree(x)`` by the three-term recurrence.

    No clamping is applied; values outside ``[-1, 1]`` are extrapolated.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    t_prev, t_curr = np.ones_like(x), x.copy()
    if degree == 0:
        return t_prev if t_prev.ndim else float(t_prev)
    for _ in range(degree - 1):
        t_prev, t_curr = t_curr, 2.0 * x * t_curr - t_prev
    return t_curr if t_curr.ndim else float(t_curr)


def chebyshev_table(max_degree: int, x: np.ndarray) -> np.ndarray:
    """All of ``T_0 .. T_max_degree`` at ``x``; shape ``x.shape + (max_degree + 1,)``."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (max_degree + 1,))
    out[..., 0] = 1.0
    if max_degree >= 1:
        out[..., 1] = x
    for n in range(2, max_degree + 1):
        out[..., n] = 2.0 * x * out[..., n - 1] - out[..., n - 2]
    return out


# ---------------------------------------------------------------------------
# Domain scaling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned box ``[lb_i, ub_i]`` in risk-factor units."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    degenerate: tuple[bool, ...] = field(default=())

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) != len(upper) or not lower:
            raise ValueError("lower and upper bounds must be non-empty and of equal length")
        for i, (lo, hi) in enumerate(zip(lower, upper)):
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise ValueError(f"non-finite bound in dimension {i}")
            if not lo < hi:
                raise ValueError(f"degenerate box in dimension {i}: lb={lo} ub={hi}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if not self.degenerate:
            object.__setattr__(self, "degenerate", (False,) * len(lower))

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @classmethod
    def canonical(cls, d: int) -> "DomainBox":
        return cls((-1.0,) * d, (1.0,) * d)

    @classmethod
    def from_bounds(cls, bounds) -> "DomainBox":
        """Build from a sequence of ``(lb, ub)`` pairs."""
        bounds = np.asarray(bounds, dtype=float).reshape(-1, 2)
        return cls(tuple(bounds[:, 0]), tuple(bounds[:, 1]))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of rows of ``points`` lying inside the box."""
        points = np.atleast_2d(points)
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return np.all((points >= lo) & (points <= hi), axis=1)


def scale_to_box(u, box: DomainBox) -> np.ndarray:
    """Map points from ``[-1, 1]^d`` into ``box``."""
    u = np.asarray(u, dtype=float)
    lo, hi = np.asarray(box.lower), np.asarray(box.upper)
    half = 0.5 * (hi - lo)
    return u * half + lo + half


def scale_from_box(x, box: DomainBox) -> np.ndarray:
    """Inverse of :func:`scale_to_box`."""
    x = np.asarray(x, dtype=float)
    lo, hi = np.asarray(box.lower), np.asarray(box.upper)
    half = 0.5 * (hi - lo)
    return (x - lo - half) / half


# ---------------------------------------------------------------------------
# Smolyak construction
# ---------------------------------------------------------------------------


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def smolyak_multi_indices(d: int, mu: int) -> list[tuple[int, ...]]:
    """Level multi-indices ``w >= 1`` with ``d <= |w| <= d + mu``."""
    out = []
    for total in range(d, d + mu + 1):
        out.extend(_compositions(total, d))
    return out


def count_sparse_grid_nodes(d: int, mu: int) -> int:
    """Node count of the level-``mu`` grid without materialising it."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if mu < 0:
        raise ValueError("level must be >= 0")
    width = {j: level_size(j) - level_size(j - 1) for j in range(1, mu + 2)}
    return sum(int(np.prod([width[w] for w in idx])) for idx in smolyak_multi_indices(d, mu))


@dataclass(frozen=True, eq=False)
class SparseGrid:
    """Deduplicated Smolyak node set on ``[-1, 1]^d`` with its Chebyshev basis.

    Attributes
    ----------
    dimension, level : int
    nodes : ndarray, shape (n, d)
    node_keys : tuple
        Exact angle fractions per node; ``nodes[i, k] == -cos(pi * key[i][k])``.
    degrees : ndarray of int, shape (n, d)
        Per-dimension Chebyshev degree of each basis function.
    multi_indices : tuple
        Level multi-indices ``w`` of the disjoint blocks.
    node_block, basis_block : ndarray of int
        Index into ``multi_indices`` of the block that produced each node /
        basis function.
    """

    dimension: int
    level: int
    nodes: np.ndarray
    node_keys: tuple
    degrees: np.ndarray
    multi_indices: tuple
    node_block: np.ndarray
    basis_block: np.ndarray
    basis: str = "chebyshev"

    def __len__(self) -> int:
        return self.nodes.shape[0]

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def key_set(self) -> frozenset:
        return frozenset(self.node_keys)

    def basis_matrix(self, points: np.ndarray) -> np.ndarray:
        """Tensor Chebyshev basis evaluated at ``points`` in ``[-1, 1]^d``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        max_deg = int(self.degrees.max())
        # built basis-major so the row gathers are contiguous
        out = np.ones((self.size, points.shape[0]))
        for k in range(self.dimension):
            active = self._active_columns[k]
            if active.size:
                table = np.ascontiguousarray(chebyshev_table(max_deg, points[:, k]).T)
                out[active] *= table[self.degrees[active, k]]
        return out.T

    @cached_property
    def _active_columns(self) -> tuple[np.ndarray, ...]:
        # most basis functions are constant in most dimensions
        return tuple(np.flatnonzero(self.degrees[:, k]) for k in range(self.dimension))

    @cached_property
    def _lu(self):
        matrix = self.basis_matrix(self.nodes)
        with BLAS_LOCK:
            return matrix, scipy.linalg.lu_factor(matrix, check_finite=True)

    def condition_number(self) -> float:
        return float(np.linalg.cond(self._lu[0]))


@lru_cache(maxsize=64)
def build_sparse_grid(d: int, mu: int) -> SparseGrid:
    """Smolyak grid of dimension ``d`` and level ``mu`` (disjoint-block form).

    Grids are immutable and memoised per ``(d, mu)``.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if mu < 0:
        raise ValueError(f"level must be >= 0, got {mu}")

    new_fracs = {j: _new_fractions(j) for j in range(1, mu + 2)}
    deg_ranges = {j: range(level_size(j - 1), level_size(j)) for j in range(1, mu + 2)}
    multi = smolyak_multi_indices(d, mu)

    keys, degrees, node_block, basis_block = [], [], [], []
    for b, w in enumerate(multi):
        for combo in itertools.product(*(new_fracs[wk] for wk in w)):
            keys.append(combo)
            node_block.append(b)
        for combo in itertools.product(*(deg_ranges[wk] for wk in w)):
            degrees.append(combo)
            basis_block.append(b)

    if len(set(keys)) != len(keys):  # pragma: no cover - structural guarantee
        raise RuntimeError("duplicate nodes in disjoint Smolyak construction")

    coord = {f: _coordinate(f) for fr in new_fracs.values() for f in fr}
    nodes = np.array([[coord[f] for f in key] for key in keys], dtype=float).reshape(-1, d)
    return SparseGrid(
        dimension=d,
        level=mu,
        nodes=nodes,
        node_keys=tuple(keys),
        degrees=np.array(degrees, dtype=int).reshape(-1, d),
        multi_indices=tuple(multi),
        node_block=np.array(node_block, dtype=int),
        basis_block=np.array(basis_block, dtype=int),
    )


# ---------------------------------------------------------------------------
# Interpolant
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Interpolant:
    """Fitted sparse-grid polynomial ``g(x) = sum_j b_j psi_j(u(x))``.

    ``box`` maps risk-factor coordinates to the canonical cube; ``None``
    means inputs are already canonical.
    """

    grid: SparseGrid
    coefficients: np.ndarray
    box: DomainBox | None = None

    @property
    def dimension(self) -> int:
        return self.grid.dimension

    def __call__(self, points) -> np.ndarray:
        return eval_interpolant(self, points)

    def extrapolation_mask(self, points) -> np.ndarray:
        """True for rows of ``points`` outside the fitted domain."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        box = self.box or DomainBox.canonical(self.dimension)
        return ~box.contains(points)


def fit_interpolant(
    grid: SparseGrid, values, box: DomainBox | None = None, rtol: float = 1e-10
) -> Interpolant:
    """Solve the Lagrange collocation system for the basis coefficients.

    Raises
    ------
    ValueError
        On length mismatch or non-finite values.
    IllConditionedError
        If the node residual exceeds ``rtol * (1 + |value|)``.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.shape[0] != grid.size:
        raise ValueError(f"expected {grid.size} values aligned to the grid nodes, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    if box is not None and box.dimension != grid.dimension:
        raise ValueError("box dimension does not match grid dimension")

    matrix, lu = grid._lu
    with BLAS_LOCK:
        coef = scipy.linalg.lu_solve(lu, values)
        if not np.all(np.isfinite(coef)):
            raise IllConditionedError("non-finite interpolation coefficients")
        residual = np.abs(matrix @ coef - values)
        limit = rtol * (1.0 + np.abs(values))
        if np.any(residual > limit):
            # one step of iterative refinement before giving up
            coef = coef + scipy.linalg.lu_solve(lu, values - matrix @ coef)
            residual = np.abs(matrix @ coef - values)
    if np.any(residual > limit):
        raise IllConditionedError(
            f"collocation residual {residual.max():.3e} exceeds tolerance "
            f"(cond={grid.condition_number():.3e})"
        )
    return Interpolant(grid=grid, coefficients=coef, box=box)


def eval_interpolant(interp: Interpolant, points, chunk_size: int = 8192) -> np.ndarray:
    """Evaluate at ``points`` of shape ``(n, d)`` (or ``(n,)`` when ``d == 1``).

    Points outside the box are extrapolated, not clamped; see
    :meth:`Interpolant.extrapolation_mask`.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, interp.dimension) if interp.dimension > 1 else points[:, None]
    if points.shape[1] != interp.dimension:
        raise ValueError(f"points have {points.shape[1]} columns, interpolant has dimension {interp.dimension}")
    if not np.all(np.isfinite(points)):
        raise ValueError("points must be finite")
    u = points if interp.box is None else scale_from_box(points, interp.box)
    out = np.empty(u.shape[0])
    for start in range(0, u.shape[0], chunk_size):
        block = u[start:start + chunk_size]
        basis = interp.grid.basis_matrix(block)
        with BLAS_LOCK:
            out[start:start + chunk_size] = basis @ interp.coefficients
    return out


def dump_interpolant(interp: Interpolant) -> str:
    """JSON text with nodes, degrees, coefficients and box (round-trip precision)."""
    payload = {
        "format": "sgexposure.interpolant/1",
        "dimension": interp.grid.dimension,
        "level": interp.grid.level,
        "basis": interp.grid.basis,
        "box": None if interp.box is None else {"lower": list(interp.box.lower), "upper": list(interp.box.upper)},
        "nodes": interp.grid.nodes.tolist(),
        "degrees": interp.grid.degrees.tolist(),
        "coefficients": interp.coefficients.tolist(),
    }
    return json.dumps(payload, indent=1)


def load_interpolant(text: str) -> Interpolant:
    payload = json.loads(text)
    grid = build_sparse_grid(payload["dimension"], payload["level"])
    if not np.array_equal(grid.degrees, np.asarray(payload["degrees"], dtype=int).reshape(grid.degrees.shape)):
        raise ValueError("serialized degrees do not match the rebuilt grid")
    box = payload["box"]
    return Interpolant(
        grid=grid,
        coefficients=np.asarray(payload["coefficients"], dtype=float),
        box=None if box is None else DomainBox(tuple(box["lower"]), tuple(box["upper"])),
    )


# ---------------------------------------------------------------------------
# Estimator front-end
# ---------------------------------------------------------------------------


class SmolyakInterpolator(RegressorMixin, BaseEstimator):
    """Scikit-learn style wrapper around a Smolyak interpolant.

    The design is fixed by the grid: obtain the collocation points with
    :meth:`collocation_points`, evaluate the target there and pass both to
    :meth:`fit`.

    Parameters
    ----------
    level : int, default=2
        Smolyak level ``mu``.
    bounds : array-like of shape (d, 2), optional
        Per-feature ``(lb, ub)``; defaults to ``[-1, 1]`` in every feature.
    """

    def __init__(self, level: int = 2, bounds=None):
        self.level = level
        self.bounds = bounds

    def _box(self, n_features: int) -> DomainBox | None:
        if self.bounds is None:
            return None
        box = DomainBox.from_bounds(self.bounds)
        if box.dimension != n_features:
            raise ValueError(f"bounds describe {box.dimension} features, expected {n_features}")
        return box

    def collocation_points(self, n_features: int) -> np.ndarray:
        grid = build_sparse_grid(n_features, self.level)
        box = self._box(n_features)
        return grid.nodes.copy() if box is None else scale_to_box(grid.nodes, box)

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        n_features = X.shape[1]
        expected = self.collocation_points(n_features)
        if X.shape != expected.shape or not np.allclose(X, expected, rtol=1e-12, atol=1e-14):
            raise ValueError("X must equal collocation_points(n_features) in order")
        box = self._box(n_features)
        self.interpolant_ = fit_interpolant(build_sparse_grid(n_features, self.level), y, box=box)
        self.n_features_in_ = n_features
        return self

    def predict(self, X):
        check_is_fitted(self, "interpolant_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return eval_interpolant(self.interpolant_, X)
