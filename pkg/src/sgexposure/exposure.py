"""Exposure profiles from simulated paths via collocation proxies.

For every exposure date the pipeline takes a domain box (or collocation
points) from the simulated factor values, values the portfolio only at the
interpolation nodes, fits the proxy and evaluates it on all paths.  Expected
and potential future exposures then follow from the proxy values.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal, Mapping, Sequence

import numpy as np

from .collocation import empirical_inverse_points, lagrange_proxy_1d, normal_collocation_points
from .instruments import (
    EvaluationCounter,
    PortfolioSpec,
    SubPortfolio,
    currency_value,
    decompose_by_currency,
    portfolio_value,
)
from .models import ModelState
from .sparse_grid import DomainBox, Interpolant, build_sparse_grid, fit_interpolant, scale_to_box

__all__ = [
    "ProxyConfig",
    "ExposureProfile",
    "ProxyFit",
    "domain_box_from_paths",
    "build_proxy",
    "evaluate_exposures",
    "error_metrics",
    "xva_aggregate",
    "cva_weight",
    "speed_up",
    "format_summary",
]


@dataclass(frozen=True)
class ProxyConfig:
    """How each exposure date is approximated.

    ``mode`` is ``"smolyak"`` (one sparse grid over the full state),
    ``"subportfolio"`` (one proxy per currency over that currency's rate
    factors, FX applied exactly) or ``"brute"`` (full revaluation).
    One-factor sub-portfolios use ``n1`` Lagrange points from
    ``point_source``; larger ones use a sparse grid of ``level``.
    """

    mode: Literal["smolyak", "subportfolio", "brute"] = "smolyak"
    level: int = 2
    n1: int = 4
    alpha: float = 0.95
    point_source: Literal["normal", "empirical"] = "normal"

    def __post_init__(self):
        if self.mode not in ("smolyak", "subportfolio", "brute"):
            raise ValueError(f"unknown proxy mode {self.mode!r}")
        if self.level < 0:
            raise ValueError("sparse-grid level must be >= 0")
        if self.n1 < 2:
            raise ValueError("need n1 >= 2 collocation points")
        if not 0.5 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0.5, 1]")
        if self.point_source not in ("normal", "empirical"):
            raise ValueError(f"unknown collocation point source {self.point_source!r}")


@dataclass(frozen=True, eq=False)
class ExposureProfile:
    """EE and PFE on the exposure dates plus the evaluation ledger.

    ``eval_counts[k]`` is the number of portfolio valuations at date ``k``;
    in sub-portfolio mode one valuation means every sub-portfolio valued at
    one collocation index, and per-currency totals are in ``sub_counts``.
    """

    dates: np.ndarray
    ee: np.ndarray
    pfe: Mapping[float, np.ndarray]
    eval_counts: np.ndarray
    n_paths: int
    extrapolated_fraction: np.ndarray
    mode: str
    seed: int
    config: Mapping[str, object] = field(default_factory=dict)
    sub_counts: Mapping[str, int] = field(default_factory=dict)
    values: np.ndarray | None = None
    discount: np.ndarray | None = None

    @property
    def total_evaluations(self) -> int:
        return int(self.eval_counts.sum())

    @property
    def reference_evaluations(self) -> int:
        return len(self.dates) * self.n_paths

    @property
    def quantiles(self) -> tuple[float, ...]:
        return tuple(sorted(self.pfe))

    def columns(self) -> dict[str, np.ndarray]:
        cols = {"EE": self.ee}
        for p in self.quantiles:
            cols[f"PFE_{p:g}"] = self.pfe[p]
        return cols

    def to_csv(self, path) -> None:
        """Write ``date, EE, PFE_p..., eval_count, extrapolated_fraction``."""
        cols = self.columns()
        header = ["date", *cols, "eval_count", "extrapolated_fraction"]
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for k, t in enumerate(self.dates):
                row = [repr(float(t))] + [repr(float(c[k])) for c in cols.values()]
                row += [str(int(self.eval_counts[k])), repr(float(self.extrapolated_fraction[k]))]
                fh.write(",".join(row) + "\n")


@dataclass(frozen=True, eq=False)
class ProxyFit:
    """A fitted proxy for one (sub-)portfolio at one date."""

    factors: tuple[str, ...]
    predict: Callable[[np.ndarray], np.ndarray]
    nodes: np.ndarray
    n_evaluations: int
    extrapolated: Callable[[np.ndarray], np.ndarray]


def domain_box_from_paths(state: ModelState, k: int, factors: Sequence[str], alpha: float = 0.95) -> DomainBox:
    """Per-factor empirical quantiles at ``1 - alpha`` and ``alpha`` on date index ``k``.

    ``alpha = 1`` gives the path minimum and maximum.  A factor with no
    spread is widened by a few ulps and flagged in ``DomainBox.degenerate``.
    """
    if not 0.5 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0.5, 1]")
    lower, upper, flags = [], [], []
    for name in factors:
        x = np.asarray(state.factors[name][k], dtype=float)
        if alpha == 1.0:
            lo, hi = float(x.min()), float(x.max())
        else:
            lo, hi = (float(q) for q in np.quantile(x, [1.0 - alpha, alpha], method="linear"))
        degenerate = not hi > lo
        if degenerate:
            pad = 64 * np.finfo(float).eps * max(1.0, abs(lo))
            lo, hi = lo - pad, hi + pad
        lower.append(lo)
        upper.append(hi)
        flags.append(degenerate)
    return DomainBox(tuple(lower), tuple(upper), tuple(flags))


def _sparse_grid_proxy(value_fn, state: ModelState, k: int, factors: Sequence[str], level: int, alpha: float) -> ProxyFit:
    box = domain_box_from_paths(state, k, factors, alpha)
    grid = build_sparse_grid(len(factors), level)
    nodes = scale_to_box(grid.nodes, box)
    values = value_fn({n: nodes[:, i] for i, n in enumerate(factors)})
    interp: Interpolant = fit_interpolant(grid, values, box)
    return ProxyFit(tuple(factors), interp, nodes, grid.size, interp.extrapolation_mask)


def _lagrange_proxy(value_fn, state: ModelState, k: int, factor: str, n1: int, source: str) -> ProxyFit:
    x = state.factors[factor][k]
    if source == "normal":
        pts = normal_collocation_points(n1, float(np.mean(x)), float(np.var(x))).points
    else:
        pts = empirical_inverse_points(x, n1).points
    if not np.all(np.diff(pts) > 0):
        # factor without spread on this date: one valuation, constant proxy
        pts = pts[:1]
    values = value_fn({factor: pts})
    interp = lagrange_proxy_1d(pts, values)
    return ProxyFit(
        (factor,),
        lambda m: interp(np.asarray(m).reshape(-1)),
        pts[:, None],
        pts.size,
        lambda m: interp.extrapolation_mask(np.asarray(m).reshape(-1)),
    )


def build_proxy(
    target: PortfolioSpec | SubPortfolio,
    state: ModelState,
    k: int,
    config: ProxyConfig,
    counter: EvaluationCounter | None = None,
) -> ProxyFit:
    """Fit the proxy of a full portfolio (sparse grid over all drivers) or of
    one sub-portfolio (over its own rate factors, in local currency) at date
    index ``k``.  The portfolio is valued only at the proxy nodes.
    """
    params, t = state.params, float(state.times[k])
    if isinstance(target, SubPortfolio):
        def value_fn(point):
            return currency_value(target.trades, params, target.currency, t, point, counter)

        if target.dimension == 1:
            return _lagrange_proxy(value_fn, state, k, target.factors[0], config.n1, config.point_source)
        return _sparse_grid_proxy(value_fn, state, k, target.factors, config.level, config.alpha)

    def value_fn(point):
        return portfolio_value(target, params, t, point, counter)

    return _sparse_grid_proxy(value_fn, state, k, params.driver_names, config.level, config.alpha)


def _date_values(portfolio: PortfolioSpec, state: ModelState, k: int, config: ProxyConfig):
    """Values on all paths at date ``k``, evaluation count and extrapolated fraction."""
    params, t = state.params, float(state.times[k])
    if config.mode == "brute":
        counter = EvaluationCounter()
        values = portfolio_value(portfolio, params, t, state.point(k), counter)
        return np.broadcast_to(values, (state.n_paths,)).astype(float), counter.count, {}, 0.0

    if config.mode == "smolyak":
        counter = EvaluationCounter()
        fit = build_proxy(portfolio, state, k, config, counter)
        m = state.matrix(k, fit.factors)
        return fit.predict(m), counter.count, {}, float(np.mean(fit.extrapolated(m)))

    values = np.zeros(state.n_paths)
    outside = np.zeros(state.n_paths, dtype=bool)
    per_ccy: dict[str, int] = {}
    count = 0
    for sub in decompose_by_currency(portfolio, params):
        counter = EvaluationCounter()
        fit = build_proxy(sub, state, k, config, counter)
        m = state.matrix(k, fit.factors)
        local = fit.predict(m)
        outside |= fit.extrapolated(m)
        values = values + (local if sub.fx_factor is None else state.factors[sub.fx_factor][k] * local)
        per_ccy[sub.currency] = counter.count
        count = max(count, counter.count)
    return values, count, per_ccy, float(np.mean(outside))


def evaluate_exposures(
    portfolio: PortfolioSpec,
    state: ModelState,
    config: ProxyConfig,
    quantiles: Sequence[float] = (0.95, 0.99),
    discount_pfe: bool = False,
    keep_paths: bool = False,
    n_threads: int = 1,
) -> ExposureProfile:
    """Run the proxy pipeline over every exposure date of ``state``.

    ``EE`` is the path mean of ``max(V, 0) / M(T_k)``; ``PFE_p`` is the
    linear-interpolated ``p``-quantile of ``max(V, 0)``, undiscounted unless
    ``discount_pfe``.  Dates are processed independently, so ``n_threads``
    does not change the result.
    """
    qs = tuple(float(q) for q in quantiles)
    if any(not 0.0 < q < 1.0 for q in qs):
        raise ValueError("PFE quantile levels must lie in (0, 1)")
    n_dates = len(state.times) - 1

    def work(k):
        return _date_values(portfolio, state, k, config)

    ks = range(1, n_dates + 1)
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(work, ks))
    else:
        results = [work(k) for k in ks]

    ee = np.empty(n_dates)
    pfe = {q: np.empty(n_dates) for q in qs}
    counts = np.empty(n_dates, dtype=np.int64)
    extrap = np.empty(n_dates)
    sub_counts: dict[str, int] = {}
    all_values = np.empty((n_dates, state.n_paths)) if keep_paths else None
    for i, (values, count, per_ccy, frac) in enumerate(results):
        disc = state.discount(i + 1)
        positive = np.maximum(values, 0.0)
        ee[i] = np.mean(disc * positive)
        scaled = disc * positive if discount_pfe else positive
        levels = np.quantile(scaled, qs, method="linear")
        for q, v in zip(qs, levels):
            pfe[q][i] = v
        counts[i] = count
        extrap[i] = frac
        for ccy, c in per_ccy.items():
            sub_counts[ccy] = sub_counts.get(ccy, 0) + c
        if keep_paths:
            all_values[i] = values
    echo = {
        "mode": config.mode,
        "level": config.level,
        "n1": config.n1,
        "alpha": config.alpha,
        "point_source": config.point_source,
        "quantiles": list(qs),
        "discount_pfe": discount_pfe,
    }
    return ExposureProfile(
        dates=state.exposure_dates.copy(),
        ee=ee,
        pfe=pfe,
        eval_counts=counts,
        n_paths=state.n_paths,
        extrapolated_fraction=extrap,
        mode=config.mode,
        seed=state.seed,
        config=echo,
        sub_counts=sub_counts,
        values=all_values,
        discount=np.stack([state.discount(k) for k in ks]) if keep_paths else None,
    )


def error_metrics(reference: ExposureProfile, approx: ExposureProfile) -> dict[str, dict[str, float]]:
    """Errors of ``approx`` against ``reference`` per profile column.

    ``mean_relative`` is the date average of ``|f - g| / f`` over dates with
    ``f != 0`` (other dates contribute zero but still count in the average);
    ``max_absolute`` and ``max_relative`` are the maxima over dates.
    """
    if reference.dates.shape != approx.dates.shape or not np.array_equal(reference.dates, approx.dates):
        raise ValueError("profiles are on different date grids")
    ref_cols, app_cols = reference.columns(), approx.columns()
    out: dict[str, dict[str, float]] = {"mean_relative": {}, "max_absolute": {}, "max_relative": {}}
    for name, f in ref_cols.items():
        if name not in app_cols:
            continue
        g = app_cols[name]
        diff = np.abs(f - g)
        nonzero = f != 0
        rel = np.zeros_like(f)
        rel[nonzero] = diff[nonzero] / np.abs(f[nonzero])
        out["mean_relative"][name] = float(rel.mean())
        out["max_absolute"][name] = float(diff.max())
        out["max_relative"][name] = float(rel.max())
    return out


def cva_weight(recovery: float, hazard_rate: float) -> Callable[[float, np.ndarray], np.ndarray]:
    """``chi(t, x) = (1 - R) max(x, 0) h exp(-h t)``: CVA with a constant hazard rate."""
    if not 0.0 <= recovery <= 1.0:
        raise ValueError("recovery must lie in [0, 1]")
    if hazard_rate < 0:
        raise ValueError("hazard rate must be non-negative")

    def chi(t, x):
        return (1.0 - recovery) * np.maximum(x, 0.0) * hazard_rate * math.exp(-hazard_rate * t)

    return chi


def _left_point_steps(dates: np.ndarray) -> np.ndarray:
    if len(dates) == 1:
        return np.array([dates[0]])
    steps = np.diff(dates)
    return np.append(steps, steps[-1])


def xva_aggregate(
    source: ExposureProfile | tuple[np.ndarray, np.ndarray, np.ndarray],
    chi: Callable[[float, np.ndarray], np.ndarray],
    dt=None,
) -> float:
    """``sum_k E[chi(T_k, V(T_k)) / M(T_k)] dt_k``.

    ``source`` is either an :class:`ExposureProfile` (``chi`` is applied to
    the EE profile, exact when ``chi`` is linear in the exposure) or a
    ``(dates, values, discount)`` triple of per-path arrays of shape
    ``(N_T, N_p)``.  The default ``dt`` uses left-point spacings, the last
    date repeating the previous spacing.
    """
    if isinstance(source, ExposureProfile):
        dates = source.dates
        terms = np.array([float(chi(t, e)) for t, e in zip(dates, source.ee)])
    else:
        dates, values, disc = (np.asarray(a, dtype=float) for a in source)
        values, disc = np.atleast_2d(values), np.atleast_2d(disc)
        if values.shape != disc.shape or values.shape[0] != dates.shape[0]:
            raise ValueError("values and discount factors must be (N_T, N_p) aligned with dates")
        terms = np.array([np.mean(disc[k] * chi(t, values[k])) for k, t in enumerate(dates)])
    steps = _left_point_steps(dates) if dt is None else np.broadcast_to(np.asarray(dt, dtype=float), dates.shape)
    return float(np.sum(terms * steps))


def speed_up(n_paths: int, evaluations_per_date: int) -> int:
    """Brute-force over proxy valuations per date, rounded down."""
    return n_paths // evaluations_per_date


def format_summary(
    profiles: Mapping[str, ExposureProfile],
    reference: ExposureProfile | None = None,
    title: str = "exposure run",
) -> str:
    """Plain-text table of evaluation counts, speed-ups and errors."""
    lines = [title, "=" * len(title)]
    header = f"{'run':<16}{'evaluations':>16}{'speed-up':>10}"
    metric_cols: list[str] = []
    if reference is not None:
        metric_cols = list(reference.columns())
        header += "".join(f"{c:>14}" for c in metric_cols)
    lines.append(header)
    for name, prof in profiles.items():
        per_date = int(prof.eval_counts[0]) if len(prof.eval_counts) else 0
        evals = f"{len(prof.dates)}x{per_date}"
        row = f"{name:<16}{evals:>16}{speed_up(prof.n_paths, per_date) if per_date else 0:>10}"
        if reference is not None:
            errs = error_metrics(reference, prof)["mean_relative"]
            row += "".join(f"{errs.get(c, float('nan')):>14.3e}" for c in metric_cols)
        lines.append(row)
    if reference is not None:
        lines.append("")
        lines.append("errors: date-averaged relative error against the brute-force reference")
    return "\n".join(lines) + "\n"
