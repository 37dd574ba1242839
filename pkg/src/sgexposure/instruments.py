"""Swap and swaption valuation, portfolios and the per-currency decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

import numpy as np
from scipy.special import ndtr

from ._blas import BLAS_LOCK
from .models import G2Params, HullWhiteParams, HybridParams, RateModel, g2_log_zcb_coefficients, g2_zcb

__all__ = [
    "SwapSpec",
    "SwaptionSpec",
    "PortfolioSpec",
    "SubPortfolio",
    "EvaluationCounter",
    "swap_value",
    "swap_value_hw",
    "swap_value_g2",
    "par_rate",
    "swaption_value_g2",
    "trade_value",
    "currency_value",
    "portfolio_value",
    "decompose_by_currency",
    "generate_portfolio",
]

_GL128_X, _GL128_W = np.polynomial.legendre.leggauss(128)
_SWAPTION_WIDTH = 8.0


@dataclass(frozen=True)
class SwapSpec:
    """Fixed-for-floating swap; ``payer`` pays the fixed rate.

    ``start`` is the first reset date; period ``k`` accrues from
    ``payment_dates[k-1]`` (or ``start``) to ``payment_dates[k]``.
    """

    notional: float
    fixed_rate: float
    payment_dates: tuple[float, ...]
    start: float = 0.0
    payer: bool = True
    currency: str = "EUR"
    accruals: tuple[float, ...] = ()

    def __post_init__(self):
        dates = tuple(float(d) for d in self.payment_dates)
        if not dates:
            raise ValueError("swap needs at least one payment date")
        grid = (float(self.start),) + dates
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("payment dates must be strictly increasing and after the start date")
        object.__setattr__(self, "payment_dates", dates)
        acc = tuple(float(a) for a in self.accruals) or tuple(b - a for a, b in zip(grid, grid[1:]))
        if len(acc) != len(dates) or any(a <= 0 for a in acc):
            raise ValueError("accruals must be positive, one per payment date")
        object.__setattr__(self, "accruals", acc)

    @classmethod
    def from_schedule(
        cls,
        notional: float,
        fixed_rate: float,
        start: float,
        maturity: float,
        frequency: int = 1,
        payer: bool = True,
        currency: str = "EUR",
    ) -> "SwapSpec":
        """Regular schedule with ``frequency`` payments per year up to ``maturity``."""
        n = int(round((maturity - start) * frequency))
        if n < 1 or not math.isclose(start + n / frequency, maturity, abs_tol=1e-9):
            raise ValueError("maturity must be a whole number of periods after start")
        dates = tuple(start + k / frequency for k in range(1, n + 1))
        return cls(notional, fixed_rate, dates, start, payer, currency)

    @property
    def maturity(self) -> float:
        return self.payment_dates[-1]

    @property
    def sign(self) -> float:
        return 1.0 if self.payer else -1.0

    def reset_dates(self) -> tuple[float, ...]:
        return (self.start,) + self.payment_dates[:-1]


@dataclass(frozen=True)
class SwaptionSpec:
    """European option at ``expiry`` to enter ``swap`` (which starts at expiry).

    A payer swap underlying gives a payer swaption.  After expiry the
    contract is treated as cash-settled and contributes nothing.
    """

    expiry: float
    swap: SwapSpec

    def __post_init__(self):
        if self.expiry <= 0:
            raise ValueError("swaption expiry must be positive")
        if not math.isclose(self.swap.start, self.expiry, abs_tol=1e-12):
            raise ValueError("underlying swap must start at the swaption expiry")
        if self.expiry > self.swap.payment_dates[0]:
            raise ValueError("expiry must not be after the first payment date")

    @property
    def currency(self) -> str:
        return self.swap.currency

    @property
    def maturity(self) -> float:
        return self.expiry


Trade = Union[SwapSpec, SwaptionSpec]


@dataclass(frozen=True)
class PortfolioSpec:
    base_currency: str
    trades: tuple[Trade, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "trades", tuple(self.trades))

    @property
    def currencies(self) -> tuple[str, ...]:
        """Trade currencies, base first, then in order of appearance."""
        seen = [self.base_currency]
        for tr in self.trades:
            if tr.currency not in seen:
                seen.append(tr.currency)
        return tuple(seen)

    def trades_in(self, currency: str) -> tuple[Trade, ...]:
        return tuple(tr for tr in self.trades if tr.currency == currency)

    def __len__(self) -> int:
        return len(self.trades)


@dataclass(frozen=True)
class SubPortfolio:
    currency: str
    trades: tuple[Trade, ...]
    factors: tuple[str, ...]
    fx_factor: str | None

    @property
    def dimension(self) -> int:
        return len(self.factors)


@dataclass
class EvaluationCounter:
    """Counts (sub-)portfolio valuations, one per state point."""

    count: int = 0
    by_currency: dict = field(default_factory=dict)

    def add(self, n: int, currency: str | None = None) -> None:
        self.count += int(n)
        if currency is not None:
            self.by_currency[currency] = self.by_currency.get(currency, 0) + int(n)


# ---------------------------------------------------------------------------
# Swaps
# ---------------------------------------------------------------------------


class _BondCache:
    """Memoised ``T -> P(t, T)`` for one model, time and state."""

    def __init__(self, model: RateModel, t: float, factors: Sequence[np.ndarray]):
        self.model, self.t, self.factors = model, t, factors
        self._cache: dict[float, np.ndarray] = {}

    def __call__(self, T: float):
        if T <= self.t:
            return 1.0
        hit = self._cache.get(T)
        if hit is None:
            hit = self._cache[T] = self.model.zcb(self.t, T, self.factors)
        return hit


def _swap_terms(spec: SwapSpec, t: float, P: Callable[[float], np.ndarray]):
    total = 0.0
    for reset, pay, tau in zip(spec.reset_dates(), spec.payment_dates, spec.accruals):
        if pay < t:
            continue
        # in-progress period: reset clamped to t
        p_pay = P(pay)
        libor = (P(max(reset, t)) / p_pay - 1.0) / tau
        total = total + tau * p_pay * (libor - spec.fixed_rate)
    return spec.sign * spec.notional * total


def _swap_telescoped(spec: SwapSpec, t: float, P: Callable[[float], np.ndarray]):
    live = [k for k, pay in enumerate(spec.payment_dates) if pay >= t]
    if not live:
        return 0.0
    first_reset = max(spec.reset_dates()[live[0]], t)
    annuity = sum(spec.accruals[k] * P(spec.payment_dates[k]) for k in live)
    floating = P(first_reset) - P(spec.payment_dates[-1])
    return spec.sign * spec.notional * (floating - spec.fixed_rate * annuity)


def swap_value(spec: SwapSpec, model: RateModel, t: float, factors, form: str = "terms", bonds=None):
    """Swap value in its own currency at ``t`` for factor values ``factors``.

    Only payments with ``T_k >= t`` contribute.  ``form`` selects the
    period-by-period sum (``"terms"``) or the telescoped floating leg
    (``"telescoped"``); the two agree to rounding.
    """
    P = bonds if bonds is not None else _BondCache(model, t, list(factors))
    if form == "terms":
        out = _swap_terms(spec, t, P)
    elif form == "telescoped":
        out = _swap_telescoped(spec, t, P)
    else:
        raise ValueError(f"unknown swap form {form!r}")
    shape = np.broadcast(*[np.asarray(f) for f in factors]).shape
    return np.broadcast_to(np.asarray(out, dtype=float), shape).copy() if shape else float(out)


def swap_value_hw(spec: SwapSpec, params: HullWhiteParams, t: float, r_t, form: str = "terms"):
    return swap_value(spec, params, t, [np.asarray(r_t, dtype=float)], form)


def swap_value_g2(spec: SwapSpec, params: G2Params, t: float, x, y, form: str = "terms"):
    return swap_value(spec, params, t, [np.asarray(x, dtype=float), np.asarray(y, dtype=float)], form)


def par_rate(spec: SwapSpec, model: RateModel, t: float, factors):
    """Fixed rate that sets the outstanding swap to zero at ``t``."""
    P = _BondCache(model, t, list(factors))
    live = [k for k, pay in enumerate(spec.payment_dates) if pay >= t]
    if not live:
        raise ValueError("swap has no outstanding payments")
    annuity = sum(spec.accruals[k] * P(spec.payment_dates[k]) for k in live)
    floating = P(max(spec.reset_dates()[live[0]], t)) - P(spec.payment_dates[-1])
    return floating / annuity


# ---------------------------------------------------------------------------
# G2++ swaption
# ---------------------------------------------------------------------------


def _solve_root(lam: np.ndarray, b2: np.ndarray, tol: float = 1e-14, max_iter: int = 100) -> np.ndarray:
    """Solve ``sum_i lam_i exp(-b2_i y) = 1`` for ``y`` along the leading axes.

    The left side is convex and strictly decreasing, so Newton started at
    the root of the last term alone moves monotonically to the solution.
    """
    y = np.log(lam[..., -1]) / b2[-1]
    log_total = np.log(lam.sum(axis=-1))
    hi = np.maximum(y, np.where(log_total >= 0, log_total / b2.min(), log_total / b2.max()))
    for _ in range(max_iter):
        terms = lam * np.exp(-b2 * y[..., None])
        f = terms.sum(axis=-1) - 1.0
        df = -(terms * b2).sum(axis=-1)
        step = f / df
        y = np.clip(y - step, None, hi)
        if np.all(np.abs(step) <= tol * (1.0 + np.abs(y))):
            return y
    raise ArithmeticError("swaption root search did not converge")


def _g2_forward_moments(params: G2Params, dt: float):
    """Moments of ``(x(T), y(T))`` under the ``T``-forward measure, given ``x(s) = y(s) = 0``."""
    a, b, s, e, rho = params.a, params.b, params.sigma, params.eta, params.rho
    ea, eb, eab = -math.expm1(-a * dt), -math.expm1(-b * dt), -math.expm1(-(a + b) * dt)
    e2a, e2b = -math.expm1(-2 * a * dt), -math.expm1(-2 * b * dt)
    mx = (s**2 / a**2 + rho * s * e / (a * b)) * ea - s**2 / (2 * a**2) * e2a - rho * s * e / (b * (a + b)) * eab
    my = (e**2 / b**2 + rho * s * e / (a * b)) * eb - e**2 / (2 * b**2) * e2b - rho * s * e / (a * (a + b)) * eab
    sx = s * math.sqrt(e2a / (2 * a))
    sy = e * math.sqrt(e2b / (2 * b))
    rxy = rho * s * e * eab / ((a + b) * sx * sy)
    return -mx, -my, sx, sy, rxy


def swaption_value_g2(spec: SwaptionSpec, params: G2Params, t: float = 0.0, x=0.0, y=0.0):
    """European swaption value at ``t`` given the G2++ state ``(x, y)``.

    Before expiry the value is a one-dimensional Gauss-Legendre integral
    over ``x(T)`` (128 nodes on eight standard deviations either side of
    the forward-measure mean) with the inner root found per node.  At
    expiry it is the intrinsic value and afterwards zero.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(x, y).shape
    swap, T = spec.swap, spec.expiry
    omega = spec.swap.sign
    if t > T:
        return np.zeros(shape) if shape else 0.0
    if t == T:
        intrinsic = np.maximum(swap_value_g2(swap, params, t, x, y), 0.0)
        return intrinsic if shape else float(intrinsic)
    if swap.fixed_rate < 0:
        raise ValueError("swaption pricing requires a non-negative fixed rate")
    if params.sigma <= 0 or params.eta <= 0 or abs(params.rho) >= 1:
        raise ValueError("swaption pricing requires positive volatilities and |rho| < 1")

    xs, ys = np.broadcast_arrays(x, y)
    xs, ys = xs.reshape(-1), ys.reshape(-1)
    dt = T - t
    mx0, my0, sx, sy, rxy = _g2_forward_moments(params, dt)
    mx = xs * math.exp(-params.a * dt) + mx0
    my = ys * math.exp(-params.b * dt) + my0

    coeffs = [g2_log_zcb_coefficients(params, T, Ti) for Ti in swap.payment_dates]
    logA = np.array([c[0] for c in coeffs])
    b1 = np.array([c[1] for c in coeffs])
    b2 = np.array([c[2] for c in coeffs])
    c = swap.fixed_rate * np.asarray(swap.accruals)
    c[-1] += 1.0

    nodes = mx[:, None] + _SWAPTION_WIDTH * sx * _GL128_X[None, :]
    weights = _SWAPTION_WIDTH * sx * _GL128_W
    pdf = np.exp(-0.5 * ((nodes - mx[:, None]) / sx) ** 2) / (sx * math.sqrt(2 * math.pi))

    # lam_i(x) = c_i A(T, T_i) exp(-B1_i x); zero coupons drop out of the root
    log_lam = np.log(np.where(c > 0, c, 1.0)) + logA - b1 * nodes[..., None]
    lam = np.where(c > 0, np.exp(log_lam), 0.0)
    ybar = _solve_root(lam, b2)

    root = math.sqrt(1.0 - rxy**2)
    zx = (nodes - mx[:, None]) / sx
    h1 = (ybar - my[:, None]) / (sy * root) - rxy * zx / root
    h2 = h1[..., None] + b2 * sy * root
    kappa = -b2 * (my[:, None, None] - 0.5 * root**2 * sy**2 * b2 + rxy * sy * zx[..., None])
    inner = ndtr(-omega * h1) - (lam * np.exp(kappa) * ndtr(-omega * h2)).sum(axis=-1)
    with BLAS_LOCK:
        integral = (pdf * inner) @ weights

    p_T = g2_zcb(params, t, T, xs, ys)
    value = np.maximum(omega * swap.notional * p_T * integral, 0.0)
    return value.reshape(shape) if shape else float(value[0])


# ---------------------------------------------------------------------------
# Portfolios
# ---------------------------------------------------------------------------


def trade_value(trade: Trade, model: RateModel, t: float, factors, bonds=None):
    """Value of one trade in its own currency."""
    if isinstance(trade, SwapSpec):
        return swap_value(trade, model, t, factors, bonds=bonds)
    if isinstance(trade, SwaptionSpec):
        if not isinstance(model, G2Params):
            raise TypeError("swaptions are priced under the G2++ model only")
        return swaption_value_g2(trade, model, t, *factors)
    raise TypeError(f"unsupported trade type {type(trade).__name__}")


def currency_value(
    trades: Sequence[Trade],
    params: HybridParams,
    currency: str,
    t: float,
    point: Mapping[str, np.ndarray],
    counter: EvaluationCounter | None = None,
):
    """Local-currency value of ``trades`` (all in ``currency``) at state ``point``."""
    names = params.factor_names(currency)
    try:
        factors = [np.asarray(point[n], dtype=float) for n in names]
    except KeyError as exc:
        raise KeyError(f"state is missing factor {exc.args[0]!r}") from None
    shape = np.broadcast(*factors).shape
    model = params.rate_model(currency)
    bonds = _BondCache(model, t, factors)
    total = np.zeros(shape)
    for tr in trades:
        if tr.currency != currency:
            raise ValueError(f"trade in {tr.currency} passed to the {currency} sub-portfolio")
        total = total + trade_value(tr, model, t, factors, bonds)
    if counter is not None:
        counter.add(int(np.prod(shape)) if shape else 1, currency)
    return total


def _check_currencies(portfolio: PortfolioSpec, params: HybridParams) -> None:
    if portfolio.base_currency != params.base_currency:
        raise ValueError("portfolio and model disagree on the base currency")
    unknown = set(portfolio.currencies) - set(params.currencies)
    if unknown:
        raise ValueError(f"portfolio trades currencies not in the model: {sorted(unknown)}")


def portfolio_value(
    portfolio: PortfolioSpec,
    params: HybridParams,
    t: float,
    point: Mapping[str, np.ndarray],
    counter: EvaluationCounter | None = None,
):
    """Base-currency value: base trades plus FX-converted foreign sub-sums.

    ``point`` maps factor names to values (scalars or equally shaped arrays).
    The counter is advanced by the number of state points valued.
    """
    _check_currencies(portfolio, params)
    shape = np.broadcast(*[np.asarray(v) for v in point.values()]).shape if point else ()
    total = np.zeros(shape)
    for sub in decompose_by_currency(portfolio, params):
        local = currency_value(sub.trades, params, sub.currency, t, point)
        if sub.fx_factor is None:
            total = total + local
        else:
            total = total + np.asarray(point[sub.fx_factor], dtype=float) * local
    if counter is not None:
        counter.add(int(np.prod(shape)) if shape else 1)
    return total if shape else float(total)


def decompose_by_currency(portfolio: PortfolioSpec, params: HybridParams) -> list[SubPortfolio]:
    """Split into disjoint per-currency sub-portfolios with their rate factors."""
    _check_currencies(portfolio, params)
    subs = []
    for ccy in portfolio.currencies:
        trades = portfolio.trades_in(ccy)
        if not trades:
            continue
        fx = None if ccy == params.base_currency else params.fx_name(ccy)
        subs.append(SubPortfolio(ccy, trades, params.factor_names(ccy), fx))
    return subs


def generate_portfolio(
    params: HybridParams,
    seed: int,
    n_swaps: int = 30,
    n_swaptions: int = 0,
    maturity_range: tuple[float, float] = (1.0, 25.0),
    expiry_range: tuple[float, float] = (1.0, 10.0),
    tenor_range: tuple[float, float] = (2.0, 10.0),
    strike_spread: float = 0.01,
    notional_range: tuple[float, float] = (1e4, 1e6),
    frequency: int = 1,
    currencies: Sequence[str] | None = None,
) -> PortfolioSpec:
    """Random swap (and swaption) book, reproducible from ``seed``.

    Maturities, expiries and tenors are whole periods drawn uniformly in
    their ranges; strikes are the time-0 par rate plus a uniform spread;
    notionals are log-uniform; payer/receiver is a fair coin.  Swaptions
    are spread evenly over ``currencies``.
    """
    rng = np.random.default_rng(seed)
    ccys = list(currencies or params.currencies)

    def whole(lo, hi):
        k = rng.integers(int(math.ceil(lo * frequency)), int(math.floor(hi * frequency)) + 1)
        return k / frequency

    def notional():
        return float(math.exp(rng.uniform(math.log(notional_range[0]), math.log(notional_range[1]))))

    trades: list[Trade] = []
    for _ in range(n_swaps):
        ccy = ccys[rng.integers(len(ccys))]
        model = params.rate_model(ccy)
        probe = SwapSpec.from_schedule(1.0, 0.0, 0.0, whole(*maturity_range), frequency, True, ccy)
        k = float(par_rate(probe, model, 0.0, model.initial_factors())) + rng.uniform(-strike_spread, strike_spread)
        trades.append(SwapSpec(notional(), k, probe.payment_dates, 0.0, bool(rng.integers(2)), ccy))
    for i in range(n_swaptions):
        ccy = ccys[i % len(ccys)]
        model = params.rate_model(ccy)
        expiry = whole(*expiry_range)
        probe = SwapSpec.from_schedule(1.0, 0.0, expiry, expiry + whole(*tenor_range), frequency, True, ccy)
        fwd = float(par_rate(probe, model, 0.0, model.initial_factors()))
        k = max(fwd + rng.uniform(-strike_spread, strike_spread), 0.0)
        swap = SwapSpec(notional(), k, probe.payment_dates, expiry, bool(rng.integers(2)), ccy)
        trades.append(SwaptionSpec(expiry, swap))
    return PortfolioSpec(params.base_currency, tuple(trades))
