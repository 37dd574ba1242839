"""Short-rate and FX risk-factor models and their Monte Carlo simulation.

Rates follow either the one-factor Hull-White model or the two-factor
Gaussian (G2++) model; foreign currencies add a lognormal FX rate against the
base currency.  All Gaussian factors are advanced with their exact
conditional distribution over each exposure-date step, so the step size only
enters through the trapezoidal rule used for the pathwise integrals of the
short rate (bank account and FX drift).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

__all__ = [
    "FlatCurve",
    "PolynomialCurve",
    "HullWhiteParams",
    "G2Params",
    "ForeignCurrency",
    "HybridParams",
    "FxSystemParams",
    "ModelState",
    "hw_theta",
    "hw_drift_integral",
    "hw_exact_step",
    "hw_mean_variance",
    "hw_zcb",
    "hw_log_zcb_coefficients",
    "g2_variance",
    "g2_shift",
    "g2_zcb",
    "g2_log_zcb_coefficients",
    "simulate_fx_system",
    "simulate_hull_white",
    "simulate_g2",
    "PATH_CHUNK",
]

# Paths are drawn in fixed-size blocks with independent Philox streams, so a
# path's numbers never depend on the thread schedule.
PATH_CHUNK = 2048

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _gauss_legendre(fn, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    half, mid = 0.5 * (b - a), 0.5 * (b + a)
    return float(half * np.dot(_GL_WEIGHTS, fn(mid + half * _GL_NODES)))


def _decay_integral(k: float, dt):
    """``int_0^dt exp(-k u) du`` with the ``k -> 0`` limit."""
    dt = np.asarray(dt, dtype=float)
    if k == 0.0:
        return dt
    return -np.expm1(-k * dt) / k


# ---------------------------------------------------------------------------
# Discount curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlatCurve:
    """``P(0, t) = exp(-rate * t)``."""

    rate: float
    kind: str = field(default="flat", init=False)

    def discount(self, t):
        return np.exp(-self.rate * np.asarray(t, dtype=float))

    def forward(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.rate)

    def forward_slope(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class PolynomialCurve:
    """``P(0, t) = exp(-sum_k c_k t^(k+1))``; forward ``sum_k (k+1) c_k t^k``."""

    coefficients: tuple[float, ...]
    kind: str = field(default="polynomial", init=False)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if not self.coefficients:
            raise ValueError("polynomial curve needs at least one coefficient")

    def discount(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-sum(c * t ** (k + 1) for k, c in enumerate(self.coefficients)))

    def forward(self, t):
        t = np.asarray(t, dtype=float)
        return sum((k + 1) * c * t**k for k, c in enumerate(self.coefficients)) + 0.0 * t

    def forward_slope(self, t):
        t = np.asarray(t, dtype=float)
        return sum(k * (k + 1) * c * t ** (k - 1) for k, c in enumerate(self.coefficients) if k) + 0.0 * t


Curve = Union[FlatCurve, PolynomialCurve]


# ---------------------------------------------------------------------------
# Hull-White one factor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HullWhiteParams:
    mean_reversion: float
    volatility: float
    curve: Curve

    n_factors = 1
    factor_labels = ("r",)

    def __post_init__(self):
        if not self.mean_reversion > 0:
            raise ValueError("Hull-White mean reversion must be positive")
        if self.volatility < 0:
            raise ValueError("Hull-White volatility must be non-negative")

    @property
    def r0(self) -> float:
        return float(self.curve.forward(0.0))

    @property
    def reversions(self) -> tuple[float, ...]:
        return (self.mean_reversion,)

    @property
    def volatilities(self) -> tuple[float, ...]:
        return (self.volatility,)

    def initial_factors(self) -> tuple[float, ...]:
        return (self.r0,)

    def conditional_means(self, s, t, factors, shifts=(0.0,)):
        return [hw_exact_step(self, factors[0], s, t, 0.0) - shifts[0]]

    def short_rate(self, t, factors):
        return factors[0]

    def zcb(self, t, T, factors):
        return hw_zcb(self, t, T, factors[0])


def hw_theta(params: HullWhiteParams, t):
    """Mean-reversion target ``theta(t)`` fitted to the initial curve."""
    lam, eta = params.mean_reversion, params.volatility
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("theta is defined for t >= 0")
    out = (
        params.curve.forward_slope(t) / lam
        + params.curve.forward(t)
        + eta**2 / (2 * lam**2) * -np.expm1(-2 * lam * t)
    )
    return out if out.ndim else float(out)


def hw_drift_integral(params: HullWhiteParams, s: float, t: float) -> float:
    """``lambda * int_s^t theta(u) exp(-lambda (t - u)) du``."""
    lam, eta = params.mean_reversion, params.volatility
    if isinstance(params.curve, FlatCurve):
        c, k = params.curve.rate, eta**2 / (2 * lam**2)
        decay = -math.expm1(-lam * (t - s))
        return (c + k) * decay - k * math.exp(-lam * t) * (math.exp(-lam * s) - math.exp(-lam * t))
    return lam * _gauss_legendre(lambda u: hw_theta(params, u) * np.exp(-lam * (t - u)), s, t)


def hw_exact_step(params: HullWhiteParams, r_s, s: float, t: float, z, theta_adjustment: float = 0.0):
    """Exact transition ``r(s) -> r(t)`` driven by standard normal ``z``.

    ``theta_adjustment`` shifts the target to ``theta - theta_adjustment``
    (used for the quanto drift of foreign rates under the base measure).
    """
    if not t > s:
        raise ValueError(f"need t > s, got s={s}, t={t}")
    lam, eta = params.mean_reversion, params.volatility
    decay = math.exp(-lam * (t - s))
    mean = np.asarray(r_s, dtype=float) * decay + hw_drift_integral(params, s, t)
    mean = mean - theta_adjustment * (1.0 - decay)
    std = eta * math.sqrt(-math.expm1(-2 * lam * (t - s)) / (2 * lam))
    return mean + std * np.asarray(z, dtype=float)


def hw_mean_variance(params: HullWhiteParams, t: float, s: float = 0.0, r_s=None):
    """Conditional mean and variance of ``r(t)`` given ``r(s)`` (default ``r0`` at 0)."""
    if r_s is None:
        r_s = params.r0
    lam, eta = params.mean_reversion, params.volatility
    if t == s:
        return np.asarray(r_s, dtype=float), 0.0
    mean = hw_exact_step(params, r_s, s, t, 0.0)
    var = eta**2 * -math.expm1(-2 * lam * (t - s)) / (2 * lam)
    return mean, var


def hw_log_zcb_coefficients(params: HullWhiteParams, t: float, T: float) -> tuple[float, float]:
    """``(A, B)`` with ``P(t, T) = exp(A + B r(t))``."""
    if T < t:
        raise ValueError(f"bond maturity {T} precedes valuation time {t}")
    if T == t:
        return 0.0, 0.0
    lam, eta = params.mean_reversion, params.volatility
    tau = T - t
    B = math.expm1(-lam * tau) / lam
    if isinstance(params.curve, FlatCurve):
        c, k = params.curve.rate, eta**2 / (2 * lam**2)
        # lambda * int_t^T theta(z) B(z, T) dz, with theta = c + k (1 - exp(-2 lam z))
        lin = (-math.expm1(-lam * tau)) / lam - tau
        tail = math.exp(-lam * T) * (math.exp(-lam * t) - math.exp(-lam * T)) / lam
        sq = (math.exp(-2 * lam * t) - math.exp(-2 * lam * T)) / (2 * lam)
        theta_part = c * lin + k * (lin - tail + sq)
    else:
        theta_part = lam * _gauss_legendre(
            lambda z: hw_theta(params, z) * np.expm1(-lam * (T - z)) / lam, t, T
        )
    x = lam * tau
    vol_part = eta**2 / (4 * lam**3) * (math.exp(-2 * x) * (4 * math.exp(x) - 1) - 3 + 2 * x)
    return theta_part + vol_part, B


def hw_zcb(params: HullWhiteParams, t: float, T: float, r_t):
    """Zero-coupon bond ``P(t, T) = exp(A(t, T) + B(t, T) r(t))``."""
    A, B = hw_log_zcb_coefficients(params, t, T)
    out = np.exp(A + B * np.asarray(r_t, dtype=float))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# G2++
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class G2Params:
    """``r(t) = x(t) + y(t) + phi(t)`` with correlated zero-mean OU factors."""

    a: float
    b: float
    sigma: float
    eta: float
    rho: float
    curve: Curve

    n_factors = 2
    factor_labels = ("x1", "x2")

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("G2++ mean reversions must be positive")
        if self.sigma < 0 or self.eta < 0:
            raise ValueError("G2++ volatilities must be non-negative")
        if abs(self.rho) > 1:
            raise ValueError(f"|rho| must be <= 1, got {self.rho}")

    @property
    def reversions(self) -> tuple[float, ...]:
        return (self.a, self.b)

    @property
    def volatilities(self) -> tuple[float, ...]:
        return (self.sigma, self.eta)

    def initial_factors(self) -> tuple[float, ...]:
        return (0.0, 0.0)

    def conditional_means(self, s, t, factors, shifts=(0.0, 0.0)):
        dt = t - s
        return [
            np.asarray(factors[0]) * math.exp(-self.a * dt) - shifts[0],
            np.asarray(factors[1]) * math.exp(-self.b * dt) - shifts[1],
        ]

    def short_rate(self, t, factors):
        return factors[0] + factors[1] + g2_shift(self, t)

    def zcb(self, t, T, factors):
        return g2_zcb(self, t, T, factors[0], factors[1])


def _b(k: float, tau):
    return -np.expm1(-k * np.asarray(tau, dtype=float)) / k


def g2_variance(params: G2Params, t: float, T: float) -> float:
    """Variance of ``int_t^T (x + y) du`` given the state at ``t``."""
    a, b, s, e, rho = params.a, params.b, params.sigma, params.eta, params.rho
    tau = T - t
    ba, bb, bab = _b(a, tau), _b(b, tau), _b(a + b, tau)
    return float(
        s**2 / a**2 * (tau - ba - 0.5 * a * ba**2)
        + e**2 / b**2 * (tau - bb - 0.5 * b * bb**2)
        + 2 * rho * s * e / (a * b) * (tau - ba - bb + bab)
    )


def g2_shift(params: G2Params, t):
    """Deterministic shift ``phi(t)`` reproducing the initial curve."""
    a, b, s, e, rho = params.a, params.b, params.sigma, params.eta, params.rho
    t = np.asarray(t, dtype=float)
    ea, eb = -np.expm1(-a * t), -np.expm1(-b * t)
    out = (
        params.curve.forward(t)
        + s**2 / (2 * a**2) * ea**2
        + e**2 / (2 * b**2) * eb**2
        + rho * s * e / (a * b) * ea * eb
    )
    return out if out.ndim else float(out)


def g2_log_zcb_coefficients(params: G2Params, t: float, T: float) -> tuple[float, float, float]:
    """``(A, B1, B2)`` with ``P(t, T) = exp(A - B1 x(t) - B2 y(t))``."""
    if T < t:
        raise ValueError(f"bond maturity {T} precedes valuation time {t}")
    if T == t:
        return 0.0, 0.0, 0.0
    curve = params.curve
    A = (
        math.log(float(curve.discount(T)) / float(curve.discount(t)))
        + 0.5 * (g2_variance(params, t, T) - g2_variance(params, 0.0, T) + g2_variance(params, 0.0, t))
    )
    return A, float(_b(params.a, T - t)), float(_b(params.b, T - t))


def g2_zcb(params: G2Params, t: float, T: float, x, y):
    A, B1, B2 = g2_log_zcb_coefficients(params, t, T)
    out = np.exp(A - B1 * np.asarray(x, dtype=float) - B2 * np.asarray(y, dtype=float))
    return out if out.ndim else float(out)


RateModel = Union[HullWhiteParams, G2Params]


# ---------------------------------------------------------------------------
# Multi-currency hybrid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ForeignCurrency:
    currency: str
    rates: RateModel
    fx_spot: float
    fx_vol: float

    def __post_init__(self):
        if not self.fx_spot > 0:
            raise ValueError(f"FX spot for {self.currency} must be positive")
        if self.fx_vol < 0:
            raise ValueError(f"FX volatility for {self.currency} must be non-negative")


@dataclass(frozen=True, eq=False)
class HybridParams:
    """Base-currency rates plus ``d_c`` foreign currencies with FX rates.

    Drivers are ordered as the state vector: base rate factor(s), the FX
    rates, then the foreign rate factor(s) currency by currency.  The
    correlation matrix is indexed in that order.
    """

    base_currency: str
    base_rates: RateModel
    foreign: tuple[ForeignCurrency, ...] = ()
    correlation: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "foreign", tuple(self.foreign))
        names = self.driver_names
        if len(set(self.currencies)) != len(self.currencies):
            raise ValueError("duplicate currency")
        n = len(names)
        if self.correlation is None:
            corr = np.eye(n)
            for ccy in self.currencies:
                model = self.rate_model(ccy)
                if isinstance(model, G2Params):
                    i, j = (names.index(f) for f in self.factor_names(ccy))
                    corr[i, j] = corr[j, i] = model.rho
        else:
            corr = np.array(self.correlation, dtype=float)
        if corr.shape != (n, n):
            raise ValueError(f"correlation matrix must be {n}x{n} for drivers {names}, got {corr.shape}")
        if not np.allclose(corr, corr.T, atol=1e-12) or not np.allclose(np.diag(corr), 1.0):
            raise ValueError("correlation matrix must be symmetric with unit diagonal")
        try:
            np.linalg.cholesky(corr)
        except np.linalg.LinAlgError as exc:
            raise ValueError("correlation matrix is not positive definite") from exc
        for ccy in self.currencies:
            model = self.rate_model(ccy)
            if isinstance(model, G2Params):
                i, j = (names.index(f) for f in self.factor_names(ccy))
                if not math.isclose(corr[i, j], model.rho, abs_tol=1e-12):
                    raise ValueError(f"G2++ rho for {ccy} disagrees with the correlation matrix")
        corr.setflags(write=False)
        object.__setattr__(self, "correlation", corr)

    @property
    def currencies(self) -> tuple[str, ...]:
        return (self.base_currency,) + tuple(f.currency for f in self.foreign)

    def rate_model(self, currency: str) -> RateModel:
        if currency == self.base_currency:
            return self.base_rates
        for f in self.foreign:
            if f.currency == currency:
                return f.rates
        raise KeyError(f"unknown currency {currency!r}")

    def foreign_spec(self, currency: str) -> ForeignCurrency:
        for f in self.foreign:
            if f.currency == currency:
                return f
        raise KeyError(f"{currency!r} is not a foreign currency")

    def factor_names(self, currency: str) -> tuple[str, ...]:
        model = self.rate_model(currency)
        return tuple(f"{label}_{currency}" for label in model.factor_labels)

    @staticmethod
    def fx_name(currency: str) -> str:
        return f"fx_{currency}"

    @property
    def driver_names(self) -> tuple[str, ...]:
        names = list(self.factor_names(self.base_currency))
        names += [self.fx_name(f.currency) for f in self.foreign]
        for f in self.foreign:
            names += self.factor_names(f.currency)
        return tuple(names)

    @property
    def dimension(self) -> int:
        return len(self.driver_names)

    def zcb(self, currency: str, t: float, T: float, state: Mapping[str, np.ndarray]):
        """Bond price in ``currency`` units given the factor values ``state``."""
        model = self.rate_model(currency)
        return model.zcb(t, T, [state[n] for n in self.factor_names(currency)])

    def _driver_specs(self):
        """Per driver: (kind, currency, factor index, reversion, volatility)."""
        specs = []
        for ccy in (self.base_currency,):
            m = self.rate_model(ccy)
            specs += [("rate", ccy, i, m.reversions[i], m.volatilities[i]) for i in range(m.n_factors)]
        specs += [("fx", f.currency, 0, 0.0, f.fx_vol) for f in self.foreign]
        for f in self.foreign:
            m = f.rates
            specs += [("rate", f.currency, i, m.reversions[i], m.volatilities[i]) for i in range(m.n_factors)]
        return specs


FxSystemParams = HybridParams


@dataclass(frozen=True, eq=False)
class ModelState:
    """Simulated factor panel on ``times = [t0, T_1, ..., T_N]``.

    ``factors[name]`` and ``bank_account`` have shape ``(len(times), n_paths)``.
    """

    times: np.ndarray
    factor_names: tuple[str, ...]
    factors: Mapping[str, np.ndarray]
    short_rates: Mapping[str, np.ndarray]
    bank_account: np.ndarray
    params: HybridParams
    seed: int

    @property
    def n_paths(self) -> int:
        return self.bank_account.shape[1]

    @property
    def exposure_dates(self) -> np.ndarray:
        return self.times[1:]

    def point(self, k: int) -> dict[str, np.ndarray]:
        """Factor values on all paths at time index ``k``."""
        return {n: self.factors[n][k] for n in self.factor_names}

    def matrix(self, k: int, names: Sequence[str] | None = None) -> np.ndarray:
        names = self.factor_names if names is None else names
        return np.column_stack([self.factors[n][k] for n in names])

    def discount(self, k: int) -> np.ndarray:
        """``M(t0) / M(T_k)`` per path."""
        return 1.0 / self.bank_account[k]

    def to_csv(self, path) -> None:
        """Columnar dump: one row per (time index, path)."""
        cols = ["k", "t", "path", *self.factor_names, "M"]
        n_t, n_p = self.bank_account.shape
        with open(path, "w", encoding="ascii") as fh:
            fh.write(",".join(cols) + "\n")
            for k in range(n_t):
                for p in range(n_p):
                    vals = [repr(float(self.factors[n][k, p])) for n in self.factor_names]
                    fh.write(f"{k},{self.times[k]!r},{p}," + ",".join(vals) + f",{float(self.bank_account[k, p])!r}\n")


def _check_dates(dates) -> np.ndarray:
    dates = np.asarray(dates, dtype=float).ravel()
    if dates.size == 0:
        raise ValueError("need at least one exposure date")
    if dates[0] <= 0 or np.any(np.diff(dates) <= 0):
        raise ValueError("exposure dates must be strictly increasing and after t0 = 0")
    return dates


def _draw_normals(seed: int, n_steps: int, n_paths: int, dim: int, n_threads: int) -> np.ndarray:
    out = np.empty((n_steps, n_paths, dim))
    starts = list(range(0, n_paths, PATH_CHUNK))

    def fill(chunk: int):
        lo = starts[chunk]
        hi = min(lo + PATH_CHUNK, n_paths)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))
        # path-major draws: a path's numbers do not depend on how many follow it
        out[:, lo:hi, :] = rng.standard_normal((hi - lo, n_steps, dim)).transpose(1, 0, 2)

    if n_threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(fill, range(len(starts))))
    else:
        for c in range(len(starts)):
            fill(c)
    return out


def simulate_fx_system(
    params: HybridParams, dates, n_paths: int, seed: int, n_threads: int = 1
) -> ModelState:
    """Simulate all drivers of ``params`` on ``[0] + dates``.

    Gaussian factors use their exact joint transition over each step; the
    FX log-drift and the bank account integrate the short rates with the
    trapezoidal rule on the date grid.  Output is bit-identical for any
    ``n_threads``.
    """
    dates = _check_dates(dates)
    if n_paths < 1:
        raise ValueError("n_paths must be positive")
    times = np.concatenate([[0.0], dates])
    names = params.driver_names
    specs = params._driver_specs()
    corr = params.correlation
    d, n_t = len(names), len(times)
    kappa = np.array([s[3] for s in specs])
    vol = np.array([s[4] for s in specs])
    index = {n: i for i, n in enumerate(names)}

    eps = _draw_normals(seed, n_t - 1, n_paths, d, n_threads)

    factors = {n: np.empty((n_t, n_paths)) for n in names}
    for ccy in params.currencies:
        for n, v in zip(params.factor_names(ccy), params.rate_model(ccy).initial_factors()):
            factors[n][0] = v
    for f in params.foreign:
        factors[params.fx_name(f.currency)][0] = f.fx_spot
    short = {ccy: np.empty((n_t, n_paths)) for ccy in params.currencies}
    for ccy in params.currencies:
        short[ccy][0] = params.rate_model(ccy).short_rate(0.0, [factors[n][0] for n in params.factor_names(ccy)])
    log_m = np.zeros((n_t, n_paths))
    log_fx = {f.currency: np.full(n_paths, math.log(f.fx_spot)) for f in params.foreign}

    # quanto drift: -corr(factor, fx) * vol_factor * vol_fx on foreign rate factors
    quanto_rate = np.zeros(d)
    for f in params.foreign:
        j = index[params.fx_name(f.currency)]
        for n in params.factor_names(f.currency):
            i = index[n]
            quanto_rate[i] = corr[i, j] * vol[i] * f.fx_vol

    for k in range(1, n_t):
        s, t = times[k - 1], times[k]
        dt = t - s
        cov = corr * _decay_integral_matrix(kappa, dt)
        std = np.sqrt(np.diag(cov))
        with np.errstate(invalid="ignore", divide="ignore"):
            step_corr = cov / np.outer(std, std)
        step_corr[~np.isfinite(step_corr)] = 0.0
        np.fill_diagonal(step_corr, 1.0)
        z = eps[k - 1] @ _safe_cholesky(step_corr).T
        shifts = quanto_rate * np.array([_decay_integral(kk, dt) for kk in kappa])

        for ccy in params.currencies:
            model = params.rate_model(ccy)
            fnames = params.factor_names(ccy)
            idx = [index[n] for n in fnames]
            prev = [factors[n][k - 1] for n in fnames]
            means = model.conditional_means(s, t, prev, tuple(shifts[idx]))
            for n, i, m in zip(fnames, idx, means):
                factors[n][k] = m + vol[i] * std[i] * z[:, i]
            short[ccy][k] = model.short_rate(t, [factors[n][k] for n in fnames])

        base = params.base_currency
        for f in params.foreign:
            j = index[params.fx_name(f.currency)]
            carry = 0.5 * dt * (short[base][k - 1] + short[base][k] - short[f.currency][k - 1] - short[f.currency][k])
            log_fx[f.currency] = log_fx[f.currency] + carry - 0.5 * f.fx_vol**2 * dt + f.fx_vol * std[j] * z[:, j]
            factors[params.fx_name(f.currency)][k] = np.exp(log_fx[f.currency])
        log_m[k] = log_m[k - 1] + 0.5 * dt * (short[base][k - 1] + short[base][k])

    for arr in factors.values():
        arr.setflags(write=False)
    return ModelState(
        times=times,
        factor_names=names,
        factors=factors,
        short_rates=short,
        bank_account=np.exp(log_m),
        params=params,
        seed=seed,
    )


def _decay_integral_matrix(kappa: np.ndarray, dt: float) -> np.ndarray:
    total = kappa[:, None] + kappa[None, :]
    out = np.empty_like(total)
    for idx, k in np.ndenumerate(total):
        out[idx] = _decay_integral(float(k), dt)
    return out


def _safe_cholesky(m: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        # degenerate drivers (zero volatility); fall back to a symmetric root
        w, v = np.linalg.eigh(m)
        return v @ np.diag(np.sqrt(np.clip(w, 0.0, None)))


def simulate_hull_white(
    params: HullWhiteParams, dates, n_paths: int, seed: int, currency: str = "EUR", n_threads: int = 1
) -> ModelState:
    return simulate_fx_system(HybridParams(currency, params), dates, n_paths, seed, n_threads)


def simulate_g2(
    params: G2Params, dates, n_paths: int, seed: int, currency: str = "EUR", n_threads: int = 1
) -> ModelState:
    return simulate_fx_system(HybridParams(currency, params), dates, n_paths, seed, n_threads)
