"""Run configuration: schema, YAML round-trip and conversion to model objects."""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import instruments as ins
from . import models as mdl
from .exposure import ProxyConfig

__all__ = [
    "RunConfig",
    "load_config",
    "dump_config",
    "build_model",
    "build_portfolio",
    "exposure_dates",
]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class FlatCurveCfg(_Strict):
    kind: Literal["flat"] = "flat"
    rate: float


class PolynomialCurveCfg(_Strict):
    kind: Literal["polynomial"] = "polynomial"
    coefficients: list[float] = Field(min_length=1)


CurveCfg = Annotated[Union[FlatCurveCfg, PolynomialCurveCfg], Field(discriminator="kind")]


class HullWhiteCfg(_Strict):
    kind: Literal["hull_white"] = "hull_white"
    mean_reversion: float = Field(gt=0)
    volatility: float = Field(ge=0)
    curve: CurveCfg


class G2Cfg(_Strict):
    kind: Literal["g2"] = "g2"
    a: float = Field(gt=0)
    b: float = Field(gt=0)
    sigma: float = Field(ge=0)
    eta: float = Field(ge=0)
    rho: float = Field(ge=-1, le=1)
    curve: CurveCfg


RatesCfg = Annotated[Union[HullWhiteCfg, G2Cfg], Field(discriminator="kind")]


class ForeignCfg(_Strict):
    currency: str
    fx_spot: float = Field(gt=0)
    fx_vol: float = Field(ge=0)
    rates: RatesCfg


class ModelCfg(_Strict):
    base_currency: str
    base_rates: RatesCfg
    foreign: list[ForeignCfg] = Field(default_factory=list)
    correlation: Optional[list[list[float]]] = None

    @model_validator(mode="after")
    def _consistent(self):
        try:
            build_model(self)
        except (ValueError, KeyError) as exc:
            raise ValueError(f"correlation/model inconsistency: {exc}") from None
        return self


class SwapCfg(_Strict):
    type: Literal["swap"] = "swap"
    currency: str
    notional: float = Field(gt=0)
    fixed_rate: Union[float, Literal["par"]]
    strike_offset: float = 0.0
    maturity: float = Field(gt=0)
    start: float = Field(default=0.0, ge=0)
    frequency: int = Field(default=1, ge=1)
    payer: bool = True


class SwaptionCfg(_Strict):
    type: Literal["swaption"] = "swaption"
    currency: str
    notional: float = Field(gt=0)
    fixed_rate: Union[float, Literal["par"]]
    strike_offset: float = 0.0
    expiry: float = Field(gt=0)
    tenor: float = Field(gt=0)
    frequency: int = Field(default=1, ge=1)
    payer: bool = True


TradeCfg = Annotated[Union[SwapCfg, SwaptionCfg], Field(discriminator="type")]


class GeneratorCfg(_Strict):
    seed: int
    n_swaps: int = Field(default=30, ge=0)
    n_swaptions: int = Field(default=0, ge=0)
    maturity_range: tuple[float, float] = (1.0, 25.0)
    expiry_range: tuple[float, float] = (1.0, 10.0)
    tenor_range: tuple[float, float] = (2.0, 10.0)
    strike_spread: float = Field(default=0.01, ge=0)
    notional_range: tuple[float, float] = (1e4, 1e6)
    frequency: int = Field(default=1, ge=1)


class PortfolioCfg(_Strict):
    trades: list[TradeCfg] = Field(default_factory=list)
    generator: Optional[GeneratorCfg] = None


class DatesCfg(_Strict):
    """Either explicit ``times`` or ``count`` equally spaced dates up to ``horizon``."""

    times: Optional[list[float]] = None
    count: Optional[int] = Field(default=None, ge=1)
    horizon: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _one_form(self):
        if (self.times is None) == (self.count is None or self.horizon is None):
            raise ValueError("give either 'times' or both 'count' and 'horizon'")
        if self.times is not None:
            t = np.asarray(self.times, dtype=float)
            if t.size == 0 or t[0] <= 0 or np.any(np.diff(t) <= 0):
                raise ValueError("exposure times must be positive and strictly increasing")
        return self


class SimulationCfg(_Strict):
    n_paths: int = Field(ge=1)
    seed: int = 0
    dates: DatesCfg
    n_threads: int = Field(default=1, ge=1)


class ProxyCfg(_Strict):
    mode: Literal["smolyak", "subportfolio", "brute"] = "smolyak"
    level: int = Field(default=2, ge=0)
    n1: int = Field(default=4, ge=2)
    alpha: float = Field(default=0.95, gt=0.5, le=1.0)
    point_source: Literal["normal", "empirical"] = "normal"
    quantiles: list[float] = Field(default_factory=lambda: [0.95, 0.99])
    discount_pfe: bool = False

    @field_validator("quantiles")
    @classmethod
    def _levels(cls, v):
        if any(not 0 < q < 1 for q in v):
            raise ValueError("quantile levels must lie in (0, 1)")
        return v

    def to_proxy_config(self, **overrides) -> ProxyConfig:
        fields = dict(mode=self.mode, level=self.level, n1=self.n1, alpha=self.alpha, point_source=self.point_source)
        fields.update(overrides)
        return ProxyConfig(**fields)


class XvaCfg(_Strict):
    recovery: float = Field(default=0.4, ge=0, le=1)
    hazard_rate: float = Field(default=0.02, ge=0)


class OutputCfg(_Strict):
    directory: str = "out"
    name: str = "run"
    reference: bool = True


class RunConfig(_Strict):
    model: ModelCfg
    portfolio: PortfolioCfg
    simulation: SimulationCfg
    proxy: ProxyCfg = Field(default_factory=ProxyCfg)
    xva: XvaCfg = Field(default_factory=XvaCfg)
    output: OutputCfg = Field(default_factory=OutputCfg)

    @model_validator(mode="after")
    def _currencies(self):
        known = {self.model.base_currency} | {f.currency for f in self.model.foreign}
        used = {t.currency for t in self.portfolio.trades}
        missing = used - known
        if missing:
            raise ValueError(f"portfolio references undefined currencies {sorted(missing)}")
        for t in self.portfolio.trades:
            if isinstance(t, SwaptionCfg):
                rates = self.model.base_rates if t.currency == self.model.base_currency else next(
                    f.rates for f in self.model.foreign if f.currency == t.currency
                )
                if not isinstance(rates, G2Cfg):
                    raise ValueError(f"swaption in {t.currency} needs a G2++ rate model")
        return self


def _curve(cfg) -> mdl.Curve:
    if isinstance(cfg, FlatCurveCfg):
        return mdl.FlatCurve(cfg.rate)
    return mdl.PolynomialCurve(tuple(cfg.coefficients))


def _rates(cfg) -> mdl.RateModel:
    if isinstance(cfg, HullWhiteCfg):
        return mdl.HullWhiteParams(cfg.mean_reversion, cfg.volatility, _curve(cfg.curve))
    return mdl.G2Params(cfg.a, cfg.b, cfg.sigma, cfg.eta, cfg.rho, _curve(cfg.curve))


def build_model(cfg: ModelCfg) -> mdl.HybridParams:
    foreign = tuple(mdl.ForeignCurrency(f.currency, _rates(f.rates), f.fx_spot, f.fx_vol) for f in cfg.foreign)
    corr = None if cfg.correlation is None else np.asarray(cfg.correlation, dtype=float)
    return mdl.HybridParams(cfg.base_currency, _rates(cfg.base_rates), foreign, corr)


def _strike(fixed_rate, offset, probe: ins.SwapSpec, model: mdl.RateModel) -> float:
    if fixed_rate == "par":
        return float(ins.par_rate(probe, model, 0.0, model.initial_factors())) + offset
    return float(fixed_rate) + offset


def build_portfolio(cfg: RunConfig, params: mdl.HybridParams | None = None) -> ins.PortfolioSpec:
    params = params or build_model(cfg.model)
    trades: list = []
    for t in cfg.portfolio.trades:
        model = params.rate_model(t.currency)
        if isinstance(t, SwapCfg):
            probe = ins.SwapSpec.from_schedule(t.notional, 0.0, t.start, t.maturity, t.frequency, t.payer, t.currency)
            k = _strike(t.fixed_rate, t.strike_offset, probe, model)
            trades.append(ins.SwapSpec(t.notional, k, probe.payment_dates, t.start, t.payer, t.currency))
        else:
            probe = ins.SwapSpec.from_schedule(
                t.notional, 0.0, t.expiry, t.expiry + t.tenor, t.frequency, t.payer, t.currency
            )
            k = _strike(t.fixed_rate, t.strike_offset, probe, model)
            swap = ins.SwapSpec(t.notional, k, probe.payment_dates, t.expiry, t.payer, t.currency)
            trades.append(ins.SwaptionSpec(t.expiry, swap))
    gen = cfg.portfolio.generator
    if gen is not None:
        extra = ins.generate_portfolio(
            params,
            gen.seed,
            n_swaps=gen.n_swaps,
            n_swaptions=gen.n_swaptions,
            maturity_range=gen.maturity_range,
            expiry_range=gen.expiry_range,
            tenor_range=gen.tenor_range,
            strike_spread=gen.strike_spread,
            notional_range=gen.notional_range,
            frequency=gen.frequency,
        )
        trades.extend(extra.trades)
    return ins.PortfolioSpec(params.base_currency, tuple(trades))


def exposure_dates(cfg: SimulationCfg) -> np.ndarray:
    d = cfg.dates
    if d.times is not None:
        return np.asarray(d.times, dtype=float)
    return np.arange(1, d.count + 1) * (d.horizon / d.count)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    return RunConfig.model_validate(data)


def dump_config(cfg: RunConfig) -> str:
    """Canonical YAML text of ``cfg``; parsing it back gives an equal config."""
    return yaml.safe_dump(cfg.model_dump(mode="json"), sort_keys=False)


def write_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(dump_config(cfg), encoding="utf-8")
