"""Exposure simulation with stochastic-collocation and Smolyak sparse-grid proxies."""

from .collocation import (
    LagrangeInterpolator,
    correlated_grid,
    empirical_inverse_points,
    lagrange_proxy_1d,
    normal_collocation_points,
    quantile_collocation_points,
    standard_normal_points,
)
from .exposure import (
    ExposureProfile,
    ProxyConfig,
    build_proxy,
    domain_box_from_paths,
    error_metrics,
    evaluate_exposures,
    xva_aggregate,
)
from .instruments import (
    PortfolioSpec,
    SwapSpec,
    SwaptionSpec,
    decompose_by_currency,
    portfolio_value,
    swap_value_g2,
    swap_value_hw,
    swaption_value_g2,
)
from .models import (
    FlatCurve,
    ForeignCurrency,
    G2Params,
    HullWhiteParams,
    HybridParams,
    ModelState,
    PolynomialCurve,
    simulate_fx_system,
    simulate_g2,
    simulate_hull_white,
)
from .sparse_grid import (
    DomainBox,
    IllConditionedError,
    SmolyakInterpolator,
    build_sparse_grid,
    count_sparse_grid_nodes,
    fit_interpolant,
)

__version__ = "0.1.0"

__all__ = [
    "LagrangeInterpolator",
    "correlated_grid",
    "empirical_inverse_points",
    "lagrange_proxy_1d",
    "normal_collocation_points",
    "quantile_collocation_points",
    "standard_normal_points",
    "ExposureProfile",
    "ProxyConfig",
    "build_proxy",
    "domain_box_from_paths",
    "error_metrics",
    "evaluate_exposures",
    "xva_aggregate",
    "PortfolioSpec",
    "SwapSpec",
    "SwaptionSpec",
    "decompose_by_currency",
    "portfolio_value",
    "swap_value_g2",
    "swap_value_hw",
    "swaption_value_g2",
    "FlatCurve",
    "ForeignCurrency",
    "G2Params",
    "HullWhiteParams",
    "HybridParams",
    "ModelState",
    "PolynomialCurve",
    "simulate_fx_system",
    "simulate_g2",
    "simulate_hull_white",
    "DomainBox",
    "IllConditionedError",
    "SmolyakInterpolator",
    "build_sparse_grid",
    "count_sparse_grid_nodes",
    "fit_interpolant",
]
