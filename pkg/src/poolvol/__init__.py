"""poolvol: large-pool credit loss simulation and tranche pricing under a fast
mean-reverting exponential Ornstein-Uhlenbeck stochastic volatility model.

The package simulates pools of firms whose log-asset values share market
Brownian drivers, estimates the conditional (on the market) default CDF by
nested Monte Carlo, and prices calls on the pool loss both by brute force and
through fast conditional-Gaussian approximations.
"""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, UnsupportedParameterError
from .model import (
    CoefficientFunctions,
    GridSpec,
    ModelParams,
    StationaryVariances,
    erg_avg,
    erg_avg_quadrature,
    exp_ou_coefficients,
    mu,
    sigma,
    stationary_variances,
)
from .montecarlo import Estimate, run
from .noise import Role, StreamKey, correlate_market_x, gaussian_increments
from .pathwise import (
    MarketPath,
    conditional_cdf_inner,
    conditional_density_inner,
    finite_pool_loss,
    loss_appY,
    loss_ergY,
    loss_ergYZ,
    simulate_market,
    true_loss,
)
from .pricing import (
    CallCoeffs,
    TrancheSpec,
    call_appY,
    call_ergY,
    call_ergYZ,
    call_firms,
    call_limiting,
    coeffs_appY,
    coeffs_ergY,
    coeffs_ergYZ,
    expected_loss,
    market_exp_sums,
    tranche_call_given_coeffs,
)
from .schemes import asset_path_euler, ou_path_euler, ou_path_exact
from .specialfn import bvn_cdf, norm_cdf, norm_inv_cdf, norm_pdf

__all__ = [
    "__version__",
    "ConfigError",
    "DomainError",
    "UnsupportedParameterError",
    "CoefficientFunctions",
    "GridSpec",
    "ModelParams",
    "StationaryVariances",
    "erg_avg",
    "erg_avg_quadrature",
    "exp_ou_coefficients",
    "mu",
    "sigma",
    "stationary_variances",
    "Estimate",
    "run",
    "Role",
    "StreamKey",
    "correlate_market_x",
    "gaussian_increments",
    "MarketPath",
    "conditional_cdf_inner",
    "conditional_density_inner",
    "finite_pool_loss",
    "loss_appY",
    "loss_ergY",
    "loss_ergYZ",
    "simulate_market",
    "true_loss",
    "CallCoeffs",
    "TrancheSpec",
    "call_appY",
    "call_ergY",
    "call_ergYZ",
    "call_firms",
    "call_limiting",
    "coeffs_appY",
    "coeffs_ergY",
    "coeffs_ergYZ",
    "expected_loss",
    "market_exp_sums",
    "tranche_call_given_coeffs",
    "asset_path_euler",
    "ou_path_euler",
    "ou_path_exact",
    "bvn_cdf",
    "norm_cdf",
    "norm_inv_cdf",
    "norm_pdf",
]
