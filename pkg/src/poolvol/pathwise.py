"""Pathwise conditional loss: the nested estimator of the conditional default
CDF and its five closed-form approximations, all for a fixed market path.

Conventions shared by every formula here: sums run over left grid points
n = 0..N-1, each paired with the increment over [t_n, t_{n+1}]. The plain
entry points use the exponential-OU closed forms; ``method="quadrature"``
recomputes the ergodic averages numerically from the generic coefficient
functions as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .model import (
    CoefficientFunctions,
    GridSpec,
    ModelParams,
    erg_avg_quadrature,
    exp_ou_coefficients,
    stationary_variances,
)
from .montecarlo import Estimate
from .noise import Role, StreamKey, correlate_market_x, gaussian_increments
from .schemes import ou_path_exact
from .specialfn import norm_cdf, norm_pdf

__all__ = [
    "MarketPath",
    "simulate_market",
    "conditional_cdf_inner",
    "conditional_density_inner",
    "true_loss",
    "finite_pool_loss",
    "loss_appY",
    "loss_ergY",
    "loss_ergYZ",
]


@dataclass(frozen=True)
class MarketPath:
    """One realization of the common factors on a grid.

    z holds the common volatility factor on t_0..t_N; dwx and dwy the market
    Brownian increments. z must be the exact-kernel path driven by dwy.
    """

    z: np.ndarray
    dwx: np.ndarray
    dwy: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        if self.z.shape != (self.grid.N + 1,):
            raise ValueError("z must have length grid.N + 1")
        if self.dwx.shape != (self.grid.N,) or self.dwy.shape != (self.grid.N,):
            raise ValueError("increment paths must have length grid.N")

    @property
    def wx_terminal(self) -> float:
        return float(self.dwx.sum())


def simulate_market(p: ModelParams, grid: GridSpec, seed: int, path_id: int = 0) -> MarketPath:
    """Draw one market path: W^y and W^x increments plus the common factor."""
    dwy = gaussian_increments(StreamKey(seed, Role.MARKET_Y, path_id), grid)
    dwx_orth = gaussian_increments(StreamKey(seed, Role.MARKET_X_ORTH, path_id), grid)
    dwx = correlate_market_x(dwy, dwx_orth, p.rho_xy)
    z = ou_path_exact(p, grid, dwy, p.rho_y, 0.0)
    return MarketPath(z=z, dwx=dwx, dwy=dwy, grid=grid)


def _check_rho_x(p: ModelParams) -> None:
    if p.rho_x * p.rho_x >= 1.0:
        raise DomainError("|rho_x| must be strictly below 1")


def _inner_argument(p, mkt, y1, B, coeffs):
    w = y1[:-1] + mkt.z[:-1]
    dt = mkt.grid.dt
    if coeffs is None:
        coeffs = exp_ou_coefficients(p)
    sig = coeffs.sigma(w)
    drift = coeffs.mu(w)
    s2 = dt * np.sum(sig * sig)
    num = B - dt * np.sum(drift) - p.rho_x * np.sum(sig * mkt.dwx)
    den = math.sqrt((1.0 - p.rho_x * p.rho_x) * s2)
    return num, den


def conditional_cdf_inner(
    p: ModelParams,
    mkt: MarketPath,
    y1: np.ndarray,
    B: float,
    coeffs: CoefficientFunctions | None = None,
) -> float:
    """Default probability of one firm conditional on the market path and its
    own volatility factor path y1."""
    _check_rho_x(p)
    num, den = _inner_argument(p, mkt, y1, B, coeffs)
    return float(norm_cdf(num / den))


def conditional_density_inner(
    p: ModelParams,
    mkt: MarketPath,
    y1: np.ndarray,
    B: float,
    coeffs: CoefficientFunctions | None = None,
) -> float:
    """Exact derivative of conditional_cdf_inner with respect to the barrier."""
    _check_rho_x(p)
    num, den = _inner_argument(p, mkt, y1, B, coeffs)
    return float(norm_pdf(num / den) / den)


def true_loss(
    p: ModelParams,
    mkt: MarketPath,
    B: float,
    n_inner: int,
    seed: int,
    deterministic: bool = True,
) -> Estimate:
    """Nested estimate of the conditional default CDF on a fixed market path.

    Averages conditional_cdf_inner over n_inner fresh idiosyncratic factor
    paths (streams (seed, inner_y1, j)). The Estimate's rel_se is the relative
    statistical error of the inner average.
    """
    if n_inner < 2:
        raise ValueError("n_inner must be at least 2")
    _check_rho_x(p)
    grid = mkt.grid
    decay = math.exp(-p.k * grid.dt / p.epsilon)
    amp_y = p.xi * math.sqrt(2.0 / p.epsilon) * math.sqrt(1.0 - p.rho_y * p.rho_y)
    ez_left = np.exp(mkt.z[:-1])
    values = _kernels.inner_loss_values(
        ez_left, mkt.dwx, grid.dt, decay, amp_y, p.y0, p.m, B, p.rho_x, n_inner, seed, 0
    )
    return Estimate.from_values(values, deterministic)


def finite_pool_loss(
    p: ModelParams,
    mkt: MarketPath,
    B: float,
    n_firms: int,
    seed: int,
) -> float:
    """Default fraction of a simulated pool of n_firms firms on a fixed market
    path, each firm driven by its own (firm_x, firm_y) streams."""
    if n_firms < 1:
        raise ValueError("n_firms must be at least 1")
    if B == math.inf:
        return 1.0
    if B == -math.inf:
        return 0.0
    grid = mkt.grid
    decay = math.exp(-p.k * grid.dt / p.epsilon)
    amp_y = p.xi * math.sqrt(2.0 / p.epsilon) * math.sqrt(1.0 - p.rho_y * p.rho_y)
    ez_left = np.exp(mkt.z[:-1])
    x_terminal = _kernels.firm_terminal_values(
        ez_left, mkt.dwx, grid.dt, decay, amp_y, p.y0, p.m, p.rho_x, n_firms, seed
    )
    return float(np.count_nonzero(x_terminal <= B)) / n_firms


def _z_exp_sums(mkt: MarketPath):
    """dt * sum e^{2 z_n} and the forward Ito sums of e^{z_n} against dWx/dWy."""
    ez = np.exp(mkt.z[:-1])
    dt = mkt.grid.dt
    s2 = dt * np.sum(ez * ez)
    sx = np.sum(ez * mkt.dwx)
    return s2, sx


def loss_appY(
    p: ModelParams,
    mkt: MarketPath,
    B: float,
    method: str = "closed_form",
    coeffs: CoefficientFunctions | None = None,
) -> float:
    """Variance-corrected conditional-CLT approximation of the loss.

    The fluctuating volatility integral is replaced by its ergodic mean plus a
    Gaussian correction, which shows up as the -rho_x^2 <sigma>^2 term in the
    denominator.
    """
    _check_rho_x(p)
    if method == "closed_form":
        q = stationary_variances(p).var_y
        s2, sx = _z_exp_sums(mkt)
        arg = (B / p.m * math.exp(-q) + 0.5 * p.m * math.exp(q) * s2) / math.sqrt(
            (1.0 - p.rho_x * p.rho_x * math.exp(-q)) * s2
        ) - p.rho_x / math.sqrt(math.exp(q) - p.rho_x * p.rho_x) * sx / math.sqrt(s2)
        return float(norm_cdf(arg))
    if method != "quadrature":
        raise ValueError(f"unknown method: {method!r}")
    c = coeffs or exp_ou_coefficients(p)
    var_y = stationary_variances(p).var_y
    z_left = mkt.z[:-1]
    dt = mkt.grid.dt
    avg_mu = erg_avg_quadrature(c.mu, z_left, var_y)
    avg_sig = erg_avg_quadrature(c.sigma, z_left, var_y)
    avg_sig2 = erg_avg_quadrature(lambda y: c.sigma(y) ** 2, z_left, var_y)
    num = B - dt * np.sum(avg_mu) - p.rho_x * np.sum(avg_sig * mkt.dwx)
    den = math.sqrt(dt * np.sum(avg_sig2) - p.rho_x * p.rho_x * dt * np.sum(avg_sig * avg_sig))
    return float(norm_cdf(num / den))


def loss_ergY(
    p: ModelParams,
    mkt: MarketPath,
    B: float,
    lam: int,
    method: str = "closed_form",
    coeffs: CoefficientFunctions | None = None,
) -> float:
    """Conditional loss with the volatility averaged over the stationary law of
    the idiosyncratic factor only.

    lam=1 averages sigma linearly (matches the first conditional moment),
    lam=0 averages sigma^2 (matches the first two unconditional moments).
    """
    if lam not in (0, 1):
        raise ValueError("lam must be 0 or 1")
    _check_rho_x(p)
    if method == "closed_form":
        q = stationary_variances(p).var_y
        s2, sx = _z_exp_sums(mkt)
        arg = (B / p.m * math.exp(-q) + 0.5 * p.m * math.exp(q) * s2) / math.sqrt(
            (1.0 - p.rho_x * p.rho_x) * s2
        ) - p.rho_x / math.sqrt(1.0 - p.rho_x * p.rho_x) * math.exp(-lam * q / 2.0) * sx / math.sqrt(s2)
        return float(norm_cdf(arg))
    if method != "quadrature":
        raise ValueError(f"unknown method: {method!r}")
    c = coeffs or exp_ou_coefficients(p)
    var_y = stationary_variances(p).var_y
    z_left = mkt.z[:-1]
    dt = mkt.grid.dt
    avg_mu = erg_avg_quadrature(c.mu, z_left, var_y)
    avg_sig2 = erg_avg_quadrature(lambda y: c.sigma(y) ** 2, z_left, var_y)
    if lam == 1:
        weight = erg_avg_quadrature(c.sigma, z_left, var_y)
    else:
        weight = np.sqrt(avg_sig2)
    num = B - dt * np.sum(avg_mu) - p.rho_x * np.sum(weight * mkt.dwx)
    den = math.sqrt((1.0 - p.rho_x * p.rho_x) * dt * np.sum(avg_sig2))
    return float(norm_cdf(num / den))


def loss_ergYZ(
    p: ModelParams,
    T: float,
    wx_T: float,
    B: float,
    lam: int,
    method: str = "closed_form",
    coeffs: CoefficientFunctions | None = None,
) -> float:
    """Conditional loss with both factors averaged over their joint stationary
    law; depends on the market only through the terminal value of W^x."""
    if lam not in (0, 1):
        raise ValueError("lam must be 0 or 1")
    if T <= 0:
        raise DomainError("horizon T must be positive")
    _check_rho_x(p)
    if method == "closed_form":
        r = stationary_variances(p).var_yz
        arg = (B / p.m * math.exp(-r) + 0.5 * p.m * math.exp(r) * T) / math.sqrt(
            (1.0 - p.rho_x * p.rho_x) * T
        ) - p.rho_x / math.sqrt(1.0 - p.rho_x * p.rho_x) * math.exp(-lam * r / 2.0) * wx_T / math.sqrt(T)
        return float(norm_cdf(arg))
    if method != "quadrature":
        raise ValueError(f"unknown method: {method!r}")
    c = coeffs or exp_ou_coefficients(p)
    var_yz = stationary_variances(p).var_yz
    avg_mu = erg_avg_quadrature(c.mu, 0.0, var_yz)
    avg_sig2 = erg_avg_quadrature(lambda y: c.sigma(y) ** 2, 0.0, var_yz)
    if lam == 1:
        weight = erg_avg_quadrature(c.sigma, 0.0, var_yz)
    else:
        weight = math.sqrt(avg_sig2)
    num = B - avg_mu * T - p.rho_x * weight * wx_T
    den = math.sqrt((1.0 - p.rho_x * p.rho_x) * avg_sig2 * T)
    return float(norm_cdf(num / den))
