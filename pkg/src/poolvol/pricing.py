"""Call options on the limiting pool loss: brute-force estimators, the
semi-analytic pricers built on the bivariate normal reduction, and the
expected-loss shortcut for the linear payoff.

The semi-analytic pricers condition on the W^y market driver. Given that
conditioning, the loss is (approximately) Phi(c0 - c1 W) with a standard
normal W, and the tranche payoff reduces to a bivariate normal probability;
c0 varies per W^y sample while c1 depends only on the model parameters. They
require rho_x > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, UnsupportedParameterError
from .model import GridSpec, ModelParams, stationary_variances
from .montecarlo import Estimate
from .specialfn import bvn_cdf, norm_cdf, norm_inv_cdf

__all__ = [
    "CallCoeffs",
    "TrancheSpec",
    "market_exp_sums",
    "tranche_call_given_coeffs",
    "coeffs_appY",
    "coeffs_ergY",
    "coeffs_ergYZ",
    "call_appY",
    "call_ergY",
    "call_ergYZ",
    "call_firms",
    "call_limiting",
    "expected_loss",
]


@dataclass(frozen=True)
class CallCoeffs:
    """Conditional-law coefficients: loss ~ Phi(c0 - c1 W), W standard normal.

    c0 may be an array (one entry per conditioning sample); c1 is a positive
    scalar.
    """

    c0: float | np.ndarray
    c1: float

    def __post_init__(self):
        if not self.c1 > 0:
            raise DomainError("c1 must be strictly positive")


@dataclass(frozen=True)
class TrancheSpec:
    """Call payoff (loss - attachment)^+ at the horizon, with default barrier."""

    attachment: float
    barrier: float
    horizon: float

    def __post_init__(self):
        if not 0.0 <= self.attachment <= 1.0:
            raise DomainError("attachment must lie in [0, 1]")
        if not self.horizon > 0:
            raise DomainError("horizon must be positive")


def tranche_call_given_coeffs(c: CallCoeffs, a: float):
    """E[(Phi(c0 - c1 W) - a)^+] for standard normal W.

    Evaluates BvN(c0/sqrt(1+c1^2), w0; c1/sqrt(1+c1^2)) - a Phi(w0) with
    w0 = (c0 - Phi^{-1}(a))/c1. The attachment endpoints are special-cased:
    a=0 collapses to Phi(c0/sqrt(1+c1^2)), a=1 to zero.
    """
    if not 0.0 <= a <= 1.0:
        raise DomainError("attachment must lie in [0, 1]")
    c0 = np.asarray(c.c0, dtype=float)
    scale = math.sqrt(1.0 + c.c1 * c.c1)
    if a == 0.0:
        out = norm_cdf(c0 / scale)
    elif a == 1.0:
        out = np.zeros_like(c0)
    else:
        w0 = (c0 - norm_inv_cdf(a)) / c.c1
        out = bvn_cdf(c0 / scale, w0, c.c1 / scale) - a * norm_cdf(w0)
    return float(out) if np.ndim(out) == 0 else out


def _require_positive_rho_x(p: ModelParams) -> None:
    if not p.rho_x > 0:
        raise UnsupportedParameterError(
            "semi-analytic call pricing is implemented for rho_x > 0 only"
        )


def _exp_sums(grid: GridSpec, z: np.ndarray, dwy: np.ndarray):
    """I = dt * sum e^{2 z_n}, M = sum e^{z_n} dWy_n over left grid points."""
    if z.shape != (grid.N + 1,) or dwy.shape != (grid.N,):
        raise ValueError("path lengths inconsistent with grid")
    ez = np.exp(z[:-1])
    return grid.dt * np.sum(ez * ez), np.sum(ez * dwy)


def coeffs_appY(
    p: ModelParams, grid: GridSpec, z: np.ndarray, dwy: np.ndarray, B: float
) -> CallCoeffs:
    """Variance-corrected conditional coefficients from one W^y path."""
    _require_positive_rho_x(p)
    q = stationary_variances(p).var_y
    big_i, big_m = _exp_sums(grid, z, dwy)
    c0 = (
        B / p.m * math.exp(-q)
        + 0.5 * p.m * math.exp(q) * big_i
        - p.rho_x * p.rho_xy * math.exp(-q / 2.0) * big_m
    ) / math.sqrt((1.0 - p.rho_x * p.rho_x * math.exp(-q)) * big_i)
    c1 = p.rho_x * math.sqrt(1.0 - p.rho_xy * p.rho_xy) / math.sqrt(
        math.exp(q) - p.rho_x * p.rho_x
    )
    return CallCoeffs(c0=float(c0), c1=c1)


def coeffs_ergY(
    p: ModelParams, grid: GridSpec, z: np.ndarray, dwy: np.ndarray, B: float, lam: int
) -> CallCoeffs:
    """Ergodic-average conditional coefficients (lam=1 linear, lam=0 quadratic)."""
    if lam not in (0, 1):
        raise ValueError("lam must be 0 or 1")
    _require_positive_rho_x(p)
    q = stationary_variances(p).var_y
    big_i, big_m = _exp_sums(grid, z, dwy)
    c2 = (
        B / p.m * math.exp(-q)
        + 0.5 * p.m * math.exp(q) * big_i
        - p.rho_x * p.rho_xy * math.exp(-lam * q / 2.0) * big_m
    ) / math.sqrt((1.0 - p.rho_x * p.rho_x) * big_i)
    c3 = (
        p.rho_x
        * math.sqrt(1.0 - p.rho_xy * p.rho_xy)
        / math.sqrt(1.0 - p.rho_x * p.rho_x)
        * math.exp(-lam * q / 2.0)
    )
    return CallCoeffs(c0=float(c2), c1=c3)


def coeffs_ergYZ(p: ModelParams, T: float, B: float, lam: int) -> CallCoeffs:
    """Fully averaged coefficients; deterministic (no market input)."""
    if lam not in (0, 1):
        raise ValueError("lam must be 0 or 1")
    _require_positive_rho_x(p)
    if T <= 0:
        raise DomainError("horizon must be positive")
    r = stationary_variances(p).var_yz
    c0 = (B / p.m * math.exp(-r) + 0.5 * p.m * math.exp(r) * T) / math.sqrt(
        (1.0 - p.rho_x * p.rho_x) * T
    )
    c1 = p.rho_x / math.sqrt(1.0 - p.rho_x * p.rho_x) * math.exp(-lam * r / 2.0)
    return CallCoeffs(c0=c0, c1=c1)


def market_exp_sums(p: ModelParams, grid: GridSpec, n_outer: int, seed: int):
    """Per-sample market sums (I_j, M_j) for n_outer fresh W^y paths.

    I_j = dt * sum e^{2 z_n}, M_j = sum e^{z_n} dWy_n. Stream j is
    (seed, market_y, j). The conditional pricers accept these precomputed so
    several methods can share one pass over the paths.
    """
    decay = math.exp(-p.k * grid.dt / p.epsilon)
    amp_z = p.xi * math.sqrt(2.0 / p.epsilon) * p.rho_y
    return _kernels.market_exp_sums(n_outer, grid.N, grid.dt, decay, amp_z, seed)


def _check_spec(grid: GridSpec, spec: TrancheSpec) -> None:
    if not math.isclose(spec.horizon, grid.T, rel_tol=1e-12):
        raise ValueError("TrancheSpec.horizon must match grid.T")


def call_appY(
    p: ModelParams,
    grid: GridSpec,
    spec: TrancheSpec,
    n_outer: int,
    seed: int,
    deterministic: bool = True,
    market_sums: tuple[np.ndarray, np.ndarray] | None = None,
) -> Estimate:
    """Tranche call price under the variance-corrected conditional law,
    Monte Carlo over fresh W^y paths (streams (seed, market_y, j))."""
    if n_outer < 2:
        raise ValueError("n_outer must be at least 2")
    _require_positive_rho_x(p)
    _check_spec(grid, spec)
    q = stationary_variances(p).var_y
    big_i, big_m = market_sums or market_exp_sums(p, grid, n_outer, seed)
    c0 = (
        spec.barrier / p.m * math.exp(-q)
        + 0.5 * p.m * math.exp(q) * big_i
        - p.rho_x * p.rho_xy * math.exp(-q / 2.0) * big_m
    ) / np.sqrt((1.0 - p.rho_x * p.rho_x * math.exp(-q)) * big_i)
    c1 = p.rho_x * math.sqrt(1.0 - p.rho_xy * p.rho_xy) / math.sqrt(
        math.exp(q) - p.rho_x * p.rho_x
    )
    values = tranche_call_given_coeffs(CallCoeffs(c0=c0, c1=c1), spec.attachment)
    return Estimate.from_values(values, deterministic)


def call_ergY(
    p: ModelParams,
    grid: GridSpec,
    spec: TrancheSpec,
    lam: int,
    n_outer: int,
    seed: int,
    deterministic: bool = True,
    market_sums: tuple[np.ndarray, np.ndarray] | None = None,
) -> Estimate:
    """Tranche call price under the ergodic-average conditional law."""
    if lam not in (0, 1):
        raise ValueError("lam must be 0 or 1")
    if n_outer < 2:
        raise ValueError("n_outer must be at least 2")
    _require_positive_rho_x(p)
    _check_spec(grid, spec)
    q = stationary_variances(p).var_y
    big_i, big_m = market_sums or market_exp_sums(p, grid, n_outer, seed)
    c2 = (
        spec.barrier / p.m * math.exp(-q)
        + 0.5 * p.m * math.exp(q) * big_i
        - p.rho_x * p.rho_xy * math.exp(-lam * q / 2.0) * big_m
    ) / np.sqrt((1.0 - p.rho_x * p.rho_x) * big_i)
    c3 = (
        p.rho_x
        * math.sqrt(1.0 - p.rho_xy * p.rho_xy)
        / math.sqrt(1.0 - p.rho_x * p.rho_x)
        * math.exp(-lam * q / 2.0)
    )
    values = tranche_call_given_coeffs(CallCoeffs(c0=c2, c1=c3), spec.attachment)
    return Estimate.from_values(values, deterministic)


def call_ergYZ(p: ModelParams, spec: TrancheSpec, lam: int) -> float:
    """Fully averaged tranche call price; deterministic, no sampling."""
    c = coeffs_ergYZ(p, spec.horizon, spec.barrier, lam)
    return float(tranche_call_given_coeffs(c, spec.attachment))


def call_firms(
    p: ModelParams,
    grid: GridSpec,
    spec: TrancheSpec,
    n_firms: int,
    n_outer: int,
    seed: int,
    deterministic: bool = True,
) -> Estimate:
    """Brute-force tranche call on the finite-pool loss.

    Every outer sample simulates fresh market noise and n_firms firms with
    full per-step idiosyncratic trajectories; the payoff is
    (pool default fraction - attachment)^+.
    """
    if n_firms < 1:
        raise ValueError("n_firms must be at least 1")
    if n_outer < 2:
        raise ValueError("n_outer must be at least 2")
    _check_spec(grid, spec)
    decay = math.exp(-p.k * grid.dt / p.epsilon)
    amp_z = p.xi * math.sqrt(2.0 / p.epsilon) * p.rho_y
    amp_y = p.xi * math.sqrt(2.0 / p.epsilon) * math.sqrt(1.0 - p.rho_y * p.rho_y)
    losses = _kernels.firm_pool_losses(
        n_outer,
        n_firms,
        grid.N,
        grid.dt,
        decay,
        amp_z,
        amp_y,
        p.y0,
        p.m,
        spec.barrier,
        p.rho_x,
        p.rho_xy,
        seed,
    )
    values = np.maximum(losses - spec.attachment, 0.0)
    return Estimate.from_values(values, deterministic)


def call_limiting(
    p: ModelParams,
    grid: GridSpec,
    spec: TrancheSpec,
    n_outer: int,
    n_inner: int,
    seed: int,
    deterministic: bool = True,
) -> Estimate:
    """Nested tranche call: outer market samples, inner estimate of the
    limiting loss via idiosyncratic resampling.

    For a > 0 the payoff is nonlinear and the inner noise induces a positive
    bias of order 1/n_inner; this expensive estimator is a reference, not a
    production pricer.
    """
    if n_outer < 2:
        raise ValueError("n_outer must be at least 2")
    if n_inner < 2:
        raise ValueError("n_inner must be at least 2")
    _check_rho = p.rho_x * p.rho_x
    if _check_rho >= 1.0:
        raise DomainError("|rho_x| must be strictly below 1")
    _check_spec(grid, spec)
    decay = math.exp(-p.k * grid.dt / p.epsilon)
    amp_z = p.xi * math.sqrt(2.0 / p.epsilon) * p.rho_y
    amp_y = p.xi * math.sqrt(2.0 / p.epsilon) * math.sqrt(1.0 - p.rho_y * p.rho_y)
    losses = _kernels.limiting_losses(
        n_outer,
        n_inner,
        grid.N,
        grid.dt,
        decay,
        amp_z,
        amp_y,
        p.y0,
        p.m,
        spec.barrier,
        p.rho_x,
        p.rho_xy,
        seed,
    )
    values = np.maximum(losses - spec.attachment, 0.0)
    return Estimate.from_values(values, deterministic)


def expected_loss(
    p: ModelParams,
    grid: GridSpec,
    B: float,
    n_samples: int,
    seed: int,
    deterministic: bool = True,
) -> Estimate:
    """Expected limiting loss (the a=0 call) by joint sampling of the market
    W^y driver and one idiosyncratic factor path per sample.

    Sample j pairs streams (market_y, j) and (inner_y1, j); the W^x driver is
    integrated out analytically, leaving a normal CDF of path sums.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    decay = math.exp(-p.k * grid.dt / p.epsilon)
    amp_z = p.xi * math.sqrt(2.0 / p.epsilon) * p.rho_y
    amp_y = p.xi * math.sqrt(2.0 / p.epsilon) * math.sqrt(1.0 - p.rho_y * p.rho_y)
    values = _kernels.expected_loss_values(
        n_samples,
        grid.N,
        grid.dt,
        decay,
        amp_z,
        amp_y,
        p.y0,
        p.m,
        B,
        p.rho_x,
        p.rho_xy,
        seed,
    )
    return Estimate.from_values(values, deterministic)
