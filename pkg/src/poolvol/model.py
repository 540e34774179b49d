"""Model parameters, exponential-OU coefficient functions, and closed-form
averages over the stationary law of the fast volatility factor.

The log-asset diffusion coefficient is sigma(y) = m * e^y with drift
mu(y) = -sigma(y)^2 / 2 (driftless asset; the factor mean is fixed at zero).
A generic coefficient-pair interface with quadrature-based averaging is kept
alongside the closed forms for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import DomainError

__all__ = [
    "ModelParams",
    "GridSpec",
    "StationaryVariances",
    "CoefficientFunctions",
    "exp_ou_coefficients",
    "sigma",
    "mu",
    "erg_avg",
    "erg_avg_quadrature",
    "stationary_variances",
]

_PARAM_FIELDS = ("y0", "m", "k", "xi", "rho_x", "rho_y", "rho_xy", "epsilon")


@dataclass(frozen=True)
class ModelParams:
    """Scalar model constants.

    y0       initial value of the idiosyncratic volatility factor
    m        volatility scale, sigma(0) = m
    k        mean-reversion rate of the fast factor
    xi       vol-of-vol
    rho_x    asset correlation with the market W^x driver
    rho_y    factor correlation with the market W^y driver
    rho_xy   correlation between the two market drivers
    epsilon  mean-reversion time scale (dimensionless fraction of the horizon)
    """

    y0: float
    m: float
    k: float
    xi: float
    rho_x: float
    rho_y: float
    rho_xy: float
    epsilon: float

    def __post_init__(self):
        if not self.m > 0:
            raise DomainError("m must be positive")
        if not self.k > 0:
            raise DomainError("k must be positive")
        if not self.xi >= 0:
            raise DomainError("xi must be nonnegative")
        for name in ("rho_x", "rho_y", "rho_xy"):
            if not abs(getattr(self, name)) < 1:
                raise DomainError(f"{name} must lie strictly inside (-1, 1)")
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")

    def to_dict(self) -> dict:
        return {name: float(getattr(self, name)) for name in _PARAM_FIELDS}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        unknown = set(data) - set(_PARAM_FIELDS)
        if unknown:
            raise DomainError(f"unknown model fields: {sorted(unknown)}")
        missing = set(_PARAM_FIELDS) - set(data)
        if missing:
            raise DomainError(f"missing model fields: {sorted(missing)}")
        return cls(**{name: float(data[name]) for name in _PARAM_FIELDS})


@dataclass(frozen=True)
class GridSpec:
    """Uniform time grid t_n = n * dt on [0, T] with N steps."""

    T: float
    N: int

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError("horizon T must be positive")
        if self.N < 1:
            raise DomainError("step count N must be at least 1")

    @property
    def dt(self) -> float:
        return self.T / self.N

    @classmethod
    def from_epsilon(cls, T: float, epsilon: float, steps_per_epsilon: int = 40) -> "GridSpec":
        """Step rule N = ceil(steps_per_epsilon * T / epsilon).

        The default resolves the fast factor with 40 steps per epsilon-fraction
        of the horizon, enough for the time-discretization error to sit below
        typical statistical error.
        """
        if epsilon <= 0:
            raise DomainError("epsilon must be positive")
        return cls(T=T, N=max(1, math.ceil(steps_per_epsilon * T / epsilon)))


@dataclass(frozen=True)
class StationaryVariances:
    """Stationary variances of the fast factors: Y alone and Y + Z."""

    var_y: float
    var_yz: float


def stationary_variances(p: ModelParams) -> StationaryVariances:
    """var_y = xi^2 (1 - rho_y^2) / k, var_yz = xi^2 / k."""
    var_yz = p.xi * p.xi / p.k
    return StationaryVariances(var_y=var_yz * (1.0 - p.rho_y * p.rho_y), var_yz=var_yz)


def sigma(y, p: ModelParams):
    """Diffusion coefficient m * e^y."""
    return p.m * np.exp(y)


def mu(y, p: ModelParams):
    """Drift coefficient -sigma(y)^2 / 2."""
    s = sigma(y, p)
    return -0.5 * s * s


@dataclass(frozen=True)
class CoefficientFunctions:
    """A generic (sigma, mu) coefficient pair; both must accept numpy arrays."""

    sigma: Callable
    mu: Callable


def exp_ou_coefficients(p: ModelParams) -> CoefficientFunctions:
    return CoefficientFunctions(sigma=lambda y: sigma(y, p), mu=lambda y: mu(y, p))


FKind = Literal["sigma", "sigma_sq", "mu"]


def erg_avg(fkind: FKind, z, variance: float, p: ModelParams):
    """Average of the shifted coefficient over a centered normal with the given
    variance, in closed form via E[e^{aY}] = e^{a^2 variance / 2}:

        <sigma(. + z)>    = m e^z e^{variance/2}
        <sigma^2(. + z)>  = m^2 e^{2z} e^{2 variance}
        <mu(. + z)>       = -1/2 m^2 e^{2z} e^{2 variance}
    """
    if variance < 0:
        raise DomainError("variance must be nonnegative")
    z = np.asarray(z, dtype=float)
    if fkind == "sigma":
        out = p.m * np.exp(z) * math.exp(0.5 * variance)
    elif fkind == "sigma_sq":
        out = p.m * p.m * np.exp(2.0 * z) * math.exp(2.0 * variance)
    elif fkind == "mu":
        out = -0.5 * p.m * p.m * np.exp(2.0 * z) * math.exp(2.0 * variance)
    else:
        raise ValueError(f"unknown coefficient kind: {fkind!r}")
    return float(out) if out.ndim == 0 else out


_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(64)


def erg_avg_quadrature(f: Callable, z, variance: float):
    """Gauss-Hermite average of f(. + z) over a centered normal law.

    64 nodes; used as the generic route for arbitrary coefficient pairs and as
    an independent check of the closed forms.
    """
    if variance < 0:
        raise DomainError("variance must be nonnegative")
    z = np.asarray(z, dtype=float)
    scale = math.sqrt(2.0 * variance)
    y = scale * _GH_NODES + z[..., None]
    out = (f(y) * _GH_WEIGHTS).sum(axis=-1) / math.sqrt(math.pi)
    return float(out) if out.ndim == 0 else out
