"""Time discretizations of the fast OU factors and the log-asset process.

The exact-kernel recursion integrates the OU memory kernel exactly over each
step and is the production scheme; the explicit Euler recursion is kept for
comparison. The log-asset scheme evaluates coefficients at the left grid
point, with increments spanning [t_n, t_{n+1}].
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from . import _kernels
from .model import CoefficientFunctions, GridSpec, ModelParams, mu, sigma

__all__ = ["ou_path_euler", "ou_path_exact", "asset_path_euler"]


def _diffusion_scale(p: ModelParams, rho_factor: float) -> float:
    return p.xi * math.sqrt(2.0 / p.epsilon) * rho_factor


def ou_path_euler(
    p: ModelParams,
    grid: GridSpec,
    dw: np.ndarray,
    rho_factor: float,
    init: float,
) -> np.ndarray:
    """Explicit-scheme factor path on t_0..t_N.

    v_n = v_{n-1} (1 - k dt / eps) + xi sqrt(2/eps) rho_factor dW_n. Warns when
    k dt / eps >= 2 (the explicit recursion oscillates with growing amplitude).
    """
    dw = np.ascontiguousarray(dw, dtype=float)
    if dw.shape != (grid.N,):
        raise ValueError("increment path length must equal grid.N")
    k_dt_eff = p.k * grid.dt / p.epsilon
    if k_dt_eff >= 2.0:
        warnings.warn(
            "explicit OU scheme is unstable: k*dt/epsilon >= 2; refine the grid",
            RuntimeWarning,
            stacklevel=2,
        )
    return _kernels.ou_euler_path(dw, k_dt_eff, _diffusion_scale(p, rho_factor), init)


def ou_path_exact(
    p: ModelParams,
    grid: GridSpec,
    dw: np.ndarray,
    rho_factor: float,
    init: float,
) -> np.ndarray:
    """Exact-kernel factor path v_n = e^{-k dt/eps} (v_{n-1} + xi sqrt(2/eps) rho_factor dW_n).

    For idiosyncratic factor paths use rho_factor = sqrt(1 - rho_y^2) and
    init = y0; for the common factor use rho_factor = rho_y and init = 0.
    """
    dw = np.ascontiguousarray(dw, dtype=float)
    if dw.shape != (grid.N,):
        raise ValueError("increment path length must equal grid.N")
    decay = math.exp(-p.k * grid.dt / p.epsilon)
    return _kernels.ou_exact_path(dw, decay, _diffusion_scale(p, rho_factor), init)


def asset_path_euler(
    p: ModelParams,
    grid: GridSpec,
    y: np.ndarray,
    z: np.ndarray,
    dwx_market: np.ndarray,
    dwx_idio: np.ndarray,
    coeffs: CoefficientFunctions | None = None,
) -> np.ndarray:
    """Log-asset path from factor paths and the two W^x drivers.

    x_n = x_{n-1} + mu(w) dt + sigma(w) (rho_x dWx + sqrt(1-rho_x^2) dWx_idio)
    with w = y_{n-1} + z_{n-1}; x_0 = 0. An alternative coefficient pair may be
    supplied for non-exponential models.
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    dwx_market = np.asarray(dwx_market, dtype=float)
    dwx_idio = np.asarray(dwx_idio, dtype=float)
    if not (y.shape == z.shape == (grid.N + 1,)):
        raise ValueError("factor paths must have length grid.N + 1")
    if not (dwx_market.shape == dwx_idio.shape == (grid.N,)):
        raise ValueError("increment paths must have length grid.N")
    w = y[:-1] + z[:-1]
    if coeffs is None:
        sig = sigma(w, p)
        drift = mu(w, p)
    else:
        sig = coeffs.sigma(w)
        drift = coeffs.mu(w)
    steps = drift * grid.dt + sig * (
        p.rho_x * dwx_market + math.sqrt(1.0 - p.rho_x * p.rho_x) * dwx_idio
    )
    x = np.empty(grid.N + 1)
    x[0] = 0.0
    np.cumsum(steps, out=x[1:])
    return x
