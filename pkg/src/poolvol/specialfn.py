"""Scalar special functions: normal PDF/CDF, its inverse, and the bivariate
normal CDF.

All functions are vectorized over numpy arrays and safe for concurrent use.
``Probability`` values are plain floats in [0, 1].
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np
from scipy import special as _sp

from . import _kernels
from .errors import DomainError

__all__ = ["norm_pdf", "norm_cdf", "norm_inv_cdf", "bvn_cdf"]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def norm_pdf(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) * _INV_SQRT_2PI
    return float(out) if out.ndim == 0 else out


def norm_cdf(x):
    """Standard normal CDF via the complementary error function.

    Accurate to full double precision including the far tails; accepts +-inf.
    """
    x = np.asarray(x, dtype=float)
    out = 0.5 * _sp.erfc(-x * _INV_SQRT2)
    return float(out) if out.ndim == 0 else out


@nb.vectorize([nb.float64(nb.float64)], nopython=True, cache=True)
def _ndtri_ufunc(p):
    return _kernels.ppnd16(p)


def norm_inv_cdf(p):
    """Inverse standard normal CDF.

    Returns -inf at p=0 and +inf at p=1; raises DomainError outside [0, 1].
    The same rational approximation drives all random-stream generation.
    """
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)):
        raise DomainError("norm_inv_cdf requires 0 <= p <= 1")
    out = _ndtri_ufunc(p)
    return float(out) if np.ndim(out) == 0 else out


# Gauss-Legendre nodes/weights (6-, 12-, 20-point rules, stored half-sided),
# padded to a common width for the jitted selector.
_GL_N = np.array([3, 6, 10], dtype=np.int64)
_GL_X = np.zeros((3, 10))
_GL_W = np.zeros((3, 10))
_GL_X[0, :3] = (0.9324695142031522, 0.6612093864662647, 0.2386191860831970)
_GL_W[0, :3] = (0.1713244923791705, 0.3607615730481384, 0.4679139345726904)
_GL_X[1, :6] = (
    0.9815606342467191,
    0.9041172563704750,
    0.7699026741943050,
    0.5873179542866171,
    0.3678314989981802,
    0.1252334085114692,
)
_GL_W[1, :6] = (
    0.04717533638651177,
    0.1069393259953183,
    0.1600783285433464,
    0.2031674267230659,
    0.2334925365383547,
    0.2491470458134029,
)
_GL_X[2, :10] = (
    0.9931285991850949,
    0.9639719272779138,
    0.9122344282513259,
    0.8391169718222188,
    0.7463319064601508,
    0.6360536807265150,
    0.5108670019508271,
    0.3737060887154196,
    0.2277858511416451,
    0.07652652113349733,
)
_GL_W[2, :10] = (
    0.01761400713915212,
    0.04060142980038694,
    0.06267204833410906,
    0.08327674157670475,
    0.1019301198172404,
    0.1181945319615184,
    0.1316886384491766,
    0.1420961093183821,
    0.1491729864726037,
    0.1527533871307259,
)


@nb.vectorize([nb.float64(nb.float64, nb.float64, nb.float64)], nopython=True, cache=True)
def _bvn_ufunc(sh, sk, r):
    """P(X <= sh, Y <= sk) for standard bivariate normal with correlation r.

    Single-integral quadrature over the correlation angle; for |r| > 0.925 a
    series in sqrt(1-r^2) plus a boundary-layer integral keeps full accuracy.
    Assumes |r| <= 1 (checked by the wrapper).
    """
    if math.isnan(sh) or math.isnan(sk) or math.isnan(r):
        return math.nan
    if sh == -math.inf or sk == -math.inf:
        return 0.0
    if sh == math.inf:
        return _kernels.norm_cdf_scalar(sk) if sk < math.inf else 1.0
    if sk == math.inf:
        return _kernels.norm_cdf_scalar(sh)
    if r == 1.0:
        return _kernels.norm_cdf_scalar(min(sh, sk))
    if r == -1.0:
        return max(0.0, _kernels.norm_cdf_scalar(sh) + _kernels.norm_cdf_scalar(sk) - 1.0)
    if r == 0.0:
        return _kernels.norm_cdf_scalar(sh) * _kernels.norm_cdf_scalar(sk)

    ar = abs(r)
    if ar < 0.3:
        ng = 0
    elif ar < 0.75:
        ng = 1
    else:
        ng = 2
    lg = _GL_N[ng]

    # work in upper-tail coordinates: P(X > h, Y > k)
    h = -sh
    k = -sk
    hk = h * k
    bvn = 0.0
    if ar < 0.925:
        hs = 0.5 * (h * h + k * k)
        asr = math.asin(r)
        for i in range(lg):
            for sgn in range(-1, 2, 2):
                sn = math.sin(asr * (sgn * _GL_X[ng, i] + 1.0) / 2.0)
                bvn += _GL_W[ng, i] * math.exp((sn * hk - hs) / (1.0 - sn * sn))
        bvn = bvn * asr / (4.0 * math.pi) + _kernels.norm_cdf_scalar(-h) * _kernels.norm_cdf_scalar(-k)
    else:
        if r < 0.0:
            k = -k
            hk = -hk
        a2 = (1.0 - r) * (1.0 + r)
        a = math.sqrt(a2)
        bs = (h - k) * (h - k)
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 16.0
        asr = -0.5 * (bs / a2 + hk)
        if asr > -100.0:
            bvn = a * math.exp(asr) * (1.0 - c * (bs - a2) * (1.0 - d * bs / 5.0) / 3.0 + c * d * a2 * a2 / 5.0)
        if -hk < 100.0:
            b = math.sqrt(bs)
            bvn -= (
                math.exp(-0.5 * hk)
                * math.sqrt(2.0 * math.pi)
                * _kernels.norm_cdf_scalar(-b / a)
                * b
                * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
            )
        ahalf = a / 2.0
        for i in range(lg):
            for sgn in range(-1, 2, 2):
                xs = ahalf * (sgn * _GL_X[ng, i] + 1.0)
                xs = xs * xs
                asr = -0.5 * (bs / xs + hk)
                if asr > -100.0:
                    rs = math.sqrt(1.0 - xs)
                    sp = 1.0 + c * xs * (1.0 + d * xs)
                    ep = math.exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs
                    bvn += ahalf * _GL_W[ng, i] * math.exp(asr) * (ep - sp)
        bvn = -bvn / (2.0 * math.pi)
        if r > 0.0:
            bvn += _kernels.norm_cdf_scalar(-max(h, k))
        else:
            bvn = -bvn
            if k > h:
                if h < 0.0:
                    bvn += _kernels.norm_cdf_scalar(k) - _kernels.norm_cdf_scalar(h)
                else:
                    bvn += _kernels.norm_cdf_scalar(-h) - _kernels.norm_cdf_scalar(-k)
    return max(0.0, min(1.0, bvn))


def bvn_cdf(h, k, rho):
    """Bivariate standard normal CDF P(X <= h, Y <= k) with correlation rho.

    Absolute accuracy around 1e-15 for |rho| < 1; at rho = +-1 the exact
    degenerate forms are returned. Raises DomainError for |rho| > 1.
    """
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho_arr) > 1.0):
        raise DomainError("bvn_cdf requires |rho| <= 1")
    out = _bvn_ufunc(np.asarray(h, dtype=float), np.asarray(k, dtype=float), rho_arr)
    return float(out) if np.ndim(out) == 0 else out
