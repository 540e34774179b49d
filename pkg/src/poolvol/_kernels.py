"""Numba kernels: counter-based random streams and fused sampling loops.

Every stream is addressed by (seed, role, index); draw ``t`` of a stream is a
pure function of that address, so results never depend on thread count or
scheduling. Outer ``prange`` loops only ever write ``out[j]`` for their own
``j``; all reductions happen in the caller.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

# Stream role tags. Mirrored by noise.Role; keep the numbering in sync.
ROLE_MARKET_Y = 0
ROLE_MARKET_X_ORTH = 1
ROLE_FIRM_X = 2
ROLE_FIRM_Y = 3
ROLE_INNER_Y1 = 4

_U32 = np.uint64(0xFFFFFFFF)
_PHILOX_M0 = np.uint64(0xD2511F53)
_PHILOX_M1 = np.uint64(0xCD9E8D57)
_PHILOX_W0 = np.uint64(0x9E3779B9)
_PHILOX_W1 = np.uint64(0xBB67AE85)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_TWO_POW_NEG53 = 2.0**-53


@nb.njit(
    nb.types.UniTuple(nb.uint64, 4)(
        nb.uint64, nb.uint64, nb.uint64, nb.uint64, nb.uint64, nb.uint64
    ),
    cache=True,
    inline="always",
)
def philox4x32_10(c0, c1, c2, c3, k0, k1):
    """One Philox-4x32 block: 10 rounds over counter words c0..c3, key (k0, k1).

    All six inputs must already be masked to 32 bits.
    """
    for _ in range(10):
        p0 = _PHILOX_M0 * c0
        p1 = _PHILOX_M1 * c2
        hi0 = p0 >> np.uint64(32)
        lo0 = p0 & _U32
        hi1 = p1 >> np.uint64(32)
        lo1 = p1 & _U32
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = (k0 + _PHILOX_W0) & _U32
        k1 = (k1 + _PHILOX_W1) & _U32
    return c0, c1, c2, c3


@nb.njit(nb.float64(nb.float64), cache=True, inline="always")
def ppnd16(p):
    """Inverse standard normal CDF, rational minimax approximation.

    Full double accuracy on (0, 1); returns +-inf at the endpoints.
    """
    if p <= 0.0:
        return -np.inf
    if p >= 1.0:
        return np.inf
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = q * (
            (
                (
                    (
                        (
                            (
                                (2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                                + 6.7265770927008700853e4
                            )
                            * r
                            + 4.5921953931549871457e4
                        )
                        * r
                        + 1.3731693765509461125e4
                    )
                    * r
                    + 1.9715909503065514427e3
                )
                * r
                + 1.3314166789178437745e2
            )
            * r
            + 3.3871328727963666080e0
        )
        den = (
            (
                (
                    (
                        (
                            (
                                (5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                                + 3.9307895800092710610e4
                            )
                            * r
                            + 2.1213794301586595867e4
                        )
                        * r
                        + 5.3941960214247511077e3
                    )
                    * r
                    + 6.8718700749205790830e2
                )
                * r
                + 4.2313330701600911252e1
            )
            * r
            + 1.0
        )
        return num / den
    if q < 0.0:
        r = p
    else:
        r = 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r = r - 1.6
        num = (
            (
                (
                    (
                        (
                            (
                                (7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                                + 2.41780725177450611770e-1
                            )
                            * r
                            + 1.27045825245236838258e0
                        )
                        * r
                        + 3.64784832476320460504e0
                    )
                    * r
                    + 5.76949722146069140550e0
                )
                * r
                + 4.63033784615654529590e0
            )
            * r
            + 1.42343711074968357734e0
        )
        den = (
            (
                (
                    (
                        (
                            (
                                (1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                                + 1.51986665636164571966e-2
                            )
                            * r
                            + 1.48103976427480074590e-1
                        )
                        * r
                        + 6.89767334985100004550e-1
                    )
                    * r
                    + 1.67638483018380384940e0
                )
                * r
                + 2.05319162663775882187e0
            )
            * r
            + 1.0
        )
    else:
        r = r - 5.0
        num = (
            (
                (
                    (
                        (
                            (
                                (2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                                + 1.24266094738807843860e-3
                            )
                            * r
                            + 2.65321895265761230930e-2
                        )
                        * r
                        + 2.96560571828504891230e-1
                    )
                    * r
                    + 1.78482653991729133580e0
                )
                * r
                + 5.46378491116411436990e0
            )
            * r
            + 6.65790464350110377720e0
        )
        den = (
            (
                (
                    (
                        (
                            (
                                (2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                                + 1.84631831751005468180e-5
                            )
                            * r
                            + 7.86869131145613259100e-4
                        )
                        * r
                        + 1.48753612908506148525e-2
                    )
                    * r
                    + 1.36929880922735805310e-1
                )
                * r
                + 5.99832206555887937690e-1
            )
            * r
            + 1.0
        )
    x = num / den
    return -x if q < 0.0 else x


@nb.njit(nb.float64(nb.float64), cache=True, inline="always")
def norm_cdf_scalar(x):
    return 0.5 * math.erfc(-x * _INV_SQRT2)


@nb.njit(nb.float64(nb.float64), cache=True, inline="always")
def norm_pdf_scalar(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


@nb.njit(cache=True, inline="always")
def fill_normals(buf, n, seed_lo, seed_hi, index, role):
    """Fill buf[:n] with the first n standard normals of stream (seed, role, index).

    Counter layout: (block, seed_lo, seed_hi, index_hi); key: (index_lo, role).
    Each block yields two doubles via 64-bit uniforms mapped through ppnd16.
    """
    idx_lo = index & _U32
    idx_hi = (index >> np.uint64(32)) & _U32
    nblk = (n + 1) // 2
    for blk in range(nblk):
        c0, c1, c2, c3 = philox4x32_10(
            np.uint64(blk), seed_lo, seed_hi, idx_hi, idx_lo, role
        )
        u = (np.float64(((c0 << np.uint64(32)) | c1) >> np.uint64(11)) + 0.5) * _TWO_POW_NEG53
        buf[2 * blk] = u
        if 2 * blk + 1 < n:
            u = (np.float64(((c2 << np.uint64(32)) | c3) >> np.uint64(11)) + 0.5) * _TWO_POW_NEG53
            buf[2 * blk + 1] = u
    for t in range(n):
        buf[t] = ppnd16(buf[t])


@nb.njit(cache=True)
def standard_normals(n, seed, index, role):
    """Standard normal draws of one stream, as an array (serial; used by the API)."""
    out = np.empty(n)
    fill_normals(
        out,
        n,
        np.uint64(seed) & _U32,
        (np.uint64(seed) >> np.uint64(32)) & _U32,
        np.uint64(index),
        np.uint64(role),
    )
    return out


@nb.njit(cache=True)
def raw_block(seed, index, role, block):
    """One raw Philox block of the stream keyed like fill_normals (test hook)."""
    seed64 = np.uint64(seed)
    index64 = np.uint64(index)
    c0, c1, c2, c3 = philox4x32_10(
        np.uint64(block),
        seed64 & _U32,
        (seed64 >> np.uint64(32)) & _U32,
        (index64 >> np.uint64(32)) & _U32,
        index64 & _U32,
        np.uint64(role),
    )
    out = np.empty(4, dtype=np.uint64)
    out[0] = c0
    out[1] = c1
    out[2] = c2
    out[3] = c3
    return out


@nb.njit(cache=True)
def ou_exact_path(dw, decay, c, init):
    """Kernel-form OU recursion v[n+1] = decay * (v[n] + c * dw[n])."""
    n = dw.shape[0]
    v = np.empty(n + 1)
    v[0] = init
    x = init
    for t in range(n):
        x = decay * (x + c * dw[t])
        v[t + 1] = x
    return v


@nb.njit(cache=True)
def ou_euler_path(dw, k_dt_eff, c, init):
    """Explicit-scheme OU recursion v[n+1] = v[n] * (1 - k_dt_eff) + c * dw[n]."""
    n = dw.shape[0]
    v = np.empty(n + 1)
    v[0] = init
    x = init
    for t in range(n):
        x = x * (1.0 - k_dt_eff) + c * dw[t]
        v[t + 1] = x
    return v


@nb.njit(cache=True, parallel=True)
def ou_endpoint_samples(n_paths, n_steps, dt, decay, c, init, seed, role, euler, k_dt_eff):
    """Terminal values of n_paths independent factor paths (streams (seed, role, j)).

    euler selects the explicit recursion (with k_dt_eff = k*dt/eps) instead of
    the exact kernel.
    """
    out = np.empty(n_paths)
    seed_lo = np.uint64(seed) & _U32
    seed_hi = (np.uint64(seed) >> np.uint64(32)) & _U32
    sdt = math.sqrt(dt)
    for j in nb.prange(n_paths):
        buf = np.empty(n_steps)
        fill_normals(buf, n_steps, seed_lo, seed_hi, np.uint64(j), np.uint64(role))
        x = init
        if euler:
            for t in range(n_steps):
                x = x * (1.0 - k_dt_eff) + c * (buf[t] * sdt)
        else:
            for t in range(n_steps):
                x = decay * (x + c * (buf[t] * sdt))
        out[j] = x
    return out


@nb.njit(nb.float64(nb.float64[:]), cache=True)
def seq_sum(values):
    """Strict index-order accumulation (deterministic reduction mode)."""
    acc = 0.0
    for i in range(values.shape[0]):
        acc += values[i]
    return acc


@nb.njit(nb.float64(nb.float64[:], nb.float64), cache=True)
def seq_sum_sq_dev(values, mean):
    acc = 0.0
    for i in range(values.shape[0]):
        d = values[i] - mean
        acc += d * d
    return acc


# ---------------------------------------------------------------------------
# Fused estimator loops. Parameter conventions shared by all kernels below:
#   decay  = exp(-k * dt / eps)          per-step kernel of the fast factor
#   amp_z  = xi * sqrt(2/eps) * rho_y    common-noise diffusion scale
#   amp_y  = xi * sqrt(2/eps) * sqrt(1 - rho_y^2)
# Normal buffers hold unit normals; increments are buf[t] * sqrt(dt).
# Sums use the left-point state and the increment over [t_n, t_{n+1}].
# ---------------------------------------------------------------------------


@nb.njit(cache=True, parallel=True)
def inner_loss_values(ez_left, dwx, dt, decay, amp_y, y0, m, B, rho_x, n_inner, seed, index_base):
    """Conditional default probabilities for n_inner idiosyncratic factor paths.

    ez_left[t] = exp(z_{t_n}) on the left grid points of a fixed market path,
    dwx[t] the market W^x increments. Sample j uses stream (seed, inner_y1,
    index_base + j).
    """
    n_steps = ez_left.shape[0]
    out = np.empty(n_inner)
    seed_lo = np.uint64(seed) & _U32
    seed_hi = (np.uint64(seed) >> np.uint64(32)) & _U32
    sdt = math.sqrt(dt)
    den_fac = 1.0 - rho_x * rho_x
    for j in nb.prange(n_inner):
        buf = np.empty(n_steps)
        fill_normals(buf, n_steps, seed_lo, seed_hi, np.uint64(index_base + j), np.uint64(ROLE_INNER_Y1))
        y = y0
        s2 = 0.0
        sx = 0.0
        for t in range(n_steps):
            sig = m * ez_left[t] * math.exp(y)
            s2 += sig * sig
            sx += sig * dwx[t]
            y = decay * (y + amp_y * buf[t] * sdt)
        num = B + 0.5 * s2 * dt - rho_x * sx
        out[j] = norm_cdf_scalar(num / math.sqrt(den_fac * s2 * dt))
    return out


@nb.njit(cache=True, parallel=True)
def market_exp_sums(n_outer, n_steps, dt, decay, amp_z, seed):
    """Per-market-path sums I_j = dt * sum e^{2 z} and M_j = sum e^{z} dW^y.

    Path j is driven by stream (seed, market_y, j).
    """
    I = np.empty(n_outer)
    M = np.empty(n_outer)
    seed_lo = np.uint64(seed) & _U32
    seed_hi = (np.uint64(seed) >> np.uint64(32)) & _U32
    sdt = math.sqrt(dt)
    for j in nb.prange(n_outer):
        buf = np.empty(n_steps)
        fill_normals(buf, n_steps, seed_lo, seed_hi, np.uint64(j), np.uint64(ROLE_MARKET_Y))
        z = 0.0
        acc_i = 0.0
        acc_m = 0.0
        for t in range(n_steps):
            dw = buf[t] * sdt
            ez = math.exp(z)
            acc_i += ez * ez
            acc_m += ez * dw
            z = decay * (z + amp_z * dw)
        I[j] = acc_i * dt
        M[j] = acc_m
    return I, M


@nb.njit(cache=True, parallel=True)
def expected_loss_values(n_samples, n_steps, dt, decay, amp_z, amp_y, y0, m, B, rho_x, rho_xy, seed):
    """Joint (common, idiosyncratic) factor samples of the unconditional default
    probability integrand. Sample j pairs streams (market_y, j) and (inner_y1, j)."""
    out = np.empty(n_samples)
    seed_lo = np.uint64(seed) & _U32
    seed_hi = (np.uint64(seed) >> np.uint64(32)) & _U32
    sdt = math.sqrt(dt)
    den_fac = 1.0 - rho_x * rho_x * rho_xy * rho_xy
    for j in nb.prange(n_samples):
        bufy = np.empty(n_steps)
        buf1 = np.empty(n_steps)
        fill_normals(bufy, n_steps, seed_lo, seed_hi, np.uint64(j), np.uint64(ROLE_MARKET_Y))
        fill_normals(buf1, n_steps, seed_lo, seed_hi, np.uint64(j), np.uint64(ROLE_INNER_Y1))
        z = 0.0
        y = y0
        s2 = 0.0
        sy = 0.0
        for t in range(n_steps):
            dwy = bufy[t] * sdt
            sig = m * math.exp(y + z)
            s2 += sig * sig
            sy += sig * dwy
            z = decay * (z + amp_z * dwy)
            y = decay * (y + amp_y * buf1[t] * sdt)
        num = B + 0.5 * s2 * dt - rho_x * rho_xy * sy
        out[j] = norm_cdf_scalar(num / math.sqrt(den_fac * s2 * dt))
    return out


@nb.njit(cache=True, parallel=True)
def firm_pool_losses(n_outer, n_firms, n_steps, dt, decay, amp_z, amp_y, y0, m, B, rho_x, rho_xy, seed):
    """Finite-pool default fractions over fresh market and firm noise.

    Outer sample j draws market streams (market_y, j) and (market_x_orth, j);
    firm i of sample j uses streams (firm_y, j*n_firms+i) and (firm_x, j*n_firms+i),
    each simulated with full per-step increments.
    """
    out = np.empty(n_outer)
    seed_lo = np.uint64(seed) & _U32
    seed_hi = (np.uint64(seed) >> np.uint64(32)) & _U32
    sdt = math.sqrt(dt)
    sq_x = math.sqrt(1.0 - rho_x * rho_x)
    sq_xy = math.sqrt(1.0 - rho_xy * rho_xy)
    for j in nb.prange(n_outer):
        dwy = np.empty(n_steps)
        dwxo = np.empty(n_steps)
        fill_normals(dwy, n_steps, seed_lo, seed_hi, np.uint64(j), np.uint64(ROLE_MARKET_Y))
        fill_normals(dwxo, n_steps, seed_lo, seed_hi, np.uint64(j), np.uint64(ROLE_MARKET_X_ORTH))
        ez = np.empty(n_steps)
        dwx = np.empty(n_steps)
        z = 0.0
        for t in range(n_steps):
            dwy_s = dwy[t] * sdt
            ez[t] = math.exp(z)
            dwx[t] = rho_xy * dwy_s + sq_xy * (dwxo[t] * sdt)
            z = decay * (z + amp_z * dwy_s)
        bufy = np.empty(n_steps)
        bufx = np.empty(n_steps)
        n_default = 0
        for i in range(n_firms):
            idx = np.uint64(j) * np.uint64(n_firms) + np.uint64(i)
            fill_normals(bufy, n_steps, seed_lo, seed_hi, idx, np.uint64(ROLE_FIRM_Y))
            fill_normals(bufx, n_steps, seed_lo, seed_hi, idx, np.uint64(ROLE_FIRM_X))
            y = y0
            x = 0.0
            for t in range(n_steps):
                sig = m * ez[t] * math.exp(y)
                x += -0.5 * sig * sig * dt + sig * (rho_x * dwx[t] + sq_x * bufx[t] * sdt)
                y = decay * (y + amp_y * bufy[t] * sdt)
            if x <= B:
                n_default += 1
        out[j] = n_default / n_firms
    return out


@nb.njit(cache=True, parallel=True)
def firm_terminal_values(ez_left, dwx, dt, decay, amp_y, y0, m, rho_x, n_firms, seed):
    """Terminal log-asset values of n_firms firms on a fixed market path.

    Firm i uses streams (firm_y, i) and (firm_x, i), simulated step by step
    exactly as the per-path asset scheme.
    """
    n_steps = ez_left.shape[0]
    out = np.empty(n_firms)
    seed_lo = np.uint64(seed) & _U32
    seed_hi = (np.uint64(seed) >> np.uint64(32)) & _U32
    sdt = math.sqrt(dt)
    sq_x = math.sqrt(1.0 - rho_x * rho_x)
    for i in nb.prange(n_firms):
        bufy = np.empty(n_steps)
        bufx = np.empty(n_steps)
        fill_normals(bufy, n_steps, seed_lo, seed_hi, np.uint64(i), np.uint64(ROLE_FIRM_Y))
        fill_normals(bufx, n_steps, seed_lo, seed_hi, np.uint64(i), np.uint64(ROLE_FIRM_X))
        y = y0
        x = 0.0
        for t in range(n_steps):
            sig = m * ez_left[t] * math.exp(y)
            x += -0.5 * sig * sig * dt + sig * (rho_x * dwx[t] + sq_x * bufx[t] * sdt)
            y = decay * (y + amp_y * bufy[t] * sdt)
        out[i] = x
    return out


@nb.njit(cache=True, parallel=True)
def limiting_losses(n_outer, n_inner, n_steps, dt, decay, amp_z, amp_y, y0, m, B, rho_x, rho_xy, seed):
    """Nested estimate of the limiting loss per fresh market sample.

    Outer sample j: market streams (market_y, j), (market_x_orth, j); inner
    sample l uses stream (inner_y1, j*n_inner + l). Returns the inner means.
    """
    out = np.empty(n_outer)
    seed_lo = np.uint64(seed) & _U32
    seed_hi = (np.uint64(seed) >> np.uint64(32)) & _U32
    sdt = math.sqrt(dt)
    sq_xy = math.sqrt(1.0 - rho_xy * rho_xy)
    den_fac = 1.0 - rho_x * rho_x
    for j in nb.prange(n_outer):
        dwy = np.empty(n_steps)
        dwxo = np.empty(n_steps)
        fill_normals(dwy, n_steps, seed_lo, seed_hi, np.uint64(j), np.uint64(ROLE_MARKET_Y))
        fill_normals(dwxo, n_steps, seed_lo, seed_hi, np.uint64(j), np.uint64(ROLE_MARKET_X_ORTH))
        ez = np.empty(n_steps)
        dwx = np.empty(n_steps)
        z = 0.0
        for t in range(n_steps):
            dwy_s = dwy[t] * sdt
            ez[t] = math.exp(z)
            dwx[t] = rho_xy * dwy_s + sq_xy * (dwxo[t] * sdt)
            z = decay * (z + amp_z * dwy_s)
        buf = np.empty(n_steps)
        acc = 0.0
        for l in range(n_inner):
            idx = np.uint64(j) * np.uint64(n_inner) + np.uint64(l)
            fill_normals(buf, n_steps, seed_lo, seed_hi, idx, np.uint64(ROLE_INNER_Y1))
            y = y0
            s2 = 0.0
            sx = 0.0
            for t in range(n_steps):
                sig = m * ez[t] * math.exp(y)
                s2 += sig * sig
                sx += sig * dwx[t]
                y = decay * (y + amp_y * buf[t] * sdt)
            num = B + 0.5 * s2 * dt - rho_x * sx
            acc += norm_cdf_scalar(num / math.sqrt(den_fac * s2 * dt))
        out[j] = acc / n_inner
    return out
