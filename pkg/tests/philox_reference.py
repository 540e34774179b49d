"""Pure-Python reference implementation of the counter-based stream generator.

Written independently of the production kernels (plain integers, scipy's
ndtri) so tests can validate the numba implementation against it.
"""

import math

from scipy.special import ndtri

MASK32 = 0xFFFFFFFF
M0 = 0xD2511F53
M1 = 0xCD9E8D57
W0 = 0x9E3779B9
W1 = 0xBB67AE85


def philox4x32_10(counter, key):
    """One 10-round block; counter is 4 words, key 2 words, all 32-bit."""
    c = list(counter)
    k = list(key)
    for _ in range(10):
        p0 = M0 * c[0]
        p1 = M1 * c[2]
        c = [
            ((p1 >> 32) ^ c[1] ^ k[0]) & MASK32,
            p1 & MASK32,
            ((p0 >> 32) ^ c[3] ^ k[1]) & MASK32,
            p0 & MASK32,
        ]
        k = [(k[0] + W0) & MASK32, (k[1] + W1) & MASK32]
    return c


def stream_uniforms(n, seed, index, role):
    """First n uniforms of stream (seed, role, index), mirroring the kernel
    counter/key layout: counter=(block, seed_lo, seed_hi, index_hi),
    key=(index_lo, role)."""
    seed_lo = seed & MASK32
    seed_hi = (seed >> 32) & MASK32
    idx_lo = index & MASK32
    idx_hi = (index >> 32) & MASK32
    out = []
    for blk in range((n + 1) // 2):
        c = philox4x32_10((blk, seed_lo, seed_hi, idx_hi), (idx_lo, role))
        for x in ((c[0] << 32) | c[1], (c[2] << 32) | c[3]):
            if len(out) < n:
                out.append(((x >> 11) + 0.5) * 2.0**-53)
    return out


def stream_increments(n, seed, index, role, dt):
    """Gaussian increments with variance dt via scipy's independent inverse CDF."""
    return [float(ndtri(u)) * math.sqrt(dt) for u in stream_uniforms(n, seed, index, role)]
