"""Deterministic, seed-addressable Brownian increment streams.

Streams are identified by a (seed, role, index) triple; the same triple always
reproduces the same increments, and distinct triples are statistically
independent. Generation is counter-based (no sequential state), so any sample
of any stream can be produced on any thread.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .model import GridSpec

__all__ = ["Role", "StreamKey", "gaussian_increments", "correlate_market_x"]

_MAX_SEED = 2**64
_MAX_INDEX = 2**64


class Role(enum.IntEnum):
    """Which driver a stream feeds. Values match the kernel role tags."""

    MARKET_Y = _kernels.ROLE_MARKET_Y
    MARKET_X_ORTH = _kernels.ROLE_MARKET_X_ORTH
    FIRM_X = _kernels.ROLE_FIRM_X
    FIRM_Y = _kernels.ROLE_FIRM_Y
    INNER_Y1 = _kernels.ROLE_INNER_Y1


@dataclass(frozen=True)
class StreamKey:
    """Address of one increment stream.

    index identifies the firm, inner sample, or outer sample the stream
    belongs to; estimators enumerate their sub-streams through it.
    """

    seed: int
    role: Role
    index: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < _MAX_SEED:
            raise DomainError("seed must fit in an unsigned 64-bit integer")
        if not 0 <= self.index < _MAX_INDEX:
            raise DomainError("stream index must be a nonnegative 64-bit integer")


def gaussian_increments(key: StreamKey, grid: GridSpec) -> np.ndarray:
    """N i.i.d. Gaussian increments with variance grid.dt for the given stream.

    64-bit uniforms from the counter-based generator are mapped through the
    inverse normal CDF, so output is reproducible across platforms.
    """
    if grid.N < 1:
        raise DomainError("grid must have at least one step")
    z = _kernels.standard_normals(grid.N, key.seed, key.index, int(key.role))
    return z * math.sqrt(grid.dt)


def correlate_market_x(w_y: np.ndarray, w_x_orth: np.ndarray, rho_xy: float) -> np.ndarray:
    """Combine the common-factor increments into the correlated W^x driver.

    Elementwise rho_xy * w_y + sqrt(1 - rho_xy^2) * w_x_orth, which keeps the
    marginal law of each increment unchanged.
    """
    w_y = np.asarray(w_y, dtype=float)
    w_x_orth = np.asarray(w_x_orth, dtype=float)
    if w_y.shape != w_x_orth.shape:
        raise ValueError("increment paths must have equal length")
    if not abs(rho_xy) < 1.0:
        raise DomainError("correlate_market_x requires |rho_xy| < 1")
    return rho_xy * w_y + math.sqrt(1.0 - rho_xy * rho_xy) * w_x_orth
