"""Generic Monte Carlo driver: per-index samplers, deterministic reductions.

Samplers must be pure functions of (index, seed). Results are stored by index
before reduction, so estimates never depend on worker count or scheduling; the
deterministic flag only switches the summation order (strict index order vs
pairwise tree).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels

__all__ = ["Estimate", "run", "reduce_mean", "reduce_std"]


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo estimate with corrected sample standard deviation.

    rel_se is the standard error of the mean divided by |mean| (the relative
    statistical error quoted alongside every estimate).
    """

    mean: float
    sample_std: float
    n: int
    rel_se: float

    @property
    def std_err(self) -> float:
        return self.sample_std / math.sqrt(self.n)

    @classmethod
    def from_values(cls, values: np.ndarray, deterministic: bool = True) -> "Estimate":
        values = np.ascontiguousarray(values, dtype=float)
        n = values.size
        if n < 2:
            raise ValueError("at least two samples are required")
        mean = reduce_mean(values, deterministic)
        std = reduce_std(values, mean, deterministic)
        se = std / math.sqrt(n)
        if mean != 0.0:
            rel_se = se / abs(mean)
        else:
            rel_se = 0.0 if std == 0.0 else math.inf
        return cls(mean=mean, sample_std=std, n=n, rel_se=rel_se)


def reduce_mean(values: np.ndarray, deterministic: bool) -> float:
    """Mean with an order-pinned summation.

    Deterministic mode accumulates in strict index order; otherwise a pairwise
    tree (numpy's blocked reduction) bounds round-off growth. Both orders are
    reproducible for a given value array.
    """
    if deterministic:
        return _kernels.seq_sum(values) / values.size
    return float(np.add.reduce(values)) / values.size


def reduce_std(values: np.ndarray, mean: float, deterministic: bool) -> float:
    """Corrected (n-1 divisor) sample standard deviation around the given mean."""
    n = values.size
    if deterministic:
        ss = _kernels.seq_sum_sq_dev(values, mean)
    else:
        d = values - mean
        ss = float(np.add.reduce(d * d))
    return math.sqrt(max(0.0, ss) / (n - 1))


def default_workers() -> int:
    return os.cpu_count() or 1


def run(
    sampler: Callable[[int, int], float],
    n: int,
    seed: int,
    deterministic: bool = True,
    workers: int | None = None,
) -> Estimate:
    """Evaluate sampler(i, seed) for i in 0..n-1 and aggregate.

    Each evaluation writes to its own slot, so the value array is identical
    for any worker count; the reduction then follows the deterministic flag.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    values = np.empty(n)
    workers = workers or default_workers()
    if workers <= 1:
        for i in range(n):
            values[i] = sampler(i, seed)
    else:
        chunk = max(1, -(-n // (workers * 4)))

        def fill(start: int) -> None:
            stop = min(n, start + chunk)
            for i in range(start, stop):
                values[i] = sampler(i, seed)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(0, n, chunk)))
    return Estimate.from_values(values, deterministic)
