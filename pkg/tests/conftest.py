import dataclasses

import pytest

from poolvol import GridSpec, ModelParams

# Parameter set used throughout the studies; epsilon varies per test.
PAPER = dict(y0=0.2, m=0.1, k=1.0, xi=0.26, rho_x=0.9, rho_y=0.5, rho_xy=-0.6, epsilon=4e-3)
BARRIER = -0.1
HORIZON = 1.0


@pytest.fixture
def paper_params() -> ModelParams:
    return ModelParams(**PAPER)


def params_with(**overrides) -> ModelParams:
    return ModelParams(**{**PAPER, **overrides})


@pytest.fixture
def flat_vol_params() -> ModelParams:
    """xi=0, y0=0: constant volatility, every approximation collapses."""
    return params_with(xi=0.0, y0=0.0)


def replace_params(p: ModelParams, **overrides) -> ModelParams:
    return dataclasses.replace(p, **overrides)


@pytest.fixture
def coarse_grid() -> GridSpec:
    return GridSpec(T=HORIZON, N=64)
