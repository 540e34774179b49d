"""Experiment runner: reproduces the pathwise and call-price studies from a
JSON config with flag overrides, writing CSV results plus a metadata sidecar.

Exit codes: 0 success, 2 configuration error, 3 numerical-domain error.
Runs with identical config and seed in deterministic mode produce
byte-identical CSVs, independent of the thread count.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass, field, replace

import click
import numpy as np

from . import __version__, pathwise, pricing
from .errors import ConfigError, DomainError
from .model import GridSpec, ModelParams, stationary_variances
from .montecarlo import Estimate
from .noise import Role, StreamKey, gaussian_increments
from .schemes import ou_path_exact
from .specialfn import norm_cdf, norm_pdf

PAPER_MODEL = ModelParams(
    y0=0.2, m=0.1, k=1.0, xi=0.26, rho_x=0.9, rho_y=0.5, rho_xy=-0.6, epsilon=4e-3
)

PATHWISE_COLUMNS = [
    "epsilon",
    "path_id",
    "loss_true",
    "loss_true_se",
    "appY",
    "erg1Y",
    "erg2Y",
    "erg1YZ",
    "erg2YZ",
    "re_appY",
    "re_erg1Y",
    "re_erg2Y",
    "re_erg1YZ",
    "re_erg2YZ",
]
CALL_COLUMNS = ["method", "strike", "price", "std_err", "rel_err_vs_reference"]
CALL_METHODS = ("expLoss", "firmsCall", "limCall", "appY", "erg1Y", "erg2Y", "erg1YZ", "erg2YZ")
APPROX_NAMES = ("appY", "erg1Y", "erg2Y", "erg1YZ", "erg2YZ")


@dataclass(frozen=True)
class PathwiseSection:
    epsilon_list: tuple = (1.0, 1e-1, 1e-2, 1e-3, 1e-4)
    n_paths: int = 3
    n_inner: int = 400_000
    market_seed: int = 1
    approximations: tuple = APPROX_NAMES
    emit_loglog: bool = False


@dataclass(frozen=True)
class CallSection:
    strikes: tuple = (0.0, 0.05, 0.10)
    methods: tuple = ("expLoss", "firmsCall", "appY", "erg1Y", "erg2Y", "erg1YZ", "erg2YZ")
    n_outer: int = 100_000
    n_inner: int = 1_000
    n_firms: tuple = (5, 150, 100)


@dataclass(frozen=True)
class DensitySection:
    b_min: float = -0.5
    b_max: float = 0.3
    n_points: int = 33
    n_inner: int = 2_000
    market_seed: int = 1
    path_id: int = 0


@dataclass(frozen=True)
class SchemeCheckSection:
    # slow-factor regime keeps k*dt/eps <= 0.01 so both schemes are comparable
    n_paths: int = 100_000
    n_steps: int = 200
    epsilon: float = 1.0
    epsilon_fast: float = 0.01


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment settings; unknown config fields are rejected."""

    model: ModelParams = PAPER_MODEL
    T: float = 1.0
    N: int | None = None
    steps_per_epsilon: int = 40
    barrier: float = -0.1
    seed: int = 1
    deterministic: bool = True
    threads: int | None = None
    output: str = "results.csv"
    pathwise: PathwiseSection = field(default_factory=PathwiseSection)
    call: CallSection = field(default_factory=CallSection)
    density: DensitySection = field(default_factory=DensitySection)
    scheme_check: SchemeCheckSection = field(default_factory=SchemeCheckSection)

    def grid_for(self, epsilon: float) -> GridSpec:
        if self.N is not None:
            return GridSpec(T=self.T, N=self.N)
        return GridSpec.from_epsilon(self.T, epsilon, self.steps_per_epsilon)


def _build_section(cls, data: dict, name: str):
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown fields in '{name}' section: {sorted(unknown)}")
    coerced = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
    return cls(**coerced)


def load_config(path: str | None, experiment: str | None = None) -> ExperimentConfig:
    """Load and validate a JSON config; None yields the built-in defaults."""
    if path is None:
        return ExperimentConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    known = {
        "model",
        "grid",
        "barrier",
        "seed",
        "deterministic",
        "threads",
        "output",
        "experiment",
        "pathwise",
        "call",
        "density",
        "scheme_check",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    if experiment is not None and raw.get("experiment") not in (None, experiment):
        raise ConfigError(
            f"config is for experiment {raw['experiment']!r}, but {experiment!r} was requested"
        )
    kwargs: dict = {}
    try:
        if "model" in raw:
            kwargs["model"] = ModelParams.from_dict(raw["model"])
        if "grid" in raw:
            grid = dict(raw["grid"])
            unknown = set(grid) - {"T", "N", "steps_per_epsilon"}
            if unknown:
                raise ConfigError(f"unknown grid fields: {sorted(unknown)}")
            if "N" in grid and "steps_per_epsilon" in grid:
                raise ConfigError("grid accepts either N or steps_per_epsilon, not both")
            kwargs["T"] = float(grid.get("T", 1.0))
            if "N" in grid:
                kwargs["N"] = int(grid["N"])
            if "steps_per_epsilon" in grid:
                kwargs["steps_per_epsilon"] = int(grid["steps_per_epsilon"])
        for name in ("barrier", "seed", "deterministic", "threads", "output"):
            if name in raw and raw[name] is not None:
                kwargs[name] = raw[name]
        if "pathwise" in raw:
            kwargs["pathwise"] = _build_section(PathwiseSection, raw["pathwise"], "pathwise")
        if "call" in raw:
            kwargs["call"] = _build_section(CallSection, raw["call"], "call")
        if "density" in raw:
            kwargs["density"] = _build_section(DensitySection, raw["density"], "density")
        if "scheme_check" in raw:
            kwargs["scheme_check"] = _build_section(
                SchemeCheckSection, raw["scheme_check"], "scheme_check"
            )
        cfg = ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.T <= 0:
        raise ConfigError("grid horizon T must be positive")
    if cfg.N is not None and cfg.N < 1:
        raise ConfigError("grid N must be at least 1")
    if cfg.steps_per_epsilon < 1:
        raise ConfigError("steps_per_epsilon must be at least 1")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if cfg.threads is not None and cfg.threads < 1:
        raise ConfigError("threads must be at least 1")
    for name in cfg.pathwise.approximations:
        if name not in APPROX_NAMES:
            raise ConfigError(f"unknown approximation {name!r}")
    for name in cfg.call.methods:
        if name not in CALL_METHODS:
            raise ConfigError(f"unknown call method {name!r}")
    if len(cfg.call.n_firms) not in (1, len(cfg.call.strikes)):
        raise ConfigError("n_firms must be a single value or one per strike")
    for a in cfg.call.strikes:
        if not 0.0 <= a <= 1.0:
            raise ConfigError("strikes must lie in [0, 1]")


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(col, "")) for col in columns])


def write_metadata(cfg: ExperimentConfig, experiment: str, wall_time: float) -> None:
    meta = {
        "experiment": experiment,
        "version": __version__,
        "seed": cfg.seed,
        "deterministic": cfg.deterministic,
        "threads": cfg.threads,
        "wall_time_s": wall_time,
        "model": cfg.model.to_dict(),
        "grid": {"T": cfg.T, "N": cfg.N, "steps_per_epsilon": cfg.steps_per_epsilon},
        "barrier": cfg.barrier,
        "config": {
            "pathwise": dataclasses.asdict(cfg.pathwise),
            "call": dataclasses.asdict(cfg.call),
            "density": dataclasses.asdict(cfg.density),
            "scheme_check": dataclasses.asdict(cfg.scheme_check),
        },
    }
    with open(cfg.output + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _apply_threads(threads: int | None) -> None:
    if threads is not None:
        import numba

        numba.set_num_threads(threads)


# --------------------------------------------------------------------------
# experiment runners
# --------------------------------------------------------------------------


def run_pathwise_study(cfg: ExperimentConfig) -> list[dict]:
    """One row per (epsilon, market path): nested loss and approximations,
    with relative errors in percent."""
    sec = cfg.pathwise
    rows = []
    for eps in sec.epsilon_list:
        p = replace(cfg.model, epsilon=float(eps))
        grid = cfg.grid_for(float(eps))
        for path_id in range(sec.n_paths):
            mkt = pathwise.simulate_market(p, grid, sec.market_seed, path_id)
            est = pathwise.true_loss(
                p, mkt, cfg.barrier, sec.n_inner, cfg.seed, cfg.deterministic
            )
            approx = {
                "appY": pathwise.loss_appY(p, mkt, cfg.barrier),
                "erg1Y": pathwise.loss_ergY(p, mkt, cfg.barrier, lam=1),
                "erg2Y": pathwise.loss_ergY(p, mkt, cfg.barrier, lam=0),
                "erg1YZ": pathwise.loss_ergYZ(p, grid.T, mkt.wx_terminal, cfg.barrier, lam=1),
                "erg2YZ": pathwise.loss_ergYZ(p, grid.T, mkt.wx_terminal, cfg.barrier, lam=0),
            }
            row = {
                "epsilon": float(eps),
                "path_id": path_id,
                "loss_true": est.mean,
                "loss_true_se": est.std_err,
            }
            for name in APPROX_NAMES:
                if name in sec.approximations:
                    row[name] = approx[name]
                    if est.mean != 0.0:
                        row["re_" + name] = abs(approx[name] - est.mean) / est.mean * 100.0
                    else:
                        row["re_" + name] = ""
                else:
                    row[name] = ""
                    row["re_" + name] = ""
            rows.append(row)
    return rows


def run_call_study(cfg: ExperimentConfig) -> list[dict]:
    """One row per (method, strike); conditional methods share market sums."""
    sec = cfg.call
    p = cfg.model
    grid = cfg.grid_for(p.epsilon)
    n_firms = sec.n_firms if len(sec.n_firms) == len(sec.strikes) else sec.n_firms * len(sec.strikes)
    rows = []
    results: dict[tuple[str, float], Estimate | float] = {}

    need_sums = any(mth in sec.methods for mth in ("appY", "erg1Y", "erg2Y"))
    sums = pricing.market_exp_sums(p, grid, sec.n_outer, cfg.seed) if need_sums else None

    for method in sec.methods:
        for strike, nf in zip(sec.strikes, n_firms):
            spec = pricing.TrancheSpec(attachment=strike, barrier=cfg.barrier, horizon=grid.T)
            if method == "expLoss":
                if strike != 0.0:
                    continue
                res = pricing.expected_loss(
                    p, grid, cfg.barrier, sec.n_outer, cfg.seed, cfg.deterministic
                )
            elif method == "firmsCall":
                res = pricing.call_firms(
                    p, grid, spec, int(nf), sec.n_outer, cfg.seed, cfg.deterministic
                )
            elif method == "limCall":
                res = pricing.call_limiting(
                    p, grid, spec, sec.n_outer, sec.n_inner, cfg.seed, cfg.deterministic
                )
            elif method == "appY":
                res = pricing.call_appY(
                    p, grid, spec, sec.n_outer, cfg.seed, cfg.deterministic, market_sums=sums
                )
            elif method == "erg1Y":
                res = pricing.call_ergY(
                    p, grid, spec, 1, sec.n_outer, cfg.seed, cfg.deterministic, market_sums=sums
                )
            elif method == "erg2Y":
                res = pricing.call_ergY(
                    p, grid, spec, 0, sec.n_outer, cfg.seed, cfg.deterministic, market_sums=sums
                )
            elif method == "erg1YZ":
                res = pricing.call_ergYZ(p, spec, lam=1)
            elif method == "erg2YZ":
                res = pricing.call_ergYZ(p, spec, lam=0)
            else:
                raise ConfigError(f"unknown call method {method!r}")
            results[(method, strike)] = res

    for (method, strike), res in results.items():
        price = res.mean if isinstance(res, Estimate) else res
        std_err = res.std_err if isinstance(res, Estimate) else 0.0
        ref = results.get(("firmsCall", strike))
        ref_price = ref.mean if isinstance(ref, Estimate) else ref
        if method != "firmsCall" and ref_price:
            rel = abs(price - ref_price) / ref_price * 100.0
        else:
            rel = ""
        rows.append(
            {
                "method": method,
                "strike": float(strike),
                "price": price,
                "std_err": std_err,
                "rel_err_vs_reference": rel,
            }
        )
    return rows


def run_density_study(cfg: ExperimentConfig) -> list[dict]:
    """Conditional density and CDF of the terminal log-asset value on a fixed
    market path, over a barrier grid; nested over idiosyncratic paths."""
    sec = cfg.density
    p = cfg.model
    grid = cfg.grid_for(p.epsilon)
    mkt = pathwise.simulate_market(p, grid, sec.market_seed, sec.path_id)
    b_grid = np.linspace(sec.b_min, sec.b_max, sec.n_points)
    dens = np.empty((sec.n_inner, sec.n_points))
    cdf = np.empty((sec.n_inner, sec.n_points))
    dt = grid.dt
    z_left = mkt.z[:-1]
    for j in range(sec.n_inner):
        dw = gaussian_increments(StreamKey(cfg.seed, Role.INNER_Y1, j), grid)
        y1 = ou_path_exact(p, grid, dw, math.sqrt(1.0 - p.rho_y**2), p.y0)
        w = y1[:-1] + z_left
        sig = p.m * np.exp(w)
        s2 = dt * np.sum(sig * sig)
        num0 = 0.5 * s2 - p.rho_x * np.sum(sig * mkt.dwx)
        den = math.sqrt((1.0 - p.rho_x**2) * s2)
        args = (b_grid + num0) / den
        cdf[j] = norm_cdf(args)
        dens[j] = norm_pdf(args) / den
    rows = []
    for i, b in enumerate(b_grid):
        d = Estimate.from_values(dens[:, i], cfg.deterministic)
        c = Estimate.from_values(cdf[:, i], cfg.deterministic)
        rows.append(
            {
                "barrier": float(b),
                "density": d.mean,
                "density_se": d.std_err,
                "cdf": c.mean,
                "cdf_se": c.std_err,
            }
        )
    return rows


def _endpoint_samples(p: ModelParams, grid: GridSpec, n: int, seed: int, euler: bool):
    """Batch OU endpoints over streams (seed, inner_y1, j), both schemes."""
    from . import _kernels

    rf = math.sqrt(1.0 - p.rho_y**2)
    decay = math.exp(-p.k * grid.dt / p.epsilon)
    c = p.xi * math.sqrt(2.0 / p.epsilon) * rf
    kde = p.k * grid.dt / p.epsilon
    role = int(Role.INNER_Y1)
    end_exact = _kernels.ou_endpoint_samples(
        n, grid.N, grid.dt, decay, c, p.y0, seed, role, False, kde
    )
    end_euler = (
        _kernels.ou_endpoint_samples(n, grid.N, grid.dt, decay, c, p.y0, seed, role, True, kde)
        if euler
        else None
    )
    return end_exact, end_euler


def _kernel_endpoint_variance(p: ModelParams, grid: GridSpec) -> float:
    """Closed-form endpoint variance of the exact-kernel recursion (geometric sum)."""
    rf2 = 1.0 - p.rho_y**2
    q = math.exp(-2.0 * p.k * grid.dt / p.epsilon)
    return (2.0 * p.xi**2 * rf2 * grid.dt / p.epsilon) * q * (1.0 - q**grid.N) / (1.0 - q)


def run_scheme_check(cfg: ExperimentConfig) -> list[dict]:
    """Moment checks of the factor discretizations against closed forms."""
    sec = cfg.scheme_check
    n = sec.n_paths
    p = replace(cfg.model, epsilon=sec.epsilon)
    grid = GridSpec(T=cfg.T, N=sec.n_steps)
    end_exact, end_euler = _endpoint_samples(p, grid, n, cfg.seed, euler=True)

    mean_th = p.y0 * math.exp(-p.k * grid.T / p.epsilon)
    var_th = _kernel_endpoint_variance(p, grid)
    mean_obs = float(end_exact.mean())
    mean_se = float(end_exact.std(ddof=1) / math.sqrt(n))
    var_obs = float(end_exact.var(ddof=1))
    var_mc_tol = 3.0 * var_obs * math.sqrt(2.0 / max(n - 1, 1))
    diff = end_exact - end_euler
    diff_mean = float(diff.mean())
    diff_se = float(diff.std(ddof=1) / math.sqrt(n))

    rows = [
        {
            "check": "exact_endpoint_mean",
            "observed": mean_obs,
            "expected": mean_th,
            "tolerance": 3.0 * mean_se,
        },
        {
            "check": "exact_endpoint_variance",
            "observed": var_obs,
            "expected": var_th,
            "tolerance": 0.01 * var_th + var_mc_tol,
        },
        {
            "check": "euler_vs_exact_endpoint_mean",
            "observed": diff_mean,
            "expected": 0.0,
            "tolerance": 3.0 * diff_se + abs(mean_th) * p.k * grid.dt / p.epsilon,
        },
    ]

    # small-epsilon run: endpoint variance approaches the stationary value
    p_fast = replace(cfg.model, epsilon=sec.epsilon_fast)
    grid_fast = cfg.grid_for(sec.epsilon_fast)
    n_fast = min(n, 20_000)
    end_fast, _ = _endpoint_samples(p_fast, grid_fast, n_fast, cfg.seed, euler=False)
    var_fast = float(end_fast.var(ddof=1))
    stat_var = stationary_variances(p_fast).var_y
    rows.append(
        {
            "check": "stationary_variance_limit",
            "observed": var_fast,
            "expected": stat_var,
            "tolerance": 0.05 * stat_var + 3.0 * var_fast * math.sqrt(2.0 / max(n_fast - 1, 1)),
        }
    )
    for row in rows:
        row["passed"] = abs(row["observed"] - row["expected"]) <= row["tolerance"]
    return rows


def run_selftest() -> list[tuple[str, bool, str]]:
    """Fast identity checks; returns (name, passed, detail) triples."""
    from . import _kernels
    from .specialfn import bvn_cdf, norm_cdf, norm_inv_cdf

    checks: list[tuple[str, bool, str]] = []

    blk = _kernels.raw_block(0, 0, 0, 0)
    expect = (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)
    ok = tuple(int(v) for v in blk) == expect
    checks.append(("counter_rng_known_answer", ok, f"block={[hex(int(v)) for v in blk]}"))

    got = bvn_cdf(0.0, 0.0, 0.5)
    ok = abs(got - 1.0 / 3.0) < 1e-12
    checks.append(("bvn_arcsin_identity", ok, f"bvn(0,0,0.5)={got!r}"))

    got = bvn_cdf(1.0, -1.0, 0.0)
    want = norm_cdf(1.0) * norm_cdf(-1.0)
    checks.append(("bvn_independence", abs(got - want) < 1e-13, f"delta={got - want:.2e}"))

    p = np.linspace(1e-12, 1 - 1e-12, 1001)
    err = np.max(np.abs(norm_cdf(norm_inv_cdf(p)) - p))
    checks.append(("inverse_cdf_roundtrip", err < 1e-12, f"max err={err:.2e}"))

    # mean-of-normal-CDF identity against the closed form
    w = np.linspace(-12.0, 12.0, 4001)
    phi = np.exp(-0.5 * w * w) / math.sqrt(2 * math.pi)
    for c0, c1 in ((0.3, 0.7), (-1.2, 2.0)):
        quad = np.trapezoid(norm_cdf(c0 - c1 * w) * phi, w)
        want = norm_cdf(c0 / math.sqrt(1 + c1 * c1))
        checks.append(
            (f"gaussian_smoothing_identity_c0={c0}", abs(quad - want) < 1e-8, f"delta={quad - want:.2e}")
        )

    mdl = PAPER_MODEL
    grid = GridSpec.from_epsilon(1.0, 0.05)
    mkt = pathwise.simulate_market(mdl, grid, 7, 0)
    a = pathwise.loss_appY(mdl, mkt, -0.1)
    b = pathwise.loss_appY(mdl, mkt, -0.1, method="quadrature")
    checks.append(("appY_closed_form_vs_quadrature", abs(a - b) < 1e-12, f"delta={a - b:.2e}"))

    v1 = pricing.call_ergYZ(mdl, pricing.TrancheSpec(0.05, -0.1, 1.0), lam=0)
    v2 = pricing.call_ergYZ(replace(mdl, epsilon=1.0), pricing.TrancheSpec(0.05, -0.1, 1.0), lam=0)
    checks.append(("ergYZ_epsilon_invariance", v1 == v2, f"{v1!r} vs {v2!r}"))
    return checks


# --------------------------------------------------------------------------
# command-line interface
# --------------------------------------------------------------------------


def _common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Base seed (decimal 64-bit integer).")(fn)
    fn = click.option("--output", type=click.Path(), default=None, help="Output CSV path.")(fn)
    fn = click.option("--threads", type=int, default=None, help="Worker thread count.")(fn)
    fn = click.option(
        "--deterministic/--parallel-reduce",
        "deterministic",
        default=None,
        help="Index-order (deterministic) vs pairwise-tree reduction.",
    )(fn)
    return fn


def _merge_common(cfg: ExperimentConfig, seed, output, threads, deterministic) -> ExperimentConfig:
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if output is not None:
        cfg = replace(cfg, output=output)
    if threads is not None:
        cfg = replace(cfg, threads=threads)
    if deterministic is not None:
        cfg = replace(cfg, deterministic=deterministic)
    return cfg


def _execute(experiment: str, cfg: ExperimentConfig, rows: list[dict], columns: list[str], t0: float) -> None:
    write_csv(cfg.output, columns, rows)
    write_metadata(cfg, experiment, time.perf_counter() - t0)
    click.echo(f"{experiment}: wrote {len(rows)} rows to {cfg.output}")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__)
def cli() -> None:
    """Pool-loss simulation and tranche pricing under fast mean-reverting
    exponential OU stochastic volatility."""


@cli.command("pathwise")
@_common_options
@click.option("--epsilon-list", type=str, default=None, help="Comma-separated epsilon values.")
@click.option("--n-inner", type=int, default=None, help="Inner samples per market path.")
@click.option("--n-paths", type=int, default=None, help="Market paths per epsilon.")
@click.option("--market-seed", type=int, default=None, help="Seed for the market-path streams.")
@click.option("--approximations", type=str, default=None, help="Comma-separated subset of appY,erg1Y,erg2Y,erg1YZ,erg2YZ.")
@click.option("--emit-loglog", is_flag=True, default=False, help="Also write (epsilon, relative error) pairs for plotting.")
def pathwise_cmd(config_path, seed, output, threads, deterministic, epsilon_list, n_inner, n_paths, market_seed, approximations, emit_loglog):
    """Nested conditional loss vs its approximations, per market path.

    CSV columns: epsilon,path_id,loss_true,loss_true_se,appY,erg1Y,erg2Y,
    erg1YZ,erg2YZ,re_appY,re_erg1Y,re_erg2Y,re_erg1YZ,re_erg2YZ (relative
    errors in percent).
    """
    t0 = time.perf_counter()
    cfg = load_config(config_path, "pathwise")
    cfg = _merge_common(cfg, seed, output, threads, deterministic)
    sec = cfg.pathwise
    if epsilon_list is not None:
        sec = replace(sec, epsilon_list=tuple(float(tok) for tok in epsilon_list.split(",")))
    if n_inner is not None:
        sec = replace(sec, n_inner=n_inner)
    if n_paths is not None:
        sec = replace(sec, n_paths=n_paths)
    if market_seed is not None:
        sec = replace(sec, market_seed=market_seed)
    if approximations is not None:
        sec = replace(sec, approximations=tuple(approximations.split(",")))
    if emit_loglog:
        sec = replace(sec, emit_loglog=True)
    cfg = replace(cfg, pathwise=sec)
    _validate(cfg)
    _apply_threads(cfg.threads)
    rows = run_pathwise_study(cfg)
    _execute("pathwise", cfg, rows, PATHWISE_COLUMNS, t0)
    if cfg.pathwise.emit_loglog:
        loglog_rows = [
            {"epsilon": r["epsilon"], "path_id": r["path_id"], "approximation": name, "rel_err_pct": r["re_" + name]}
            for r in rows
            for name in ("appY", "erg1Y", "erg2Y")
            if r["re_" + name] != ""
        ]
        loglog_path = cfg.output + ".loglog.csv"
        write_csv(loglog_path, ["epsilon", "path_id", "approximation", "rel_err_pct"], loglog_rows)
        click.echo(f"pathwise: wrote log-log pairs to {loglog_path}")


@cli.command("call")
@_common_options
@click.option("--strikes", type=str, default=None, help="Comma-separated attachment points.")
@click.option("--methods", type=str, default=None, help="Comma-separated subset of " + ",".join(CALL_METHODS) + ".")
@click.option("--n-outer", type=int, default=None, help="Outer Monte Carlo samples.")
@click.option("--n-inner", type=int, default=None, help="Inner samples (limCall only).")
@click.option("--n-firms", type=str, default=None, help="Pool size, single value or one per strike.")
def call_cmd(config_path, seed, output, threads, deterministic, strikes, methods, n_outer, n_inner, n_firms):
    """Tranche call prices by every selected method.

    CSV columns: method,strike,price,std_err,rel_err_vs_reference (percent,
    vs the firmsCall estimate at the same strike when available).
    """
    t0 = time.perf_counter()
    cfg = load_config(config_path, "call")
    cfg = _merge_common(cfg, seed, output, threads, deterministic)
    sec = cfg.call
    if strikes is not None:
        sec = replace(sec, strikes=tuple(float(tok) for tok in strikes.split(",")))
    if methods is not None:
        sec = replace(sec, methods=tuple(methods.split(",")))
    if n_outer is not None:
        sec = replace(sec, n_outer=n_outer)
    if n_inner is not None:
        sec = replace(sec, n_inner=n_inner)
    if n_firms is not None:
        sec = replace(sec, n_firms=tuple(int(tok) for tok in n_firms.split(",")))
    cfg = replace(cfg, call=sec)
    _validate(cfg)
    _apply_threads(cfg.threads)
    rows = run_call_study(cfg)
    _execute("call", cfg, rows, CALL_COLUMNS, t0)


@cli.command("density")
@_common_options
@click.option("--b-min", type=float, default=None)
@click.option("--b-max", type=float, default=None)
@click.option("--n-points", type=int, default=None)
@click.option("--n-inner", type=int, default=None)
@click.option("--market-seed", type=int, default=None)
def density_cmd(config_path, seed, output, threads, deterministic, b_min, b_max, n_points, n_inner, market_seed):
    """Conditional density of the terminal log-asset value on one market path."""
    t0 = time.perf_counter()
    cfg = load_config(config_path, "density")
    cfg = _merge_common(cfg, seed, output, threads, deterministic)
    sec = cfg.density
    for name, val in (("b_min", b_min), ("b_max", b_max), ("n_points", n_points), ("n_inner", n_inner), ("market_seed", market_seed)):
        if val is not None:
            sec = replace(sec, **{name: val})
    cfg = replace(cfg, density=sec)
    _validate(cfg)
    _apply_threads(cfg.threads)
    rows = run_density_study(cfg)
    _execute("density", cfg, rows, ["barrier", "density", "density_se", "cdf", "cdf_se"], t0)


@cli.command("scheme-check")
@_common_options
@click.option("--n-paths", type=int, default=None)
@click.option("--n-steps", type=int, default=None)
def scheme_check_cmd(config_path, seed, output, threads, deterministic, n_paths, n_steps):
    """Moment checks of the exact-kernel and explicit factor discretizations."""
    t0 = time.perf_counter()
    cfg = load_config(config_path, "scheme-check")
    cfg = _merge_common(cfg, seed, output, threads, deterministic)
    sec = cfg.scheme_check
    if n_paths is not None:
        sec = replace(sec, n_paths=n_paths)
    if n_steps is not None:
        sec = replace(sec, n_steps=n_steps)
    cfg = replace(cfg, scheme_check=sec)
    _validate(cfg)
    _apply_threads(cfg.threads)
    rows = run_scheme_check(cfg)
    _execute("scheme-check", cfg, rows, ["check", "observed", "expected", "tolerance", "passed"], t0)
    if not all(r["passed"] for r in rows):
        raise DomainError("scheme check failed; see CSV for details")


@cli.command("selftest")
def selftest_cmd():
    """Run the quick identity suite and report pass/fail per check."""
    checks = run_selftest()
    failed = 0
    for name, ok, detail in checks:
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failed += 0 if ok else 1
    if failed:
        click.echo(f"selftest: {failed}/{len(checks)} checks failed")
        sys.exit(1)
    click.echo(f"selftest: all {len(checks)} checks passed")


def main() -> None:
    """Console entry point mapping errors to exit codes (2 config, 3 domain)."""
    try:
        cli(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except click.Abort:
        sys.exit(2)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except DomainError as exc:
        click.echo(f"numerical domain error: {exc}", err=True)
        sys.exit(3)


if __name__ == "__main__":
    main()
