"""Command-line front end.

``kplab <command> [config.json] [--seed N] [--out DIR] [--policy auto|quadrature|mc]
[--samples N] [--tol X]``

Every command validates its JSON config fully before computing, writes one or
more CSV reports plus ``manifest.json`` into the output directory, and exits
with 0 when every verdict holds, 2 when a violation was found, 1 on error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import __version__
from .capacity import DEFAULT_MAX_ITER, DEFAULT_TOL, blahut_arimoto, capacity_contraction_check
from .configspace import (
    ContractionPair,
    PointConfiguration,
    make_contraction_pair,
    random_contraction,
    validate_configuration,
)
from .costa import SmoothedConfig, a_beta_series, costa_concavity_report, unified_inequality_check
from .errors import KplabError, MaxIterExceeded
from .flow import (
    ConvexFunctionalSpec,
    bezdek_connelly_lift,
    check_continuous_contraction,
    convolved_divergence,
    default_t_grid,
    fd_divergence,
    functional_along_flow,
    sample_smoothed,
    velocity_monotonicity,
)
from .gaussmix import EstimatorPolicy, GaussianMixture, QuadratureSpec, renyi
from .geovol import INCONSISTENT, BallUnion, kp_geometric_check, union_volume_mc
from .kpverify import ABS_TOL, DEFAULT_NOISES, DEFAULT_ORDERS, VIOLATION, verify_kp_entropy, verify_mi_contraction
from .minty import FEASIBILITY_TOL, MonotonePairs, extend_monotone
from .reports import write_csv, write_manifest

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2
COMMANDS = ("entropy", "kp-verify", "flow", "minty", "costa", "capacity", "volume", "suite")


# -- config schema -------------------------------------------------------------


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConfigurationModel(_Strict):
    points: list[list[float]] = Field(min_length=1)
    weights: Optional[list[float]] = None

    def build(self) -> PointConfiguration:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise KplabError("points must be a list of equal-length coordinate lists")
        w = np.full(len(pts), 1.0 / len(pts)) if self.weights is None else self.weights
        return validate_configuration(pts.shape[1], pts, w)


class ContractionModel(_Strict):
    method: Literal["scaling", "projection", "composition", "folding"]
    seed: int = 0


class GridModel(_Strict):
    points: Optional[int] = Field(default=None, ge=3)
    extent_sd: float = Field(default=8.0, gt=0)
    resolution: float = Field(default=4.0, gt=0)


class PolicyModel(_Strict):
    method: Literal["auto", "quadrature", "mc"] = "auto"
    samples: int = Field(default=10**5, ge=1000)
    grid: GridModel = GridModel()

    def build(self, seed: int) -> EstimatorPolicy:
        grid = QuadratureSpec(self.grid.points, self.grid.extent_sd, self.grid.resolution)
        return EstimatorPolicy(self.method, self.samples, seed, grid)


class _Base(_Strict):
    seed: int = Field(default=0, ge=0)
    out: str = "kplab-out"
    policy: PolicyModel = PolicyModel()
    tol: Optional[float] = Field(default=None, gt=0)


class _PairBase(_Base):
    source: ConfigurationModel
    target: Optional[ConfigurationModel] = None
    contraction: Optional[ContractionModel] = None

    @model_validator(mode="after")
    def _one_target(self):
        if (self.target is None) == (self.contraction is None):
            raise ValueError("give exactly one of 'target' or 'contraction'")
        return self

    def pair(self) -> ContractionPair:
        src = self.source.build()
        if self.contraction is not None:
            return random_contraction(src, self.contraction.method, self.contraction.seed)
        tgt = self.target.build()
        return make_contraction_pair(src, tgt.with_weights(src.weights) if self.target.weights is None else tgt)


class EntropyConfig(_Base):
    configuration: ConfigurationModel
    s: float = Field(default=1.0, gt=0)
    covariance: Optional[list[list[float]]] = None
    orders: list[float] = Field(default_factory=lambda: list(DEFAULT_ORDERS), min_length=1)


class KpVerifyConfig(_PairBase):
    orders: list[float] = Field(default_factory=lambda: list(DEFAULT_ORDERS), min_length=1)
    noises: list[float] = Field(default_factory=lambda: list(DEFAULT_NOISES), min_length=1)
    mutual_information: bool = False


class FunctionalModel(_Strict):
    kind: Literal["power", "xlogx", "hockey"]
    param: Optional[float] = None


class FlowConfig(_PairBase):
    s: float = Field(default=1.0, gt=0)
    t_points: int = Field(default=21, ge=2)
    functionals: list[FunctionalModel] = Field(
        default_factory=lambda: [FunctionalModel(kind="power", param=2.0), FunctionalModel(kind="xlogx")]
    )
    divergence_points: int = Field(default=100, ge=1)


class MintyConfig(_Base):
    xs: list[list[float]] = Field(min_length=1)
    ys: list[list[float]] = Field(min_length=1)
    x0: list[float]


class CostaConfig(_Base):
    configuration: ConfigurationModel
    s0: float = Field(default=0.0, ge=0)
    s_grid: list[float] = Field(default_factory=lambda: np.linspace(0.5, 4.0, 8).tolist(), min_length=3)
    beta_grid: list[float] = Field(default_factory=lambda: np.linspace(0.0, 1.0, 11).tolist(), min_length=2)
    linear_map: Optional[list[list[float]]] = None


class CapacityConfig(_Base):
    configuration: ConfigurationModel
    s: float = Field(default=1.0, gt=0)
    max_iter: int = Field(default=DEFAULT_MAX_ITER, ge=1)
    target: Optional[ConfigurationModel] = None
    contraction: Optional[ContractionModel] = None

    @model_validator(mode="after")
    def _at_most_one(self):
        if self.target is not None and self.contraction is not None:
            raise ValueError("give at most one of 'target' or 'contraction'")
        return self


class VolumeConfig(_Base):
    centers: list[list[float]] = Field(min_length=1)
    radius: float = Field(default=1.0, gt=0)
    samples: int = Field(default=10**5, ge=10**4)
    target: Optional[list[list[float]]] = None
    contraction: Optional[ContractionModel] = None

    @model_validator(mode="after")
    def _at_most_one(self):
        if self.target is not None and self.contraction is not None:
            raise ValueError("give at most one of 'target' or 'contraction'")
        return self


class SuiteConfig(_Base):
    quick: bool = False
    criteria: Optional[list[int]] = None


SCHEMAS: dict[str, type[_Base]] = {
    "entropy": EntropyConfig,
    "kp-verify": KpVerifyConfig,
    "flow": FlowConfig,
    "minty": MintyConfig,
    "costa": CostaConfig,
    "capacity": CapacityConfig,
    "volume": VolumeConfig,
    "suite": SuiteConfig,
}


class ConfigError(Exception):
    pass


def load_config(command: str, path: Optional[str], overrides: dict) -> _Base:
    """Parse, apply flag overrides and validate; raises ConfigError with line or field diagnostics."""
    data: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
    for key in ("seed", "out", "tol"):
        if overrides.get(key) is not None:
            data[key] = overrides[key]
    if overrides.get("policy") is not None or overrides.get("samples") is not None:
        pol = data.get("policy")
        pol = dict(pol) if isinstance(pol, dict) else {}
        if overrides.get("policy") is not None:
            pol["method"] = overrides["policy"]
        if overrides.get("samples") is not None:
            pol["samples"] = overrides["samples"]
        data["policy"] = pol
    try:
        return SCHEMAS[command].model_validate(data)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "<root>"
            lines.append(f"{path or '<flags>'}: field '{loc}': {err['msg']}")
        raise ConfigError("\n".join(lines)) from exc


# -- commands ------------------------------------------------------------------


class Outcome:
    def __init__(self, out: Path):
        self.out = out
        self.files: list[str] = []
        self.violation = False
        self.row_errors = 0

    def csv(self, name: str, columns, rows) -> None:
        write_csv(self.out / name, columns, rows)
        self.files.append(name)


def _mc_samples(method: str, policy: EstimatorPolicy) -> int:
    return policy.samples if method == "monte-carlo" else 0


def cmd_entropy(cfg: EntropyConfig, res: Outcome) -> None:
    config = cfg.configuration.build()
    cov = None if cfg.covariance is None else np.asarray(cfg.covariance, float)
    mix = GaussianMixture.from_configuration(config, cfg.s, cov)
    policy = cfg.policy.build(cfg.seed)
    rows = []
    for alpha in cfg.orders:
        try:
            est = renyi(mix, alpha, policy)
            rows.append(
                {
                    "alpha": alpha,
                    "entropy": est.value,
                    "entropy_power": math.exp(2 * est.value / mix.dim) if math.isfinite(est.value) else math.inf,
                    "std_err": est.std_err,
                    "method": est.method,
                    "samples": _mc_samples(est.method, policy),
                    "seed": cfg.seed,
                    "error": "",
                }
            )
        except KplabError as exc:
            res.row_errors += 1
            rows.append({"alpha": alpha, "entropy": math.nan, "std_err": math.nan, "seed": cfg.seed, "error": str(exc)})
    res.csv("entropy.csv", ["alpha", "entropy", "entropy_power", "std_err", "method", "samples", "seed", "error"], rows)


KP_COLUMNS = ["pair", "alpha", "s", "h_source", "h_target", "gap", "std_err", "method", "samples", "seed", "verdict", "note"]


def cmd_kp_verify(cfg: KpVerifyConfig, res: Outcome) -> None:
    pair = cfg.pair()
    policy = cfg.policy.build(cfg.seed)
    abs_tol = cfg.tol or ABS_TOL
    rep = verify_kp_entropy(pair, cfg.orders, cfg.noises, policy, pair_id=pair.label or "pair", abs_tol=abs_tol)
    rows = []
    for r in rep.rows:
        if r.verdict == "skipped" and r.alpha != 0:
            res.row_errors += 1
        rows.append(
            {
                "pair": rep.pair_id,
                "alpha": r.alpha,
                "s": r.s,
                "h_source": r.h_source,
                "h_target": r.h_target,
                "gap": r.gap,
                "std_err": r.std_err,
                "method": r.method,
                "samples": _mc_samples(r.method, policy),
                "seed": cfg.seed,
                "verdict": r.verdict,
                "note": r.note,
            }
        )
    res.violation |= not rep.ok
    res.csv("kp_verify.csv", KP_COLUMNS, rows)
    if cfg.mutual_information:
        mi_rows = []
        for s in cfg.noises:
            mi = verify_mi_contraction(pair, s, policy, abs_tol)
            res.violation |= mi.verdict == VIOLATION
            mi_rows.append(
                {
                    "s": s,
                    "i_source": mi.i_source,
                    "i_target": mi.i_target,
                    "gap": mi.gap,
                    "std_err": mi.std_err,
                    "method": mi.method,
                    "samples": _mc_samples(mi.method, policy),
                    "seed": cfg.seed,
                    "verdict": mi.verdict,
                }
            )
        res.csv("mutual_information.csv", list(mi_rows[0].keys()), mi_rows)


def cmd_flow(cfg: FlowConfig, res: Outcome) -> None:
    pair = cfg.pair()
    fam = bezdek_connelly_lift(pair)
    grid = default_t_grid(cfg.t_points)
    policy = cfg.policy.build(cfg.seed)
    tol = cfg.tol or 1e-8
    rows = []
    for spec in cfg.functionals:
        phi = ConvexFunctionalSpec(spec.kind, spec.param)
        series = functional_along_flow(fam, phi, cfg.s, grid, policy)
        ok = series.nondecreasing(abs_tol=tol, n_sigma=3.0)
        res.violation |= not ok
        for j, t in enumerate(series.t):
            rows.append(
                {
                    "functional": series.functional,
                    "t": t,
                    "value": series.values[j],
                    "std_err": series.std_errs[j],
                    "step_std_err": series.step_std_errs[j - 1] if j else 0.0,
                    "method": series.method,
                    "samples": _mc_samples(series.method, policy),
                    "seed": cfg.seed,
                    "nondecreasing": ok,
                }
            )
    res.csv("flow_functionals.csv", list(rows[0].keys()), rows)
    div_rows = []
    for j, t in enumerate(grid):
        x = sample_smoothed(fam, t, cfg.s, cfg.divergence_points, cfg.seed + j)
        div = np.atleast_1d(convolved_divergence(fam, t, x, cfg.s))
        fd = np.array([fd_divergence(fam, t, xi, cfg.s) for xi in x])
        top = float(div.max())
        res.violation |= top > 1e-9
        div_rows.append(
            {
                "t": t,
                "points": cfg.divergence_points,
                "seed": cfg.seed + j,
                "max_divergence": top,
                "min_divergence": float(div.min()),
                "max_fd_mismatch": float(np.max(np.abs(div - fd))),
            }
        )
    res.csv("flow_divergence.csv", list(div_rows[0].keys()), div_rows)
    check = check_continuous_contraction(fam, grid)
    vel = velocity_monotonicity(fam, grid)
    res.violation |= (not check.ok) or vel > 1e-8
    res.csv(
        "flow_trajectories.csv",
        ["dim", "k", "map", "max_velocity_inner", "max_distance_increase", "continuous_contraction"],
        [{"dim": fam.dim, "k": fam.k, "map": pair.label, "max_velocity_inner": vel, "max_distance_increase": check.max_distance_increase, "continuous_contraction": check.ok}],
    )


def cmd_minty(cfg: MintyConfig, res: Outcome) -> None:
    pairs = MonotonePairs(np.asarray(cfg.xs, float), np.asarray(cfg.ys, float))
    if not pairs.is_monotone():
        raise KplabError(f"input pairs are not monotone (min inner product {pairs.min_inner():.17g})")
    x0 = np.asarray(cfg.x0, float)
    y0 = extend_monotone(pairs, x0)
    after = pairs.augmented(x0, y0).min_inner()
    feasible = after >= -FEASIBILITY_TOL
    res.violation |= not feasible
    res.csv(
        "minty.csv",
        ["component", "x0", "y0", "min_inner_before", "min_inner_after", "feasible"],
        [
            {"component": j, "x0": x0[j], "y0": y0[j], "min_inner_before": pairs.min_inner(), "min_inner_after": after, "feasible": feasible}
            for j in range(len(x0))
        ],
    )


def cmd_costa(cfg: CostaConfig, res: Outcome) -> None:
    config = cfg.configuration.build()
    lin = None if cfg.linear_map is None else np.asarray(cfg.linear_map, float)
    x = SmoothedConfig(config, cfg.s0, lin)
    policy = cfg.policy.build(cfg.seed)
    floor = cfg.tol or 1e-9
    rep = costa_concavity_report(x, cfg.s_grid, policy)
    concave = rep.concave(abs_tol=floor, n_sigma=3.0)
    res.violation |= not concave
    res.csv(
        "costa_concavity.csv",
        ["s", "entropy_power", "std_err", "second_difference", "second_std_err", "method", "seed", "concave"],
        [
            {
                "s": s,
                "entropy_power": rep.entropy_powers[j],
                "std_err": rep.std_errs[j],
                "second_difference": rep.second_differences[j - 1] if 0 < j < len(rep.s) - 1 else None,
                "second_std_err": rep.second_std_errs[j - 1] if 0 < j < len(rep.s) - 1 else None,
                "method": rep.method,
                "seed": cfg.seed,
                "concave": concave,
            }
            for j, s in enumerate(rep.s)
        ],
    )
    if cfg.s0 > 0:
        ab = a_beta_series(x, cfg.beta_grid, policy)
        mono = ab.nondecreasing(abs_tol=floor, n_sigma=3.0)
        res.violation |= not mono
        res.csv(
            "costa_abeta.csv",
            ["beta", "A", "std_err", "N_x", "nondecreasing"],
            [{"beta": b, "A": v, "std_err": e, "N_x": ab.n_x, "nondecreasing": mono} for b, v, e in zip(ab.beta, ab.values, ab.std_errs)],
        )
    chk = unified_inequality_check(x, policy)
    res.violation |= chk.verdict == VIOLATION
    res.csv(
        "costa_unified.csv",
        ["lipschitz", "N_x_plus_z", "N_ax_plus_z", "N_x", "gap", "std_err", "verdict", "note"],
        [
            {
                "lipschitz": chk.lipschitz,
                "N_x_plus_z": chk.n_x_plus_z,
                "N_ax_plus_z": chk.n_ax_plus_z,
                "N_x": chk.n_x,
                "gap": chk.gap,
                "std_err": chk.std_err,
                "verdict": chk.verdict,
                "note": "; ".join(chk.notes),
            }
        ],
    )


def _history_rows(label: str, result) -> list[dict]:
    return [{"alphabet": label, "iteration": j, "lower": lo, "bracket": br} for j, (lo, br) in enumerate(result.history)]


CAPACITY_COLUMNS = ["alphabet", "capacity", "lower", "upper", "iterations", "converged", "method", "weights"]


def _capacity_row(label: str, r) -> dict:
    return {
        "alphabet": label,
        "capacity": r.capacity,
        "lower": r.lower,
        "upper": r.upper,
        "iterations": len(r.history),
        "converged": r.converged,
        "method": r.method,
        "weights": r.weights,
    }


def cmd_capacity(cfg: CapacityConfig, res: Outcome) -> None:
    config = cfg.configuration.build()
    policy = cfg.policy.build(cfg.seed)
    tol = cfg.tol or DEFAULT_TOL
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MaxIterExceeded)
        if cfg.target is None and cfg.contraction is None:
            r = blahut_arimoto(config, cfg.s, tol, cfg.max_iter, policy)
            res.csv("capacity.csv", CAPACITY_COLUMNS, [_capacity_row("source", r)])
            res.csv("capacity_history.csv", ["alphabet", "iteration", "lower", "bracket"], _history_rows("source", r))
            return
        if cfg.contraction is not None:
            pair = random_contraction(config, cfg.contraction.method, cfg.contraction.seed)
        else:
            tgt = cfg.target.build()
            pair = make_contraction_pair(config, tgt.with_weights(config.weights) if cfg.target.weights is None else tgt)
        cmp = capacity_contraction_check(pair, cfg.s, tol, cfg.max_iter, policy)
    res.violation |= cmp.verdict == VIOLATION
    rows = [_capacity_row("source", cmp.source), _capacity_row("target", cmp.target)]
    res.csv("capacity.csv", CAPACITY_COLUMNS, rows)
    res.csv(
        "capacity_history.csv",
        ["alphabet", "iteration", "lower", "bracket"],
        _history_rows("source", cmp.source) + _history_rows("target", cmp.target),
    )
    res.csv(
        "capacity_comparison.csv",
        ["gap", "verdict", "pointwise_source", "pointwise_target", "pointwise_ok"],
        [{"gap": cmp.gap, "verdict": cmp.verdict, "pointwise_source": cmp.pointwise_source, "pointwise_target": cmp.pointwise_target, "pointwise_ok": cmp.pointwise_ok}],
    )


def cmd_volume(cfg: VolumeConfig, res: Outcome) -> None:
    centers = np.asarray(cfg.centers, float)
    if cfg.target is None and cfg.contraction is None:
        vol, se = union_volume_mc(BallUnion(centers, cfg.radius), cfg.samples, cfg.seed)
        res.csv(
            "volume.csv",
            ["dim", "k", "radius", "samples", "seed", "volume", "std_err"],
            [{"dim": centers.shape[1], "k": len(centers), "radius": cfg.radius, "samples": cfg.samples, "seed": cfg.seed, "volume": vol, "std_err": se}],
        )
        return
    src = validate_configuration(centers.shape[1], centers, np.full(len(centers), 1.0 / len(centers)))
    if cfg.contraction is not None:
        pair = random_contraction(src, cfg.contraction.method, cfg.contraction.seed)
    else:
        tgt = np.asarray(cfg.target, float)
        pair = make_contraction_pair(src, validate_configuration(tgt.shape[1], tgt, src.weights))
    chk = kp_geometric_check(pair, cfg.radius, cfg.samples, cfg.seed)
    res.violation |= chk.verdict == INCONSISTENT
    res.csv(
        "volume.csv",
        ["dim", "k", "radius", "samples", "seed", "vol_source", "vol_target", "gap", "std_err", "verdict", "status"],
        [
            {
                "dim": pair.source.dim,
                "k": pair.k,
                "radius": cfg.radius,
                "samples": cfg.samples,
                "seed": cfg.seed,
                "vol_source": chk.vol_source,
                "vol_target": chk.vol_target,
                "gap": chk.gap,
                "std_err": chk.std_err,
                "verdict": chk.verdict,
                "status": chk.status,
            }
        ],
    )


def cmd_suite(cfg: SuiteConfig, res: Outcome) -> dict:
    from .suite import CRITERIA, SuiteOptions, run_suite

    only = cfg.criteria
    if only is not None:
        unknown = sorted(set(only) - set(CRITERIA))
        if unknown:
            raise KplabError(f"unknown criteria {unknown}; valid are 1-{max(CRITERIA)}")
    results = run_suite(SuiteOptions(cfg.seed, cfg.quick), only, res.out)
    res.files += [f"{r.key}.csv" for r in results] + ["suite_summary.csv"]
    res.violation |= not all(r.passed for r in results)
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.number:2d} {r.title}: {r.detail}")
    return {"criterion_seconds": {r.key: round(r.seconds, 3) for r in results}}


HANDLERS = {
    "entropy": cmd_entropy,
    "kp-verify": cmd_kp_verify,
    "flow": cmd_flow,
    "minty": cmd_minty,
    "costa": cmd_costa,
    "capacity": cmd_capacity,
    "volume": cmd_volume,
    "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kplab", description="Entropic Kneser-Poulsen experiments.")
    p.add_argument("--version", action="version", version=f"kplab {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("config", nargs="?", help="JSON config file (optional for 'suite')")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", help="output directory (default kplab-out)")
    p.add_argument("--policy", choices=("auto", "quadrature", "mc"), help="estimator selection")
    p.add_argument("--samples", type=int, help="Monte Carlo sample count")
    p.add_argument("--tol", type=float, help="command-specific tolerance")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "out": args.out, "policy": args.policy, "samples": args.samples, "tol": args.tol}
    try:
        cfg = load_config(args.command, args.config, overrides)
    except ConfigError as exc:
        print(f"kplab: config error\n{exc}", file=sys.stderr)
        return EXIT_ERROR
    out = Path(cfg.out)
    res = Outcome(out)
    start = time.perf_counter()
    extra = {}
    try:
        out.mkdir(parents=True, exist_ok=True)
        extra = HANDLERS[args.command](cfg, res) or {}
        code = EXIT_VIOLATION if res.violation else EXIT_OK
        error = None
    except (KplabError, ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        code, error = EXIT_ERROR, f"{type(exc).__name__}: {exc}"
        print(f"kplab: {error}", file=sys.stderr)
    wall = time.perf_counter() - start
    try:
        write_manifest(
            out / "manifest.json",
            command=args.command,
            config=cfg.model_dump(),
            seed=cfg.seed,
            outputs=res.files,
            exit_code=code,
            error=error,
            row_errors=res.row_errors,
            wall_time_seconds=round(wall, 3),
            **extra,
        )
    except OSError as exc:
        print(f"kplab: cannot write manifest: {exc}", file=sys.stderr)
        code = EXIT_ERROR
    if code != EXIT_ERROR:
        print(f"kplab {args.command}: {'violations found' if code == EXIT_VIOLATION else 'all verdicts hold'}; reports in {out}")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
