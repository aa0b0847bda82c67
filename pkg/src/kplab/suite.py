"""The acceptance battery.

Each ``criterion_*`` function builds its own random instances from the master
seed, runs the check and returns a :class:`CriterionResult` holding a
pass/fail flag and plot-ready rows.  Everything downstream of the seed is
deterministic, so two runs with the same seed write byte-identical CSVs.
Wall-clock times are kept out of the rows and only go to the run manifest.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import _rng
from .capacity import blahut_arimoto, capacity_contraction_check, grid_capacity_binary
from .configspace import (
    RANDOM_METHODS,
    random_configuration,
    random_contraction,
    validate_configuration,
)
from .costa import SmoothedConfig, a_beta_series, costa_concavity_report, random_linear_contraction, unified_inequality_check
from .errors import MaxIterExceeded
from .flow import (
    ConvexFunctionalSpec,
    bezdek_connelly_lift,
    check_continuous_contraction,
    convolved_divergence,
    default_t_grid,
    fd_divergence,
    functional_along_flow,
    posterior,
    sample_smoothed,
    velocity_monotonicity,
)
from .gaussmix import (
    EstimatorPolicy,
    GaussianMixture,
    renyi_exact_integer,
    renyi_monte_carlo,
    renyi_quadrature,
)
from .geovol import CONSISTENT, BallUnion, kp_geometric_check, lens_union_area, union_volume_mc
from .kpverify import DEFAULT_NOISES, DEFAULT_ORDERS, HOLDS, VIOLATION, WITHIN_NOISE, verify_kp_entropy
from .minty import FEASIBILITY_TOL, MonotonePairs, extend_monotone, extend_velocity_at_mean, substituted_divergence_terms
from .reports import write_csv

NUMERIC_FLOOR = 1e-9  # allowance for deterministic (quadrature) second differences and steps


@dataclass
class CriterionResult:
    number: int
    key: str
    title: str
    passed: bool
    detail: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def instances(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class SuiteOptions:
    seed: int = 0
    quick: bool = False  # smaller instance counts, for smoke tests of the plumbing

    def count(self, full: int, quick: int) -> int:
        return quick if self.quick else full


def instance_seed(master: int, criterion: int, index: int) -> int:
    return (master * 1_000_003 + criterion * 10_007 + index) % (1 << 63)


def _gen(opts: SuiteOptions, criterion: int, index: int) -> np.random.Generator:
    return _rng.generator(instance_seed(opts.seed, criterion, index))


# -- 1 ------------------------------------------------------------------------


def criterion_1(opts: SuiteOptions) -> CriterionResult:
    samples = opts.count(10**6, 10**5)
    rows = []
    for i in range(opts.count(50, 4)):
        gen = _gen(opts, 1, i)
        n = 1 + i % 2
        config = random_configuration(gen, n, 1 + int(gen.integers(5)))
        s = float(gen.uniform(0.25, 4.0))
        mix = GaussianMixture.from_configuration(config, s)
        for alpha in (2, 3):
            ex = renyi_exact_integer(mix, alpha)
            quad = renyi_quadrature(mix, alpha)
            mc_seed = instance_seed(opts.seed, 1, 1000 + 2 * i + alpha)
            mc = renyi_monte_carlo(mix, alpha, samples, mc_seed, jackknife=True)
            rel = abs(ex.value - quad.value) / max(abs(ex.value), 1e-300)
            z = (mc.value - ex.value) / mc.std_err
            rows.append(
                {
                    "instance": i,
                    "dim": n,
                    "k": config.k,
                    "s": s,
                    "alpha": alpha,
                    "exact": ex.value,
                    "quadrature": quad.value,
                    "rel_diff": rel,
                    "mc": mc.value,
                    "mc_std_err": mc.std_err,
                    "mc_jackknife_std_err": mc.metadata["jackknife_std_err"],
                    "mc_samples": samples,
                    "mc_seed": mc_seed,
                    "z": z,
                    "quad_ok": rel <= 1e-6,
                    "mc_ok": abs(z) <= 3.0,
                }
            )
    bad_q = sum(not r["quad_ok"] for r in rows)
    bad_mc = sum(not r["mc_ok"] for r in rows)
    worst_rel = max(r["rel_diff"] for r in rows)
    worst_z = max(abs(r["z"]) for r in rows)
    ratio = [r["mc_jackknife_std_err"] / r["mc_std_err"] for r in rows]
    detail = (
        f"max rel diff {worst_rel:.2e}, max |z| {worst_z:.2f}, "
        f"jackknife/delta se ratio in [{min(ratio):.2f}, {max(ratio):.2f}], "
        f"{bad_q} quadrature and {bad_mc} MC failures"
    )
    cols = list(rows[0].keys())
    return CriterionResult(1, "c01_oracle_agreement", "Oracle agreement", bad_q == 0 and bad_mc == 0, detail, cols, rows)


# -- 2 ------------------------------------------------------------------------


def _random_pair(opts: SuiteOptions, criterion: int, i: int, dims, kmax: int, kmin: int = 1):
    gen = _gen(opts, criterion, i)
    n = dims[i % len(dims)]
    config = random_configuration(gen, n, kmin + int(gen.integers(kmax - kmin + 1)))
    method = RANDOM_METHODS[i % len(RANDOM_METHODS)]
    return random_contraction(config, method, instance_seed(opts.seed, criterion, 5000 + i))


def criterion_2(opts: SuiteOptions) -> CriterionResult:
    samples = opts.count(10**5, 2 * 10**4)
    rows = []
    for i in range(opts.count(200, 6)):
        pair = _random_pair(opts, 2, i, (1, 2, 3), 8)
        policy = EstimatorPolicy(samples=samples, seed=instance_seed(opts.seed, 2, 9000 + i))
        rep = verify_kp_entropy(pair, DEFAULT_ORDERS, DEFAULT_NOISES, policy, pair_id=f"pair-{i}")
        for r in rep.rows:
            rows.append(
                {
                    "pair": i,
                    "dim": pair.source.dim,
                    "k": pair.k,
                    "map": pair.label,
                    "alpha": r.alpha,
                    "s": r.s,
                    "h_source": r.h_source,
                    "h_target": r.h_target,
                    "gap": r.gap,
                    "std_err": r.std_err,
                    "method": r.method,
                    "samples": samples if r.method == "monte-carlo" else 0,
                    "seed": policy.seed,
                    "verdict": r.verdict,
                }
            )
    counts = {v: sum(r["verdict"] == v for r in rows) for v in (HOLDS, WITHIN_NOISE, VIOLATION)}
    detail = f"{len(rows)} comparisons: " + ", ".join(f"{v}={c}" for v, c in counts.items())
    return CriterionResult(2, "c02_entropic_kp", "Entropic Kneser-Poulsen", counts[VIOLATION] == 0, detail, list(rows[0].keys()), rows)


# -- lifts shared by 3, 4, 5 and 6 --------------------------------------------


def _lifts(opts: SuiteOptions):
    out = []
    for i in range(opts.count(25, 3)):
        pair = _random_pair(opts, 3, i, (1, 2), 6, kmin=2)
        s = (0.25, 1.0, 4.0)[i % 3]
        out.append((i, pair, bezdek_connelly_lift(pair), s))
    return out


def criterion_3(opts: SuiteOptions) -> CriterionResult:
    grid = default_t_grid(21)
    samples = opts.count(10**5, 2 * 10**4)
    rows, ok = [], True
    for i, pair, fam, s in _lifts(opts):
        policy = EstimatorPolicy(samples=samples, seed=instance_seed(opts.seed, 3, 7000 + i))
        for phi, n_sigma in ((ConvexFunctionalSpec("power", 2.0), 0.0), (ConvexFunctionalSpec("xlogx"), 3.0)):
            series = functional_along_flow(fam, phi, s, grid, policy)
            good = series.nondecreasing(abs_tol=1e-8, n_sigma=n_sigma)
            ok &= good
            steps = series.steps
            for j, t in enumerate(series.t):
                rows.append(
                    {
                        "lift": i,
                        "dim": fam.dim,
                        "k": fam.k,
                        "s": s,
                        "functional": series.functional,
                        "method": series.method,
                        "samples": samples if series.method == "monte-carlo" else 0,
                        "seed": policy.seed,
                        "t": t,
                        "value": series.values[j],
                        "std_err": series.std_errs[j],
                        "step": steps[j - 1] if j else 0.0,
                        "step_std_err": series.step_std_errs[j - 1] if j else 0.0,
                        "series_nondecreasing": good,
                    }
                )
    worst = min((r["step"] + max(1e-8, 3 * r["step_std_err"])) for r in rows if r["t"] > 0)
    detail = f"smallest step margin {worst:.3e} over {len(rows)} grid values"
    return CriterionResult(3, "c03_flow_monotonicity", "Flow monotonicity", bool(ok), detail, list(rows[0].keys()), rows)


def criterion_4(opts: SuiteOptions) -> CriterionResult:
    grid = default_t_grid(21)
    per_t = opts.count(100, 10)
    rows = []
    for i, pair, fam, s in _lifts(opts):
        for j, t in enumerate(grid):
            seed = instance_seed(opts.seed, 4, 100 * i + j)
            x = sample_smoothed(fam, t, s, per_t, seed)
            div = np.atleast_1d(convolved_divergence(fam, t, x, s))
            fd = np.array([fd_divergence(fam, t, xi, s) for xi in x])
            rows.append(
                {
                    "lift": i,
                    "dim": fam.dim,
                    "s": s,
                    "t": t,
                    "points": per_t,
                    "seed": seed,
                    "max_divergence": float(div.max()),
                    "min_divergence": float(div.min()),
                    "max_fd_mismatch": float(np.max(np.abs(div - fd))),
                }
            )
    top = max(r["max_divergence"] for r in rows)
    mis = max(r["max_fd_mismatch"] for r in rows)
    passed = top <= 1e-9 and mis <= 1e-6
    detail = f"max divergence {top:.3e}, max |exact - finite difference| {mis:.3e}"
    return CriterionResult(4, "c04_divergence", "Divergence nonpositivity", passed, detail, list(rows[0].keys()), rows)


def criterion_5(opts: SuiteOptions) -> CriterionResult:
    grid = default_t_grid(101)
    rows = []
    for i, pair, fam, s in _lifts(opts):
        check = check_continuous_contraction(fam, grid)
        rows.append(
            {
                "lift": i,
                "dim": fam.dim,
                "k": fam.k,
                "map": pair.label,
                "t_points": len(grid),
                "max_velocity_inner": velocity_monotonicity(fam, grid),
                "max_distance_increase": check.max_distance_increase,
                "continuous_contraction": check.ok,
            }
        )
    top = max(r["max_velocity_inner"] for r in rows)
    passed = top <= 1e-8 and all(r["continuous_contraction"] for r in rows)
    detail = f"max pairwise <dv, dx> {top:.3e}"
    return CriterionResult(5, "c05_velocity_monotonicity", "Velocity monotonicity", passed, detail, list(rows[0].keys()), rows)


# -- 6 ------------------------------------------------------------------------


def _monotone_instance(gen: np.random.Generator, i: int) -> MonotonePairs:
    n = 1 + i % 4
    k = 2 + int(gen.integers(9))
    x = gen.uniform(-2.0, 2.0, size=(k, n))
    b = gen.standard_normal((n, n))
    skew = gen.standard_normal((n, n))
    m = b @ b.T + (skew - skew.T)
    y = x @ m.T + gen.standard_normal(n)
    if i % 2:
        # gradient of the convex function |x|^4 / 4
        y = y + np.sum(x * x, axis=1, keepdims=True) * x
    return MonotonePairs(x, y)


def criterion_6(opts: SuiteOptions) -> CriterionResult:
    rows = []
    for i in range(opts.count(100, 10)):
        gen = _gen(opts, 6, i)
        pairs = _monotone_instance(gen, i)
        lam = gen.dirichlet(np.ones(len(pairs.xs)))
        x0 = lam @ pairs.xs
        y0 = extend_monotone(pairs, x0)
        post_min = pairs.augmented(x0, y0).min_inner()
        rows.append(
            {
                "kind": "random",
                "instance": i,
                "dim": pairs.dim,
                "k": len(pairs.xs),
                "min_inner_before": pairs.min_inner(),
                "min_inner_after": post_min,
                "identity_error": 0.0,
                "max_substituted_term": 0.0,
                "feasible": post_min >= -FEASIBILITY_TOL,
            }
        )
    # constant substitution on posteriors of the smoothed flow
    for i, pair, fam, s in _lifts(opts):
        for j, t in enumerate(default_t_grid(5)):
            x = sample_smoothed(fam, t, s, 4, instance_seed(opts.seed, 6, 1000 + 10 * i + j))
            for xi in x:
                post = posterior(fam, t, xi, s)
                w = extend_velocity_at_mean(post)
                terms = substituted_divergence_terms(post, w)
                c, v, p = post.positions, post.velocities, post.p
                mean = p @ c
                with_w = float(p @ np.einsum("kn,kn->k", v - w, c - mean))
                with_mean = float(p @ np.einsum("kn,kn->k", v - p @ v, c - mean))
                pairs = MonotonePairs(c, -v)
                post_min = pairs.augmented(mean, -w).min_inner()
                rows.append(
                    {
                        "kind": "posterior",
                        "instance": i,
                        "dim": fam.dim,
                        "k": fam.k,
                        "min_inner_before": pairs.min_inner(),
                        "min_inner_after": post_min,
                        "identity_error": abs(with_w - with_mean),
                        "max_substituted_term": float(terms.max()),
                        "feasible": post_min >= -FEASIBILITY_TOL,
                    }
                )
    infeasible = sum(not r["feasible"] for r in rows)
    ident = max(r["identity_error"] for r in rows)
    passed = infeasible == 0 and ident <= 1e-12
    detail = f"{infeasible} infeasible, max identity error {ident:.3e}"
    return CriterionResult(6, "c06_minty", "Minty feasibility", passed, detail, list(rows[0].keys()), rows)


# -- 7 ------------------------------------------------------------------------


def criterion_7(opts: SuiteOptions) -> CriterionResult:
    s_grid = np.linspace(0.5, 4.0, 8)
    beta_grid = np.linspace(0.0, 1.0, 11)
    rows, ok = [], True
    specs = []
    for i in range(opts.count(20, 4)):
        gen = _gen(opts, 7, i)
        n = 1 + i % 2
        config = random_configuration(gen, n, 2 + int(gen.integers(4)))
        s0 = 0.0 if (i // 2) % 2 == 0 else float(gen.uniform(0.1, 1.0))
        specs.append(("mixture", i, config, s0))
    for j, (n, s0) in enumerate(((1, 0.0), (1, 0.5), (2, 0.0), (2, 0.5))):
        gen = _gen(opts, 7, 500 + j)
        pt = gen.uniform(-1, 1, size=(1, n))
        specs.append(("single", j, validate_configuration(n, pt, [1.0]), s0))
    for kind, i, config, s0 in specs:
        x = SmoothedConfig(config, s0)
        rep = costa_concavity_report(x, s_grid)
        if kind == "single":
            good = bool(np.all(np.abs(rep.second_differences) <= 1e-9))
        else:
            good = rep.concave(abs_tol=NUMERIC_FLOOR, n_sigma=3.0)
        ok &= good
        for j, sec in enumerate(rep.second_differences):
            rows.append(
                {
                    "kind": kind,
                    "config": i,
                    "dim": config.dim,
                    "k": config.k,
                    "s0": s0,
                    "quantity": "second_difference",
                    "x": s_grid[j + 1],
                    "value": sec,
                    "std_err": rep.second_std_errs[j],
                    "method": rep.method,
                    "ok": good,
                }
            )
        if s0 > 0:
            ab = a_beta_series(x, beta_grid)
            good = ab.nondecreasing(abs_tol=NUMERIC_FLOOR, n_sigma=3.0)
            ok &= good
            for b, val, se in zip(ab.beta, ab.values, ab.std_errs):
                rows.append(
                    {
                        "kind": kind,
                        "config": i,
                        "dim": config.dim,
                        "k": config.k,
                        "s0": s0,
                        "quantity": "A_beta",
                        "x": b,
                        "value": val,
                        "std_err": se,
                        "method": rep.method,
                        "ok": good,
                    }
                )
    worst = max(r["value"] for r in rows if r["quantity"] == "second_difference" and r["kind"] == "mixture")
    single = max(abs(r["value"]) for r in rows if r["quantity"] == "second_difference" and r["kind"] == "single")
    detail = f"max second difference {worst:.3e}, single-point |second difference| {single:.3e}"
    return CriterionResult(7, "c07_costa", "Costa concavity", bool(ok), detail, list(rows[0].keys()), rows)


# -- 8 ------------------------------------------------------------------------


def criterion_8(opts: SuiteOptions) -> CriterionResult:
    rows = []
    for i in range(opts.count(20, 4)):
        gen = _gen(opts, 8, i)
        n = 1 + i % 2
        config = random_configuration(gen, n, 1 + int(gen.integers(5)))
        if i == 0:
            a, kind, s0 = np.eye(n), "identity", float(gen.uniform(0.1, 1.0))
        elif i == 1:
            a, kind, s0 = np.zeros((n, n)), "zero", 0.5
        else:
            a, kind = random_linear_contraction(gen, n), "random"
            s0 = 0.0 if i % 3 == 0 else float(gen.uniform(0.1, 1.0))
        chk = unified_inequality_check(SmoothedConfig(config, s0, a))
        ok = chk.verdict != VIOLATION and (kind != "identity" or abs(chk.gap) <= 1e-9)
        rows.append(
            {
                "instance": i,
                "map": kind,
                "dim": n,
                "k": config.k,
                "s0": s0,
                "lipschitz": chk.lipschitz,
                "N_x_plus_z": chk.n_x_plus_z,
                "N_ax_plus_z": chk.n_ax_plus_z,
                "N_x": chk.n_x,
                "gap": chk.gap,
                "std_err": chk.std_err,
                "verdict": chk.verdict,
                "ok": ok,
            }
        )
    passed = all(r["ok"] for r in rows)
    detail = f"min gap {min(r['gap'] for r in rows):.3e}, identity gap {rows[0]['gap']:.3e}"
    return CriterionResult(8, "c08_unified", "Unified inequality", passed, detail, list(rows[0].keys()), rows)


# -- 9 ------------------------------------------------------------------------


def _lower_monotone(history) -> float:
    lower = np.array([h[0] for h in history])
    return float(np.min(np.diff(lower))) if lower.size > 1 else 0.0


def criterion_9(opts: SuiteOptions) -> CriterionResult:
    rows = []
    binary = validate_configuration(1, [[-1.0], [1.0]], [0.5, 0.5])
    ba = blahut_arimoto(binary, 1.0, tol=1e-8)
    oracle, arg = grid_capacity_binary(binary.points, 1.0, step=1e-3)
    rows.append(
        {
            "case": "binary",
            "instance": 0,
            "dim": 1,
            "k": 2,
            "s": 1.0,
            "capacity_source": ba.capacity,
            "capacity_target": oracle,
            "gap": ba.capacity - oracle,
            "bracket_sum": ba.bracket,
            "min_lower_step": _lower_monotone(ba.history),
            "iterations": len(ba.history),
            "ok": abs(ba.capacity - oracle) <= 1e-3 and _lower_monotone(ba.history) >= -1e-10,
        }
    )
    for i in range(opts.count(30, 4)):
        pair = _random_pair(opts, 9, i, (1, 2), 5, kmin=2)
        s = (0.25, 1.0, 4.0)[i % 3]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MaxIterExceeded)
            cmp = capacity_contraction_check(pair, s)
        bracket = cmp.source.bracket + cmp.target.bracket
        step = min(_lower_monotone(cmp.source.history), _lower_monotone(cmp.target.history))
        rows.append(
            {
                "case": "pair",
                "instance": i,
                "dim": pair.source.dim,
                "k": pair.k,
                "s": s,
                "capacity_source": cmp.source.capacity,
                "capacity_target": cmp.target.capacity,
                "gap": cmp.gap,
                "bracket_sum": bracket,
                "min_lower_step": step,
                "iterations": len(cmp.source.history) + len(cmp.target.history),
                "ok": cmp.gap >= -bracket and step >= -1e-10,
            }
        )
    passed = all(r["ok"] for r in rows)
    detail = (
        f"binary capacity {ba.capacity:.6f} vs grid {oracle:.6f} (w={arg:.3f}); "
        f"min gap {min(r['gap'] for r in rows[1:]):.3e}"
    )
    return CriterionResult(9, "c09_capacity", "Capacity", passed, detail, list(rows[0].keys()), rows)


# -- 10 -----------------------------------------------------------------------


def criterion_10(opts: SuiteOptions) -> CriterionResult:
    rows = []
    big = opts.count(10**6, 2 * 10**5)
    seed = instance_seed(opts.seed, 10, 0)
    vol, se = union_volume_mc(BallUnion(np.array([[0.0, 0.0], [1.0, 0.0]]), 1.0), big, seed)
    exact = lens_union_area(1.0, 1.0)
    rows.append(
        {
            "case": "two-disk",
            "instance": 0,
            "k": 2,
            "radius": 1.0,
            "samples": big,
            "seed": seed,
            "vol_source": vol,
            "vol_target": exact,
            "gap": vol - exact,
            "std_err": se,
            "verdict": CONSISTENT if abs(vol - exact) <= 3 * se else "MISMATCH",
        }
    )
    for i in range(opts.count(30, 4)):
        pair = _random_pair(opts, 10, i, (2,), 8, kmin=2)
        r = float(_gen(opts, 10, 800 + i).uniform(0.5, 1.5))
        sd = instance_seed(opts.seed, 10, 1000 + i)
        chk = kp_geometric_check(pair, r, 10**5, sd)
        rows.append(
            {
                "case": "pair",
                "instance": i,
                "k": pair.k,
                "radius": r,
                "samples": 10**5,
                "seed": sd,
                "vol_source": chk.vol_source,
                "vol_target": chk.vol_target,
                "gap": chk.gap,
                "std_err": chk.std_err,
                "verdict": chk.verdict,
            }
        )
    passed = all(r["verdict"] == CONSISTENT for r in rows)
    detail = f"two-disk z = {(vol - exact) / se:.2f}; min pair gap {min(r['gap'] for r in rows[1:]):.3e}"
    return CriterionResult(10, "c10_geometry", "Union-of-balls volume", passed, detail, list(rows[0].keys()), rows)


CRITERIA: dict[int, Callable[[SuiteOptions], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}

SUMMARY_COLUMNS = ["criterion", "key", "title", "passed", "instances", "detail"]


def run_suite(opts: SuiteOptions = SuiteOptions(), only=None, out: Path | None = None) -> list[CriterionResult]:
    """Run the selected criteria in order; write one CSV each plus ``suite_summary.csv`` if ``out`` is given."""
    results = []
    for number in sorted(only or CRITERIA):
        start = time.perf_counter()
        res = CRITERIA[number](opts)
        res.seconds = time.perf_counter() - start
        results.append(res)
        if out is not None:
            write_csv(Path(out) / f"{res.key}.csv", res.columns, res.rows)
    if out is not None:
        write_csv(
            Path(out) / "suite_summary.csv",
            SUMMARY_COLUMNS,
            [
                {"criterion": r.number, "key": r.key, "title": r.title, "passed": r.passed, "instances": r.instances, "detail": r.detail}
                for r in results
            ],
        )
    return results
