"""Continuously contracting families and their Gaussian-smoothed flows.

A :class:`TrajectoryFamily` moves k weighted points along curves c_i(t),
t in [0, 1].  Smoothing the moving point masses with variance-s Gaussian
noise gives a curve of Gaussian mixtures whose velocity field is the
posterior mean of the point velocities, and whose divergence is a posterior
covariance between velocities and positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .configspace import ContractionPair, PointConfiguration
from .errors import DimensionMismatch, UnsupportedDimension
from .gaussmix import (
    EXACT,
    MONTE_CARLO,
    QUADRATURE,
    EstimatorPolicy,
    GaussianMixture,
    QuadratureSpec,
    is_integer_order,
    renyi,
    renyi_exact_integer,
    renyi_monte_carlo_paired,
    sample_components,
    sample_gaussian,
)

VELOCITY_FD_STEP = 1e-6
DIVERGENCE_FD_STEP = 1e-4
MERGE_TOL = 1e-10
DEFAULT_T_POINTS = 21

Curve = Callable[[float], np.ndarray]


def default_t_grid(points: int = DEFAULT_T_POINTS) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


class TrajectoryFamily:
    """k weighted trajectories in R^dim.

    ``positions(t)`` returns a (k, dim) array.  When ``velocities`` is not
    supplied, velocities come from a second-order finite difference with step
    1e-6 (one-sided at the ends of [0, 1]).
    """

    def __init__(self, dim: int, weights, positions: Curve, velocities: Curve | None = None, label: str = ""):
        self.dim = int(dim)
        self.weights = np.asarray(weights, dtype=float)
        self._positions = positions
        self._velocities = velocities
        self.label = label
        p0 = self.positions(0.0)
        if p0.shape != (self.weights.shape[0], self.dim):
            raise DimensionMismatch(f"positions(0) has shape {p0.shape}, expected {(self.weights.shape[0], self.dim)}")

    @property
    def k(self) -> int:
        return self.weights.shape[0]

    @property
    def analytic_velocities(self) -> bool:
        return self._velocities is not None

    def positions(self, t: float) -> np.ndarray:
        return np.asarray(self._positions(float(t)), dtype=float)

    def velocities(self, t: float) -> np.ndarray:
        if self._velocities is not None:
            return np.asarray(self._velocities(float(t)), dtype=float)
        h = VELOCITY_FD_STEP
        if t - h < 0:
            return (-3 * self.positions(t) + 4 * self.positions(t + h) - self.positions(t + 2 * h)) / (2 * h)
        if t + h > 1:
            return (3 * self.positions(t) - 4 * self.positions(t - h) + self.positions(t - 2 * h)) / (2 * h)
        return (self.positions(t + h) - self.positions(t - h)) / (2 * h)

    def configuration(self, t: float) -> PointConfiguration:
        return PointConfiguration(self.dim, self.positions(t), self.weights)

    def mixture(self, t: float, s: float) -> GaussianMixture:
        return GaussianMixture(self.positions(t), self.weights, s * np.eye(self.dim))


def bezdek_connelly_lift(pair: ContractionPair) -> TrajectoryFamily:
    """Carry ``(x, 0)`` to ``(T(x), 0)`` in R^(2n) along half-circles.

    With midpoint m = (x + T x)/2 and half-difference u = (x - T x)/2,
    S_t(x) = (m + cos(pi t) u, sin(pi t) u).  Squared pairwise distances then
    change at rate -pi sin(pi t) (|dx|^2 - |dTx|^2)/2 <= 0.
    """
    x, tx = pair.source.points, pair.target.points
    if x.shape != tx.shape:
        raise DimensionMismatch("the lift needs source and target in the same dimension")
    mid, half = 0.5 * (x + tx), 0.5 * (x - tx)

    def positions(t):
        return np.hstack([mid + math.cos(math.pi * t) * half, math.sin(math.pi * t) * half])

    def velocities(t):
        return math.pi * np.hstack([-math.sin(math.pi * t) * half, math.cos(math.pi * t) * half])

    return TrajectoryFamily(2 * pair.source.dim, pair.source.weights, positions, velocities, f"lift[{pair.label}]")


def homothety_family(config: PointConfiguration, beta: float, center=None) -> TrajectoryFamily:
    """Straight-line shrinkage toward ``center`` by the factor ``1 - t (1 - beta)``."""
    if not 0 <= beta <= 1:
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    c = np.zeros(config.dim) if center is None else np.asarray(center, float)
    d = config.points - c
    return TrajectoryFamily(
        config.dim,
        config.weights,
        lambda t: c + (1.0 - t * (1.0 - beta)) * d,
        lambda t: -(1.0 - beta) * d,
        f"homothety({beta:g})",
    )


# -- structural checks -------------------------------------------------------


def _pair_sq_dists(p: np.ndarray) -> np.ndarray:
    diff = p[:, None, :] - p[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


@dataclass
class ContractionCheck:
    ok: bool
    max_distance_increase: float
    merge_violations: list[tuple[int, int, float]]


def check_continuous_contraction(fam: TrajectoryFamily, t_grid=None, tol: float = MERGE_TOL) -> ContractionCheck:
    """Pairwise distances must be nonincreasing on the grid, and merged points must stay merged."""
    t_grid = default_t_grid() if t_grid is None else np.asarray(t_grid, float)
    dists = np.array([np.sqrt(_pair_sq_dists(fam.positions(t))) for t in t_grid])
    increase = float(np.max(np.diff(dists, axis=0), initial=0.0))
    merged = np.zeros(dists.shape[1:], dtype=bool)
    violations = []
    for t, d in zip(t_grid, dists):
        bad = merged & (d > tol)
        for i, j in zip(*np.nonzero(np.triu(bad, 1))):
            violations.append((int(i), int(j), float(t)))
        merged |= d <= tol
    return ContractionCheck(increase <= tol and not violations, increase, violations)


def velocity_monotonicity(fam: TrajectoryFamily, t_grid=None) -> float:
    """Largest ``<v_i - v_j, c_i - c_j>`` over the grid; nonpositive for a contracting family."""
    t_grid = default_t_grid() if t_grid is None else np.asarray(t_grid, float)
    worst = -math.inf
    for t in t_grid:
        c, v = fam.positions(t), fam.velocities(t)
        dc = c[:, None, :] - c[None, :, :]
        dv = v[:, None, :] - v[None, :, :]
        worst = max(worst, float(np.max(np.einsum("ijk,ijk->ij", dc, dv))))
    return worst


# -- smoothed flow -----------------------------------------------------------


@dataclass
class DiscretePosterior:
    """Law of the moving point given that point + noise landed at ``x``."""

    x: np.ndarray
    t: float
    s: float
    p: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    @property
    def mean_position(self) -> np.ndarray:
        return self.p @ self.positions

    @property
    def mean_velocity(self) -> np.ndarray:
        return self.p @ self.velocities


def _posterior_weights(positions: np.ndarray, log_w: np.ndarray, x: np.ndarray, s: float) -> np.ndarray:
    d = x[:, None, :] - positions[None, :, :]
    logits = log_w - np.einsum("mkn,mkn->mk", d, d) / (2.0 * s)
    logits -= logits.max(axis=1, keepdims=True)
    p = np.exp(logits)
    return p / p.sum(axis=1, keepdims=True)


def _prepare(fam: TrajectoryFamily, t: float, x, s: float):
    if not s > 0:
        raise ValueError(f"noise variance must be positive, got {s!r}")
    if not 0 <= t <= 1:
        raise ValueError(f"t must lie in [0, 1], got {t!r}")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x2 = np.atleast_2d(x)
    if x2.shape[1] != fam.dim:
        raise DimensionMismatch(f"point of length {x2.shape[1]} for a {fam.dim}-dimensional family")
    with np.errstate(divide="ignore"):
        log_w = np.log(fam.weights)
    c = fam.positions(t)
    p = _posterior_weights(c, log_w, x2, s)
    return single, x2, p, c, fam.velocities(t)


def posterior(fam: TrajectoryFamily, t: float, x, s: float) -> DiscretePosterior:
    _, x2, p, c, v = _prepare(fam, t, x, s)
    return DiscretePosterior(x2[0], float(t), float(s), p[0], c, v)


def convolved_velocity(fam: TrajectoryFamily, t: float, x, s: float) -> np.ndarray:
    """Posterior mean of the point velocities; accepts one point or an (m, n) batch."""
    single, _, p, _, v = _prepare(fam, t, x, s)
    out = p @ v
    return out[0] if single else out


def convolved_divergence(fam: TrajectoryFamily, t: float, x, s: float):
    """``(1/s) sum_i p_i <v_i - vbar, c_i - cbar>``, the exact divergence of the smoothed velocity."""
    single, _, p, c, v = _prepare(fam, t, x, s)
    vbar = p @ v
    cbar = p @ c
    dv = v[None, :, :] - vbar[:, None, :]
    dc = c[None, :, :] - cbar[:, None, :]
    inner = np.einsum("mk,mk->m", p, np.einsum("mkn,mkn->mk", dv, dc))
    out = inner / s
    return float(out[0]) if single else out


def fd_divergence(fam: TrajectoryFamily, t: float, x, s: float, h: float = DIVERGENCE_FD_STEP) -> float:
    """Central-difference divergence of :func:`convolved_velocity` (an independent check)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    pts = np.vstack([x + h * e for e in np.eye(n)] + [x - h * e for e in np.eye(n)])
    vel = convolved_velocity(fam, t, pts, s)
    return float(sum((vel[d, d] - vel[n + d, d]) / (2 * h) for d in range(n)))


def sample_smoothed(fam: TrajectoryFamily, t: float, s: float, samples: int, seed: int) -> np.ndarray:
    """Draws from the smoothed flow state at time ``t``."""
    idx = sample_components(fam.weights, samples, seed)
    z = sample_gaussian(fam.dim, samples, seed)
    return fam.positions(t)[idx] + math.sqrt(s) * z


# -- convex functionals ------------------------------------------------------


@dataclass(frozen=True)
class ConvexFunctionalSpec:
    """phi with phi(0) = 0: ``power`` u**alpha (alpha > 1), ``xlogx`` u log u, ``hockey`` max(u - c, 0)."""

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind == "power":
            if self.param is None or not self.param > 1:
                raise ValueError("power functional needs an exponent > 1")
        elif self.kind == "hockey":
            if self.param is None or not self.param > 0:
                raise ValueError("hockey-stick functional needs a threshold c > 0")
        elif self.kind != "xlogx":
            raise ValueError(f"unknown functional kind {self.kind!r}")

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.kind == "power":
            return u**self.param
        if self.kind == "xlogx":
            return np.where(u > 0, u * np.log(np.where(u > 0, u, 1.0)), 0.0)
        return np.maximum(u - self.param, 0.0)

    @property
    def name(self) -> str:
        return self.kind if self.param is None else f"{self.kind}({self.param:g})"


@dataclass
class FunctionalSeries:
    functional: str
    t: np.ndarray
    values: np.ndarray
    std_errs: np.ndarray
    step_std_errs: np.ndarray  # standard error of each consecutive difference
    method: str
    metadata: dict = field(default_factory=dict)

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.values)

    def nondecreasing(self, abs_tol: float = 1e-8, n_sigma: float = 3.0) -> bool:
        return bool(np.all(self.steps >= -np.maximum(abs_tol, n_sigma * self.step_std_errs)))


def _hockey_quadrature(m: GaussianMixture, c: float, grid: QuadratureSpec) -> float:
    axes = grid.nodes(m, 1.0)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    f = np.exp(m.log_density(pts))
    cell = float(np.prod([ax[1] - ax[0] for ax in axes]))
    return float(np.sum(np.maximum(f - c, 0.0)) * cell)


def _hockey_mc_terms(m: GaussianMixture, c: float, x: np.ndarray) -> np.ndarray:
    logf = m.log_density(x)
    # max(f - c, 0) / f = max(1 - c/f, 0)
    return np.maximum(1.0 - c * np.exp(-logf), 0.0)


def functional_along_flow(
    fam: TrajectoryFamily,
    phi: ConvexFunctionalSpec,
    s: float,
    t_grid=None,
    policy: EstimatorPolicy | None = None,
) -> FunctionalSeries:
    """``∫ phi(f_t) dx`` for the smoothed flow state at each grid time.

    Monte Carlo evaluations reuse one seed across times, so consecutive values
    share random numbers and their differences carry paired standard errors.
    """
    policy = policy or EstimatorPolicy()
    t_grid = default_t_grid() if t_grid is None else np.asarray(t_grid, float)
    if np.any(np.diff(t_grid) <= 0) or t_grid[0] < 0 or t_grid[-1] > 1:
        raise ValueError("t_grid must be increasing within [0, 1]")
    mixtures = [fam.mixture(t, s) for t in t_grid]
    n = len(mixtures)
    values = np.empty(n)
    ses = np.zeros(n)
    steps_se = np.zeros(max(n - 1, 0))

    if phi.kind in ("power", "xlogx"):
        alpha = 1.0 if phi.kind == "xlogx" else float(phi.param)
        ests = []
        if phi.kind == "power" and policy.method == "auto" and is_integer_order(alpha):
            ests = [renyi_exact_integer(m, int(alpha), policy.budget) for m in mixtures]
        else:
            ests = [renyi(m, alpha, policy) for m in mixtures]
        method = ests[0].method
        for j, e in enumerate(ests):
            if phi.kind == "xlogx":
                values[j], ses[j] = -e.value, e.std_err
            elif e.method == EXACT:
                values[j] = math.exp(e.metadata["log_integral"])
            else:
                values[j] = math.exp((1 - alpha) * e.value)
                ses[j] = abs(1 - alpha) * values[j] * e.std_err
        if method == MONTE_CARLO:
            for j in range(n - 1):
                a, b, se = renyi_monte_carlo_paired(mixtures[j], mixtures[j + 1], alpha, policy.samples, policy.seed)
                if phi.kind == "xlogx":
                    steps_se[j] = se
                else:
                    # d(exp((1-a) h)) = |1-a| exp(...) dh, evaluated at the mean level
                    level = 0.5 * (values[j] + values[j + 1])
                    steps_se[j] = abs(1 - alpha) * level * se
    else:
        c = float(phi.param)
        use_quad = policy.method == "quadrature" or (policy.method == "auto" and fam.dim <= 2)
        if use_quad:
            if fam.dim > 2:
                raise UnsupportedDimension("hockey-stick functional under quadrature needs n <= 2")
            values[:] = [_hockey_quadrature(m, c, policy.grid) for m in mixtures]
            method = QUADRATURE
        else:
            idx = sample_components(fam.weights, policy.samples, policy.seed)
            z = sample_gaussian(fam.dim, policy.samples, policy.seed) * math.sqrt(s)
            terms = [_hockey_mc_terms(m, c, m.centers[idx] + z) for m in mixtures]
            root = math.sqrt(policy.samples)
            values[:] = [t.mean() for t in terms]
            ses[:] = [t.std(ddof=1) / root for t in terms]
            steps_se[:] = [np.std(terms[j + 1] - terms[j], ddof=1) / root for j in range(n - 1)]
            method = MONTE_CARLO
    return FunctionalSeries(phi.name, t_grid, values, ses, steps_se, method)


# -- continuity equation -----------------------------------------------------


@dataclass(frozen=True)
class BumpFunction:
    """Smooth compactly supported test function ``exp(-1/(1 - |y-a|^2/R^2))``."""

    center: np.ndarray
    radius: float

    def value_and_grad(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = y - self.center
        r2 = np.einsum("mn,mn->m", d, d) / self.radius**2
        inside = r2 < 1.0
        gap = np.where(inside, 1.0 - r2, 1.0)
        val = np.where(inside, np.exp(-1.0 / gap), 0.0)
        grad = (val * np.where(inside, -2.0 / (self.radius**2 * gap**2), 0.0))[:, None] * d
        return val, grad


@dataclass
class ContinuityCheck:
    t: float
    lhs: float  # d/dt of ∫F dmu_t by central difference
    rhs: float  # ∫<grad F, v_t> dmu_t
    std_err: float
    discretization: float
    ok: bool


def continuity_equation_check(
    fam: TrajectoryFamily,
    t: float,
    s: float,
    samples: int = 200_000,
    seed: int = 0,
    dt: float = 1e-3,
    bump: BumpFunction | None = None,
) -> ContinuityCheck:
    """Weak-form check of the smoothed flow against its posterior-mean velocity.

    Both sides are Monte Carlo averages over the same draws.  The allowance
    for the O(dt^2) error of the time difference is estimated by repeating it
    at step 2 dt.
    """
    if bump is None:
        c = fam.positions(t)
        centre = fam.weights @ c
        radius = float(np.max(np.linalg.norm(c - centre, axis=1))) + 3.0 * math.sqrt(s)
        bump = BumpFunction(centre, radius)
    lo, hi = max(0.0, t - 2 * dt), min(1.0, t + 2 * dt)
    if hi - lo < 4 * dt:
        raise ValueError("t must be at least 2 dt away from the ends of [0, 1]")
    idx = sample_components(fam.weights, samples, seed)
    z = sample_gaussian(fam.dim, samples, seed) * math.sqrt(s)

    def F(tt):
        return bump.value_and_grad(fam.positions(tt)[idx] + z)[0]

    lhs_terms = (F(t + dt) - F(t - dt)) / (2 * dt)
    lhs_coarse = float(np.mean((F(t + 2 * dt) - F(t - 2 * dt)) / (4 * dt)))
    y = fam.positions(t)[idx] + z
    _, grad = bump.value_and_grad(y)
    rhs_terms = np.einsum("mn,mn->m", grad, convolved_velocity(fam, t, y, s))
    diff = lhs_terms - rhs_terms
    lhs, rhs = float(lhs_terms.mean()), float(rhs_terms.mean())
    se = float(np.std(diff, ddof=1) / math.sqrt(samples))
    disc = abs(lhs_coarse - lhs)
    return ContinuityCheck(float(t), lhs, rhs, se, disc, abs(lhs - rhs) <= 3 * se + disc)
