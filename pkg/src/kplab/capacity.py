"""Capacity of a finite-alphabet additive Gaussian noise channel.

Input alphabet {x_1, ..., x_k}, output x + sqrt(s) Z.  Blahut-Arimoto
alternates w_i <- w_i exp(D_i) / normalizer with
D_i = KL(N(x_i, s I) || sum_j w_j N(x_j, s I)).  At any w,
I(w) = sum_i w_i D_i <= C <= max_i D_i, which gives the stopping bracket.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import _rng
from .configspace import ContractionPair, PointConfiguration
from .errors import MaxIterExceeded
from .gaussmix import LOG_2PI, EstimatorPolicy, GaussianMixture, QuadratureSpec
from .kpverify import HOLDS, VIOLATION, WITHIN_NOISE

DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITER = 500


class _DivergenceOracle:
    """Computes all D_i(w) against one fixed set of evaluation nodes.

    Quadrature (n <= 2): one grid shared by every component, with the
    component log-densities cached.  Monte Carlo: fixed draws from each
    component, reused across iterations.
    """

    def __init__(self, points: np.ndarray, s: float, policy: EstimatorPolicy):
        self.points = points
        self.s = s
        k, n = points.shape
        mix = GaussianMixture(points, np.full(k, 1.0 / k), s * np.eye(n))
        use_quad = policy.method == "quadrature" or (policy.method == "auto" and n <= 2)
        if use_quad:
            grid = policy.grid if policy.grid is not None else QuadratureSpec()
            axes = grid.nodes(mix, 1.0)
            mesh = np.meshgrid(*axes, indexing="ij")
            nodes = np.stack([g.ravel() for g in mesh], axis=1)
            cell = float(np.prod([ax[1] - ax[0] for ax in axes]))
            self.logphi = mix.component_log_densities(nodes).T  # (k, G)
            self.mass = np.exp(self.logphi) * cell  # quadrature weights of each component
            self.method = "quadrature"
            self.samples = None
        else:
            m = policy.samples
            z = _rng.draw(policy.seed, _rng.GAUSS, m, lambda g, size: g.standard_normal((size, n)))
            nodes = points[:, None, :] + math.sqrt(s) * z[None, :, :]  # (k, m, n)
            flat = nodes.reshape(-1, n)
            self.cross = mix.component_log_densities(flat).reshape(k, m, k)  # [i, sample, j]
            self.own = -0.5 * n * (LOG_2PI + math.log(s)) - 0.5 * np.sum(z * z, axis=1)  # (m,)
            self.method = "monte-carlo"
            self.samples = m

    def divergences(self, w: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            logw = np.log(w)
        if self.method == "quadrature":
            log_out = logsumexp(self.logphi + logw[:, None], axis=0)  # (G,)
            return np.sum(self.mass * (self.logphi - log_out[None, :]), axis=1)
        log_out = logsumexp(self.cross + logw[None, None, :], axis=2)  # (k, m)
        return np.mean(self.own[None, :] - log_out, axis=1)


@dataclass
class CapacityResult:
    weights: np.ndarray
    capacity: float
    lower: float
    upper: float
    history: list[tuple[float, float]] = field(default_factory=list)  # (I, bracket width)
    s: float = 1.0
    converged: bool = True
    method: str = "quadrature"

    @property
    def bracket(self) -> float:
        return self.upper - self.lower


def mutual_information_at(points: np.ndarray, weights, s: float, policy: EstimatorPolicy | None = None) -> float:
    """``I(X; X + sqrt(s) Z)`` for the input law ``weights`` on ``points``."""
    oracle = _DivergenceOracle(np.atleast_2d(np.asarray(points, float)), s, policy or EstimatorPolicy())
    w = np.asarray(weights, float)
    return float(w @ oracle.divergences(w))


def blahut_arimoto(
    config: PointConfiguration,
    s: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    policy: EstimatorPolicy | None = None,
    initial_weights=None,
) -> CapacityResult:
    """Capacity in nats; the configuration's weights are ignored (uniform start)."""
    if not s > 0:
        raise ValueError(f"noise variance must be positive, got {s!r}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    policy = policy or EstimatorPolicy()
    oracle = _DivergenceOracle(config.points, s, policy)
    k = config.k
    w = np.full(k, 1.0 / k) if initial_weights is None else np.asarray(initial_weights, float)
    history = []
    for _ in range(max_iter):
        d = oracle.divergences(w)
        lower, upper = float(w @ d), float(np.max(d))
        history.append((lower, upper - lower))
        if upper - lower < tol:
            return CapacityResult(w, lower, lower, upper, history, s, True, oracle.method)
        logits = np.log(w) + d
        w = np.exp(logits - logsumexp(logits))
    d = oracle.divergences(w)
    lower, upper = float(w @ d), float(np.max(d))
    history.append((lower, upper - lower))
    warnings.warn(f"Blahut-Arimoto stopped after {max_iter} iterations with bracket {upper - lower:.3g}", MaxIterExceeded)
    return CapacityResult(w, lower, lower, upper, history, s, upper - lower < tol, oracle.method)


def grid_capacity_binary(points, s: float, step: float = 1e-3, policy: EstimatorPolicy | None = None) -> tuple[float, float]:
    """Brute-force capacity of a two-letter alphabet: max of I over w in a grid on [0, 1]."""
    pts = np.atleast_2d(np.asarray(points, float))
    if pts.shape[0] != 2:
        raise ValueError("grid oracle is for two-letter alphabets")
    oracle = _DivergenceOracle(pts, s, policy or EstimatorPolicy())
    best, arg = -math.inf, 0.0
    for q in np.arange(0.0, 1.0 + step / 2, step):
        w = np.array([q, 1.0 - q])
        val = float(w @ oracle.divergences(w))
        if val > best:
            best, arg = val, q
    return best, arg


@dataclass
class CapacityComparison:
    source: CapacityResult
    target: CapacityResult
    gap: float
    verdict: str
    pointwise_source: float  # I on the source alphabet at the target-optimal input law
    pointwise_target: float
    pointwise_ok: bool


def capacity_contraction_check(
    pair: ContractionPair,
    s: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    policy: EstimatorPolicy | None = None,
) -> CapacityComparison:
    """Capacity before and after the contraction, plus the matched-input comparison."""
    policy = policy or EstimatorPolicy()
    src = blahut_arimoto(pair.source, s, tol, max_iter, policy)
    tgt = blahut_arimoto(pair.target, s, tol, max_iter, policy)
    gap = src.capacity - tgt.capacity
    band = src.bracket + tgt.bracket + 1e-6
    if gap >= 0:
        v = HOLDS
    elif gap >= -band:
        v = WITHIN_NOISE
    else:
        v = VIOLATION
    # index-aligned alphabets: the target law w* is the pushforward of w* on the
    # source, with each merged letter carrying the sum over its preimage
    i_src = mutual_information_at(pair.source.points, tgt.weights, s, policy)
    i_tgt = mutual_information_at(pair.target.points, tgt.weights, s, policy)
    return CapacityComparison(src, tgt, gap, v, i_src, i_tgt, i_src >= i_tgt - tol)
