"""Densities and Rényi entropies of Gaussian mixtures.

The mixtures here all share one covariance across components, which is what
``X + sqrt(s) Z`` looks like for a finitely supported ``X`` (and for a linear
image of a pre-smoothed one).  Entropies are in nats.

Four estimators are provided:

* :func:`renyi_exact_integer` -- closed form for integer orders >= 2, summing
  Gaussian product integrals over multisets of components;
* :func:`renyi_quadrature` -- tensor trapezoid rule for n <= 2;
* :func:`renyi_monte_carlo` -- sampling with counter-based random streams;
* :func:`renyi_sup` -- the order-infinity entropy via multi-start mode search.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import linalg, optimize
from scipy.special import gammaln, logsumexp

from . import _rng
from .configspace import PointConfiguration
from .errors import BudgetExceeded, DimensionMismatch, NonPositiveAlpha, UnsupportedDimension

LOG_2PI = math.log(2.0 * math.pi)
_CHUNK = 1 << 15

EXACT = "exact-integer"
QUADRATURE = "quadrature"
MONTE_CARLO = "monte-carlo"
SUP = "sup-optimization"
DETERMINISTIC = (EXACT, QUADRATURE, SUP)


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    centers: np.ndarray  # (k, n)
    weights: np.ndarray  # (k,)
    cov: np.ndarray  # (n, n)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if w.shape[0] != c.shape[0]:
            raise DimensionMismatch(f"{c.shape[0]} centers but {w.shape[0]} weights")
        if cov.shape != (c.shape[1], c.shape[1]):
            raise DimensionMismatch(f"covariance {cov.shape} does not match dimension {c.shape[1]}")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * max(1.0, np.abs(cov).max())):
            raise ValueError("covariance must be symmetric")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ValueError("covariance must be positive definite") from exc
        for name, val in (("centers", c), ("weights", w), ("cov", cov), ("chol", chol)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "logdet", 2.0 * float(np.sum(np.log(np.diag(chol)))))
        with np.errstate(divide="ignore"):
            object.__setattr__(self, "log_weights", np.log(w))

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @classmethod
    def from_configuration(cls, config: PointConfiguration, s: float = 1.0, cov=None) -> "GaussianMixture":
        """Law of ``X + sqrt(s) Z`` (or ``X + N(0, cov)`` when ``cov`` is given)."""
        if cov is None:
            if not s > 0:
                raise ValueError(f"noise variance must be positive, got {s!r}")
            cov = s * np.eye(config.dim)
        return cls(config.points, config.weights, cov)

    def whiten(self, x: np.ndarray) -> np.ndarray:
        return linalg.solve_triangular(self.chol, np.asarray(x, float).T, lower=True).T

    def component_log_densities(self, x: np.ndarray) -> np.ndarray:
        """``log N(x_j; c_i, cov)`` as an (m, k) array."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dim:
            raise DimensionMismatch(f"point of length {x.shape[1]} for a {self.dim}-dimensional mixture")
        xw = self.whiten(x)
        cw = self.whiten(self.centers)
        out = np.empty((x.shape[0], self.k))
        const = -0.5 * self.logdet - 0.5 * self.dim * LOG_2PI
        for a in range(0, x.shape[0], _CHUNK):
            d = xw[a : a + _CHUNK, None, :] - cw[None, :, :]
            out[a : a + _CHUNK] = const - 0.5 * np.einsum("mkn,mkn->mk", d, d)
        return out

    def log_density(self, x: np.ndarray) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 1
        if scalar and x.shape[0] != self.dim:
            raise DimensionMismatch(f"point of length {x.shape[0]} for a {self.dim}-dimensional mixture")
        vals = logsumexp(self.component_log_densities(x) + self.log_weights, axis=1)
        return float(vals[0]) if scalar else vals

    def posterior(self, x: np.ndarray) -> np.ndarray:
        """Component responsibilities at each row of ``x``."""
        lc = self.component_log_densities(x) + self.log_weights
        lc -= lc.max(axis=1, keepdims=True)
        p = np.exp(lc)
        return p / p.sum(axis=1, keepdims=True)

    def grad_log_density(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        mean = self.posterior(x) @ self.centers
        return linalg.cho_solve((self.chol, True), (mean - x).T).T

    def sample(self, n: int, seed: int) -> np.ndarray:
        idx = sample_components(self.weights, n, seed)
        z = sample_gaussian(self.dim, n, seed)
        return self.centers[idx] + z @ self.chol.T

    def with_cov(self, cov) -> "GaussianMixture":
        return GaussianMixture(self.centers, self.weights, cov)

    def scaled(self, lam: float) -> "GaussianMixture":
        return GaussianMixture(lam * self.centers, self.weights, lam * lam * self.cov)

    def linear_image(self, matrix) -> "GaussianMixture":
        a = np.atleast_2d(np.asarray(matrix, float))
        return GaussianMixture(self.centers @ a.T, self.weights, a @ self.cov @ a.T)


def product_mixture(a: GaussianMixture, b: GaussianMixture) -> GaussianMixture:
    """Law of ``(U, V)`` for independent ``U ~ a``, ``V ~ b``."""
    centers = np.array([np.concatenate([ca, cb]) for ca in a.centers for cb in b.centers])
    weights = np.outer(a.weights, b.weights).ravel()
    return GaussianMixture(centers, weights, linalg.block_diag(a.cov, b.cov))


def sample_components(weights: np.ndarray, n: int, seed: int) -> np.ndarray:
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    u = _rng.draw(seed, _rng.COMPONENT, n, lambda g, m: g.random(m))
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(weights) - 1)


def sample_gaussian(dim: int, n: int, seed: int) -> np.ndarray:
    return _rng.draw(seed, _rng.GAUSS, n, lambda g, m: g.standard_normal((m, dim)))


# ---------------------------------------------------------------------------


@dataclass
class EntropyEstimate:
    order: float
    value: float
    std_err: float
    method: str
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.method in DETERMINISTIC and self.std_err != 0:
            raise ValueError(f"std_err {self.std_err} inconsistent with method {self.method}")

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-grid parameters.

    ``points`` is the minimum number of nodes per axis (default 4001 in 1D and
    401 in 2D); more are added if needed so that the spacing stays below
    ``1/resolution`` of the narrowest component standard deviation.
    """

    points: int | None = None
    extent_sd: float = 8.0
    resolution: float = 4.0
    max_points: int = 20001

    def nodes(self, m: GaussianMixture, alpha: float = 1.0) -> list[np.ndarray]:
        eig = np.linalg.eigvalsh(m.cov)
        sd_max, sd_min = math.sqrt(eig.max()), math.sqrt(eig.min())
        # f**alpha has tails like a Gaussian with variance cov/alpha
        tail = self.extent_sd * sd_max / math.sqrt(min(alpha, 1.0))
        step = sd_min / (self.resolution * math.sqrt(max(alpha, 1.0)))
        base = self.points or (4001 if m.dim == 1 else 401)
        axes = []
        for d in range(m.dim):
            lo = m.centers[:, d].min() - tail
            hi = m.centers[:, d].max() + tail
            npts = max(base, int(math.ceil((hi - lo) / step)) + 1)
            npts += (npts + 1) % 2  # odd, so the stride-2 subgrid shares both ends
            if npts > self.max_points:
                raise UnsupportedDimension(f"quadrature grid would need {npts} nodes per axis")
            axes.append(np.linspace(lo, hi, npts))
        return axes


def _grid_log_density(m: GaussianMixture, axes: list[np.ndarray]) -> tuple[np.ndarray, float]:
    steps = [ax[1] - ax[0] for ax in axes]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    return m.log_density(pts).reshape(mesh[0].shape), float(np.prod(steps))


def _log_integral_power(logf: np.ndarray, alpha: float, log_cell: float) -> float:
    return float(logsumexp(alpha * logf)) + log_cell


def _shannon_sum(logf: np.ndarray, cell: float) -> float:
    f = np.exp(logf)
    return float(-np.sum(f * logf) * cell)


def _check_alpha(alpha: float) -> None:
    if not alpha > 0:
        raise NonPositiveAlpha(f"order must be positive, got {alpha!r}")


def renyi_exact_integer(m: GaussianMixture, alpha: int, budget: int = 10**7) -> EntropyEstimate:
    """Closed-form Rényi entropy for integer ``alpha >= 2``.

    Expanding ``f**alpha`` gives a sum over component tuples of integrals of
    Gaussian products.  For a shared covariance S and whitened centers u_j,

        ∫ prod_j N(x; c_j, S) dx = (2π)^{n(1-α)/2} |S|^{(1-α)/2} α^{-n/2}
                                   exp(-½ Σ_j |u_j - ū|²),

    which depends only on the multiset of indices, so the sum runs over
    multisets with multinomial multiplicities.
    """
    if int(alpha) != alpha or alpha < 2:
        raise ValueError(f"exact path needs an integer order >= 2, got {alpha!r}")
    alpha = int(alpha)
    k, n = m.k, m.dim
    if float(k) ** alpha > budget:
        raise BudgetExceeded(f"k**alpha = {k}**{alpha} exceeds the budget {budget}")
    keep = m.weights > 0
    u = m.whiten(m.centers[keep])
    logw = m.log_weights[keep]
    kk = u.shape[0]
    log_alpha_fact = gammaln(alpha + 1)
    const = 0.5 * n * (1 - alpha) * LOG_2PI + 0.5 * (1 - alpha) * m.logdet - 0.5 * n * math.log(alpha)

    combos = np.array(list(itertools.combinations_with_replacement(range(kk), alpha)), dtype=np.intp)
    terms = np.empty(len(combos))
    for a in range(0, len(combos), _CHUNK):
        idx = combos[a : a + _CHUNK]  # (b, alpha)
        uu = u[idx]  # (b, alpha, n)
        spread = np.sum((uu - uu.mean(axis=1, keepdims=True)) ** 2, axis=(1, 2))
        counts = np.stack([np.sum(idx == j, axis=1) for j in range(kk)], axis=1)
        log_mult = log_alpha_fact - np.sum(gammaln(counts + 1), axis=1)
        terms[a : a + _CHUNK] = log_mult + logw[idx].sum(axis=1) - 0.5 * spread
    log_int = float(logsumexp(terms)) + const
    return EntropyEstimate(
        alpha, log_int / (1 - alpha), 0.0, EXACT, {"terms": len(combos), "log_integral": log_int}
    )


def renyi_quadrature(m: GaussianMixture, alpha: float, grid: QuadratureSpec | None = None) -> EntropyEstimate:
    """Rényi entropy by the trapezoid rule on a tensor grid (n <= 2).

    The metadata carries ``refinement_discrepancy``: the change in the value
    when every other node is dropped.
    """
    _check_alpha(alpha)
    if m.dim > 2:
        raise UnsupportedDimension(f"quadrature supports n <= 2, got n = {m.dim}")
    grid = grid or QuadratureSpec()
    axes = grid.nodes(m, alpha)
    logf, cell = _grid_log_density(m, axes)
    coarse = logf[(slice(None, None, 2),) * m.dim]
    coarse_cell = cell * 2**m.dim
    if alpha == 1:
        value = _shannon_sum(logf, cell)
        coarse_value = _shannon_sum(coarse, coarse_cell)
    else:
        value = _log_integral_power(logf, alpha, math.log(cell)) / (1 - alpha)
        coarse_value = _log_integral_power(coarse, alpha, math.log(coarse_cell)) / (1 - alpha)
    meta = {
        "nodes_per_axis": [len(ax) for ax in axes],
        "extent": [[float(ax[0]), float(ax[-1])] for ax in axes],
        "refinement_discrepancy": abs(value - coarse_value),
    }
    return EntropyEstimate(alpha, value, 0.0, QUADRATURE, meta)


def _proposal(m: GaussianMixture, alpha: float, proposal: str) -> GaussianMixture:
    if proposal == "auto":
        proposal = "tempered" if alpha < 1 else "self"
    if proposal == "self":
        return m
    if proposal == "tempered":
        # f**alpha is dominated by a mixture with covariance cov/alpha, so the
        # importance ratio stays bounded and the estimator has finite variance
        return m.with_cov(m.cov / alpha)
    raise ValueError(f"unknown proposal {proposal!r}")


def _mc_terms(m: GaussianMixture, q: GaussianMixture, alpha: float, x: np.ndarray) -> np.ndarray:
    """Per-sample integrand: ``log f`` for alpha = 1, else the log importance weight of ``f**alpha``."""
    logf = m.log_density(x)
    if alpha == 1:
        return logf
    if q is m:
        return (alpha - 1.0) * logf
    return alpha * logf - q.log_density(x)


def _mc_reduce(terms: np.ndarray, alpha: float) -> tuple[float, float, np.ndarray]:
    """Estimate and its delta-method standard error; also the linearized per-sample influence."""
    n = terms.shape[0]
    if alpha == 1:
        infl = -terms
        return float(np.mean(infl)), float(np.std(infl, ddof=1) / math.sqrt(n)), infl
    shift = terms.max()
    a = np.exp(terms - shift)
    mean = a.mean()
    value = float(math.log(mean) + shift) / (1 - alpha)
    infl = a / mean / (1 - alpha)
    return value, float(np.std(infl, ddof=1) / math.sqrt(n)), infl


def jackknife_std_err(terms: np.ndarray, alpha: float, blocks: int = 20) -> float:
    """Delete-one-block jackknife standard error of the Monte Carlo estimate."""
    n = terms.shape[0]
    size = n // blocks
    if size < 2:
        raise ValueError("too few samples for the requested number of blocks")
    used = terms[: size * blocks].reshape(blocks, size)
    if alpha == 1:
        sums = (-used).sum(axis=1)
        loo = (sums.sum() - sums) / (size * (blocks - 1))
    else:
        shift = used.max()
        sums = np.exp(used - shift).sum(axis=1)
        loo = (np.log((sums.sum() - sums) / (size * (blocks - 1))) + shift) / (1 - alpha)
    return float(math.sqrt((blocks - 1) / blocks * np.sum((loo - loo.mean()) ** 2)))


def renyi_monte_carlo(
    m: GaussianMixture,
    alpha: float,
    samples: int = 10**5,
    seed: int = 0,
    proposal: str = "auto",
    jackknife: bool = False,
) -> EntropyEstimate:
    """Monte Carlo Rényi entropy with a delta-method standard error.

    With ``proposal="self"`` points are drawn from the mixture itself.  The
    default ``"auto"`` switches to a tempered proposal (covariance divided by
    ``alpha``) for ``alpha < 1``, where self-sampling has infinite variance.
    """
    _check_alpha(alpha)
    if samples < 1000:
        raise ValueError("Monte Carlo needs at least 1000 samples")
    q = _proposal(m, alpha, proposal)
    x = q.sample(samples, seed)
    terms = _mc_terms(m, q, alpha, x)
    value, se, _ = _mc_reduce(terms, alpha)
    meta = {"samples": samples, "seed": seed, "proposal": "self" if q is m else "tempered"}
    if jackknife:
        meta["jackknife_std_err"] = jackknife_std_err(terms, alpha)
    return EntropyEstimate(alpha, value, se, MONTE_CARLO, meta)


def renyi_monte_carlo_paired(
    m1: GaussianMixture, m2: GaussianMixture, alpha: float, samples: int, seed: int, proposal: str = "auto"
) -> tuple[EntropyEstimate, EntropyEstimate, float]:
    """Estimate two entropies with common random numbers.

    Both mixtures must share weights and covariance; sample ``j`` uses the
    same component index and the same Gaussian draw on both sides.  Returns
    the two estimates and the standard error of their difference.
    """
    _check_alpha(alpha)
    if m1.dim != m2.dim or m1.k != m2.k:
        raise DimensionMismatch("paired estimation needs mixtures of equal shape")
    if not (np.allclose(m1.weights, m2.weights) and np.allclose(m1.cov, m2.cov)):
        raise ValueError("paired estimation needs equal weights and covariance")
    q1, q2 = _proposal(m1, alpha, proposal), _proposal(m2, alpha, proposal)
    idx = sample_components(m1.weights, samples, seed)
    z = sample_gaussian(m1.dim, samples, seed) @ q1.chol.T
    out = []
    infls = []
    for m, q in ((m1, q1), (m2, q2)):
        x = q.centers[idx] + z
        value, se, infl = _mc_reduce(_mc_terms(m, q, alpha, x), alpha)
        meta = {"samples": samples, "seed": seed, "proposal": "self" if q is m else "tempered", "paired": True}
        out.append(EntropyEstimate(alpha, value, se, MONTE_CARLO, meta))
        infls.append(infl)
    diff_se = float(np.std(infls[0] - infls[1], ddof=1) / math.sqrt(samples))
    return out[0], out[1], diff_se


def renyi_sup(m: GaussianMixture, iters: int = 300) -> EntropyEstimate:
    """Order-infinity entropy ``-log max f``.

    Mean-shift ascent (the fixed-point form of ∇ log f = 0 for a shared
    covariance) runs from every center and every pairwise midpoint, and the
    best few end points are polished with BFGS.  Since every evaluated point
    satisfies ``f(x) <= max f``, the reported value is an upper bound on the
    true one.
    """
    c = m.centers
    k = m.k
    iu, ju = np.triu_indices(k, 1)
    starts = np.vstack([c, 0.5 * (c[iu] + c[ju])]) if k > 1 else c.copy()
    x = starts.copy()
    for _ in range(iters):
        x_new = m.posterior(x) @ c
        if np.max(np.abs(x_new - x)) < 1e-13 * (1.0 + np.abs(x).max()):
            x = x_new
            break
        x = x_new
    vals = m.log_density(x)
    best_x, best_val = x[np.argmax(vals)], float(vals.max())
    for j in np.argsort(vals)[::-1][: min(4, len(vals))]:
        res = optimize.minimize(
            lambda y: -m.log_density(y),
            x[j],
            jac=lambda y: -m.grad_log_density(y)[0],
            method="BFGS",
            options={"gtol": 1e-13},
        )
        if -res.fun > best_val:
            best_val, best_x = float(-res.fun), res.x
    return EntropyEstimate(
        math.inf, -best_val, 0.0, SUP, {"argmax": np.asarray(best_x).tolist(), "starts": len(starts)}
    )


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EstimatorPolicy:
    """How to pick an estimator.

    ``method`` is ``"auto"`` (exact for integer orders, quadrature for n <= 2,
    Monte Carlo otherwise), ``"quadrature"`` or ``"mc"``.
    """

    method: str = "auto"
    samples: int = 10**5
    seed: int = 0
    grid: QuadratureSpec = field(default_factory=QuadratureSpec)
    budget: int = 10**7

    def __post_init__(self):
        if self.method not in ("auto", "quadrature", "mc"):
            raise ValueError(f"policy method must be auto, quadrature or mc, got {self.method!r}")


def is_integer_order(alpha: float) -> bool:
    return math.isfinite(alpha) and alpha >= 2 and float(alpha).is_integer()


def renyi(m: GaussianMixture, alpha: float, policy: EstimatorPolicy | None = None) -> EntropyEstimate:
    """Rényi entropy of any order in [0, inf] using the cheapest adequate estimator."""
    policy = policy or EstimatorPolicy()
    if alpha == 0:
        # full support
        return EntropyEstimate(0.0, math.inf, 0.0, EXACT, {"note": "support is all of R^n"})
    if math.isinf(alpha):
        return renyi_sup(m)
    _check_alpha(alpha)
    if policy.method == "auto" and is_integer_order(alpha):
        try:
            return renyi_exact_integer(m, int(alpha), policy.budget)
        except BudgetExceeded:
            pass
    if policy.method == "quadrature" or (policy.method == "auto" and m.dim <= 2):
        return renyi_quadrature(m, alpha, policy.grid)
    return renyi_monte_carlo(m, alpha, policy.samples, policy.seed)


def shannon(m: GaussianMixture, policy: EstimatorPolicy | None = None) -> EntropyEstimate:
    return renyi(m, 1.0, policy)


def gaussian_renyi(dim: int, logdet_cov: float, alpha: float) -> float:
    """Rényi entropy of a single Gaussian with the given log-determinant of covariance."""
    base = 0.5 * dim * LOG_2PI + 0.5 * logdet_cov
    if alpha == 1:
        return base + 0.5 * dim
    if math.isinf(alpha):
        return base
    if alpha == 0:
        return math.inf
    return base + 0.5 * dim * math.log(alpha) / (alpha - 1)


def entropy_power_estimate(m: GaussianMixture, policy: EstimatorPolicy | None = None) -> tuple[float, float, EntropyEstimate]:
    """``N = exp(2h/n)`` with a first-order standard error."""
    h = shannon(m, policy)
    n_pow = math.exp(2.0 * h.value / m.dim)
    return n_pow, n_pow * 2.0 / m.dim * h.std_err, h


def entropy_power(m: GaussianMixture, policy: EstimatorPolicy | None = None) -> float:
    return entropy_power_estimate(m, policy)[0]
