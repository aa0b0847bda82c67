"""Entropy-power experiments on (possibly pre-smoothed) point configurations.

``X`` is a point configuration convolved with variance-``s0`` Gaussian noise
(``s0 = 0`` means discrete, in which case ``N(X) = 0``).  Every quantity
below reduces to the entropy power of a Gaussian mixture with a shared
covariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .configspace import PointConfiguration
from .errors import BandwidthRequired, OperatorNormExceeded
from .gaussmix import EstimatorPolicy, GaussianMixture, entropy_power_estimate
from .kpverify import ABS_TOL, verdict

TWO_PI_E = 2.0 * math.pi * math.e
NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SmoothedConfig:
    base: PointConfiguration
    s0: float = 0.0
    linear_map: np.ndarray | None = None

    def __post_init__(self):
        if self.s0 < 0:
            raise ValueError(f"bandwidth must be nonnegative, got {self.s0!r}")
        if self.linear_map is not None:
            a = np.atleast_2d(np.asarray(self.linear_map, dtype=float))
            if a.shape != (self.base.dim, self.base.dim):
                raise ValueError(f"linear map must be {self.base.dim}x{self.base.dim}, got {a.shape}")
            if operator_norm(a) > 1.0 + NORM_TOL:
                raise OperatorNormExceeded(f"operator norm {operator_norm(a):.17g} exceeds 1")
            object.__setattr__(self, "linear_map", a)

    @property
    def dim(self) -> int:
        return self.base.dim

    def smoothed(self, s: float, scale: float = 1.0) -> GaussianMixture:
        """Law of ``scale * X + sqrt(s) Z``."""
        cov = (scale * scale * self.s0 + s) * np.eye(self.dim)
        return GaussianMixture(scale * self.base.points, self.base.weights, cov)

    def mapped_plus_noise(self, s: float = 1.0) -> GaussianMixture:
        """Law of ``A X + sqrt(s) Z``: centers A c_i, covariance A s0 A^T + s I."""
        a = np.eye(self.dim) if self.linear_map is None else self.linear_map
        cov = self.s0 * a @ a.T + s * np.eye(self.dim)
        return GaussianMixture(self.base.points @ a.T, self.base.weights, 0.5 * (cov + cov.T))

    def entropy_power(self, policy: EstimatorPolicy | None = None) -> tuple[float, float]:
        """``N(X)`` and its standard error; exactly zero for a discrete configuration."""
        if self.s0 == 0:
            return 0.0, 0.0
        n_pow, se, _ = entropy_power_estimate(self.smoothed(0.0), policy)
        return n_pow, se


def operator_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.atleast_2d(a), 2))


@dataclass
class ConcavityReport:
    s: np.ndarray
    entropy_powers: np.ndarray
    std_errs: np.ndarray
    first_differences: np.ndarray
    second_differences: np.ndarray
    second_std_errs: np.ndarray
    method: str

    def concave(self, abs_tol: float = 0.0, n_sigma: float = 3.0) -> bool:
        return bool(np.all(self.second_differences <= np.maximum(abs_tol, n_sigma * self.second_std_errs)))


def costa_concavity_report(x: SmoothedConfig, s_grid, policy: EstimatorPolicy | None = None) -> ConcavityReport:
    """Second differences of ``s -> N(X + sqrt(s) Z)`` on a uniform grid."""
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.size < 3:
        raise ValueError("need at least three noise levels")
    if np.any(s_grid <= 0) or np.any(np.diff(s_grid) <= 0):
        raise ValueError("noise levels must be positive and increasing")
    steps = np.diff(s_grid)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise ValueError("the noise grid must be uniform")
    results = [entropy_power_estimate(x.smoothed(s), policy) for s in s_grid]
    n_pow = np.array([r[0] for r in results])
    se = np.array([r[1] for r in results])
    second = n_pow[2:] - 2 * n_pow[1:-1] + n_pow[:-2]
    second_se = np.sqrt(se[2:] ** 2 + 4 * se[1:-1] ** 2 + se[:-2] ** 2)
    return ConcavityReport(s_grid, n_pow, se, np.diff(n_pow), second, second_se, results[0][2].method)


@dataclass
class ABetaSeries:
    beta: np.ndarray
    values: np.ndarray
    std_errs: np.ndarray
    n_x: float

    def nondecreasing(self, abs_tol: float = 0.0, n_sigma: float = 3.0) -> bool:
        steps = np.diff(self.values)
        tol = np.maximum(abs_tol, n_sigma * np.sqrt(self.std_errs[1:] ** 2 + self.std_errs[:-1] ** 2))
        return bool(np.all(steps >= -tol))


def a_beta_series(
    x: SmoothedConfig,
    beta_grid,
    policy: EstimatorPolicy | None = None,
    allow_discrete: bool = False,
) -> ABetaSeries:
    """``A(beta) = N(beta X + Z) - N(beta X) = N(beta X + Z) - beta^2 N(X)``."""
    if x.s0 == 0 and not allow_discrete:
        raise BandwidthRequired("A(beta) needs s0 > 0 (or allow_discrete=True to use N(beta X) = 0)")
    beta = np.asarray(beta_grid, dtype=float)
    if np.any(beta < 0) or np.any(beta > 1):
        raise ValueError("beta must lie in [0, 1]")
    n_x, n_x_se = x.entropy_power(policy)
    vals, ses = [], []
    for b in beta:
        n_sum, se_sum, _ = entropy_power_estimate(x.smoothed(1.0, scale=b), policy)
        vals.append(n_sum - b * b * n_x)
        ses.append(math.hypot(se_sum, b * b * n_x_se))
    return ABetaSeries(beta, np.array(vals), np.array(ses), n_x)


@dataclass
class UnifiedCheck:
    n_x_plus_z: float
    n_ax_plus_z: float
    n_x: float
    lipschitz: float
    gap: float
    std_err: float
    verdict: str
    notes: list[str] = field(default_factory=list)


def unified_inequality_check(x: SmoothedConfig, policy: EstimatorPolicy | None = None, abs_tol: float = ABS_TOL) -> UnifiedCheck:
    """``N(X+Z) - N(AX+Z) - (1 - L^2) N(X)`` for a linear map A with norm L <= 1."""
    a = np.eye(x.dim) if x.linear_map is None else x.linear_map
    lip = min(operator_norm(a), 1.0)
    n1, se1, _ = entropy_power_estimate(x.smoothed(1.0), policy)
    n2, se2, _ = entropy_power_estimate(x.mapped_plus_noise(1.0), policy)
    n_x, se_x = x.entropy_power(policy)
    gap = n1 - n2 - (1.0 - lip * lip) * n_x
    se = math.sqrt(se1**2 + se2**2 + ((1.0 - lip * lip) * se_x) ** 2)
    notes = []
    if x.s0 == 0:
        notes.append("discrete X: N(X) = 0, the check reduces to the entropic Kneser-Poulsen inequality")
    return UnifiedCheck(n1, n2, n_x, lip, gap, se, verdict(gap, se, abs_tol), notes)


def random_linear_contraction(gen: np.random.Generator, dim: int) -> np.ndarray:
    """A random matrix rescaled to an operator norm drawn uniformly from [0, 1]."""
    m = gen.standard_normal((dim, dim))
    norm = operator_norm(m)
    target = float(gen.random())
    return m * (target / norm) if norm > 0 else np.zeros((dim, dim))
