"""Entropy comparisons between a configuration and its contractive image.

For a contraction pair ``(X, T(X))`` and noise variance ``s`` the harness
compares ``h_alpha(X + sqrt(s) Z)`` with ``h_alpha(T(X) + sqrt(s) Z)`` and
flags a violation only when the gap is negative beyond both an absolute
tolerance and three combined standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ._parallel import parallel_map
from .configspace import ContractionPair, PointConfiguration
from .errors import KplabError
from .gaussmix import (
    EXACT,
    MONTE_CARLO,
    QUADRATURE,
    SUP,
    EntropyEstimate,
    EstimatorPolicy,
    GaussianMixture,
    is_integer_order,
    renyi_exact_integer,
    renyi_monte_carlo_paired,
    renyi_quadrature,
    renyi_sup,
    shannon,
)
from .errors import BudgetExceeded

DEFAULT_ORDERS = (0.5, 1.0, 2.0, 3.0, math.inf)
DEFAULT_NOISES = (0.25, 1.0, 4.0)
ABS_TOL = 1e-6

HOLDS = "holds"
WITHIN_NOISE = "holds-within-noise"
VIOLATION = "VIOLATION"
SKIPPED = "skipped"


def verdict(gap: float, std_err: float, abs_tol: float = ABS_TOL) -> str:
    if gap >= 0:
        return HOLDS
    if gap >= -max(abs_tol, 3.0 * std_err):
        return WITHIN_NOISE
    return VIOLATION


@dataclass
class KpRow:
    alpha: float
    s: float
    h_source: float
    h_target: float
    gap: float
    std_err: float
    method: str
    verdict: str
    note: str = ""


@dataclass
class KpReport:
    pair_id: str
    rows: list[KpRow] = field(default_factory=list)

    @property
    def violations(self) -> list[KpRow]:
        return [r for r in self.rows if r.verdict == VIOLATION]

    @property
    def ok(self) -> bool:
        return not self.violations


def _compare(src: GaussianMixture, tgt: GaussianMixture, alpha: float, policy: EstimatorPolicy) -> tuple[EntropyEstimate, EntropyEstimate, float]:
    """Estimate both entropies with one method; returns them and the gap's standard error."""
    if math.isinf(alpha):
        return renyi_sup(src), renyi_sup(tgt), 0.0
    if policy.method == "auto" and is_integer_order(alpha):
        try:
            return (
                renyi_exact_integer(src, int(alpha), policy.budget),
                renyi_exact_integer(tgt, int(alpha), policy.budget),
                0.0,
            )
        except BudgetExceeded:
            pass
    if policy.method == "quadrature" or (policy.method == "auto" and src.dim <= 2):
        return renyi_quadrature(src, alpha, policy.grid), renyi_quadrature(tgt, alpha, policy.grid), 0.0
    return renyi_monte_carlo_paired(src, tgt, alpha, policy.samples, policy.seed)


def compare_mixtures(src: GaussianMixture, tgt: GaussianMixture, alpha: float, s: float, policy: EstimatorPolicy, abs_tol: float = ABS_TOL) -> KpRow:
    if alpha == 0:
        return KpRow(alpha, s, math.inf, math.inf, math.nan, 0.0, EXACT, SKIPPED, "order 0: both sides +inf")
    try:
        hs, ht, se = _compare(src, tgt, alpha, policy)
    except KplabError as exc:
        return KpRow(alpha, s, math.nan, math.nan, math.nan, math.nan, "", SKIPPED, str(exc))
    gap = hs.value - ht.value
    return KpRow(alpha, s, hs.value, ht.value, gap, se, hs.method, verdict(gap, se, abs_tol))


def verify_kp_entropy(
    pair: ContractionPair,
    orders=DEFAULT_ORDERS,
    noises=DEFAULT_NOISES,
    policy: EstimatorPolicy | None = None,
    pair_id: str = "",
    abs_tol: float = ABS_TOL,
) -> KpReport:
    """One row per ``(alpha, s)``, in the order of ``orders`` then ``noises``."""
    policy = policy or EstimatorPolicy()
    for a in orders:
        if not a >= 0:
            raise ValueError(f"orders must lie in [0, inf], got {a!r}")
    for s in noises:
        if not s > 0:
            raise ValueError(f"noise variances must be positive, got {s!r}")
    tasks = [(a, s) for a in orders for s in noises]

    def run(task):
        a, s = task
        src = GaussianMixture.from_configuration(pair.source, s)
        tgt = GaussianMixture.from_configuration(pair.target, s)
        return compare_mixtures(src, tgt, float(a), float(s), policy, abs_tol)

    return KpReport(pair_id or pair.label, parallel_map(run, tasks))


def mutual_information(config: PointConfiguration, s: float, policy: EstimatorPolicy | None = None) -> EntropyEstimate:
    """``I(X; X + sqrt(s) Z) = h(X + sqrt(s) Z) - (n/2) log(2 pi e s)`` in nats."""
    if not s > 0:
        raise ValueError(f"noise variance must be positive, got {s!r}")
    h = shannon(GaussianMixture.from_configuration(config, s), policy)
    noise_h = 0.5 * config.dim * math.log(2.0 * math.pi * math.e * s)
    meta = dict(h.metadata, output_entropy=h.value, noise_entropy=noise_h)
    return EntropyEstimate(1.0, h.value - noise_h, h.std_err, h.method, meta)


@dataclass
class MiComparison:
    i_source: float
    i_target: float
    gap: float
    std_err: float
    method: str
    verdict: str


def verify_mi_contraction(pair: ContractionPair, s: float, policy: EstimatorPolicy | None = None, abs_tol: float = ABS_TOL) -> MiComparison:
    """Mutual information before and after the contraction.

    The noise entropies cancel, so the gap equals the order-1 entropy gap.
    """
    policy = policy or EstimatorPolicy()
    if not s > 0:
        raise ValueError(f"noise variance must be positive, got {s!r}")
    src = GaussianMixture.from_configuration(pair.source, s)
    tgt = GaussianMixture.from_configuration(pair.target, s)
    hs, ht, se = _compare(src, tgt, 1.0, policy)
    noise_h = 0.5 * pair.source.dim * math.log(2.0 * math.pi * math.e * s)
    i_s, i_t = hs.value - noise_h, ht.value - noise_h
    gap = hs.value - ht.value
    return MiComparison(i_s, i_t, gap, se, hs.method, verdict(gap, se, abs_tol))


__all__ = [
    "ABS_TOL",
    "DEFAULT_NOISES",
    "DEFAULT_ORDERS",
    "HOLDS",
    "KpReport",
    "KpRow",
    "MONTE_CARLO",
    "MiComparison",
    "QUADRATURE",
    "SKIPPED",
    "SUP",
    "VIOLATION",
    "WITHIN_NOISE",
    "compare_mixtures",
    "mutual_information",
    "verdict",
    "verify_kp_entropy",
    "verify_mi_contraction",
]
