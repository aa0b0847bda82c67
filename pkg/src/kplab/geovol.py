"""Monte Carlo volume of a union of equal balls.

Coverage-count estimator: pick a ball uniformly, a point uniformly inside
it, and score ``k vol(B_r) / #{balls covering the point}``.  The mean score is
unbiased for the union volume, and every sample scores exactly
``k vol(B_r)`` when the balls are disjoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import _rng
from .configspace import ContractionPair

CONSISTENT = "consistent"
WITHIN_NOISE = "inconsistent-within-noise"
INCONSISTENT = "INCONSISTENT"


@dataclass(frozen=True, eq=False)
class BallUnion:
    centers: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if c.shape[0] < 1:
            raise ValueError("need at least one ball")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "centers", c)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def k(self) -> int:
        return self.centers.shape[0]


def ball_volume(n: int, r: float) -> float:
    return math.exp(0.5 * n * math.log(math.pi) + n * math.log(r) - gammaln(0.5 * n + 1))


def lens_union_area(d: float, r: float = 1.0) -> float:
    """Area of the union of two radius-r disks whose centres are d apart."""
    if d >= 2 * r:
        return 2 * math.pi * r * r
    lens = 2 * r * r * math.acos(d / (2 * r)) - 0.5 * d * math.sqrt(4 * r * r - d * d)
    return 2 * math.pi * r * r - lens


def _ball_draws(k: int, n: int, samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Ball indices and offsets uniform in the unit ball."""
    idx = _rng.draw(seed, _rng.COMPONENT, samples, lambda g, m: g.integers(0, k, size=m))
    g = _rng.draw(seed, _rng.DIRECTION, samples, lambda gen, m: gen.standard_normal((m, n)))
    u = _rng.draw(seed, _rng.RADIUS, samples, lambda gen, m: gen.random(m))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    return idx, g / norms * u[:, None] ** (1.0 / n)


def _scores(centers: np.ndarray, r: float, idx: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    k, n = centers.shape
    x = centers[idx] + r * offsets
    counts = np.zeros(len(x))
    r2 = r * r
    for c in centers:
        d = x - c
        counts += np.einsum("mn,mn->m", d, d) <= r2
    # the sampled ball always covers its own point; guard against rounding at the rim
    counts = np.maximum(counts, 1)
    return k * ball_volume(n, r) / counts


def union_volume_mc(u: BallUnion, samples: int = 10**5, seed: int = 0) -> tuple[float, float]:
    """Union volume and its standard error."""
    if samples < 10**4:
        raise ValueError("need at least 10^4 samples")
    idx, off = _ball_draws(u.k, u.dim, samples, seed)
    w = _scores(u.centers, u.radius, idx, off)
    return float(w.mean()), float(w.std(ddof=1) / math.sqrt(samples))


@dataclass
class GeometricCheck:
    vol_source: float
    vol_target: float
    se_source: float
    se_target: float
    gap: float
    std_err: float
    verdict: str
    status: str


def _status(pair: ContractionPair) -> str:
    if pair.source.dim <= 2:
        return "theorem (planar case)"
    return "CONJECTURAL (theorem only for continuous contractions)"


def kp_geometric_check(pair: ContractionPair, r: float, samples: int = 10**5, seed: int = 0) -> GeometricCheck:
    """Compare union volumes before and after a contraction using common random numbers.

    ``consistent`` means the gap is at least -3 standard errors, and
    ``inconsistent-within-noise`` means it lies between -3 and -5.  Anything
    lower, or any negative gap with zero variance, is ``INCONSISTENT``.
    """
    if samples < 10**4:
        raise ValueError("need at least 10^4 samples")
    src, tgt = pair.source.points, pair.target.points
    idx, off = _ball_draws(pair.k, pair.source.dim, samples, seed)
    ws = _scores(src, r, idx, off)
    wt = _scores(tgt, r, idx, off)
    root = math.sqrt(samples)
    vs, vt = float(ws.mean()), float(wt.mean())
    gap = vs - vt
    se = float(np.std(ws - wt, ddof=1) / root)
    tiny = 1e-12 * max(vs, vt)
    if gap >= -max(3 * se, tiny):
        v = CONSISTENT
    elif gap >= -5 * se:
        v = WITHIN_NOISE
    else:
        v = INCONSISTENT
    return GeometricCheck(
        vs, vt, float(ws.std(ddof=1) / root), float(wt.std(ddof=1) / root), gap, se, v, _status(pair)
    )
