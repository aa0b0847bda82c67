"""Weighted point configurations and contraction pairs.

A :class:`PointConfiguration` is a finitely supported probability measure on
R^n.  A :class:`ContractionPair` couples a configuration with its image under
a map that does not increase any pairwise distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _rng
from .errors import (
    DimensionMismatch,
    EmptyConfiguration,
    InconsistentCollapse,
    NonPositiveWeightSum,
    NotAContraction,
)

WEIGHT_SUM_TOL = 1e-9
PAIR_TOL = 1e-12  # absolute, on squared distances
COINCIDENT_TOL = 1e-24

Map = Callable[[np.ndarray], np.ndarray]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointConfiguration:
    dim: int
    points: np.ndarray  # (k, dim)
    weights: np.ndarray  # (k,)

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))
        object.__setattr__(self, "weights", _frozen(self.weights))

    @property
    def k(self) -> int:
        return self.points.shape[0]

    def translated(self, shift) -> "PointConfiguration":
        return PointConfiguration(self.dim, self.points + np.asarray(shift, float), self.weights)

    def transformed(self, matrix, shift=None) -> "PointConfiguration":
        """Image under ``x -> matrix @ x + shift`` (``matrix`` may change the dimension)."""
        matrix = np.atleast_2d(np.asarray(matrix, float))
        pts = self.points @ matrix.T
        if shift is not None:
            pts = pts + np.asarray(shift, float)
        return PointConfiguration(matrix.shape[0], pts, self.weights)

    def padded(self, extra: int) -> "PointConfiguration":
        """Embed as ``(x, 0)`` in R^(dim + extra)."""
        pts = np.hstack([self.points, np.zeros((self.k, extra))])
        return PointConfiguration(self.dim + extra, pts, self.weights)

    def with_weights(self, weights) -> "PointConfiguration":
        return validate_configuration(self.dim, self.points, weights)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
        }


def validate_configuration(dim: int, points, weights) -> PointConfiguration:
    """Build a :class:`PointConfiguration` from raw lists.

    Weights within 1e-9 of summing to one are renormalized; anything further
    off is rejected.
    """
    if int(dim) != dim or dim < 1:
        raise DimensionMismatch(f"dim must be a positive integer, got {dim!r}")
    dim = int(dim)
    rows = [np.atleast_1d(np.asarray(p, dtype=float)) for p in points]
    if not rows:
        raise EmptyConfiguration("a configuration needs at least one point")
    for i, p in enumerate(rows):
        if p.ndim != 1 or p.shape[0] != dim:
            raise DimensionMismatch(f"point {i} has shape {p.shape}, expected ({dim},)")
    pts = np.vstack(rows)
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape[0] != pts.shape[0]:
        raise DimensionMismatch(f"{pts.shape[0]} points but {w.shape[0]} weights")
    if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(w)):
        raise DimensionMismatch("points and weights must be finite")
    if np.any(w < 0):
        raise NonPositiveWeightSum("weights must be nonnegative")
    total = float(w.sum())
    if total <= 0 or abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise NonPositiveWeightSum(f"weights sum to {total!r}, expected 1")
    return PointConfiguration(dim, pts, w / total)


def uniform_configuration(points) -> PointConfiguration:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise EmptyConfiguration("a configuration needs at least one point")
    k = pts.shape[0]
    return validate_configuration(pts.shape[1], pts, np.full(k, 1.0 / k))


@dataclass(frozen=True, eq=False)
class ContractionPair:
    source: PointConfiguration
    target: PointConfiguration
    lipschitz_bound: float
    label: str = field(default="")

    @property
    def k(self) -> int:
        return self.source.k


def _sq_dists(pts: np.ndarray) -> np.ndarray:
    diff = pts[:, None, :] - pts[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def make_contraction_pair(source: PointConfiguration, target: PointConfiguration, label: str = "") -> ContractionPair:
    """Certify that ``source -> target`` (index-aligned) is a contraction.

    The returned bound is the largest distance ratio over pairs with distinct
    sources; it is 0 when there is no such pair.
    """
    if source.k != target.k:
        raise DimensionMismatch(f"source has {source.k} points, target has {target.k}")
    if not np.allclose(source.weights, target.weights, rtol=0, atol=1e-12):
        raise DimensionMismatch("source and target weights differ")
    ds = _sq_dists(source.points)
    dt = _sq_dists(target.points)
    iu, ju = np.triu_indices(source.k, 1)
    ds, dt = ds[iu, ju], dt[iu, ju]

    coincident = ds <= COINCIDENT_TOL
    bad = coincident & (dt > PAIR_TOL)
    if np.any(bad):
        m = int(np.argmax(bad))
        raise InconsistentCollapse(int(iu[m]), int(ju[m]))

    expands = ~coincident & (dt > ds + PAIR_TOL)
    ratio = np.zeros_like(ds)
    ratio[~coincident] = np.sqrt(dt[~coincident] / ds[~coincident])
    if np.any(expands):
        m = int(np.argmax(np.where(expands, ratio, -np.inf)))
        raise NotAContraction(int(iu[m]), int(ju[m]), float(ratio[m]))
    lip = float(min(ratio.max(), 1.0)) if ratio.size else 0.0
    return ContractionPair(source, target, lip, label)


# -- 1-Lipschitz primitives --------------------------------------------------
# Each returns a vectorized map acting on (m, n) arrays.


def scaling_map(beta: float, center) -> Map:
    center = np.asarray(center, float)
    return lambda x: center + beta * (x - center)


def ball_projection(center, radius: float) -> Map:
    center = np.asarray(center, float)

    def project(x):
        d = x - center
        norm = np.linalg.norm(d, axis=-1, keepdims=True)
        scale = np.where(norm > radius, radius / np.where(norm > 0, norm, 1.0), 1.0)
        return center + d * scale

    return project


def halfspace_projection(normal, offset: float) -> Map:
    """Metric projection onto ``{x : <normal, x> <= offset}``."""
    a = np.asarray(normal, float)
    a = a / np.linalg.norm(a)
    return lambda x: x - np.maximum(x @ a - offset, 0.0)[:, None] * a


def fold_map(normal, offset: float) -> Map:
    """Reflect the side ``<normal, x> > offset`` onto the other side."""
    a = np.asarray(normal, float)
    a = a / np.linalg.norm(a)
    return lambda x: x - 2.0 * np.maximum(x @ a - offset, 0.0)[:, None] * a


def compose(*maps: Map) -> Map:
    def composed(x):
        for m in maps:
            x = m(x)
        return x

    return composed


def apply_map(source: PointConfiguration, fn: Map, label: str = "") -> ContractionPair:
    target = PointConfiguration(source.dim, fn(source.points.copy()), source.weights)
    return make_contraction_pair(source, target, label)


RANDOM_METHODS = ("scaling", "projection", "composition", "folding")


def _random_unit(gen: np.random.Generator, dim: int) -> np.ndarray:
    v = gen.standard_normal(dim)
    return v / np.linalg.norm(v)


def _random_primitive(kind: str, source: PointConfiguration, gen: np.random.Generator) -> tuple[Map, str]:
    pts = source.points
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    spread = float(np.max(hi - lo)) or 1.0
    point_in_box = lambda: lo + gen.random(source.dim) * (hi - lo)
    if kind == "scaling":
        beta = float(gen.random())
        c = point_in_box()
        return scaling_map(beta, c), f"scaling(beta={beta:.6g})"
    if kind == "ball":
        c = point_in_box()
        r = float(gen.uniform(0.05, 1.0)) * spread
        return ball_projection(c, r), f"ball(r={r:.6g})"
    if kind == "halfspace":
        a = _random_unit(gen, source.dim)
        proj = pts @ a
        b = float(gen.uniform(proj.min(), proj.max())) if proj.max() > proj.min() else float(proj[0])
        return halfspace_projection(a, b), "halfspace"
    if kind == "fold":
        a = _random_unit(gen, source.dim)
        proj = pts @ a
        b = float(gen.uniform(proj.min(), proj.max())) if proj.max() > proj.min() else float(proj[0])
        return fold_map(a, b), "fold"
    raise ValueError(f"unknown primitive {kind!r}")


def random_contraction(source: PointConfiguration, method: str, seed: int) -> ContractionPair:
    """Draw a random 1-Lipschitz map of the given family and apply it to ``source``."""
    gen = _rng.generator(seed)
    if method == "scaling":
        fn, label = _random_primitive("scaling", source, gen)
    elif method == "projection":
        kind = "ball" if gen.random() < 0.5 else "halfspace"
        fn, label = _random_primitive(kind, source, gen)
    elif method == "folding":
        fn, label = _random_primitive("fold", source, gen)
    elif method == "composition":
        depth = int(gen.integers(1, 4))
        kinds = gen.choice(["scaling", "ball", "halfspace", "fold"], size=depth)
        parts = [_random_primitive(str(kd), source, gen) for kd in kinds]
        fn = compose(*(p[0] for p in parts))
        label = "∘".join(p[1] for p in parts)
    else:
        raise ValueError(f"method must be one of {RANDOM_METHODS}, got {method!r}")
    try:
        return apply_map(source, fn, f"{method}:{label}")
    except (NotAContraction, InconsistentCollapse) as exc:  # pragma: no cover
        raise AssertionError(f"1-Lipschitz primitive produced an expansion: {exc}") from exc


def random_configuration(gen: np.random.Generator, dim: int, k: int, scale: float = 2.0, dirichlet: bool = True) -> PointConfiguration:
    pts = gen.uniform(-scale, scale, size=(k, dim))
    w = gen.dirichlet(np.ones(k)) if dirichlet else np.full(k, 1.0 / k)
    return validate_configuration(dim, pts, w)
