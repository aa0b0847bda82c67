"""Single-point monotone extension.

Given pairs (x_i, y_i) with <x_i - x_j, y_i - y_j> >= 0 and a new base point
x0, find y0 with <x0 - x_i, y0 - y_i> >= 0 for every i.  Each constraint is a
half-space in y0, so this is a small linear feasibility problem.  It is solved
by Motzkin-style relaxation, with an LP fallback that maximizes the smallest
slack.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch, Infeasible, NotInRelativeInterior

log = logging.getLogger(__name__)

MONOTONE_TOL = 1e-10
FEASIBILITY_TOL = 1e-9
INTERIOR_TOL = 1e-9
RELAXATION = 1.5
MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class MonotonePairs:
    xs: np.ndarray  # (k, n)
    ys: np.ndarray  # (k, n)

    def __post_init__(self):
        xs = np.atleast_2d(np.asarray(self.xs, float))
        ys = np.atleast_2d(np.asarray(self.ys, float))
        if xs.shape != ys.shape:
            raise DimensionMismatch(f"xs {xs.shape} and ys {ys.shape} differ in shape")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def dim(self) -> int:
        return self.xs.shape[1]

    def min_inner(self) -> float:
        """Smallest ``<x_i - x_j, y_i - y_j>``; the set is monotone when this is >= 0."""
        dx = self.xs[:, None, :] - self.xs[None, :, :]
        dy = self.ys[:, None, :] - self.ys[None, :, :]
        return float(np.min(np.einsum("ijk,ijk->ij", dx, dy)))

    def is_monotone(self, tol: float = MONOTONE_TOL) -> bool:
        return self.min_inner() >= -tol

    def augmented(self, x0, y0) -> "MonotonePairs":
        return MonotonePairs(np.vstack([self.xs, x0]), np.vstack([self.ys, y0]))


def interior_margin(points: np.ndarray, x0: np.ndarray) -> float:
    """Largest achievable minimum barycentric weight of ``x0`` over ``points``.

    Positive exactly when ``x0`` is in the relative interior of the convex
    hull; ``-inf`` when it is outside.
    """
    k = points.shape[0]
    # variables: lambda_1..lambda_k, tau ; maximize tau
    c = np.zeros(k + 1)
    c[-1] = -1.0
    a_eq = np.zeros((points.shape[1] + 1, k + 1))
    a_eq[:-1, :k] = points.T
    a_eq[-1, :k] = 1.0
    b_eq = np.append(x0, 1.0)
    a_ub = np.hstack([-np.eye(k), np.ones((k, 1))])  # tau - lambda_i <= 0
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(k), A_eq=a_eq, b_eq=b_eq,
                  bounds=[(0, None)] * k + [(None, 1.0)], method="highs")
    if res.status != 0:
        return -np.inf
    return float(-res.fun)


def _relaxation(a: np.ndarray, b: np.ndarray, y: np.ndarray, target: float) -> tuple[np.ndarray, int]:
    """Project onto the most violated half-space ``a_i . y >= b_i`` until all hold within ``target``."""
    norms = np.einsum("ij,ij->i", a, a)
    for it in range(MAX_ITER):
        slack = a @ y - b
        worst = int(np.argmin(slack))
        if slack[worst] >= target:
            return y, it
        y = y - RELAXATION * slack[worst] / norms[worst] * a[worst]
    return y, MAX_ITER


def _lp_extension(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    n = a.shape[1]
    # variables: y (free), t <= 1 ; maximize t subject to a_i . y - b_i >= t
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-a, np.ones((a.shape[0], 1))])
    res = linprog(c, A_ub=a_ub, b_ub=-b, bounds=[(None, None)] * n + [(None, 1.0)], method="highs-ds")
    if res.status != 0:
        return None
    return res.x[:n]


def extend_monotone(pairs: MonotonePairs, x0, check_interior: bool = True) -> np.ndarray:
    """Return y0 such that ``pairs`` plus ``(x0, y0)`` is still monotone.

    With ``check_interior`` the base point must lie in the relative interior
    of the convex hull of the x_i.  For a finite set a feasible y0 exists at
    every x0, so callers that only need the finite extension may skip the
    check.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.shape[0] != pairs.dim:
        raise DimensionMismatch(f"x0 has length {x0.shape[0]}, pairs live in R^{pairs.dim}")
    hit = np.nonzero(np.all(pairs.xs == x0, axis=1))[0]
    if hit.size:
        return pairs.ys[hit[0]].copy()
    if check_interior and interior_margin(pairs.xs, x0) < INTERIOR_TOL:
        raise NotInRelativeInterior("x0 is not in the relative interior of the convex hull of the base points")

    a = x0 - pairs.xs  # <a_i, y0> >= <a_i, y_i>
    keep = np.einsum("ij,ij->i", a, a) > 0
    a, b = a[keep], np.einsum("ij,ij->i", a[keep], pairs.ys[keep])
    if not a.size:
        return pairs.ys.mean(axis=0)
    scale = max(1.0, float(np.max(np.abs(b))))
    y, iters = _relaxation(a, b, pairs.ys[keep].mean(axis=0), target=-1e-12 * scale)
    if np.min(a @ y - b) < -1e-12 * scale:
        log.debug("relaxation stalled after %d iterations; using the LP fallback", iters)
        y_lp = _lp_extension(a, b)
        if y_lp is None or np.min(a @ y_lp - b) < -FEASIBILITY_TOL:
            raise Infeasible(
                f"no monotone extension found at x0={x0.tolist()} "
                f"(min slack {np.min(a @ y - b):.3g}, pairs monotone: {pairs.is_monotone()})"
            )
        y = y_lp
    return y


def extend_velocity_at_mean(post) -> np.ndarray:
    """Velocity value at the posterior mean position that keeps the field monotone (decreasing).

    The pairs ``(c_i, -v_i)`` are monotone for a contracting family, so the
    extension is computed there and negated back.  Because ``sum_i p_i (c_i -
    EY) = 0``, the divergence sum is unchanged when the posterior mean
    velocity is replaced by the returned value; this is asserted.
    """
    c, v, p = post.positions, post.velocities, post.p
    mean = p @ c
    pairs = MonotonePairs(c, -v)
    w = -extend_monotone(pairs, mean, check_interior=False)
    vbar = p @ v
    with_w = float(p @ np.einsum("kn,kn->k", v - w, c - mean))
    with_mean = float(p @ np.einsum("kn,kn->k", v - vbar, c - mean))
    scale = max(1.0, float(p @ (np.linalg.norm(v - w, axis=1) * np.linalg.norm(c - mean, axis=1))))
    if abs(with_w - with_mean) > 1e-12 * scale:
        raise AssertionError(f"constant substitution changed the divergence sum: {with_w} vs {with_mean}")
    return w


def substituted_divergence_terms(post, w: np.ndarray) -> np.ndarray:
    """Per-component terms ``<v_i - w, c_i - EY> / s``; each is <= 0 when ``w`` is a monotone extension."""
    c, v, p = post.positions, post.velocities, post.p
    mean = p @ c
    return np.einsum("kn,kn->k", v - w, c - mean) / post.s
