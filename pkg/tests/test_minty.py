import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kplab.configspace import random_configuration, random_contraction
from kplab.errors import NotInRelativeInterior
from kplab.flow import TrajectoryFamily, bezdek_connelly_lift, convolved_divergence, posterior, sample_smoothed
from kplab.minty import (
    MonotonePairs,
    extend_monotone,
    extend_velocity_at_mean,
    interior_margin,
    substituted_divergence_terms,
)


def test_identity_field(gen):
    xs = gen.normal(size=(6, 3))
    x0 = gen.dirichlet(np.ones(6)) @ xs
    y0 = extend_monotone(MonotonePairs(xs, xs.copy()), x0)
    assert MonotonePairs(xs, xs.copy()).augmented(x0, y0).min_inner() >= -1e-9


def test_two_constraints_by_hand():
    pairs = MonotonePairs(np.array([[0.0], [2.0]]), np.array([[-1.0], [0.0]]))
    y0 = extend_monotone(pairs, np.array([1.0]))
    assert -1.0 - 1e-9 <= y0[0] <= 1e-9


def test_outside_hull():
    pairs = MonotonePairs(np.array([[0.0], [1.0]]), np.array([[0.0], [1.0]]))
    with pytest.raises(NotInRelativeInterior):
        extend_monotone(pairs, np.array([2.0]))
    assert interior_margin(pairs.xs, np.array([0.5])) == pytest.approx(0.5, abs=1e-9)


def test_existing_point_returns_its_value():
    pairs = MonotonePairs(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.array([[0.0, 0.0], [2.0, 1.0], [0.0, 3.0]]))
    np.testing.assert_array_equal(extend_monotone(pairs, np.array([1.0, 0.0])), [2.0, 1.0])


def test_rejects_non_monotone_input():
    pairs = MonotonePairs(np.array([[0.0], [1.0]]), np.array([[1.0], [0.0]]))
    assert not pairs.is_monotone()


@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(2, 10))
def test_random_linear_monotone_fields(seed, n, k):
    g = np.random.default_rng(seed)
    xs = g.uniform(-2, 2, size=(k, n))
    b, skew = g.normal(size=(n, n)), g.normal(size=(n, n))
    ys = xs @ (b @ b.T + skew - skew.T).T
    pairs = MonotonePairs(xs, ys)
    x0 = g.dirichlet(np.ones(k)) @ xs
    y0 = extend_monotone(pairs, x0)
    assert pairs.augmented(x0, y0).min_inner() >= -1e-9


def test_velocity_extension_single_and_stationary():
    u = np.array([[1.0, 2.0]])
    single = TrajectoryFamily(2, [1.0], lambda t: t * u, lambda t: u)
    post = posterior(single, 0.4, np.array([0.0, 0.0]), 1.0)
    np.testing.assert_allclose(extend_velocity_at_mean(post), u[0])
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    still = TrajectoryFamily(2, np.ones(3) / 3, lambda t: pts, lambda t: np.zeros_like(pts))
    w = extend_velocity_at_mean(posterior(still, 0.5, np.array([0.3, 0.3]), 1.0))
    np.testing.assert_array_equal(w, np.zeros(2))


@given(st.integers(0, 10**6))
def test_substitution_invariance_on_lifts(seed):
    g = np.random.default_rng(seed)
    c = random_configuration(g, 1 + seed % 2, 2 + seed % 5)
    fam = bezdek_connelly_lift(random_contraction(c, "composition", seed))
    t, s = float(g.uniform(0, 1)), float(g.uniform(0.2, 3))
    x = sample_smoothed(fam, t, s, 1, seed)[0]
    post = posterior(fam, t, x, s)
    w = extend_velocity_at_mean(post)
    terms = substituted_divergence_terms(post, w)
    # the relaxation accepts slack >= -1e-12 * max(1, |b|); each term is -slack / s
    b = np.einsum("kn,kn->k", post.positions - post.p @ post.positions, post.velocities)
    bound = 4e-12 * max(1.0, float(np.max(np.abs(b)))) / post.s
    assert np.all(terms <= bound)
    assert float(post.p @ terms) == pytest.approx(convolved_divergence(fam, t, x, s), abs=1e-12)
