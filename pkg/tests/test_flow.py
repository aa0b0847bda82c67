import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kplab.configspace import make_contraction_pair, random_configuration, random_contraction, validate_configuration
from kplab.flow import (
    ConvexFunctionalSpec,
    TrajectoryFamily,
    bezdek_connelly_lift,
    check_continuous_contraction,
    continuity_equation_check,
    convolved_divergence,
    convolved_velocity,
    default_t_grid,
    fd_divergence,
    functional_along_flow,
    homothety_family,
    posterior,
    sample_smoothed,
    velocity_monotonicity,
)
from kplab.gaussmix import EstimatorPolicy, GaussianMixture, renyi_exact_integer, renyi_quadrature


def cfg1(points):
    return validate_configuration(1, np.asarray(points, float).reshape(-1, 1), np.full(len(points), 1 / len(points)))


@pytest.fixture
def shrink():
    return bezdek_connelly_lift(make_contraction_pair(cfg1([0.0, 2.0]), cfg1([0.0, 1.0])))


def stationary(points):
    pts = np.asarray(points, float)
    return TrajectoryFamily(pts.shape[1], np.full(len(pts), 1 / len(pts)), lambda t: pts, lambda t: np.zeros_like(pts))


def test_lift_endpoints_and_midpoint(gen):
    c = random_configuration(gen, 2, 4)
    pair = random_contraction(c, "composition", 3)
    fam = bezdek_connelly_lift(pair)
    zeros = np.zeros_like(c.points)
    np.testing.assert_allclose(fam.positions(0), np.hstack([c.points, zeros]), atol=1e-15)
    np.testing.assert_allclose(fam.positions(1), np.hstack([pair.target.points, zeros]), atol=1e-15)
    mid = np.hstack([0.5 * (c.points + pair.target.points), 0.5 * (c.points - pair.target.points)])
    np.testing.assert_allclose(fam.positions(0.5), mid, atol=1e-15)


@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(2, 6))
def test_lift_is_continuous_contraction(seed, dim, k):
    c = random_configuration(np.random.default_rng(seed), dim, k)
    fam = bezdek_connelly_lift(random_contraction(c, ("scaling", "projection", "composition", "folding")[seed % 4], seed))
    grid = default_t_grid(101)
    assert check_continuous_contraction(fam, grid).ok
    assert velocity_monotonicity(fam, grid) <= 1e-8


def test_analytic_velocity_matches_finite_difference(gen):
    fam = bezdek_connelly_lift(random_contraction(random_configuration(gen, 2, 3), "folding", 1))
    fd = TrajectoryFamily(fam.dim, fam.weights, fam.positions)
    for t in (0.0, 0.3, 1.0):
        np.testing.assert_allclose(fd.velocities(t), fam.velocities(t), atol=1e-6)


def test_detects_expanding_family():
    pts = np.array([[0.0], [1.0]])
    fam = TrajectoryFamily(1, [0.5, 0.5], lambda t: pts * (1 + t), lambda t: pts)
    assert not check_continuous_contraction(fam).ok
    assert velocity_monotonicity(fam) > 0


def test_posterior_examples(shrink):
    one = stationary([[1.0, 2.0]])
    np.testing.assert_array_equal(posterior(one, 0.5, np.array([9.0, 9.0]), 1.0).p, [1.0])
    sym = stationary([[-1.0], [1.0]])
    np.testing.assert_allclose(posterior(sym, 0.0, np.array([0.0]), 2.0).p, [0.5, 0.5])
    two = stationary([[0.0], [2.0]])
    p = posterior(two, 0.0, np.array([0.0]), 1.0).p
    assert p[0] / p[1] == pytest.approx(math.e**2)
    assert p[0] == pytest.approx(0.8808, abs=1e-4)


def test_posterior_matches_mixture_posterior(shrink):
    x = np.array([0.4, 0.2])
    np.testing.assert_allclose(posterior(shrink, 0.3, x, 1.0).p, shrink.mixture(0.3, 1.0).posterior(x).ravel(), atol=1e-14)


def test_velocity_examples():
    assert np.all(convolved_velocity(stationary([[0.0], [1.0]]), 0.5, np.array([0.2]), 1.0) == 0)
    u = np.array([1.0, -2.0])
    single = TrajectoryFamily(2, [1.0], lambda t: (t * u)[None], lambda t: u[None])
    np.testing.assert_allclose(convolved_velocity(single, 0.4, np.array([5.0, 5.0]), 0.3), u)
    sym = TrajectoryFamily(1, [0.5, 0.5], lambda t: np.array([[-1 + t], [1 - t]]), lambda t: np.array([[1.0], [-1.0]]))
    assert convolved_velocity(sym, 0.2, np.array([0.0]), 1.0)[0] == pytest.approx(0.0, abs=1e-15)


def test_divergence_trivial_cases():
    u = np.array([1.0, -2.0])
    single = TrajectoryFamily(2, [1.0], lambda t: (t * u)[None], lambda t: u[None])
    assert convolved_divergence(single, 0.3, np.array([1.0, 1.0]), 1.0) == 0.0
    assert convolved_divergence(stationary([[0.0], [3.0]]), 0.3, np.array([1.0]), 1.0) == 0.0


def test_divergence_example(shrink):
    for x in sample_smoothed(shrink, 0.3, 1.0, 20, seed=11):
        div = convolved_divergence(shrink, 0.3, x, 1.0)
        assert div <= 0
        assert abs(div - fd_divergence(shrink, 0.3, x, 1.0)) <= 1e-6


def test_divergence_batch_matches_pointwise(shrink):
    xs = sample_smoothed(shrink, 0.6, 0.5, 7, seed=1)
    batch = convolved_divergence(shrink, 0.6, xs, 0.5)
    np.testing.assert_allclose(batch, [convolved_divergence(shrink, 0.6, x, 0.5) for x in xs], atol=1e-15)


def test_identity_lift_constant_series(gen):
    c = random_configuration(gen, 1, 3)
    fam = bezdek_connelly_lift(make_contraction_pair(c, c))
    series = functional_along_flow(fam, ConvexFunctionalSpec("power", 2.0), 1.0)
    np.testing.assert_allclose(series.values, series.values[0], rtol=1e-13)


def test_power_series_endpoints(shrink):
    series = functional_along_flow(shrink, ConvexFunctionalSpec("power", 2.0), 1.0)
    assert series.method == "exact-integer"
    assert series.values[-1] > series.values[0]
    assert series.nondecreasing()
    for t, d in ((0, 2.0), (-1, 1.0)):
        m = GaussianMixture(np.array([[0.0], [d]]), np.array([0.5, 0.5]), np.eye(1))
        # the extra lifted coordinate is a standard normal factor with integral 1/(2 sqrt(pi))
        expected = math.exp(-renyi_exact_integer(m, 2).value) / (2 * math.sqrt(math.pi))
        assert series.values[t] == pytest.approx(expected, rel=1e-12)


def test_xlogx_series_consistent_with_entropy(shrink):
    series = functional_along_flow(shrink, ConvexFunctionalSpec("xlogx"), 1.0)
    assert series.nondecreasing()
    h0 = renyi_quadrature(shrink.mixture(0.0, 1.0), 1.0).value
    h1 = renyi_quadrature(shrink.mixture(1.0, 1.0), 1.0).value
    assert series.values[0] == pytest.approx(-h0, abs=1e-10)
    assert series.values[-1] == pytest.approx(-h1, abs=1e-10)
    assert h1 < h0


def test_hockey_series_mc_and_quadrature_agree(shrink):
    phi = ConvexFunctionalSpec("hockey", 0.02)
    quad = functional_along_flow(shrink, phi, 1.0, default_t_grid(5))
    mc = functional_along_flow(shrink, phi, 1.0, default_t_grid(5), EstimatorPolicy(method="mc", samples=10**5, seed=2))
    assert quad.nondecreasing() and mc.nondecreasing()
    assert np.all(np.abs(quad.values - mc.values) <= 4 * mc.std_errs + 1e-12)


def test_functional_spec_validation():
    with pytest.raises(ValueError):
        ConvexFunctionalSpec("power", 1.0)
    with pytest.raises(ValueError):
        ConvexFunctionalSpec("hockey", 0.0)
    assert ConvexFunctionalSpec("xlogx")(np.array([0.0]))[0] == 0.0


def test_homothety_family(gen):
    c = random_configuration(gen, 2, 4)
    fam = homothety_family(c, 0.3)
    np.testing.assert_allclose(fam.positions(1), 0.3 * c.points)
    assert velocity_monotonicity(fam) <= 1e-12


@pytest.mark.parametrize("t", [0.25, 0.6])
def test_continuity_equation(shrink, t):
    chk = continuity_equation_check(shrink, t, 1.0, samples=100_000, seed=4)
    assert chk.ok
