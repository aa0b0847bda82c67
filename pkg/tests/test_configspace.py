import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kplab.configspace import (
    RANDOM_METHODS,
    apply_map,
    ball_projection,
    fold_map,
    make_contraction_pair,
    random_configuration,
    random_contraction,
    scaling_map,
    validate_configuration,
)
from kplab.errors import (
    DimensionMismatch,
    EmptyConfiguration,
    InconsistentCollapse,
    NonPositiveWeightSum,
    NotAContraction,
)


def test_singleton():
    c = validate_configuration(1, [[0.0]], [1.0])
    assert c.k == 1 and c.dim == 1


def test_symmetric_pair():
    c = validate_configuration(2, [[0, 0], [1, 0]], [0.5, 0.5])
    np.testing.assert_allclose(c.weights, [0.5, 0.5])


def test_weight_sum_off():
    with pytest.raises(NonPositiveWeightSum):
        validate_configuration(2, [[0, 0]], [0.4])


@pytest.mark.parametrize(
    "dim, pts, w, exc",
    [
        (2, [[0, 0, 0]], [1.0], DimensionMismatch),
        (1, np.zeros((0, 1)), [], EmptyConfiguration),
        (1, [[0.0], [1.0]], [1.5, -0.5], ValueError),
        (1, [[np.nan]], [1.0], ValueError),
    ],
)
def test_rejects(dim, pts, w, exc):
    with pytest.raises(exc):
        validate_configuration(dim, pts, w)


def test_identity_bound_one(gen):
    c = random_configuration(gen, 3, 5)
    assert make_contraction_pair(c, c).lipschitz_bound == 1.0


def test_homothety_bound():
    c = validate_configuration(2, [[0, 0], [1, 2], [-3, 0.5]], np.ones(3) / 3)
    pair = make_contraction_pair(c, c.transformed(0.5 * np.eye(2)))
    assert pair.lipschitz_bound == pytest.approx(0.5, abs=1e-15)


def test_expansion_reports_ratio():
    src = validate_configuration(1, [[0.0], [1.0]], [0.5, 0.5])
    tgt = validate_configuration(1, [[0.0], [2.0]], [0.5, 0.5])
    with pytest.raises(NotAContraction) as info:
        make_contraction_pair(src, tgt)
    assert info.value.ratio == pytest.approx(2.0)


def test_collapse_must_be_consistent():
    src = validate_configuration(1, [[0.0], [0.0], [1.0]], np.ones(3) / 3)
    tgt = validate_configuration(1, [[0.0], [0.5], [0.5]], np.ones(3) / 3)
    with pytest.raises(InconsistentCollapse):
        make_contraction_pair(src, tgt)


def test_scaling_beta_one_is_identity():
    c = validate_configuration(2, [[0, 0], [1, 1]], [0.5, 0.5])
    pair = apply_map(c, scaling_map(1.0, np.zeros(2)))
    np.testing.assert_array_equal(pair.target.points, c.points)


def test_projection_onto_enclosing_ball_is_identity():
    c = validate_configuration(2, [[0, 0], [1, 1], [-1, 0.5]], np.ones(3) / 3)
    pair = apply_map(c, ball_projection(np.zeros(2), 10.0))
    np.testing.assert_array_equal(pair.target.points, c.points)


def test_fold_example():
    c = validate_configuration(1, [[-1.0], [1.0]], [0.5, 0.5])
    pair = apply_map(c, fold_map(np.array([1.0]), 0.0))
    np.testing.assert_allclose(pair.target.points, [[-1.0], [-1.0]])


@given(st.integers(1, 4), st.integers(1, 9), st.sampled_from(RANDOM_METHODS), st.integers(0, 2**31))
def test_random_contractions_are_contractions(dim, k, method, seed):
    c = random_configuration(np.random.default_rng(seed), dim, k)
    pair = random_contraction(c, method, seed)
    assert 0.0 <= pair.lipschitz_bound <= 1.0
    ds = np.linalg.norm(c.points[:, None] - c.points[None], axis=2)
    dt = np.linalg.norm(pair.target.points[:, None] - pair.target.points[None], axis=2)
    assert np.all(dt <= ds + 1e-9)


def test_random_contraction_is_reproducible(gen):
    c = random_configuration(gen, 2, 6)
    a = random_contraction(c, "composition", 7)
    b = random_contraction(c, "composition", 7)
    np.testing.assert_array_equal(a.target.points, b.target.points)
