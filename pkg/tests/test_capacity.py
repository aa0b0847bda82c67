import math
import warnings

import numpy as np
import pytest

from kplab.capacity import (
    blahut_arimoto,
    capacity_contraction_check,
    grid_capacity_binary,
    mutual_information_at,
)
from kplab.configspace import make_contraction_pair, random_configuration, random_contraction, validate_configuration
from kplab.errors import MaxIterExceeded
from kplab.gaussmix import EstimatorPolicy
from kplab.kpverify import VIOLATION, mutual_information


def cfg1(points):
    return validate_configuration(1, np.asarray(points, float).reshape(-1, 1), np.full(len(points), 1 / len(points)))


def test_single_letter():
    r = blahut_arimoto(cfg1([2.0]), 1.0)
    assert len(r.history) == 1 and abs(r.capacity) <= 1e-12


def test_binary_matches_grid_oracle():
    r = blahut_arimoto(cfg1([-1.0, 1.0]), 1.0, tol=1e-8)
    best, arg = grid_capacity_binary([[-1.0], [1.0]], 1.0)
    np.testing.assert_allclose(r.weights, [0.5, 0.5], atol=1e-6)
    assert abs(r.capacity - best) <= 1e-3 and arg == pytest.approx(0.5)


def test_far_alphabet_log2():
    assert blahut_arimoto(cfg1([-100.0, 100.0]), 1.0).capacity == pytest.approx(math.log(2), abs=1e-3)


def test_mi_agrees_with_entropy_route():
    pts = [[-1.0], [0.2], [1.5]]
    w = np.array([0.2, 0.5, 0.3])
    cfg = validate_configuration(1, pts, w)
    assert mutual_information_at(pts, w, 0.7) == pytest.approx(mutual_information(cfg, 0.7).value, abs=1e-10)


def test_lower_bound_monotone_and_bracket(gen):
    r = blahut_arimoto(random_configuration(gen, 2, 5), 0.5, tol=1e-5)
    lower = np.array([h[0] for h in r.history])
    assert np.all(np.diff(lower) >= -1e-10)
    assert r.lower <= r.capacity <= r.upper and r.bracket < 1e-5


def test_mc_oracle_close_to_quadrature():
    cfg = cfg1([-1.0, 0.0, 2.0])
    quad = blahut_arimoto(cfg, 1.0, tol=1e-6)
    mc = blahut_arimoto(cfg, 1.0, tol=1e-6, policy=EstimatorPolicy(method="mc", samples=50_000, seed=1))
    assert mc.method == "monte-carlo"
    assert mc.capacity == pytest.approx(quad.capacity, abs=1e-2)


def test_max_iter_warning():
    with pytest.warns(MaxIterExceeded):
        r = blahut_arimoto(cfg1([-1.0, 0.0, 0.1, 2.0]), 1.0, tol=1e-12, max_iter=3)
    assert not r.converged


def test_contraction_examples():
    src = cfg1([-1.0, 1.0])
    same = capacity_contraction_check(make_contraction_pair(src, src), 1.0)
    assert abs(same.gap) <= same.source.bracket + same.target.bracket
    half = capacity_contraction_check(make_contraction_pair(src, cfg1([-0.5, 0.5])), 1.0)
    g1, _ = grid_capacity_binary([[-1.0], [1.0]], 1.0)
    g2, _ = grid_capacity_binary([[-0.5], [0.5]], 1.0)
    assert half.gap > 0 and g1 > g2
    collapsed = capacity_contraction_check(make_contraction_pair(src, cfg1([0.0, 0.0])), 1.0)
    assert abs(collapsed.target.capacity) <= 1e-12
    assert collapsed.gap == pytest.approx(collapsed.source.capacity)
    assert collapsed.pointwise_ok


@pytest.mark.parametrize("seed", range(4))
def test_random_pairs(seed):
    g = np.random.default_rng(seed)
    pair = random_contraction(random_configuration(g, 1 + seed % 2, 3), "composition", seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MaxIterExceeded)
        cmp = capacity_contraction_check(pair, 1.0)
    assert cmp.verdict != VIOLATION
