import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kplab.configspace import random_configuration, validate_configuration
from kplab.costa import (
    SmoothedConfig,
    a_beta_series,
    costa_concavity_report,
    operator_norm,
    random_linear_contraction,
    unified_inequality_check,
)
from kplab.errors import BandwidthRequired, OperatorNormExceeded
from kplab.kpverify import VIOLATION

TWO_PI_E = 2 * math.pi * math.e
S_GRID = np.linspace(0.5, 4.0, 8)


def cfg1(points, weights=None):
    w = np.full(len(points), 1 / len(points)) if weights is None else weights
    return validate_configuration(1, np.asarray(points, float).reshape(-1, 1), w)


@pytest.mark.parametrize("s0", [0.0, 0.7])
def test_single_point_is_affine(s0):
    rep = costa_concavity_report(SmoothedConfig(cfg1([1.3]), s0), S_GRID)
    np.testing.assert_allclose(rep.entropy_powers, TWO_PI_E * (s0 + S_GRID), rtol=1e-12)
    assert np.all(np.abs(rep.second_differences) <= 1e-9)


def test_two_point_concave_and_increasing():
    rep = costa_concavity_report(SmoothedConfig(cfg1([0.0, 2.0])), S_GRID)
    assert np.all(rep.first_differences > 0)
    assert rep.concave(abs_tol=1e-9)


def test_grid_must_be_uniform():
    with pytest.raises(ValueError):
        costa_concavity_report(SmoothedConfig(cfg1([0.0])), [0.5, 1.0, 2.0])


def test_a_beta_single_point_constant():
    ab = a_beta_series(SmoothedConfig(cfg1([0.4]), 0.6), np.linspace(0, 1, 11))
    np.testing.assert_allclose(ab.values, TWO_PI_E, rtol=1e-12)


def test_a_beta_two_point_epi():
    ab = a_beta_series(SmoothedConfig(cfg1([0.0, 2.0]), 0.5), np.linspace(0, 1, 11))
    assert ab.values[0] == pytest.approx(TWO_PI_E, rel=1e-12)
    assert ab.values[-1] >= ab.values[0]
    assert ab.nondecreasing(abs_tol=1e-9)


def test_a_beta_needs_bandwidth():
    with pytest.raises(BandwidthRequired):
        a_beta_series(SmoothedConfig(cfg1([0.0, 1.0])), [0.0, 1.0])
    ab = a_beta_series(SmoothedConfig(cfg1([0.0, 1.0])), [0.0, 1.0], allow_discrete=True)
    assert ab.n_x == 0.0


def test_unified_identity_exact_zero(gen):
    x = SmoothedConfig(random_configuration(gen, 2, 3), 0.4, np.eye(2))
    assert unified_inequality_check(x).gap == 0.0


def test_unified_zero_map_is_epi():
    chk = unified_inequality_check(SmoothedConfig(cfg1([0.0, 2.0]), 0.5, np.zeros((1, 1))))
    assert chk.n_ax_plus_z == pytest.approx(TWO_PI_E, rel=1e-12)
    assert chk.gap >= 0


def test_unified_scaled_identity():
    chk = unified_inequality_check(SmoothedConfig(cfg1([0.0, 2.0]), 0.5, 0.6 * np.eye(1)))
    assert chk.lipschitz == pytest.approx(0.6)
    assert chk.gap >= -3 * chk.std_err


def test_operator_norm_guard():
    with pytest.raises(OperatorNormExceeded):
        SmoothedConfig(cfg1([0.0]), 0.0, np.array([[1.1]]))


@given(st.integers(0, 10**6))
def test_unified_random_instances(seed):
    g = np.random.default_rng(seed)
    n = 1 + seed % 2
    a = random_linear_contraction(g, n)
    assert operator_norm(a) <= 1 + 1e-12
    x = SmoothedConfig(random_configuration(g, n, 1 + seed % 4), float(g.uniform(0, 1)), a)
    assert unified_inequality_check(x).verdict != VIOLATION
