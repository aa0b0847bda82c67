import math

import numpy as np
import pytest

from kplab.configspace import apply_map, make_contraction_pair, scaling_map, validate_configuration
from kplab.geovol import (
    CONSISTENT,
    BallUnion,
    ball_volume,
    kp_geometric_check,
    lens_union_area,
    union_volume_mc,
)


def test_ball_volume():
    assert ball_volume(2, 1.0) == pytest.approx(math.pi)
    assert ball_volume(3, 2.0) == pytest.approx(4 / 3 * math.pi * 8)


def test_single_disk():
    vol, se = union_volume_mc(BallUnion(np.zeros((1, 2)), 1.0), 10**5, seed=0)
    assert vol == pytest.approx(math.pi, abs=1e-12) and se <= 1e-12


def test_disjoint_balls_zero_variance():
    vol, se = union_volume_mc(BallUnion(np.array([[0.0, 0, 0], [5.0, 0, 0]]), 1.0), 10**4, seed=3)
    assert vol == pytest.approx(2 * ball_volume(3, 1.0), rel=1e-13) and se <= 1e-12


def test_two_disks_lens():
    vol, se = union_volume_mc(BallUnion(np.array([[0.0, 0.0], [1.0, 0.0]]), 1.0), 10**6, seed=1)
    exact = 2 * math.pi - (2 * math.acos(0.5) - 0.5 * math.sqrt(3))
    assert lens_union_area(1.0) == pytest.approx(exact)
    assert abs(vol - exact) <= 3 * se


def test_identity_pair_zero_gap():
    c = validate_configuration(2, [[0, 0], [1, 0.5], [0.3, 2]], np.ones(3) / 3)
    chk = kp_geometric_check(make_contraction_pair(c, c), 1.0, 10**4, seed=2)
    assert chk.gap == 0.0 and chk.verdict == CONSISTENT


def test_homothety_consistent():
    c = validate_configuration(2, [[0, 0], [1.7, 0.5], [0.3, 2]], np.ones(3) / 3)
    chk = kp_geometric_check(apply_map(c, scaling_map(0.5, np.zeros(2))), 1.0, 10**5, seed=2)
    assert chk.verdict == CONSISTENT and chk.status.startswith("theorem")


def test_collapse_all():
    c = validate_configuration(3, [[0, 0, 0], [1, 0, 0], [0, 3, 0]], np.ones(3) / 3)
    tgt = validate_configuration(3, np.zeros((3, 3)), np.ones(3) / 3)
    chk = kp_geometric_check(make_contraction_pair(c, tgt), 1.0, 10**5, seed=0)
    assert chk.vol_target == pytest.approx(ball_volume(3, 1.0), rel=1e-13)
    assert chk.gap >= 0 and chk.status.startswith("CONJECTURAL")
