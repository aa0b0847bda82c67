import numpy as np

from kplab import _rng


def test_draw_independent_of_block_split():
    full = _rng.draw(3, _rng.GAUSS, 200_000, lambda g, m: g.standard_normal(m))
    head = _rng.draw(3, _rng.GAUSS, 70_000, lambda g, m: g.standard_normal(m))
    np.testing.assert_array_equal(full[:70_000], head)


def test_streams_differ():
    a = _rng.draw(1, _rng.GAUSS, 10, lambda g, m: g.random(m))
    b = _rng.draw(1, _rng.RADIUS, 10, lambda g, m: g.random(m))
    assert not np.array_equal(a, b)
