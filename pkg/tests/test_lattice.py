import itertools

import numpy as np
import pytest

from kamcocycle.lattice import LatticeTooLarge, l1_ball


@pytest.mark.parametrize("order,d", [(1, 1), (3, 1), (3, 2), (2, 3)])
def test_ball_matches_brute_enumeration(order, d):
    brute = sorted(k for k in itertools.product(range(-order, order + 1), repeat=d)
                   if 0 < sum(map(abs, k)) <= order)
    got = [tuple(int(x) for x in row) for row in l1_ball(order, d)]
    assert got == brute


def test_half_ball_keeps_one_of_each_pair():
    full = {tuple(k) for k in l1_ball(4, 2)}
    half = {tuple(k) for k in l1_ball(4, 2, half=True)}
    assert len(half) * 2 == len(full)
    for k in half:
        assert tuple(-x for x in k) not in half
        assert next(x for x in k if x) > 0


def test_fractional_order_floors():
    assert len(l1_ball(2.7, 1)) == 4


def test_ball_is_read_only():
    with pytest.raises(ValueError):
        l1_ball(2, 1)[0, 0] = 5


def test_size_limit():
    with pytest.raises(LatticeTooLarge):
        l1_ball(10_000, 3)
    assert isinstance(l1_ball(0, 2), np.ndarray) and len(l1_ball(0, 2)) == 0
