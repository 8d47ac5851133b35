"""Enumeration of integer vectors in an l1 ball."""
from functools import lru_cache

import numpy as np

MAX_BALL_POINTS = 10**8


class LatticeTooLarge(ValueError):
    pass


@lru_cache(maxsize=64)
def _ball(n, d):
    if d == 1:
        k = np.arange(-n, n + 1, dtype=np.int64)[:, None]
        return k
    inner = _ball(n, d - 1)
    inner_norm = np.abs(inner).sum(axis=1)
    parts = []
    for first in range(-n, n + 1):
        keep = inner[inner_norm <= n - abs(first)]
        col = np.full((len(keep), 1), first, dtype=np.int64)
        parts.append(np.hstack([col, keep]))
    return np.vstack(parts)


def l1_ball(order, d, half=False):
    """Nonzero integer vectors k with |k|_1 <= order, in lexicographic order.

    With ``half=True`` only one of each pair (k, -k) is kept: the one whose
    first nonzero coordinate is positive.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    n = int(np.floor(order + 1e-12))
    if n < 1:
        return np.zeros((0, d), dtype=np.int64)
    if float(n) ** d > MAX_BALL_POINTS:
        raise LatticeTooLarge(f"l1 ball of radius {n} in dimension {d} is too large")
    k = _ball(n, d)
    k = k[np.any(k != 0, axis=1)]
    if half:
        nz = k != 0
        first = k[np.arange(len(k)), nz.argmax(axis=1)]
        k = k[first > 0]
    k.setflags(write=False)
    return k
