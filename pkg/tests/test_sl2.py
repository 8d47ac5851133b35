import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kamcocycle.fourier import matnorm
from kamcocycle.sl2 import (as_sl2, classify, projection_norm_check, rotation_generator,
                            rotation_shift)


def conj(P, A):
    return P @ A @ np.linalg.inv(P)


def test_rotation_generator_is_elliptic():
    S = classify(rotation_generator(0.4))
    assert S.kind == "elliptic" and S.value == pytest.approx(0.4, rel=1e-15)
    assert S.lam1 == pytest.approx(0.4j) and S.lam2 == pytest.approx(-0.4j)
    assert S.separation == pytest.approx(0.8, rel=1e-15)
    assert np.array_equal(S.P2, np.conj(S.P1))


def test_diagonal_hyperbolic():
    S = classify(np.diag([0.7, -0.7]))
    assert S.kind == "hyperbolic" and S.value == pytest.approx(0.7)
    assert np.allclose(S.P1, np.diag([1, 0])) and np.allclose(S.P2, np.diag([0, 1]))


def test_nilpotent_and_zero():
    assert classify([[0.0, 1.0], [0.0, 0.0]]).kind == "nilpotent"
    assert classify(np.zeros((2, 2))).kind == "zero"
    with pytest.raises(ValueError, match="traceless"):
        as_sl2([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        classify(np.zeros((2, 2)), tol_det=0.0)


def test_projection_check_hyperbolic():
    S = classify(np.diag([0.5, -0.5]))
    c0, ok = projection_norm_check(S, 0.5)
    assert c0 == pytest.approx(0.5**6) and ok


def test_projection_check_rotation_generator():
    # the eigenbasis is orthogonal: operator norm 1, largest entry 1/2
    S = classify(rotation_generator(0.3))
    for P in (S.P1, S.P2):
        assert np.linalg.norm(P, 2) == pytest.approx(1.0, rel=1e-15)
    c0, ok = projection_norm_check(S, 0.6)
    assert c0 == pytest.approx(0.5 * 0.6**6, rel=1e-14) and ok


def test_projection_check_near_nilpotent_sweep():
    # A = [[0,1],[-e^2,0]]: P1 = (A + i e I)/(2 i e) has largest entry 1/(2e)
    prev = math.inf
    for e in np.geomspace(0.5, 0.05, 8):
        S = classify([[0.0, 1.0], [-e * e, 0.0]])
        assert S.proj_norm() == pytest.approx(1 / (2 * e), rel=1e-12)
        c0, ok = projection_norm_check(S, 2 * e)
        assert c0 == pytest.approx(32 * e**5, rel=1e-12) and ok
        assert c0 < prev
        prev = c0


def test_projection_check_errors():
    S = classify(rotation_generator(0.1))
    with pytest.raises(ValueError, match="separation"):
        projection_norm_check(S, 0.5)
    with pytest.raises(ValueError):
        projection_norm_check(classify([[0.0, 1.0], [0.0, 0.0]]), 0.5)
    with pytest.raises(ValueError):
        projection_norm_check(S, 1.5)


def test_rotation_shift_examples():
    A = rotation_generator(0.4)
    assert np.array_equal(rotation_shift(A, 0.0), A)
    assert np.allclose(rotation_shift(A, 0.4), 0.0, atol=1e-17)
    assert np.allclose(rotation_shift(A, 0.1), rotation_generator(0.3), atol=1e-16)
    with pytest.raises(ValueError, match="elliptic"):
        rotation_shift(np.diag([1.0, -1.0]), 0.1)


mats = st.tuples(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))


@given(mats)
def test_spectral_identities(entries):
    a, b, c = entries
    A = np.array([[a, b], [c, -a]])
    S = classify(A)
    det = -a * a - b * c
    if S.kind in ("elliptic", "hyperbolic"):
        scale = max(1.0, float(matnorm(A)))
        I = np.eye(2)
        assert np.abs(S.P1 + S.P2 - I).max() <= 1e-11 * S.proj_norm()
        for P in (S.P1, S.P2):
            assert np.abs(P @ A - A @ P).max() <= 1e-11 * scale * S.proj_norm()
        assert abs(S.lam1 * S.lam2 - det) <= 1e-12 * scale**2
        AP = A @ S.P1
        ev = np.linalg.eigvals(AP)
        err = min(max(abs(ev[0] - S.lam1), abs(ev[1])), max(abs(ev[1] - S.lam1), abs(ev[0])))
        assert err <= 1e-11 * scale * S.proj_norm()
        assert np.abs(S.P1 @ A @ S.P1 + S.P2 @ A @ S.P2 - A).max() <= 1e-11 * scale * S.proj_norm() ** 2
        assert np.abs(S.P1 @ A @ S.P2).max() <= 1e-11 * scale * S.proj_norm() ** 2
    if S.kind == "elliptic":
        assert det > 0 and S.value == pytest.approx(math.sqrt(det))
    if S.kind == "hyperbolic":
        assert det < 0


@given(st.floats(0.05, 3.0), st.floats(0.0, 0.95), st.integers(0, 2**31))
def test_shift_then_classify(alpha, frac, seed):
    rng = np.random.default_rng(seed)
    P = np.eye(2) + 0.4 * rng.standard_normal((2, 2))
    if abs(np.linalg.det(P)) < 0.2:
        return
    A = conj(P, rotation_generator(alpha))
    A[1, 1] = -A[0, 0]
    alpha = classify(A).value
    s = frac * alpha
    S = classify(rotation_shift(A, s))
    assert S.kind == "elliptic"
    assert S.value == pytest.approx(alpha - s, rel=1e-12, abs=1e-12)
