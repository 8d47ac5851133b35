import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kamcocycle.fourier import MatrixSeries

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GOLDEN = (math.sqrt(5) - 1) / 2


def random_series(rng, d=1, n_modes=8, order=5, denom=1, traceless=True, real=True, scale=1.0):
    """Random finitely supported series with the requested structure."""
    idx = rng.integers(-order, order + 1, size=(n_modes, d))
    coef = (rng.standard_normal((n_modes, 2, 2)) + 1j * rng.standard_normal((n_modes, 2, 2))) * scale
    if traceless:
        coef[:, 1, 1] = -coef[:, 0, 0]
    F = MatrixSeries.build(d, denom, idx, coef)
    return F.realify() if real else F


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def golden():
    return [GOLDEN]


def random_sl2(rng, kind, scale=1.0):
    """Random traceless matrix of the requested spectral class."""
    while True:
        P = np.eye(2) + 0.5 * rng.standard_normal((2, 2))
        if abs(np.linalg.det(P)) > 0.3:
            break
    v = scale * rng.uniform(0.1, 1.0)
    base = {
        "elliptic": np.array([[0.0, -v], [v, 0.0]]),
        "hyperbolic": np.diag([v, -v]),
        "nilpotent": np.array([[0.0, v], [0.0, 0.0]]),
        "zero": np.zeros((2, 2)),
    }[kind]
    A = P @ base @ np.linalg.inv(P)
    A[1, 1] = -A[0, 0]
    return A


def scenario5():
    """Contraction scenario: golden omega, Lambda = id, Psi = t^2, alpha = 0.4, |F0|_r0 = 1e-4."""
    from kamcocycle.fourier import weighted_norm
    from kamcocycle.kam import StepConfig
    from kamcocycle.sl2 import rotation_generator

    cfg = StepConfig()
    r0 = 0.5
    F0 = MatrixSeries.cosine([[0.3, 1.0], [0.5, -0.3]], [1])
    F0 = F0 * (1e-4 / weighted_norm(F0, cfg.lam, r0))
    return rotation_generator(0.4), F0, r0, [GOLDEN], cfg


def schrodinger_data(E, lam=1e-4):
    """Constant part and perturbation of the Schrodinger cocycle with q = 2 lam cos(2 pi theta)."""
    A = np.array([[0.0, 1.0], [-E, 0.0]])
    F = MatrixSeries.cosine([[0.0, 0.0], [2 * lam, 0.0]], [1])
    return A, F


@pytest.fixture(scope="session")
def scenario5_trace():
    from kamcocycle.kam import almost_reduce

    A, F0, r0, om, cfg = scenario5()
    return almost_reduce(A, F0, r0, om, cfg)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
