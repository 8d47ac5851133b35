"""Classification and eigenprojections of constant traceless 2x2 real matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier import matnorm


def as_sl2(A):
    A = np.asarray(A, dtype=float).reshape(2, 2)
    if abs(A[0, 0] + A[1, 1]) > 1e-13 * max(1.0, float(np.abs(A).max())):
        raise ValueError("matrix is not traceless")
    return A


def default_tol_det(A):
    return 1e-12 * max(1.0, float(matnorm(A)) ** 2)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Spectral class, eigenvalues lam1, lam2 and eigenprojections of A.

    ``value`` is a (hyperbolic) or alpha (elliptic); lam1 = a or i alpha.
    """

    A: np.ndarray
    kind: str
    value: float
    lam1: complex
    lam2: complex
    P1: np.ndarray | None
    P2: np.ndarray | None

    @property
    def separation(self):
        return abs(self.lam1 - self.lam2)

    @property
    def gap(self):
        return self.lam1 - self.lam2

    @property
    def has_projections(self):
        return self.P1 is not None

    @property
    def orientation(self):
        """+1 when the elliptic flow turns counterclockwise, -1 otherwise."""
        if self.kind != "elliptic":
            return 0
        return 1 if self.A[1, 0] > self.A[0, 1] else -1

    def proj_norm(self):
        if not self.has_projections:
            return 0.0
        return float(max(matnorm(self.P1), matnorm(self.P2)))


def classify(A, tol_det=None, tol_zero=1e-14):
    """Classify A by the sign of its determinant.

    det > tol_det gives elliptic with alpha = sqrt(det), det < -tol_det gives
    hyperbolic with a = sqrt(-det); otherwise A is zero when ||A|| <= tol_zero
    and nilpotent if not. Projections come from P1 = (A - lam2)/(lam1 - lam2).
    """
    A = as_sl2(A)
    if tol_det is None:
        tol_det = default_tol_det(A)
    if tol_det <= 0 or tol_zero <= 0:
        raise ValueError("tolerances must be positive")
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    I = np.eye(2)
    if det > tol_det:
        alpha = math.sqrt(det)
        lam1, lam2 = 1j * alpha, -1j * alpha
        P1 = (A - lam2 * I) / (lam1 - lam2)
        return SpectralData(A, "elliptic", alpha, lam1, lam2, P1, np.conj(P1))
    if det < -tol_det:
        a = math.sqrt(-det)
        P1 = (A + a * I) / (2 * a)
        return SpectralData(A, "hyperbolic", a, complex(a), complex(-a), P1.astype(complex),
                            (I - P1).astype(complex))
    if float(matnorm(A)) <= tol_zero:
        return SpectralData(A, "zero", 0.0, 0j, 0j, None, None)
    return SpectralData(A, "nilpotent", 0.0, 0j, 0j, None, None)


def projection_norm_check(S, kappa_p, C0=1.0):
    """Measured constant max(||P1||, ||P2||) kappa'^6 against the allowed C0."""
    if not 0 < kappa_p <= 1:
        raise ValueError("kappa' must lie in (0, 1]")
    if not S.has_projections:
        raise ValueError("no eigenprojections for a nilpotent or zero matrix")
    if S.separation < kappa_p:
        raise ValueError(f"separation {S.separation:.3g} below kappa' = {kappa_p:.3g}")
    c0 = S.proj_norm() * kappa_p**6
    return c0, c0 <= C0


def rotation_shift(A, s):
    """The traceless matrix with A's eigenvectors and eigenvalues +-i(alpha - s).

    Equals A (alpha - s) / alpha; it is the zero matrix when s = alpha.
    """
    A = as_sl2(A)
    S = classify(A)
    if S.kind != "elliptic":
        raise ValueError(f"rotation shift needs an elliptic matrix, got {S.kind}")
    return A * ((S.value - s) / S.value)


def rotation_generator(alpha):
    return np.array([[0.0, -alpha], [alpha, 0.0]])
