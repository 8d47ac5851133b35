"""Solver for the linearized equation d/domega X = [A, X] + F^N - F(0), X(0) = 0."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier import MatrixSeries, derive_omega, truncate, weighted_norm
from .sl2 import classify
from .weights import as_frequency

MIN_DIVISOR = 1e-15


class CohomologyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SolveDiagnostics:
    branch: str
    n_modes: int
    max_inv_divisor: float
    gain: float
    paper_bound: float
    within_bound: bool
    C0_eff: float


def _ad(A, Y):
    return A @ Y - Y @ A


def solve(A, F, omega, psi, kappa_p, N, branch=None, C0=None):
    """Solve (2 pi i <k,omega> - ad_A) X_k = F_k for every mode 0 < |k| <= N.

    ``branch`` is chosen from the spectral class of A when left as None:
    ``spectral`` divides each eigen-block P_i F P_j by 2 pi i <k,omega> -
    (lam_i - lam_j); ``nilpotent`` uses the three-term Neumann inverse;
    ``zero`` divides by 2 pi i <k,omega>. The automatic choice refuses an
    elliptic or hyperbolic A whose eigenvalue separation is below kappa';
    a caller that owns the tolerances may force ``spectral`` instead.
    """
    omega = as_frequency(omega)
    A = np.asarray(A, dtype=float)
    S = classify(A)
    if branch is None:
        branch = {"elliptic": "spectral", "hyperbolic": "spectral"}.get(S.kind, S.kind)
        if branch == "spectral" and S.separation < kappa_p:
            raise CohomologyError(
                f"eigenvalue separation {S.separation:.3g} below kappa'={kappa_p:.3g}; caller must pick a branch")
    if branch == "spectral" and not S.has_projections:
        raise CohomologyError(f"spectral branch needs a diagonalizable matrix, got {S.kind}")
    if branch not in ("spectral", "nilpotent", "zero"):
        raise CohomologyError(f"unknown branch {branch!r}")

    FN = truncate(F, N)
    keep = FN.l1 > 0
    idx, coef = FN.idx[keep], FN.coef[keep]
    mu = 2j * math.pi * (idx @ omega.array) / FN.denom
    X = np.zeros_like(coef)
    if branch == "spectral":
        P = (S.P1, S.P2)
        lam = (S.lam1, S.lam2)
        divs = []
        for i in range(2):
            for j in range(2):
                div = mu - (lam[i] - lam[j])
                divs.append(div)
                X += (P[i] @ coef @ P[j]) / _checked(div)[:, None, None]
        all_div = np.concatenate([np.abs(d) for d in divs]) if len(mu) else np.zeros(0)
    else:
        inv = 1.0 / _checked(mu)
        if branch == "zero":
            X = coef * inv[:, None, None]
        else:
            ad1 = _ad(A, coef)
            ad2 = _ad(A, ad1)
            X = (coef + ad1 * inv[:, None, None] + ad2 * (inv**2)[:, None, None]) * inv[:, None, None]
        all_div = np.abs(mu)
    Xs = MatrixSeries.build(F.d, FN.denom, idx, X)
    if F.is_real:
        Xs = Xs.realify()
    max_inv = float(1.0 / all_div.min()) if len(all_div) else 0.0
    fmag = np.abs(coef).max(axis=(1, 2)) if len(coef) else np.zeros(0)
    xmag = np.abs(X).max(axis=(1, 2)) if len(X) else np.zeros(0)
    ok = fmag > 0
    gain = float((xmag[ok] / fmag[ok]).max()) if ok.any() else 0.0
    psiN = float(psi(max(N, 1.0)))
    if branch == "spectral":
        c0 = C0 if C0 is not None else max(1.0, S.proj_norm() * min(kappa_p, 1.0) ** 6)
        bound = 4 * c0**2 * kappa_p**-13 * psiN
    elif branch == "nilpotent":
        c0 = 0.0
        bound = 3 * kappa_p**-3 * psiN**3
    else:
        c0 = 0.0
        bound = psiN / kappa_p
    diag = SolveDiagnostics(branch, int(len(idx)), max_inv, gain, bound, gain <= bound, c0)
    return Xs, diag


def _checked(div):
    if len(div) and np.abs(div).min() < MIN_DIVISOR:
        raise CohomologyError(f"divisor {np.abs(div).min():.3e} below {MIN_DIVISOR}")
    return div


def residual_series(A, X, F, omega, N):
    """d/domega X - [A, X] - (F^N - F(0))."""
    A = np.asarray(A, dtype=complex)
    FN = truncate(F, N)
    rhs = FN - FN.mean()
    return derive_omega(X, omega) - (A @ X - X @ A) - rhs


def residual(A, X, F, omega, N, lam, r, matrix_norm="max"):
    """Weighted norm of the cohomological-equation residual."""
    return weighted_norm(residual_series(A, X, F, omega, N), lam, r, matrix_norm)


def dense_solve(A, F, omega, N):
    """Reference solution: one dense 4x4 linear solve per Fourier mode."""
    omega = as_frequency(omega)
    A = np.asarray(A, dtype=complex)
    FN = truncate(F, N)
    keep = FN.l1 > 0
    idx, coef = FN.idx[keep], FN.coef[keep]
    I2 = np.eye(2)
    # row-major vec: vec(AY - YA) = (A kron I - I kron A^T) vec(Y)
    ad = np.kron(A, I2) - np.kron(I2, A.T)
    out = np.empty_like(coef)
    for n, (h, c) in enumerate(zip(idx, coef)):
        mu = 2j * math.pi * float(h @ omega.array) / FN.denom
        out[n] = np.linalg.solve(mu * np.eye(4) - ad, c.reshape(4)).reshape(2, 2)
    return MatrixSeries.build(F.d, FN.denom, idx, out)
