"""Non-resonance of a constant matrix and removal of resonances by trivial maps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier import TrivialMap, matnorm, weighted_norm
from .lattice import l1_ball
from .sl2 import classify, rotation_shift
from .weights import as_frequency


class RenormalizationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BRResult:
    passed: bool
    worst_k: tuple | None
    margin: float


def is_br_spectrum(A, omega, psi, kappa_p, N, spectral=None):
    """Check |z - 2 pi i <k,omega>| >= kappa'/Psi(|k|) for 0 < |k| <= N.

    z is the eigenvalue gap lam1 - lam2. ``margin`` is the minimum of
    |z - 2 pi i <k,omega>| Psi(|k|) / kappa' - 1. Matrices with real
    spectrum pass regardless of the margin.
    """
    omega = as_frequency(omega)
    S = spectral or classify(A)
    k = l1_ball(N, omega.d)
    if not len(k):
        return BRResult(True, None, math.inf)
    z = S.gap if S.kind in ("elliptic", "hyperbolic") else 0j
    vals = np.abs(z - 2j * math.pi * (k @ omega.array)) * psi(np.abs(k).sum(axis=1)) / kappa_p - 1.0
    i = int(np.argmin(vals))
    margin = float(vals[i])
    real_spectrum = S.kind != "elliptic"
    return BRResult(real_spectrum or margin >= 0, tuple(int(c) for c in k[i]), margin)


@dataclass(frozen=True)
class ResonanceResult:
    m2: tuple
    shifted_alpha: float
    kappa_used: float
    order: float
    defect: float

    @property
    def m(self):
        return np.array(self.m2) / 2.0


def find_resonance(alpha, omega, psi, kappa, N):
    """Resonant m' with |2 alpha - 2 pi <m',omega>| < kappa / Psi(|m'|), 0 < |m'| <= N.

    Returns m = m'/2 (stored doubled) and alpha' = alpha - pi <m',omega>;
    the smallest defect wins, then the lexicographically smallest m'.
    None means 2 i alpha is already non-resonant.
    """
    omega = as_frequency(omega)
    k = l1_ball(N, omega.d)
    if not len(k):
        return None
    proj = k @ omega.array
    defect = np.abs(2 * alpha - 2 * math.pi * proj)
    hit = defect < kappa / psi(np.abs(k).sum(axis=1))
    if not hit.any():
        return None
    cand = np.flatnonzero(hit)
    best = cand[np.argmin(defect[cand])]
    m2 = tuple(int(c) for c in k[best])
    return ResonanceResult(m2, float(alpha - math.pi * proj[best]), kappa, N, float(defect[best]))


@dataclass
class RenormReport:
    resonant: bool
    kind: str
    kappa2: float
    order: float
    m2: tuple
    norm_diff: float
    diff_bound: float
    diff_ok: bool
    br_after: BRResult
    norm_tilde: float
    tilde_ok: bool | None
    C0_eff: float
    phi_norm: float | None = None
    phi_bound: float | None = None
    phi_ok: bool | None = None
    orientation: int = 0

    def as_flags(self):
        return {"diff_ok": self.diff_ok, "br_after": self.br_after.passed,
                "tilde_ok": self.tilde_ok, "phi_ok": self.phi_ok}


def renormalize(A, omega, psi, kappa, R, N, kappa2=None, lam=None, r_prime=None, C0=None):
    """Remove a resonance of A at order R N with a trivial map.

    Returns ``(Phi, A_tilde, report)`` with d/domega Phi = A Phi - Phi A_tilde.
    By default kappa'' = kappa / Psi(3 R N). Non-elliptic or already
    non-resonant A gives the identity map.
    """
    omega = as_frequency(omega)
    d = omega.d
    A = np.asarray(A, dtype=float)
    if kappa2 is None:
        kappa2 = kappa / float(psi(3 * R * N))
    order = R * N
    S = classify(A)
    I = np.eye(2)
    phi = TrivialMap(I, np.zeros((2, 2)), (0,) * d, order)
    A_t = A
    res = None
    if S.kind == "elliptic":
        phi = TrivialMap(S.P1, S.P2, (0,) * d, order)
        if not is_br_spectrum(A, omega, psi, kappa2, order, S).passed:
            res = find_resonance(S.value, omega, psi, kappa2, order)
            if res is None:
                raise RenormalizationError(
                    f"spectrum not BR at order {order:g} but no resonance found (alpha={S.value!r})")
            phi = TrivialMap(S.P1, S.P2, res.m2, order)
            A_t = rotation_shift(A, math.pi * float(np.dot(res.m2, omega.array)))
    C0_eff = S.proj_norm() * min(kappa2, 1.0) ** 6 if S.has_projections else 0.0
    diff = float(matnorm(A_t - A))
    br = is_br_spectrum(A_t, omega, psi, kappa2, order)
    norm_t = float(matnorm(A_t))
    report = RenormReport(
        resonant=res is not None, kind=S.kind, kappa2=kappa2, order=order,
        m2=res.m2 if res else (0,) * d, norm_diff=diff, diff_bound=math.pi * N,
        diff_ok=diff <= math.pi * N, br_after=br, norm_tilde=norm_t,
        tilde_ok=(norm_t <= kappa2 / 2) if res else None, C0_eff=C0_eff,
        orientation=S.orientation,
    )
    if lam is not None and r_prime is not None:
        c0 = max(1.0, C0_eff) if C0 is None else C0
        log_bound = math.log(2 * c0) - 6 * math.log(kappa2) + 2 * math.pi * float(lam(N / 2)) * r_prime
        bound = math.exp(log_bound) if log_bound < 700 else math.inf
        pn = max(weighted_norm(phi.series(), lam, r_prime), weighted_norm(phi.inverse_series(), lam, r_prime))
        report.phi_norm, report.phi_bound, report.phi_ok = pn, bound, pn <= bound
    return phi, A_t, report
