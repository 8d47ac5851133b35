"""Direct numerics on the cocycle ODE dX/dt = (A + F(theta + t omega)) X.

Nothing here uses the KAM machinery; it serves as the independent side of
the engine's checks.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .fourier import MatrixSeries, derive_omega, evaluate
from .weights import FrequencyVector, as_frequency

RENORM_EVERY = 100
DET_RESOLVABLE = 1e8


class VectorCollapse(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class CocycleSystem:
    """A + F(theta) driven by theta -> theta + t omega."""

    A: np.ndarray
    F: MatrixSeries
    omega: FrequencyVector
    label: str = ""

    def __post_init__(self):
        om = as_frequency(self.omega)
        object.__setattr__(self, "omega", om)
        A = np.asarray(self.A, dtype=float).reshape(2, 2)
        object.__setattr__(self, "A", A)
        F = self.F if self.F is not None else MatrixSeries.zero(om.d)
        object.__setattr__(self, "F", F)
        if F.d != om.d:
            raise ValueError("F and omega have different dimensions")
        rng = np.random.default_rng(0)
        vals = self.matrix(rng.random((8, om.d)) * F.denom)
        tr = np.abs(vals[:, 0, 0] + vals[:, 1, 1]).max()
        if tr > 1e-10 * max(1.0, float(np.abs(vals).max())):
            raise ValueError(f"system is not traceless (trace {tr:.3e})")

    @property
    def d(self):
        return self.omega.d

    def matrix(self, theta):
        """Real values of A + F at one point or a batch of points."""
        return self.A + evaluate(self.F, theta)

    def _clock(self, theta0):
        """Closure t -> A + F(theta0 + t omega) for a batch of starting points."""
        F = self.F
        th = np.asarray(theta0, dtype=float).reshape(-1, self.d)
        if not len(F):
            A = np.broadcast_to(self.A, (len(th), 2, 2))
            return lambda t: A
        base = np.exp(2j * math.pi * (th @ F.idx.T) / F.denom)
        nu = 2 * math.pi * (F.idx @ self.omega.array) / F.denom
        C = F.coef.reshape(len(F), 4)

        def at(t):
            return self.A + ((base * np.exp(1j * nu * t)) @ C).real.reshape(-1, 2, 2)

        return at


def schrodinger(E, omega, lam=None, q=None, label=""):
    """Companion system of -y'' + q(theta + t omega) y = E y, state (y, y').

    The matrix [[0, 1], [q - E, 0]] is traceless as it stands. ``q`` is a
    mapping from integer frequency to scalar coefficient; ``lam`` selects
    q(theta) = 2 lam cos(2 pi theta_1).
    """
    om = as_frequency(omega)
    d = om.d
    if (lam is None) == (q is None):
        raise ValueError("give exactly one of lam or q")
    E21 = np.array([[0, 0], [1, 0]], dtype=complex)
    if lam is not None:
        e1 = np.zeros(d, np.int64)
        e1[0] = 1
        F = MatrixSeries.cosine(2 * lam * E21.real, e1, d)
    else:
        F = MatrixSeries.from_dict(d, {tuple(np.atleast_1d(k)): complex(c) * E21 for k, c in q.items()})
        if not F.is_real:
            raise ValueError("q coefficients must satisfy q(-k) = conj(q(k))")
    A = np.array([[0.0, 1.0], [-float(E), 0.0]])
    return CocycleSystem(A, F, om, label or f"schrodinger E={E:g}")


def _rk4(field_at, Y, t, h):
    k1 = field_at(t) @ Y
    M2 = field_at(t + h / 2)
    k2 = M2 @ (Y + h / 2 * k1)
    k3 = M2 @ (Y + h / 2 * k2)
    k4 = field_at(t + h) @ (Y + h * k3)
    return Y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _steps(T, h):
    if not h > 0 or T < 0:
        raise ValueError("need h > 0 and T >= 0")
    n = int(math.ceil(T / h - 1e-12)) if T > 0 else 0
    return n, (T / n if n else 0.0)


def _reset_det(X):
    """Divide by sqrt(det) where det is resolvable: rounding in det is ~1e-16 ||X||^2."""
    det = np.linalg.det(X)
    ok = (det > 0) & (np.einsum("nij,nij->n", X, X) < DET_RESOLVABLE)
    scale = np.ones_like(det)
    scale[ok] = np.sqrt(det[ok])
    return X / scale[:, None, None]


def integrate(sys, theta0, T, h):
    """X^T(theta0) by classical RK4 with the determinant reset to 1 every 100 steps.

    The reset is skipped once ||X||^2 exceeds 1e8, where det is no longer
    resolvable against its rounding error.

    ``theta0`` may be one point or a batch; the result has the matching shape.
    """
    th = np.asarray(theta0, dtype=float)
    single = th.ndim <= 1
    th = th.reshape(-1, sys.d)
    at = sys._clock(th)
    n, hh = _steps(T, h)
    X = np.broadcast_to(np.eye(2), (len(th), 2, 2)).copy()
    for i in range(n):
        X = _rk4(at, X, i * hh, hh)
        if (i + 1) % RENORM_EVERY == 0 or i == n - 1:
            X = _reset_det(X)
    if not np.all(np.isfinite(X)):
        raise FloatingPointError("nonfinite entries in the propagated matrix")
    return X[0] if single else X


@dataclass(frozen=True)
class LyapunovResult:
    mean: float
    stderr: float
    samples: np.ndarray = field(repr=False)


def sample_thetas(d, n, seed=0, denom=1):
    return np.random.default_rng(seed).random((n, d)) * denom


def lyapunov(sys, T, n_samples=16, h=0.01, seed=0, thetas=None):
    """Mean and standard error over samples of (1/T) ln ||X^T(theta)||.

    The frame is re-orthonormalized by QR every 100 steps and the log of the
    leading diagonal entry of R accumulated.
    """
    th = sample_thetas(sys.d, n_samples, seed) if thetas is None else np.asarray(thetas, float).reshape(-1, sys.d)
    at = sys._clock(th)
    n, hh = _steps(T, h)
    if n == 0:
        raise ValueError("T must be positive")
    X = np.broadcast_to(np.eye(2), (len(th), 2, 2)).copy()
    acc = np.zeros(len(th))
    for i in range(n):
        X = _rk4(at, X, i * hh, hh)
        if (i + 1) % RENORM_EVERY == 0 or i == n - 1:
            Q, R = np.linalg.qr(X)
            acc += np.log(np.abs(R[:, 0, 0]))
            X = Q
    vals = acc / T
    se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return LyapunovResult(float(vals.mean()), se, vals)


def _rotation_run(at, v, n, hh):
    total = np.zeros(len(v))
    for i in range(n):
        w = _rk4(at, v, i * hh, hh)
        cross = v[:, 0, 0] * w[:, 1, 0] - v[:, 1, 0] * w[:, 0, 0]
        dot = v[:, 0, 0] * w[:, 0, 0] + v[:, 1, 0] * w[:, 1, 0]
        dang = np.arctan2(cross, dot)
        if np.abs(dang).max() >= math.pi / 2:
            return None
        total += dang
        nrm = np.sqrt(w[:, 0, 0] ** 2 + w[:, 1, 0] ** 2)
        if not np.all(nrm > 1e-250) or not np.all(np.isfinite(nrm)):
            raise VectorCollapse("tracked vector degenerated")
        v = w / nrm[:, None, None]
    return total


def rotation_samples(sys, T, h=0.01, n_samples=8, seed=0, thetas=None, v=(1.0, 0.0)):
    """(arg X^T v - arg v)/T per theta sample; h is halved while any step turns by pi/2 or more."""
    th = sample_thetas(sys.d, n_samples, seed) if thetas is None else np.asarray(thetas, float).reshape(-1, sys.d)
    at = sys._clock(th)
    v0 = np.asarray(v, dtype=float).reshape(1, 2, 1)
    v0 = np.repeat(v0 / np.linalg.norm(v0), len(th), axis=0)
    for _ in range(30):
        n, hh = _steps(T, h)
        out = _rotation_run(at, v0, n, hh)
        if out is not None:
            return out / T
        h /= 2
    raise VectorCollapse("step-size guard never satisfied")


def rotation_number(sys, T, h=0.01, n_samples=8, seed=0, thetas=None):
    """Fibered rotation number: mean angular velocity of X^t v over samples."""
    return float(rotation_samples(sys, T, h, n_samples, seed, thetas).mean())


def _grid(d, n, denom=2):
    axes = [np.arange(n) * (denom / n)] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, d)


def verify_conjugation(Z, before, after, grid_n=256):
    """max |d/domega Z - (A + F) Z + Z (A' + F')| over a uniform grid of 2T^d.

    The derivative along omega is taken on the Fourier side; the rest is
    evaluated pointwise.
    """
    th = _grid(before.d, grid_n)
    dZ = evaluate(derive_omega(Z, before.omega), th, check=False)
    Zv = evaluate(Z, th, check=False)
    res = dZ - before.matrix(th) @ Zv + Zv @ after.matrix(th)
    return float(np.abs(res).max())


def verify_conjugation_fd(Z, before, after, grid_n=64, h=1e-3):
    """Same residual with a fourth-order central difference along the flow."""
    th = _grid(before.d, grid_n)
    om = before.omega.array

    def Zat(s):
        return evaluate(Z, th + s * om, check=False)

    dZ = (-Zat(2 * h) + 8 * Zat(h) - 8 * Zat(-h) + Zat(-2 * h)) / (12 * h)
    Zv = Zat(0.0)
    res = dZ - before.matrix(th) @ Zv + Zv @ after.matrix(th)
    return float(np.abs(res).max())


def lab_rows(sys, T, h=0.01, n_samples=8, seed=0):
    """Rows (theta, T, log_norm, rotation) for each theta sample."""
    th = sample_thetas(sys.d, n_samples, seed)
    X = integrate(sys, th, T, h)
    logn = np.log(np.linalg.norm(X, ord=2, axis=(1, 2)))
    rot = rotation_samples(sys, T, h, thetas=th)
    return [(" ".join(f"{x:.17g}" for x in t), T, float(ln), float(rr)) for t, ln, rr in zip(th, logn, rot)]


def write_csv(path, rows, header=("theta", "T", "log_norm", "rotation")):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([x if isinstance(x, str) else f"{x:.17g}" for x in row])
