"""Finitely supported 2x2 matrix Fourier series on the torus and the doubled torus.

A series stores integer indices h; the true frequency is k = h / denom, with
denom = 1 on T^d and denom = 2 on 2T^d (half-integer frequencies).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

PRUNE_ABS = 1e-300
_TWO_PI = 2.0 * math.pi


def matnorm(c, kind="max"):
    """Max-abs-entry norm of one or many 2x2 matrices; ``2max`` doubles it."""
    c = np.asarray(c)
    m = np.abs(c).max(axis=(-2, -1))
    if kind == "max":
        return m
    if kind == "2max":
        return 2.0 * m
    raise ValueError(f"unknown matrix norm {kind!r}")


def _combine(d, idx, coef):
    """Sum duplicate indices; return lexicographically sorted unique rows."""
    if len(idx) == 0:
        return np.zeros((0, d), np.int64), np.zeros((0, 2, 2), complex)
    lo = idx.min(axis=0)
    span = idx.max(axis=0) - lo + 1
    if float(np.prod(span.astype(float))) < 2.0**62:
        stride = np.ones(d, dtype=np.int64)
        for i in range(d - 2, -1, -1):
            stride[i] = stride[i + 1] * span[i + 1]
        keys = (idx - lo) @ stride
        ukeys, inv = np.unique(keys, return_inverse=True)
        uidx = np.empty((len(ukeys), d), np.int64)
        rem = ukeys.copy()
        for i in range(d):
            uidx[:, i], rem = np.divmod(rem, stride[i])
        uidx += lo
    else:
        uidx, inv = np.unique(idx, axis=0, return_inverse=True)
    out = np.zeros((len(uidx), 2, 2), complex)
    np.add.at(out, inv.ravel(), coef)
    return uidx, out


@dataclass(frozen=True, eq=False)
class MatrixSeries:
    """Immutable finitely supported series sum_h C_h exp(2 pi i <h/denom, theta>).

    ``err`` is a running budget of what pruning and truncated exponentials
    discarded, in unweighted coefficient norm.
    """

    d: int
    denom: int
    idx: np.ndarray
    coef: np.ndarray
    err: float = 0.0

    __array_ufunc__ = None

    def __post_init__(self):
        if self.denom not in (1, 2):
            raise ValueError("denom must be 1 or 2")
        self.idx.setflags(write=False)
        self.coef.setflags(write=False)

    # -- construction ------------------------------------------------------

    @classmethod
    def build(cls, d, denom, idx, coef, err=0.0, prune=0.0):
        idx = np.asarray(idx, dtype=np.int64).reshape(-1, d)
        coef = np.asarray(coef, dtype=complex).reshape(-1, 2, 2)
        idx, coef = _combine(d, idx, coef)
        mag = np.abs(coef).max(axis=(1, 2)) if len(coef) else np.zeros(0)
        keep = mag > prune
        if prune > 0:
            err += float(mag[~keep].sum())
        else:
            keep = mag > 0
        return cls(d, denom, idx[keep].copy(), coef[keep].copy(), float(err))

    @classmethod
    def zero(cls, d, denom=1):
        return cls(d, denom, np.zeros((0, d), np.int64), np.zeros((0, 2, 2), complex))

    @classmethod
    def constant(cls, M, d, denom=1):
        return cls.build(d, denom, np.zeros((1, d)), np.asarray(M, dtype=complex)[None])

    @classmethod
    def identity(cls, d, denom=1):
        return cls.constant(np.eye(2), d, denom)

    @classmethod
    def from_dict(cls, d, mapping, denom=1):
        if not mapping:
            return cls.zero(d, denom)
        keys = list(mapping)
        return cls.build(d, denom, [np.atleast_1d(k) for k in keys], [mapping[k] for k in keys])

    @classmethod
    def cosine(cls, M, k, d=None):
        """M cos(2 pi <k, theta>) for an integer vector k."""
        k = np.atleast_1d(np.asarray(k, dtype=np.int64))
        d = d or len(k)
        M = np.asarray(M, dtype=complex) / 2
        return cls.build(d, 1, [k, -k], [M, M])

    def to_dict(self):
        return {tuple(int(x) for x in h): c.copy() for h, c in zip(self.idx, self.coef)}

    # -- basic views -------------------------------------------------------

    def __len__(self):
        return len(self.idx)

    @property
    def freqs(self):
        return self.idx / self.denom

    @property
    def l1(self):
        """Integer l1 size of the stored indices (true order times denom)."""
        return np.abs(self.idx).sum(axis=1)

    @property
    def orders(self):
        return self.l1 / self.denom

    def max_order(self):
        return float(self.orders.max()) if len(self) else 0.0

    def get(self, h):
        h = np.atleast_1d(np.asarray(h, dtype=np.int64))
        hit = np.all(self.idx == h, axis=1)
        if hit.any():
            return self.coef[hit.argmax()].copy()
        return np.zeros((2, 2), complex)

    def mean(self):
        return self.get(np.zeros(self.d, np.int64))

    def to_denom(self, denom):
        if denom == self.denom:
            return self
        if (self.denom, denom) != (1, 2):
            if np.any(self.idx % 2):
                raise ValueError("series has half-integer frequencies")
            return MatrixSeries(self.d, 1, self.idx // 2, self.coef.copy(), self.err)
        return MatrixSeries(self.d, 2, self.idx * 2, self.coef.copy(), self.err)

    def reduce_denom(self):
        """Move to T^d when every stored frequency is an integer."""
        if self.denom == 2 and not np.any(self.idx % 2):
            return self.to_denom(1)
        return self

    # -- reality -----------------------------------------------------------

    def mirrored(self):
        """The series with C'_h = conj(C_{-h})."""
        order = np.lexsort((-self.idx).T[::-1]) if len(self) else np.zeros(0, int)
        return MatrixSeries(self.d, self.denom, (-self.idx)[order], np.conj(self.coef)[order], self.err)

    @cached_property
    def is_real(self):
        """True when C_{-h} is exactly conj(C_h) for every stored h."""
        m = self.mirrored()
        return bool(np.array_equal(m.idx, self.idx) and np.array_equal(m.coef, self.coef))

    def reality_defect(self):
        m = self.mirrored()
        diff = self - m
        return float(np.abs(diff.coef).max()) if len(diff) else 0.0

    def realify(self):
        """Project onto real-valued series: (F + mirrored(F)) / 2."""
        m = self.mirrored()
        return MatrixSeries.build(self.d, self.denom, np.vstack([self.idx, m.idx]),
                                  np.concatenate([self.coef, m.coef]) / 2, self.err)

    def max_trace(self):
        if not len(self):
            return 0.0
        return float(np.abs(self.coef[:, 0, 0] + self.coef[:, 1, 1]).max())

    # -- arithmetic --------------------------------------------------------

    def _unify(self, other):
        if self.d != other.d:
            raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")
        denom = max(self.denom, other.denom)
        return self.to_denom(denom), other.to_denom(denom)

    def __add__(self, other):
        if not isinstance(other, MatrixSeries):
            other = MatrixSeries.constant(other, self.d, self.denom)
        a, b = self._unify(other)
        return MatrixSeries.build(a.d, a.denom, np.vstack([a.idx, b.idx]),
                                  np.concatenate([a.coef, b.coef]), a.err + b.err)

    __radd__ = __add__

    def __neg__(self):
        return MatrixSeries(self.d, self.denom, self.idx.copy(), -self.coef, self.err)

    def __sub__(self, other):
        if not isinstance(other, MatrixSeries):
            other = MatrixSeries.constant(other, self.d, self.denom)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, s):
        if isinstance(s, MatrixSeries):
            raise TypeError("use @ for the series product")
        if s == 0:
            return MatrixSeries.zero(self.d, self.denom)
        return MatrixSeries(self.d, self.denom, self.idx.copy(), self.coef * s, self.err * abs(s))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / s)

    def __matmul__(self, other):
        if isinstance(other, MatrixSeries):
            return multiply(self, other)
        M = np.asarray(other, dtype=complex)
        return MatrixSeries(self.d, self.denom, self.idx.copy(), self.coef @ M, self.err * float(np.abs(M).max()))

    def __rmatmul__(self, other):
        M = np.asarray(other, dtype=complex)
        return MatrixSeries(self.d, self.denom, self.idx.copy(), M @ self.coef, self.err * float(np.abs(M).max()))

    def shift(self, dh):
        """Multiply by exp(2 pi i <dh/denom, theta>)."""
        dh = np.atleast_1d(np.asarray(dh, dtype=np.int64))
        if not len(self):
            return self
        return MatrixSeries(self.d, self.denom, self.idx + dh, self.coef.copy(), self.err)

    def prune(self, threshold=PRUNE_ABS):
        return MatrixSeries.build(self.d, self.denom, self.idx, self.coef, self.err, prune=threshold)

    def commutator(self, other):
        return (self @ other) - (other @ self)

    def norm(self, lam, r, matrix_norm="max"):
        return weighted_norm(self, lam, r, matrix_norm)

    def evaluate(self, theta):
        return evaluate(self, theta)

    def max_abs_coef(self):
        return float(np.abs(self.coef).max()) if len(self) else 0.0

    def __repr__(self):
        return f"MatrixSeries(d={self.d}, denom={self.denom}, modes={len(self)})"


# ---------------------------------------------------------------------------
# module-level operations


def weighted_norm(F, lam, r, matrix_norm="max"):
    """sum_k ||F_k|| exp(2 pi Lambda(|k|) r), |k| the l1 size of the true frequency."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if not len(F):
        return 0.0
    mags = matnorm(F.coef, matrix_norm)
    if r == 0:
        return float(mags.sum())
    with np.errstate(divide="ignore"):
        logs = np.log(mags) + _TWO_PI * r * lam(F.orders)
    return float(np.exp(logs).sum())


def multiply(F, G, prune=PRUNE_ABS):
    """Series product: (FG)_h = sum_{h1+h2=h} F_h1 G_h2, matrix order kept."""
    F, G = F._unify(G)
    d, denom = F.d, F.denom
    err = F.err * G.max_abs_coef() * len(G) + G.err * F.max_abs_coef() * len(F)
    if not len(F) or not len(G):
        return MatrixSeries.zero(d, denom)
    chunk = max(1, 4_000_000 // max(1, len(G)))
    idx_parts, coef_parts = [], []
    for s in range(0, len(F), chunk):
        fi, fc = F.idx[s:s + chunk], F.coef[s:s + chunk]
        idx = (fi[:, None, :] + G.idx[None, :, :]).reshape(-1, d)
        coef = np.matmul(fc[:, None], G.coef[None, :]).reshape(-1, 2, 2)
        i2, c2 = _combine(d, idx, coef)
        idx_parts.append(i2)
        coef_parts.append(c2)
    out = MatrixSeries.build(d, denom, np.vstack(idx_parts), np.concatenate(coef_parts), err, prune=prune)
    if F.is_real and G.is_real:
        out = out.realify()
        out.__dict__["is_real"] = True
    return out


def truncate(F, N):
    """Keep the coefficients with |k| <= N (boundary included)."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    keep = F.l1 <= N * F.denom
    return MatrixSeries(F.d, F.denom, F.idx[keep].copy(), F.coef[keep].copy(), F.err)


def tail(F, N):
    """F - truncate(F, N)."""
    keep = F.l1 > N * F.denom
    return MatrixSeries(F.d, F.denom, F.idx[keep].copy(), F.coef[keep].copy(), 0.0)


def derive_omega(F, omega):
    """Derivative along the flow: C_h -> 2 pi i <h/denom, omega> C_h."""
    om = np.asarray(getattr(omega, "omega", omega), dtype=float).reshape(-1)
    if om.size != F.d:
        raise ValueError("frequency dimension mismatch")
    fac = 2j * math.pi * (F.idx @ om) / F.denom
    keep = fac != 0
    out = MatrixSeries(F.d, F.denom, F.idx[keep].copy(), F.coef[keep] * fac[keep, None, None], F.err)
    if F.is_real:
        out.__dict__["is_real"] = out.is_real
    return out


def evaluate(F, theta, check=True):
    """Point values on 2T^d; returns a real 2x2 (or n x 2 x 2) array."""
    vals = evaluate_complex(F, theta)
    if check:
        bound = 1e-12 * max(float(np.abs(F.coef).max(axis=(1, 2)).sum()) if len(F) else 0.0, 1e-300)
        resid = float(np.abs(vals.imag).max()) if vals.size else 0.0
        if resid > bound:
            raise ValueError(f"imaginary residue {resid:.3e} exceeds {bound:.3e}: reality invariant broken")
    return vals.real


def evaluate_complex(F, theta):
    th = np.asarray(theta, dtype=float)
    single = th.ndim <= 1
    th = th.reshape(-1, F.d)
    if not len(F):
        out = np.zeros((len(th), 2, 2), complex)
    else:
        phase = np.exp(2j * math.pi * (th @ F.idx.T) / F.denom)
        out = np.einsum("pn,nij->pij", phase, F.coef)
    return out[0] if single else out


@dataclass(frozen=True, eq=False)
class TrivialMap:
    """theta -> exp(2 pi i <m,theta>) P1 + exp(-2 pi i <m,theta>) P2 on 2T^d.

    ``m2`` stores 2m as an integer vector.
    """

    P1: np.ndarray
    P2: np.ndarray
    m2: tuple
    order: float = math.inf

    def __post_init__(self):
        P1 = np.asarray(self.P1, dtype=complex)
        P2 = np.asarray(self.P2, dtype=complex)
        object.__setattr__(self, "P1", P1)
        object.__setattr__(self, "P2", P2)
        object.__setattr__(self, "m2", tuple(int(x) for x in self.m2))
        scale = max(1.0, float(np.abs(P1).max()) ** 2, float(np.abs(P2).max()) ** 2)
        tol = 1e-12 * scale
        I = np.eye(2)
        bad = (np.abs(P1 + P2 - I).max() > tol or np.abs(P1 @ P2).max() > tol
               or np.abs(P2 @ P1).max() > tol or np.abs(P1 @ P1 - P1).max() > tol
               or np.abs(P2 @ P2 - P2).max() > tol)
        if bad:
            raise ValueError("projection invariants violated")

    @classmethod
    def identity(cls, d):
        return cls(np.eye(2), np.zeros((2, 2)), (0,) * d)

    @property
    def d(self):
        return len(self.m2)

    @property
    def m(self):
        return np.array(self.m2) / 2.0

    @property
    def is_identity(self):
        return not any(self.m2)

    def series(self):
        if self.is_identity:
            return MatrixSeries.identity(self.d, 2)
        h = np.array(self.m2)
        return MatrixSeries.build(self.d, 2, [h, -h], [self.P1, self.P2])

    def inverse_series(self):
        if self.is_identity:
            return MatrixSeries.identity(self.d, 2)
        h = np.array(self.m2)
        return MatrixSeries.build(self.d, 2, [-h, h], [self.P1, self.P2])

    def evaluate(self, theta, inverse=False):
        th = np.asarray(theta, dtype=float).reshape(-1, self.d)
        ph = np.exp(1j * math.pi * (th @ np.array(self.m2)))
        if inverse:
            ph = np.conj(ph)
        out = ph[:, None, None] * self.P1 + np.conj(ph)[:, None, None] * self.P2
        return out.real if np.allclose(out.imag, 0, atol=1e-12) else out

    def compose(self, other):
        """Product of two trivial maps with the same decomposition (m adds)."""
        if not (np.allclose(self.P1, other.P1) and np.allclose(self.P2, other.P2)):
            raise ValueError("trivial maps use different decompositions")
        return TrivialMap(self.P1, self.P2, tuple(a + b for a, b in zip(self.m2, other.m2)),
                          min(self.order, other.order))


def conj_blocks(phi, F, inverse_side=False):
    """The four shifted blocks whose sum is Phi F Phi^{-1} (or Phi^{-1} F Phi)."""
    P1, P2 = phi.P1, phi.P2
    sgn = -1 if inverse_side else 1
    dh = sgn * np.array(phi.m2, dtype=np.int64) * F.denom
    return [P1 @ F @ P1, P2 @ F @ P2, (P1 @ F @ P2).shift(dh), (P2 @ F @ P1).shift(-dh)]


def conj_by_trivial(phi, F, inverse_side=False):
    """Phi F Phi^{-1} computed blockwise (Phi^{-1} F Phi with ``inverse_side``).

    A series on T^d stays on T^d because the shifts are by the integer 2m.
    """
    blocks = conj_blocks(phi, F, inverse_side)
    idx = np.vstack([b.idx for b in blocks])
    coef = np.concatenate([b.coef for b in blocks])
    out = MatrixSeries.build(F.d, F.denom, idx, coef, F.err)
    if F.is_real and np.array_equal(phi.P2, np.conj(phi.P1)):
        out = out.realify()
        out.__dict__["is_real"] = True
    if F.denom == 1 and np.any(out.idx % 1):
        raise AssertionError("conjugation left the torus")
    return out


class ExpOverflow(OverflowError):
    pass


def exp_series(X, lam, r, tol=1e-16, matrix_norm="max", prune=True):
    """Truncated exponential sum_{j<=J} X^j / j!.

    J is the first order with |X|^{J+1}/(J+1)! e^{|X|} <= tol max(1, |X|),
    the norm taken at radius r. Small coefficients are pruned and the
    dropped mass is added to ``err``.
    """
    x = weighted_norm(X, lam, r, matrix_norm)
    if not x < 50:
        raise ExpOverflow(f"|X|_r = {x:.3g} >= 50")
    d, denom = X.d, X.denom
    I = MatrixSeries.identity(d, denom)
    if x == 0:
        return I
    target = tol * max(1.0, x)
    J = 0
    bound = x * math.exp(x)
    while bound > target:
        J += 1
        bound *= x / (J + 1)
    out = I
    term = I
    for j in range(1, J + 1):
        term = multiply(term, X) / j
        out = out + term
    out = MatrixSeries(out.d, out.denom, out.idx, out.coef, out.err + bound)
    if prune and len(out):
        weights = np.exp(_TWO_PI * r * lam(out.orders))
        mag = np.abs(out.coef).max(axis=(1, 2)) * weights
        keep = mag >= target / (10 * len(out))
        lost = float((np.abs(out.coef).max(axis=(1, 2)))[~keep].sum())
        real = X.is_real
        out = MatrixSeries(d, denom, out.idx[keep].copy(), out.coef[keep].copy(), out.err + lost)
        if real:
            out.__dict__["is_real"] = out.is_real
    return out
