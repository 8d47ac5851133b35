"""Weight function, approximating function, arithmetic checks and parameter schedules.

All quantities that involve the perturbation size are carried as natural
logarithms: at the reference constants the sizes underflow any float long
before the schedule becomes interesting.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .lattice import l1_ball

PAPER_DELTA = 100000.0
PAPER_ZETA = 1.0 / 1728.0
PAPER_L = 56


class ScheduleExhausted(ArithmeticError):
    """The radius of analyticity dropped to zero or below."""


# ---------------------------------------------------------------------------
# monotone functions


class _Table:
    """Monotone cubic interpolant with power-law extension past the last sample."""

    def __init__(self, t, v):
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
            raise ValueError("table needs at least two (t, value) rows")
        if np.any(np.diff(t) <= 0):
            raise ValueError("table abscissae must be strictly increasing")
        if np.any(np.diff(v) <= 0):
            raise ValueError("table values must be strictly increasing")
        if t[0] < 0 or v[0] < 0:
            raise ValueError("table must live on [0, inf)")
        self.t, self.v = t, v
        # log-log interpolation keeps tables spanning hundreds of decades finite
        self.loglog = t[0] > 0 and v[0] > 0
        if self.loglog:
            self.g = PchipInterpolator(np.log(t), np.log(v), extrapolate=False)
            self.dg = self.g.derivative()
        else:
            self.f = PchipInterpolator(t, v, extrapolate=False)
            self.df = self.f.derivative()
        self.t_hi, self.v_hi = t[-1], v[-1]
        self.p_hi = math.log(v[-1] / v[-2]) / math.log(t[-1] / t[-2])
        if t[0] > 0:
            if v[0] <= 0:
                raise ValueError("table with positive first abscissa needs positive values")
            self.p_lo = math.log(v[1] / v[0]) / math.log(t[1] / t[0])
        else:
            self.p_lo = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        hi = x > self.t_hi
        lo = x < self.t[0]
        mid = ~(hi | lo)
        out[mid] = self._mid(x[mid])
        out[hi] = self.v_hi * (x[hi] / self.t_hi) ** self.p_hi
        out[lo] = self.v[0] * (x[lo] / self.t[0]) ** self.p_lo if self.p_lo else 0.0
        return out

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        hi = x > self.t_hi
        lo = x < self.t[0]
        mid = ~(hi | lo)
        out[mid] = self._mid_deriv(x[mid])
        out[hi] = self.p_hi * self.v_hi / self.t_hi * (x[hi] / self.t_hi) ** (self.p_hi - 1)
        if self.p_lo:
            out[lo] = self.p_lo * self.v[0] / self.t[0] * (x[lo] / self.t[0]) ** (self.p_lo - 1)
        return out

    def inv(self, y):
        y = np.asarray(y, dtype=float)
        out = np.empty_like(y)
        for i, yi in np.ndenumerate(y):
            if yi > self.v_hi:
                out[i] = self.t_hi * (yi / self.v_hi) ** (1.0 / self.p_hi)
            elif yi < self.v[0]:
                out[i] = self.t[0] * (yi / self.v[0]) ** (1.0 / self.p_lo) if self.p_lo else 0.0
            else:
                j = min(int(np.searchsorted(self.v, yi, side="right")) - 1, len(self.v) - 2)
                a, b = self.t[j], self.t[j + 1]
                if yi == self.v[j]:
                    out[i] = a
                elif yi == self.v[j + 1]:
                    out[i] = b
                else:
                    out[i] = brentq(lambda s: float(self._mid(np.array(s))) - yi, a, b,
                                    xtol=1e-300, rtol=1e-15)
        return out

    def _mid(self, x):
        if self.loglog:
            return np.exp(self.g(np.log(x)))
        return self.f(x)

    def _mid_deriv(self, x):
        if self.loglog:
            return self._mid(x) / x * self.dg(np.log(x))
        return self.df(x)

    def log_at(self, logt):
        if logt > math.log(self.t_hi):
            return math.log(self.v_hi) + self.p_hi * (logt - math.log(self.t_hi))
        if self.loglog and logt >= math.log(self.t[0]):
            return float(self.g(logt))
        val = float(self(np.array(math.exp(logt))))
        return math.log(val) if val > 0 else -math.inf

    def log_inv(self, logy):
        if logy > math.log(self.v_hi):
            return math.log(self.t_hi) + (logy - math.log(self.v_hi)) / self.p_hi
        val = float(self.inv(np.array(math.exp(logy))))
        return math.log(val) if val > 0 else -math.inf

    def elasticity(self, logt):
        if logt > math.log(self.t_hi):
            return self.p_hi
        if self.loglog and logt >= math.log(self.t[0]):
            return float(self.dg(logt))
        x = math.exp(logt)
        return float(self.deriv(np.array(x))) * x / float(self(np.array(x)))


def read_table(path):
    """Read a two-column ``t value`` table; '#' starts a comment."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns")
            rows.append((float(parts[0]), float(parts[1])))
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least two rows")
    t, v = zip(*rows)
    if any(b <= a for a, b in zip(t, t[1:])):
        raise ValueError(f"{path}: t must be strictly increasing")
    return t, v


class _Monotone:
    """Shared evaluation surface of the weight and approximating functions."""

    def _table(self):
        tab = self.__dict__.get("_tab")
        if tab is None:
            tab = _Table(self.t, self.v)
            object.__setattr__(self, "_tab", tab)
        return tab

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "tabulated":
            return self._table()(t)
        return t ** self._power()

    def inv(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "tabulated":
            return self._table().inv(y)
        return y ** (1.0 / self._power())

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "tabulated":
            return self._table().deriv(t)
        p = self._power()
        with np.errstate(divide="ignore"):
            return p * t ** (p - 1.0)

    def log_at(self, logt):
        """log f(exp(logt)), valid far beyond the float range."""
        if self.kind == "tabulated":
            return self._table().log_at(logt)
        return self._power() * logt

    def log_inv(self, logy):
        """log f^{-1}(exp(logy))."""
        if self.kind == "tabulated":
            return self._table().log_inv(logy)
        return logy / self._power()

    def elasticity(self, logt):
        """d log f / d log t at t = exp(logt)."""
        if self.kind == "tabulated":
            return self._table().elasticity(logt)
        return self._power()


@dataclass(frozen=True)
class WeightSpec(_Monotone):
    """Weight Lambda defining the ultradifferentiable norm.

    ``analytic`` is Lambda(t) = t, ``gevrey`` is Lambda(t) = t**(1/s) and
    ``tabulated`` interpolates user samples.
    """

    kind: str = "analytic"
    s: float = 1.0
    t: tuple = ()
    v: tuple = ()

    def __post_init__(self):
        if self.kind not in ("analytic", "gevrey", "tabulated"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "gevrey" and not self.s > 1:
            raise ValueError("gevrey weight needs s > 1")
        if self.kind == "tabulated":
            self._table()

    @classmethod
    def analytic(cls):
        return cls("analytic")

    @classmethod
    def gevrey(cls, s):
        return cls("gevrey", s=float(s))

    @classmethod
    def tabulated(cls, t, v):
        return cls("tabulated", t=tuple(map(float, t)), v=tuple(map(float, v)))

    @classmethod
    def from_file(cls, path):
        return cls.tabulated(*read_table(path))

    def _power(self):
        return 1.0 if self.kind == "analytic" else 1.0 / self.s

    def describe(self):
        if self.kind == "gevrey":
            return f"gevrey:{self.s!r}"
        return self.kind

    def check(self, samples):
        """Sampled invariants: increasing, subadditive, inverse round trip."""
        x = np.sort(np.asarray(samples, dtype=float))
        fx = self(x)
        out = {"increasing": bool(np.all(np.diff(fx)[np.diff(x) > 0] > 0))}
        xs, ys = np.meshgrid(x, x)
        out["subadditive"] = bool(np.all(self(xs + ys) <= self(xs) + self(ys) + 1e-12 * (1 + self(xs + ys))))
        pos = x[x > 0]
        back = self.inv(self(pos))
        out["inverse"] = bool(np.all(np.abs(back - pos) <= 1e-10 * pos))
        return out


@dataclass(frozen=True)
class ApproxSpec(_Monotone):
    """Approximating function Psi of the arithmetic condition.

    ``power`` is Psi(t) = t**tau (the Diophantine case), ``tabulated``
    interpolates user samples.
    """

    kind: str = "power"
    tau: float = 2.0
    t: tuple = ()
    v: tuple = ()

    def __post_init__(self):
        if self.kind not in ("power", "tabulated"):
            raise ValueError(f"unknown approximation kind {self.kind!r}")
        if self.kind == "power" and not self.tau >= 1:
            raise ValueError("power approximation needs tau >= 1")
        if self.kind == "tabulated":
            self._table()

    @classmethod
    def power(cls, tau):
        return cls("power", tau=float(tau))

    @classmethod
    def tabulated(cls, t, v):
        return cls("tabulated", t=tuple(map(float, t)), v=tuple(map(float, v)))

    @classmethod
    def from_file(cls, path):
        return cls.tabulated(*read_table(path))

    def _power(self):
        return self.tau

    def describe(self):
        return f"power:{self.tau!r}" if self.kind == "power" else self.kind

    def check(self, samples):
        """Sampled invariants: Psi >= id, superadditive on [1, inf)."""
        x = np.sort(np.asarray(samples, dtype=float))
        out = {"dominates_identity": bool(np.all(self(x) >= x * (1 - 1e-12)))}
        big = x[x >= 1]
        xs, ys = np.meshgrid(big, big)
        out["superadditive"] = bool(np.all(self(xs + ys) >= (self(xs) + self(ys)) * (1 - 1e-12)))
        return out


# ---------------------------------------------------------------------------
# frequency


@dataclass(frozen=True)
class FrequencyVector:
    omega: tuple
    kappa: float | None = None

    def __post_init__(self):
        om = tuple(float(w) for w in np.atleast_1d(self.omega))
        if len(om) == 0:
            raise ValueError("frequency vector must have d >= 1")
        if any(abs(w) > 1 for w in om):
            raise ValueError("frequency components must satisfy |omega_i| <= 1")
        if self.kappa is not None and not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        object.__setattr__(self, "omega", om)

    @property
    def d(self):
        return len(self.omega)

    @property
    def array(self):
        return np.array(self.omega)


def as_frequency(omega):
    return omega if isinstance(omega, FrequencyVector) else FrequencyVector(omega)


def check_frequency(omega, psi, order):
    """Largest kappa with |<k,omega>| >= kappa / Psi(|k|) for 0 < |k| <= order.

    Returns ``(kappa_max, worst_k)``. Since k and -k give the same value only
    representatives with a positive leading coordinate are scanned, and ties
    go to the lexicographically smallest one.
    """
    omega = as_frequency(omega)
    if order < 1:
        raise ValueError("order must be >= 1")
    k = l1_ball(order, omega.d, half=True)
    vals = np.abs(k @ omega.array) * psi(np.abs(k).sum(axis=1))
    i = int(np.argmin(vals))
    return float(vals[i]), tuple(int(c) for c in k[i])


# ---------------------------------------------------------------------------
# the Brjuno-Russmann integral


def _log_integrand(lam, psi, s):
    """Integrand of int Lambda' ln Psi / Lambda^2 dt in the variable s = ln t.

    Returned as (prefactor, log_lambda) with integrand = prefactor * exp(-log_lambda).
    """
    return lam.elasticity(s) * psi.log_at(s), lam.log_at(s)


def _segment(lam, psi, a, b, shift, tol):
    def g(s):
        pre, ll = _log_integrand(lam, psi, s)
        return pre * math.exp(-(ll - shift))

    with warnings.catch_warnings():
        # accuracy is judged by the doubling loop, not by QUADPACK's own flag
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(g, a, b, epsrel=tol / 10, epsabs=0.0, limit=200)
    return val


def log_brjuno_russmann_tail(lam, psi, log_lower, tol=1e-10, max_doublings=1024):
    """log of int_{exp(log_lower)}^inf Lambda'(t) ln Psi(t) / Lambda(t)^2 dt.

    Works for lower limits far beyond the float range. Returns +inf when the
    doubling heuristic flags divergence.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    pre0, shift = _log_integrand(lam, psi, log_lower)
    if not (math.isfinite(pre0) and math.isfinite(shift)):
        raise ValueError("integrand is not finite at the lower limit")
    step = math.log(2.0)
    total = 0.0
    streak = 0
    a = log_lower
    converged = False
    for _ in range(max_doublings):
        inc = _segment(lam, psi, a, a + step, shift, tol)
        total += inc
        a += step
        if inc > tol * total:
            streak += 1
        else:
            streak = 0
            if inc <= 0.1 * tol * total:
                converged = True
                break
    if not converged and streak >= 6:
        return math.inf
    def g(u):
        pre, ll = _log_integrand(lam, psi, a + u)
        return pre * math.exp(-(ll - shift))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        tail, _ = quad(g, 0.0, math.inf, epsrel=tol, epsabs=0.0, limit=500)
    total += tail
    if total <= 0:
        return -math.inf
    return math.log(total) - shift


def brjuno_russmann_integral(lam, psi, lower=1.0, tol=1e-10):
    """int_lower^inf Lambda'(t) ln Psi(t) / Lambda(t)^2 dt, or +inf on divergence."""
    if lower < 1:
        raise ValueError("lower limit must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return math.exp(log_brjuno_russmann_tail(lam, psi, math.log(lower), tol))


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class StepParameters:
    N: float
    R: float
    log_N: float
    log_R: float
    log_kappa2: float
    r_prime: float
    log_decrement: float

    @property
    def exhausted(self):
        return not self.r_prime > 0

    @property
    def R_ok(self):
        return self.log_R >= math.log(2.0)

    @property
    def kappa2(self):
        return math.exp(self.log_kappa2)

    @property
    def RN(self):
        return _safe_exp(self.log_R + self.log_N)


def _safe_exp(x):
    return math.inf if x > 709.0 else math.exp(x)


def step_parameters(r, log_eps, lam, psi, delta=PAPER_DELTA, zeta=PAPER_ZETA, kappa=1.0,
                    R_min=None, strict=True):
    """Truncation order N, renormalization factor R, kappa'' and the new radius.

    N = Lambda^{-1}(50 |log eps| / (pi r)), R = Psi^{-1}(eps^{-zeta}) / (3N),
    kappa'' = kappa eps^zeta, r' = r - 50 delta |log eps| / (pi Lambda(R N)).
    ``R_min`` floors R (practical runs use 2). With ``strict`` a non-positive
    r' raises :class:`ScheduleExhausted`.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    if not log_eps < 0:
        raise ValueError("eps must lie in (0, 1)")
    a = -log_eps
    log_N = lam.log_inv(math.log(50.0 * a / (math.pi * r)))
    log_R = psi.log_inv(zeta * a) - math.log(3.0) - log_N
    if R_min is not None:
        log_R = max(log_R, math.log(R_min))
    log_dec = math.log(50.0 * delta * a / math.pi) - lam.log_at(log_R + log_N)
    r_prime = r - _safe_exp(log_dec)
    out = StepParameters(
        N=_safe_exp(log_N), R=_safe_exp(log_R), log_N=log_N, log_R=log_R,
        log_kappa2=math.log(kappa) + zeta * log_eps, r_prime=r_prime, log_decrement=log_dec,
    )
    if strict and out.exhausted:
        raise ScheduleExhausted(f"radius exhausted: r'={r_prime!r} from r={r!r}")
    return out


@dataclass(frozen=True)
class ScheduleRecord:
    k: int
    log_eps: float
    r: float
    N: float
    R: float
    log_N: float
    log_R: float
    log_kappa2: float
    log_decrement: float


@dataclass(frozen=True)
class KamSchedule:
    delta: float
    zeta: float
    records: tuple
    r_limit: float
    log_total_decrement: float
    bound: float
    assumption_holds: bool
    failed: bool
    failed_at: int | None = None
    l: int = PAPER_L

    @property
    def r_limit_bound(self):
        return self.records[0].r - self.bound


def schedule_bound(r0, log_eps0, lam, psi, delta, zeta, tol=1e-10):
    """Integral-comparison upper bound on the total radius loss.

    150 delta |log eps0| / (pi Lambda(x0)) + 150 delta / (pi zeta log(2 delta))
    * int_{x0}^inf Lambda' ln Psi / Lambda^2, with x0 = Psi^{-1}(eps0^{-zeta}).
    """
    a = -log_eps0
    log_x0 = psi.log_inv(zeta * a)
    first = math.log(150.0 * delta * a / math.pi) - lam.log_at(log_x0)
    log_int = log_brjuno_russmann_tail(lam, psi, max(log_x0, 0.0), tol)
    second = math.log(150.0 * delta / (math.pi * zeta * math.log(2.0 * delta))) + log_int
    return _safe_exp(np.logaddexp(first, second))


def build_schedule(r0, log_eps0, lam, psi, delta=PAPER_DELTA, zeta=PAPER_ZETA, k_max=10,
                   kappa=1.0, tail_rel=1e-18, max_terms=500):
    """Radii r_k, orders N_k, R_k and kappa''_k along eps_k = eps0^((2 delta)^k).

    The limit radius sums the decrements until one drops below
    ``tail_rel * r0`` and then adds the integral tail bound.
    """
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    if not log_eps0 < 0:
        raise ValueError("eps0 must lie in (0, 1)")
    records = []
    r, log_eps = r0, log_eps0
    failed_at = None
    log_decs = []
    k = 0
    while True:
        p = step_parameters(r, log_eps, lam, psi, delta, zeta, kappa, strict=False)
        if k <= k_max:
            records.append(ScheduleRecord(k, log_eps, r, p.N, p.R, p.log_N, p.log_R,
                                          p.log_kappa2, p.log_decrement))
        log_decs.append(p.log_decrement)
        if p.exhausted:
            failed_at = k + 1
            break
        if k >= k_max and p.log_decrement < math.log(tail_rel * r0):
            break
        if k >= max_terms:
            break
        r = p.r_prime
        log_eps = 2.0 * delta * log_eps
        k += 1
        if math.isinf(log_eps):
            break
    log_total = float(np.logaddexp.reduce(log_decs))
    if failed_at is None and math.isfinite(log_eps):
        # remaining terms bounded through the integral comparison
        nxt = 2.0 * delta * log_eps
        log_x = psi.log_inv(-zeta * nxt)
        if log_x < 700:
            log_t = log_brjuno_russmann_tail(lam, psi, max(log_x, 0.0))
            log_t += math.log(150.0 * delta / (math.pi * zeta * math.log(2.0 * delta)))
            log_total = float(np.logaddexp(log_total, log_t))
    bound = schedule_bound(r0, log_eps0, lam, psi, delta, zeta)
    return KamSchedule(
        delta=delta, zeta=zeta, records=tuple(records),
        r_limit=r0 - _safe_exp(log_total) if failed_at is None else -math.inf,
        log_total_decrement=log_total, bound=bound, assumption_holds=bound < r0,
        failed=failed_at is not None, failed_at=failed_at,
    )


# ---------------------------------------------------------------------------
# smallness conditions


@dataclass(frozen=True)
class Inequality:
    name: str
    j: int | None
    log_lhs: float
    log_rhs: float
    log_threshold: float | None = None
    log_eps: float = 0.0

    @property
    def margin(self):
        return self.log_rhs - self.log_lhs

    @property
    def passed(self):
        return self.log_lhs <= self.log_rhs

    @property
    def threshold_passed(self):
        if self.log_threshold is None:
            return None
        return self.log_eps <= self.log_threshold

    @property
    def threshold_margin(self):
        if self.log_threshold is None:
            return None
        return self.log_threshold - self.log_eps


@dataclass(frozen=True)
class SmallnessReport:
    entries: tuple = field(default_factory=tuple)

    @property
    def all_passed(self):
        return all(e.passed for e in self.entries)

    def failed(self):
        return [e for e in self.entries if not e.passed]

    def get(self, name, j=None):
        for e in self.entries:
            if e.name == name and e.j == j:
                return e
        raise KeyError((name, j))


def _lse(*terms):
    return float(np.logaddexp.reduce(np.array(terms, dtype=float)))


def check_smallness(log_eps, kappa, C0=1.0, zeta=PAPER_ZETA, delta=PAPER_DELTA, l=PAPER_L):
    """Evaluate every smallness inequality of the inductive step in log space.

    Each entry carries the direct log-space comparison (``passed``) and, when
    a closed-form sufficient threshold on eps is known, that threshold as
    well. Purely diagnostic.
    """
    x = log_eps
    lk, lc, pi = math.log(kappa), math.log(C0), math.pi
    ln = math.log
    out = []

    def add(name, lhs, rhs, thr=None, j=None):
        out.append(Inequality(name, j, lhs, rhs, thr, x))

    # renormalization step
    add("cond1.1",
        _lse(ln(0.5) + lk + zeta * x, 845 / 864 * x),
        ln(0.75) + lk + zeta * x,
        1728 / 2123 * (lk - ln(4)))
    add("cond1.2",
        ln(4) + 2 * lc - 13 * lk + (1 - 18 * zeta) * x,
        7 / 8 * x,
        -96 / 11 * (ln(4) + 2 * lc - 13 * lk))
    add("cond1.3",
        ln(8) + 2 * lc + (1 - 2 * zeta - 1 / 96) * x + _lse(100 * delta * x, ln(3) + (1 - 6 * zeta) * x),
        (1.5 - 4 * zeta - 1 / 96) * x,
        -432 / 215 * (ln(48) + 2 * lc))
    # complete step
    add("cond2.0.0",
        (1 - 576 * zeta) * x,
        -96 * (ln(2) + lc) + 576 * (lk - ln(32) - _lse(-zeta / 2 * x, 0.0)),
        min(1152 * (lk - ln(64)) - 192 * (ln(2) + lc), 864 * (lk - ln(64)) - 144 * (ln(2) + lc)))
    base = _lse(0.0, ln(1 + pi) - zeta / 2 * x, 23 / 24 * x)
    add("cond2.0",
        (5 / 4 - 1 / 48) * x,
        2 * (ln(0.75) + lk - lc + zeta * x - ln(32) - base) + 2 * zeta * x,
        2119 / 1728 * ln(3 * kappa / (512 * pi * C0)))
    for j in range(2, l + 1):
        s = [0.0, 23 / 24 * x, ln(1 + pi) - zeta / 2 * x]
        s += [(1.25 ** i - 1 / 96) * x for i in range(1, j)]
        add("cond2.1",
            (1.25 ** j - 1 / 48) * x,
            2 * (j * ln(0.75) + lk - lc + zeta * x - ln(32) - _lse(*s)) + 2 * zeta * x,
            j=j)
        add("cond2.2",
            ln(256) + 2 * lc - 14 * zeta * x - 13 * ((j - 1) * ln(0.75) + lk - lc)
            + 1.25 ** (j - 1) * x + _lse(50 * delta / l * x, 1.25 ** (j - 1) * x),
            1.25 ** j * x,
            j=j)
    add("cond2.3",
        _lse(23 / 24 * x, ln(pi) - zeta / 2 * x, *[(1.25 ** i - 1 / 48) * x for i in range(1, l + 1)]),
        -zeta * x)
    add("cond2.4",
        _lse(ln(0.5) + lk + zeta * x, ln(2) + (5 / 4 - 1 / 48) * x),
        lk + zeta * x,
        1728 / 2141 * (lk - ln(4)))
    add("cond2.5.2",
        _lse(-zeta / 2 * x, 23 / 24 * x, ln(pi) - zeta * x),
        -2 * zeta * x,
        min(1152 * ln(1 / 3), 864 / 829 * ln(1 / 3), 1728 * ln(1 / (3 * pi))))
    add("cond2.6",
        _lse(ln(4) + (-2 * zeta + 59 / 48) * x, ln(2) + (5 / 4 - 1 / 48) * x),
        x,
        min(864 / 197 * ln(1 / 8), 48 / 11 * ln(1 / 4)))
    add("cond2.7",
        _lse(ln(2) + 0.5 * x, ln(2) + 7 / 8 * x),
        0.25 * x,
        ln(1 / 256))
    return SmallnessReport(tuple(out))
