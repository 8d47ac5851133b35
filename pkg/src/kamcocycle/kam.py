"""Inductive KAM steps and the almost-reducibility driver.

The engine works in the frame of the accumulated renormalization psi: it
stores the constant part A, the conjugated perturbation G = psi^{-1} Fbar psi
and the total conjugation W = Z psi, for which

    d/domega W = (A0 + F0) W - W (A + G)

holds at every step. Z and Fbar are rebuilt from W, psi and G on demand.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .cohomology import CohomologyError, solve
from .fourier import (ExpOverflow, MatrixSeries, TrivialMap, conj_by_trivial, derive_omega,
                      exp_series, matnorm, multiply, tail, truncate, weighted_norm)
from .lattice import LatticeTooLarge
from .resonance import RenormalizationError, is_br_spectrum, renormalize
from .sl2 import classify
from .weights import (PAPER_DELTA, PAPER_L, PAPER_ZETA, ApproxSpec, ScheduleExhausted, WeightSpec,
                      as_frequency, check_smallness, step_parameters)


class NormBlowUp(ArithmeticError):
    pass


class EstimateViolation(ArithmeticError):
    pass


class ReductionAborted(RuntimeError):
    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace


@dataclass(frozen=True)
class StepConfig:
    """Constants and tolerances of a run.

    ``paper`` mode pins delta, zeta and l to the reference values and turns
    every estimate into an assertion. ``practical`` mode accepts user
    constants and only records the estimates.
    """

    mode: str = "practical"
    delta: float = 1.1
    zeta: float = 0.01
    l: int = 3
    kappa: float = 0.5
    lam: WeightSpec = field(default_factory=WeightSpec)
    psi: ApproxSpec = field(default_factory=ApproxSpec)
    residual_tol: float = 1e-12
    det_tol: float | None = None
    max_steps: int = 4
    target_log_eps: float = math.log(1e-100)
    R_min: float | None = 2.0
    exp_tol: float = 1e-17
    lie_tol: float = 1e-20
    prune: float = 1e-300
    window: int = 5
    matrix_norm: str = "max"
    C0: float = 1.0

    def __post_init__(self):
        if self.mode == "paper":
            if (self.delta, self.zeta, self.l) != (PAPER_DELTA, PAPER_ZETA, PAPER_L):
                raise ValueError("paper mode fixes delta=100000, zeta=1/1728, l=56")
        elif self.mode == "practical":
            if not self.delta >= 1.05:
                raise ValueError("practical mode needs delta >= 1.05")
            if not 0 < self.zeta < 0.125:
                raise ValueError("zeta must lie in (0, 1/8)")
            if not self.l >= 1:
                raise ValueError("l must be >= 1")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        if self.max_steps < 0 or self.window < 1:
            raise ValueError("max_steps must be >= 0 and window >= 1")
        if self.matrix_norm not in ("max", "2max"):
            raise ValueError(f"matrix_norm must be max or 2max, got {self.matrix_norm!r}")

    @classmethod
    def paper(cls, **kw):
        kw.setdefault("R_min", None)
        return cls(mode="paper", delta=PAPER_DELTA, zeta=PAPER_ZETA, l=PAPER_L, **kw)

    @property
    def strict(self):
        return self.mode == "paper"


@dataclass(frozen=True, eq=False)
class ReductionState:
    A0: np.ndarray
    F0: MatrixSeries
    omega: object
    A: np.ndarray
    G: MatrixSeries
    psi: MatrixSeries
    psi_inv: MatrixSeries
    W: MatrixSeries
    W_inv: MatrixSeries
    r: float
    log_eps: float
    k: int = 0
    m2_total: tuple = ()
    rotation_shift: float = 0.0

    @property
    def F_bar(self):
        return multiply(multiply(self.psi, self.G), self.psi_inv).reduce_denom()

    @property
    def Z(self):
        return multiply(self.W, self.psi_inv).reduce_denom()

    @property
    def Z_inv(self):
        return multiply(self.psi, self.W_inv).reduce_denom()


def initial_state(A0, F0, r0, omega, cfg):
    omega = as_frequency(omega)
    d = omega.d
    A0 = np.asarray(A0, dtype=float)
    F0 = F0.to_denom(1) if F0.denom == 2 and not np.any(F0.idx % 2) else F0
    eps = weighted_norm(F0, cfg.lam, r0, cfg.matrix_norm)
    I2 = MatrixSeries.identity(d, 2)
    return ReductionState(A0=A0, F0=F0, omega=omega, A=A0.copy(), G=F0, psi=I2, psi_inv=I2,
                          W=I2, W_inv=I2, r=r0, log_eps=math.log(eps) if eps > 0 else -math.inf,
                          m2_total=(0,) * d)


def conjugation_residual(state, r, lam, matrix_norm="max"):
    """|d/domega W - (A0 + F0) W + W (A + G)|_r for the state's W."""
    W = state.W
    lhs = derive_omega(W, state.omega)
    rhs = multiply(MatrixSeries.constant(state.A0, W.d) + state.F0, W) - multiply(
        W, MatrixSeries.constant(state.A, W.d) + state.G)
    return weighted_norm(lhs - rhs, lam, r, matrix_norm)


# ---------------------------------------------------------------------------
# step without renormalization


@dataclass
class BasicReport:
    order: float
    kappa_p: float
    branch: str
    gate_value: float
    gate_bound: float
    gate_ok: bool
    br_next: bool
    br_margin: float
    norm_F: float
    norm_X: float
    norm_F_next: float
    relation_residual: float
    solve_gain: float
    solve_bound: float
    solve_within: bool
    r: float
    r_next: float


@dataclass(frozen=True, eq=False)
class BasicResult:
    X: MatrixSeries
    A: np.ndarray
    F: MatrixSeries
    expX: MatrixSeries
    expmX: MatrixSeries
    report: BasicReport


def _bracket_series(Y, X, coeffs, tol, prune):
    """sum_n coeffs(n) B^n(Y) with B(Y) = YX - XY, stopped once terms are negligible."""
    total = None
    term = Y
    scale = None
    for n in range(1, 80):
        term = multiply(term, X, prune) - multiply(X, term, prune)
        c = coeffs(n)
        if c:
            piece = term * c
            total = piece if total is None else total + piece
        size = float(np.abs(term.coef).sum()) * abs(coeffs(n) or 1.0) if len(term) else 0.0
        if total is not None and len(total):
            scale = float(np.abs(total.coef).sum())
        if size == 0 or (scale and size <= tol * scale) or size < 1e-300:
            break
    return total if total is not None else MatrixSeries.zero(Y.d, Y.denom)


def step_basic(A_t, F, r, r_p, N_t, kappa_p, cfg, omega, branch=None):
    """One KAM step without renormalization.

    Solves the cohomological equation at order 3 N_t, sets A' = A_t + F(0)
    and returns F' with d/domega e^X = (A_t + F) e^X - e^X (A' + F').
    F' is evaluated through its bracket expansion, which keeps the result
    accurate relative to |F|^2 instead of relative to ||A_t||.
    """
    omega = as_frequency(omega)
    lam, psi = cfg.lam, cfg.psi
    A_t = np.asarray(A_t, dtype=float)
    d = F.d
    F = F if len(F) else MatrixSeries.zero(d, F.denom)
    mean = F.mean()
    gate_bound = (kappa_p / (32 * (1 + float(matnorm(A_t))))) ** 2 / float(psi(N_t)) ** 2
    gate_val = float(matnorm(mean))
    gate_ok = gate_val <= gate_bound
    if cfg.strict and not gate_ok:
        raise EstimateViolation(f"mean {gate_val:.3e} above the stability gate {gate_bound:.3e}")
    S = classify(A_t, tol_det=cfg.det_tol)
    if branch is None:
        branch = "spectral" if S.kind in ("elliptic", "hyperbolic") else S.kind
    M = 3 * N_t
    X, diag = solve(A_t, F, omega, psi, kappa_p, M, branch=branch)
    A_next = A_t + mean.real
    Xc = X
    dX = derive_omega(X, omega)
    FM = truncate(F, M)
    At = MatrixSeries.constant(A_t, d, F.denom)
    coh = multiply(At, X) - multiply(X, At) - dX + FM - mean
    lie = cfg.lie_tol
    T1 = _bracket_series(F, Xc, lambda n: 1.0 / math.factorial(n), lie, cfg.prune)
    T3 = _bracket_series(At, Xc, lambda n: 0.0 if n < 2 else 1.0 / math.factorial(n), lie, cfg.prune)
    T4 = _bracket_series(dX, Xc, lambda n: 1.0 / math.factorial(n + 1), lie, cfg.prune)
    F_next = (T1 + tail(F, M) + coh + T3 - T4).prune(cfg.prune)
    if F.is_real:
        F_next = F_next.realify()
    expX = exp_series(X, lam, r_p, cfg.exp_tol, cfg.matrix_norm)
    expmX = exp_series(-X, lam, r_p, cfg.exp_tol, cfg.matrix_norm)
    # defining relation d/domega e^X = (A_t + F) e^X - e^X (A' + F')
    rel = derive_omega(expX, omega) - multiply(At + F, expX) + multiply(
        expX, MatrixSeries.constant(A_next, d, F.denom) + F_next)
    br = is_br_spectrum(A_next, omega, psi, 0.75 * kappa_p, N_t)
    rep = BasicReport(
        order=N_t, kappa_p=kappa_p, branch=branch, gate_value=gate_val, gate_bound=gate_bound,
        gate_ok=gate_ok, br_next=br.passed, br_margin=br.margin,
        norm_F=weighted_norm(F, lam, r, cfg.matrix_norm),
        norm_X=weighted_norm(X, lam, r_p, cfg.matrix_norm),
        norm_F_next=weighted_norm(F_next, lam, r_p, cfg.matrix_norm),
        relation_residual=weighted_norm(rel, lam, r_p, cfg.matrix_norm),
        solve_gain=diag.gain, solve_bound=diag.paper_bound, solve_within=diag.within_bound,
        r=r, r_next=r_p,
    )
    return BasicResult(X, A_next, F_next, expX, expmX, rep)


# ---------------------------------------------------------------------------
# step with renormalization and the complete step


@dataclass
class StepReport:
    k: int
    branch: str
    m2: tuple
    phi: TrivialMap | None
    log_eps_before: float
    log_eps_after: float
    r: float
    r_after: float
    N: float
    R: float
    log_kappa2: float
    norm_A_before: float
    norm_A_after: float
    norm_A1: float
    residual: float
    residual_ok: bool
    Z_minus_id: float
    Zinv_minus_id: float
    psi_norm: float
    renorm: object
    substeps: list
    estimate_flags: dict
    rotation_shift: float = 0.0

    @property
    def resonant(self):
        return self.branch == "resonant"

    def record(self):
        """Line-record for the trace file."""
        return {
            "k": self.k,
            "branch": self.branch,
            "log_eps_before": _num(self.log_eps_before),
            "log_eps_after": _num(self.log_eps_after),
            "r": _num(self.r),
            "N": _num(self.N),
            "R": _num(self.R),
            "norm_A": _num(self.norm_A_after),
            "resonance_m": [x / 2 for x in self.m2],
            "residual": _num(self.residual),
            "estimate_flags": {k: v for k, v in self.estimate_flags.items()},
        }


def _num(x):
    x = float(x)
    if math.isfinite(x):
        return float(f"{x:.17g}")
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def _log(x):
    return math.log(x) if x > 0 else -math.inf


@dataclass(frozen=True, eq=False)
class RenormResult:
    state: ReductionState
    Z1: MatrixSeries
    psi: MatrixSeries
    phi: TrivialMap
    report: object
    basic: BasicResult
    C0: float


def step_renorm(state, cfg, params=None):
    """Renormalize the constant part, then one basic step at order R N.

    The resulting state sits at radius (r + r'')/2. ``Z1`` is the
    conjugation factor psi' e^X psi'^{-1} and ``psi`` the updated map.
    """
    omega = state.omega
    if params is None:
        params = step_parameters(state.r, state.log_eps, cfg.lam, cfg.psi, cfg.delta, cfg.zeta,
                                 cfg.kappa, R_min=cfg.R_min, strict=True)
    r, r2 = state.r, params.r_prime
    r_half = 0.5 * (r + r2)
    kappa2 = params.kappa2
    phi, A_t, rep = renormalize(state.A, omega, cfg.psi, cfg.kappa, params.R, params.N,
                                kappa2=kappa2, lam=cfg.lam, r_prime=r_half)
    C0 = max(1.0, rep.C0_eff)
    if phi.is_identity:
        G, psi, psi_inv, W, W_inv = state.G, state.psi, state.psi_inv, state.W, state.W_inv
    else:
        G = conj_by_trivial(phi, state.G, inverse_side=True)
        psi = multiply(state.psi, phi.series())
        psi_inv = multiply(phi.inverse_series(), state.psi_inv)
        W = multiply(state.W, phi.series())
        W_inv = multiply(phi.inverse_series(), state.W_inv)
    basic = step_basic(A_t, G, r, r_half, params.RN, kappa2 / C0, cfg, omega)
    shift = rep.orientation * math.pi * float(np.dot(rep.m2, omega.array))
    new = replace(state, A=basic.A, G=basic.F, psi=psi, psi_inv=psi_inv,
                  W=multiply(W, basic.expX), W_inv=multiply(basic.expmX, W_inv), r=r_half,
                  m2_total=tuple(a + b for a, b in zip(state.m2_total, rep.m2)),
                  rotation_shift=state.rotation_shift + shift)
    Z1 = multiply(multiply(psi, basic.expX), psi_inv).reduce_denom()
    return RenormResult(new, Z1, psi, phi, rep, basic, C0)


def _trivial_step(state, cfg):
    """A full step on a vanishing perturbation: only the counter moves."""
    nA = float(matnorm(state.A))
    new = replace(state, k=state.k + 1)
    flags = {"residual": conjugation_residual(new, new.r, cfg.lam, cfg.matrix_norm)
             <= cfg.residual_tol * (1 + nA)}
    rep = StepReport(
        k=state.k, branch="nonresonant", m2=(0,) * state.omega.d, phi=None,
        log_eps_before=-math.inf, log_eps_after=-math.inf, r=state.r, r_after=state.r,
        N=0.0, R=0.0, log_kappa2=math.log(cfg.kappa), norm_A_before=nA, norm_A_after=nA,
        norm_A1=nA, residual=0.0, residual_ok=flags["residual"], Z_minus_id=0.0, Zinv_minus_id=0.0,
        psi_norm=max(weighted_norm(state.psi, cfg.lam, state.r, cfg.matrix_norm),
                     weighted_norm(state.psi_inv, cfg.lam, state.r, cfg.matrix_norm)),
        renorm=None, substeps=[], estimate_flags=flags)
    return new, rep


def full_step(state, cfg):
    """One renormalization step followed by l - 1 basic steps at order R N.

    The basic steps use kappa'_j = (3/4)^(j-1) kappa''/C0 and shrink the
    radius along r'_j = (r + r'')/2 - j (r - r'')/(2l); the new epsilon is
    |Fbar'| measured at r''.
    """
    lam, mn = cfg.lam, cfg.matrix_norm
    log_eps = state.log_eps
    if log_eps == -math.inf:
        return _trivial_step(state, cfg)
    params = step_parameters(state.r, log_eps, lam, cfg.psi, cfg.delta, cfg.zeta, cfg.kappa,
                             R_min=cfg.R_min, strict=True)
    r, r2, l = state.r, params.r_prime, cfg.l
    radii = [0.5 * (r + r2) - j * (r - r2) / (2 * l) for j in range(l + 1)]
    rr = step_renorm(state, cfg, params)
    s1, phi, rep, basic, C0 = rr.state, rr.phi, rr.report, rr.basic, rr.C0
    A1 = s1.A
    subs = [basic.report]
    cur = s1
    eps_targets = []
    exps = [basic.expX]
    inv_exps = [basic.expmX]
    for j in range(2, l + 1):
        kp = 0.75 ** (j - 1) * params.kappa2 / C0
        b = step_basic(cur.A, cur.G, radii[j - 2], radii[j - 1], params.RN, kp, cfg, state.omega)
        subs.append(b.report)
        exps.append(b.expX)
        inv_exps.append(b.expmX)
        eps_targets.append((j, b.report.norm_F_next, math.exp(((1.25 ** j) - 1 / 48) * log_eps)))
        cur = replace(cur, A=b.A, G=b.F, W=multiply(cur.W, b.expX), W_inv=multiply(b.expmX, cur.W_inv),
                      r=radii[j - 1])
    new = replace(cur, r=r2, k=state.k + 1)
    F_bar = new.F_bar
    eps_new = weighted_norm(F_bar, lam, r2, mn)
    new = replace(new, log_eps=_log(eps_new))
    # conjugation produced by this step: Z' = psi' E psi'^{-1}
    E, Einv = exps[0], inv_exps[0]
    for e, ei in zip(exps[1:], inv_exps[1:]):
        E, Einv = multiply(E, e), multiply(ei, Einv)
    Zp = multiply(multiply(new.psi, E), new.psi_inv).reduce_denom()
    Zp_inv = multiply(multiply(new.psi, Einv), new.psi_inv).reduce_denom()
    I = MatrixSeries.identity(state.F0.d)
    z_dev = weighted_norm(Zp - I, lam, r2, mn)
    zi_dev = weighted_norm(Zp_inv - I, lam, r2, mn)
    resid = conjugation_residual(new, r2, lam, mn)
    nA, nA_new = float(matnorm(state.A)), float(matnorm(new.A))
    psi_norm = max(weighted_norm(new.psi, lam, r2, mn), weighted_norm(new.psi_inv, lam, r2, mn))
    eps = math.exp(log_eps)
    F1bar_conj = conj_by_trivial(phi, s1.G) if not phi.is_identity else s1.G
    flags = {
        "decay_2delta": new.log_eps <= 2 * cfg.delta * log_eps,
        "psi_bound": _log(psi_norm) <= -2 * cfg.delta * cfg.zeta * log_eps,
        "Z_close": max(_log(z_dev), _log(zi_dev)) <= 0.9 * log_eps,
        "A_growth": nA_new <= nA + math.exp(-cfg.zeta * log_eps),
        "renorm_A1": float(matnorm(A1)) <= nA + eps ** (23 / 24) + math.pi * params.N,
        "renorm_F1": _log(weighted_norm(F1bar_conj, lam, radii[0], mn)) <= 1.25 * log_eps,
        "renorm_br": bool(rep.br_after.passed),
        "renorm_diff": bool(rep.diff_ok),
        "spectrum_stable": all(s.br_next for s in subs),
        "gates": all(s.gate_ok for s in subs),
        "eps_targets": all(v <= t for _, v, t in eps_targets),
        "residual": resid <= cfg.residual_tol * (1 + nA_new),
        "state_A": math.log(max(nA_new, 1e-300)) <= -0.5 * cfg.zeta * new.log_eps,
        "state_psi": _log(psi_norm) <= -cfg.zeta * new.log_eps,
    }
    if rep.resonant:
        flags["renorm_tilde"] = bool(rep.tilde_ok)
        flags["renorm_A1_res"] = float(matnorm(A1)) <= 0.75 * params.kappa2
        flags["resonant_A"] = nA_new <= params.kappa2
    report = StepReport(
        k=state.k, branch="resonant" if rep.resonant else "nonresonant", m2=rep.m2,
        phi=None if phi.is_identity else phi, log_eps_before=log_eps, log_eps_after=new.log_eps,
        r=r, r_after=r2, N=params.N, R=params.R, log_kappa2=params.log_kappa2,
        norm_A_before=nA, norm_A_after=nA_new, norm_A1=float(matnorm(A1)), residual=resid,
        residual_ok=flags["residual"], Z_minus_id=z_dev, Zinv_minus_id=zi_dev, psi_norm=psi_norm,
        renorm=rep, substeps=subs, estimate_flags=flags, rotation_shift=new.rotation_shift - state.rotation_shift,
    )
    if cfg.strict:
        bad = [k for k, v in flags.items() if not v]
        if bad:
            raise EstimateViolation(f"step {state.k}: estimates violated: {', '.join(bad)}")
    if new.log_eps >= log_eps:
        raise NormBlowUp(f"step {state.k}: |Fbar| grew from {eps:.3e} to {eps_new:.3e}")
    return new, report


# ---------------------------------------------------------------------------
# driver


@dataclass
class ReductionTrace:
    steps: list
    state: ReductionState
    outcome: str
    cfg: StepConfig
    resonance_events: list = field(default_factory=list)
    Z_dev: float = 0.0
    Z_dev_bound: float = 0.0
    dZ_norms: list = field(default_factory=list)
    error: str | None = None

    @property
    def A_eps(self):
        return self.state.A

    @property
    def r_eps(self):
        return self.state.r

    @property
    def log_eps(self):
        return [s.log_eps_before for s in self.steps] + [self.state.log_eps]

    @property
    def Z(self):
        return self.state.Z

    @property
    def Z_inv(self):
        return self.state.Z_inv

    @property
    def F_bar(self):
        return self.state.F_bar

    @property
    def A_bar(self):
        """psi A_eps psi^{-1}, the reduced constant seen on the original torus."""
        st = self.state
        return multiply(multiply(st.psi, MatrixSeries.constant(st.A, st.psi.d, 2)), st.psi_inv).reduce_denom()

    def final_flags(self):
        """Final-state estimates: |Z^{+-1} - Id| against eps0^(9/10) and the telescoping sum,
        |psi^{+-1}| against eps^-zeta and the stronger eps^(-zeta/2)."""
        st, cfg = self.state, self.cfg
        if not self.steps:
            return {}
        lam, mn = cfg.lam, cfg.matrix_norm
        log_e0, log_e = self.steps[0].log_eps_before, st.log_eps
        pn = max(weighted_norm(st.psi, lam, st.r, mn), weighted_norm(st.psi_inv, lam, st.r, mn))
        return {
            "Z_eps0": _log(self.Z_dev) <= 0.9 * log_e0,
            "Z_telescoping": self.Z_dev <= self.Z_dev_bound,
            "psi_zeta": _log(pn) <= -cfg.zeta * log_e,
            "psi_half_zeta": _log(pn) <= -0.5 * cfg.zeta * log_e,
        }

    def records(self):
        if not self.steps:
            return [_trivial_step(self.state, self.cfg)[1].record()]
        return [s.record() for s in self.steps]

    def write_jsonl(self, path):
        with open(path, "w") as fh:
            for rec in self.records():
                fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _outcome(steps, window):
    trailing = 0
    for s in reversed(steps):
        if s.resonant:
            break
        trailing += 1
    if trailing >= min(window, len(steps)):
        return "reducible-candidate"
    return "recurrent-resonances"


def almost_reduce(A0, F0, r0, omega, cfg):
    """Iterate complete steps until |Fbar| reaches the target or max_steps.

    The outcome is ``reducible-candidate`` when the final ``window`` steps
    (all steps of a shorter run) needed no renormalization, and
    ``recurrent-resonances`` otherwise; every resonant step records
    ||A|| against kappa eps^zeta.
    """
    state = initial_state(A0, F0, r0, omega, cfg)
    steps = []
    events = []
    dz = []
    lam, mn = cfg.lam, cfg.matrix_norm

    def partial(msg=None):
        tr = ReductionTrace(steps, state, "aborted", cfg, events, error=msg)
        return tr

    while state.log_eps > cfg.target_log_eps and len(steps) < cfg.max_steps:
        if cfg.strict:
            rep = check_smallness(state.log_eps, cfg.kappa, cfg.C0, cfg.zeta, cfg.delta, cfg.l)
            if not rep.all_passed:
                names = sorted({e.name for e in rep.failed()})
                raise ReductionAborted(f"eps above the smallness threshold: {', '.join(names)}", partial())
        try:
            state, rep = full_step(state, cfg)
        except (ScheduleExhausted, NormBlowUp, CohomologyError, RenormalizationError, ExpOverflow,
                LatticeTooLarge, EstimateViolation) as exc:
            raise ReductionAborted(f"{type(exc).__name__}: {exc}", partial(str(exc))) from exc
        steps.append(rep)
        if rep.resonant:
            kappa_eps = cfg.kappa * math.exp(cfg.zeta * rep.log_eps_before)
            events.append({"k": rep.k, "norm_A": rep.norm_A_after, "kappa_eps_zeta": kappa_eps,
                           "holds": rep.norm_A_after <= kappa_eps})
        dz.append(weighted_norm(derive_omega(state.Z, state.omega), lam, state.r, mn))
    trace = ReductionTrace(steps, state, _outcome(steps, cfg.window), cfg, events, dZ_norms=dz)
    if steps:
        I = MatrixSeries.identity(state.F0.d)
        trace.Z_dev = max(weighted_norm(state.Z - I, lam, state.r, mn),
                          weighted_norm(state.Z_inv - I, lam, state.r, mn))
        trace.Z_dev_bound = 2 * sum(math.exp(0.9 * s.log_eps_before) for s in steps)
    return trace


# ---------------------------------------------------------------------------
# density of reducible cocycles


@dataclass
class DensityResult:
    H: MatrixSeries
    trace: ReductionTrace
    rho: float
    norm_diff: float
    bound: float
    residual: float


def density_approximant(G, A, r0, omega, cfg, eps_target):
    """A reducible H close to G = A + F: H = G - Z Fbar Z^{-1}.

    Z psi conjugates H to the constant A_eps; the residual of that
    conjugation is reported together with |H - G| and 4 |Fbar|.
    """
    omega = as_frequency(omega)
    A = np.asarray(A, dtype=float)
    F0 = G - MatrixSeries.constant(A, G.d, G.denom)
    cfg2 = replace(cfg, target_log_eps=min(cfg.target_log_eps, math.log(eps_target / 4)))
    trace = almost_reduce(A, F0, r0, omega, cfg2)
    st = trace.state
    rho = st.r
    lam, mn = cfg.lam, cfg.matrix_norm
    WGW = multiply(multiply(st.W, st.G), st.W_inv).reduce_denom()
    H = (G - WGW).reduce_denom()
    if G.is_real:
        H = H.realify()
    W = st.W
    res = derive_omega(W, omega) - multiply(H, W) + multiply(W, MatrixSeries.constant(st.A, W.d, 2))
    return DensityResult(
        H=H, trace=trace, rho=rho,
        norm_diff=weighted_norm(H - G, lam, rho, mn),
        bound=4 * weighted_norm(trace.F_bar, lam, rho, mn),
        residual=weighted_norm(res, lam, rho, mn),
    )
