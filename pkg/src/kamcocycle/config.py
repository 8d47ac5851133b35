"""Run configuration: ``key = value`` lines under ``[section]`` headers.

Sections and keys::

    [system]   A, omega, r0, family (zero|cos|schrodinger|file), F, M, k,
               amplitude, E, lam
    [weights]  lambda (analytic | gevrey:<s> | table:<path>),
               psi (power:<tau> | table:<path>)
    [kam]      mode, delta, zeta, l, kappa, residual_tol, det_tol, max_steps,
               target_eps, R_min, window, matrix_norm
    [output]   dir, seed, grid

Unknown sections or keys are errors. ``RunConfig.to_text`` writes every
field back, so parse and write round-trip.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .fourier import MatrixSeries, weighted_norm
from .io import read_series
from .kam import StepConfig
from .weights import ApproxSpec, WeightSpec


class ConfigError(ValueError):
    pass


def parse_weight(text):
    kind, _, arg = text.strip().partition(":")
    if kind == "analytic" and not arg:
        return WeightSpec.analytic()
    if kind == "gevrey":
        return WeightSpec.gevrey(float(arg))
    if kind == "table":
        return WeightSpec.from_file(arg)
    raise ConfigError(f"unknown weight {text!r}")


def parse_approx(text):
    kind, _, arg = text.strip().partition(":")
    if kind == "power":
        return ApproxSpec.power(float(arg))
    if kind == "table":
        return ApproxSpec.from_file(arg)
    raise ConfigError(f"unknown approximating function {text!r}")


def parse_floats(text, n=None, name="value"):
    try:
        vals = [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    if not vals or (n is not None and len(vals) != n):
        raise ConfigError(f"{name}: expected {n or 'some'} numbers, got {text!r}")
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{name}: nonfinite entry in {text!r}")
    return vals


@dataclass
class SystemSection:
    A: tuple = (0.0, -0.4, 0.4, 0.0)
    omega: tuple = (0.6180339887498949,)
    r0: float = 0.5
    family: str = "cos"
    F: str = ""
    M: tuple = (0.3, 1.0, 0.5, -0.3)
    k: tuple = (1,)
    amplitude: float = 1e-4
    E: float = 1.0
    lam: float = 1e-4


@dataclass
class WeightsSection:
    # "lambda" is a keyword; the attribute is lam_spec and the key stays "lambda"
    lam_spec: str = "analytic"
    psi: str = "power:2"


@dataclass
class KamSection:
    mode: str = "practical"
    delta: float = 1.1
    zeta: float = 0.01
    l: int = 3
    kappa: float = 0.5
    residual_tol: float = 1e-12
    det_tol: float = 0.0
    max_steps: int = 4
    target_eps: float = 1e-100
    R_min: float = 2.0
    window: int = 5
    matrix_norm: str = "max"


@dataclass
class OutputSection:
    dir: str = "out"
    seed: int = 0
    grid: int = 256


_KEYMAP = {"weights": {"lambda": "lam_spec"}}


@dataclass
class RunConfig:
    system: SystemSection = field(default_factory=SystemSection)
    weights: WeightsSection = field(default_factory=WeightsSection)
    kam: KamSection = field(default_factory=KamSection)
    output: OutputSection = field(default_factory=OutputSection)

    # -- text form ---------------------------------------------------------

    @classmethod
    def from_text(cls, text, source="<config>"):
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        cp.optionxform = str
        try:
            cp.read_string(text, source)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        cfg = cls()
        for sec in cp.sections():
            if not hasattr(cfg, sec):
                raise ConfigError(f"unknown section [{sec}]")
            target = getattr(cfg, sec)
            allowed = _keys(sec, target)
            for key, raw in cp.items(sec):
                attr = allowed.get(key)
                if attr is None:
                    raise ConfigError(f"unknown key {key!r} in [{sec}]")
                setattr(target, attr, _convert(getattr(target, attr), raw, f"{sec}.{key}"))
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_text(fh.read(), str(path))

    def to_text(self):
        out = []
        for sec in ("system", "weights", "kam", "output"):
            out.append(f"[{sec}]")
            target = getattr(self, sec)
            for key, attr in _keys(sec, target).items():
                val = getattr(target, attr)
                if isinstance(val, tuple):
                    text = " ".join(repr(x) for x in val)
                else:
                    text = repr(val) if isinstance(val, float) else str(val)
                out.append(f"{key} = {text}")
            out.append("")
        return "\n".join(out)

    # -- validation and construction ---------------------------------------

    def validate(self):
        s = self.system
        if len(s.A) != 4 or abs(s.A[0] + s.A[3]) > 1e-13 * max(1.0, max(map(abs, s.A))):
            raise ConfigError("system.A must be 4 entries of a traceless matrix")
        if s.family not in ("zero", "cos", "schrodinger", "file"):
            raise ConfigError(f"system.family must be zero, cos, schrodinger or file, got {s.family!r}")
        if s.family == "file" and not s.F:
            raise ConfigError("system.family = file needs system.F")
        if s.family == "cos" and len(s.k) != len(s.omega):
            raise ConfigError("system.k and system.omega differ in length")
        if not s.r0 > 0:
            raise ConfigError("system.r0 must be positive")
        if self.output.grid < 1:
            raise ConfigError("output.grid must be positive")
        try:
            self.lam()
            self.psi()
            self.step_config()
        except ConfigError:
            raise
        except (ValueError, OSError) as exc:
            raise ConfigError(str(exc)) from exc

    def lam(self):
        return parse_weight(self.weights.lam_spec)

    def psi(self):
        return parse_approx(self.weights.psi)

    def step_config(self):
        k = self.kam
        kw = dict(kappa=k.kappa, lam=self.lam(), psi=self.psi(), residual_tol=k.residual_tol,
                  det_tol=k.det_tol or None, max_steps=k.max_steps,
                  target_log_eps=math.log(k.target_eps) if k.target_eps > 0 else -math.inf,
                  window=k.window, matrix_norm=k.matrix_norm)
        if k.mode == "paper":
            return StepConfig.paper(**kw)
        return StepConfig(mode=k.mode, delta=k.delta, zeta=k.zeta, l=k.l, R_min=k.R_min or None, **kw)

    def A_matrix(self):
        if self.system.family == "schrodinger":
            return np.array([[0.0, 1.0], [-self.system.E, 0.0]])
        return np.array(self.system.A, dtype=float).reshape(2, 2)

    def perturbation(self):
        """F0 from the configured family; ``cos`` is scaled to |F0|_r0 = amplitude."""
        s = self.system
        d = len(s.omega)
        if s.family == "zero":
            return MatrixSeries.zero(d)
        if s.family == "file":
            return read_series(s.F)
        if s.family == "schrodinger":
            e1 = np.zeros(d, np.int64)
            e1[0] = 1
            return MatrixSeries.cosine(np.array([[0.0, 0.0], [2 * s.lam, 0.0]]), e1, d)
        F = MatrixSeries.cosine(np.array(s.M).reshape(2, 2), s.k, d)
        nrm = weighted_norm(F, self.lam(), s.r0)
        return F * (s.amplitude / nrm) if nrm > 0 else F


def _keys(sec, target):
    """Config key -> attribute name for one section."""
    inv = {v: k for k, v in _KEYMAP.get(sec, {}).items()}
    return {inv.get(f.name, f.name): f.name for f in fields(target)}


def _convert(default, raw, name):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            v = float(raw)
            if math.isnan(v):
                raise ValueError("nan")
            return v
        if isinstance(default, tuple):
            if default and isinstance(default[0], int):
                return tuple(int(x) for x in raw.replace(",", " ").split())
            return tuple(parse_floats(raw, name=name))
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from exc
    return raw
