import math

import numpy as np
import pytest

from kamcocycle.config import ConfigError, RunConfig, parse_floats
from kamcocycle.fourier import weighted_norm


def test_defaults_round_trip():
    cfg = RunConfig()
    again = RunConfig.from_text(cfg.to_text())
    assert again == cfg
    assert again.to_text() == cfg.to_text()


def test_modified_round_trip():
    text = "[system]\nomega = 0.7548776662466927 0.5698402909980532\nk = 1 -1\n" \
           "[weights]\nlambda = gevrey:2\npsi = power:3\n[kam]\nl = 4\nmode = practical\n"
    cfg = RunConfig.from_text(text)
    assert cfg.system.k == (1, -1)
    assert cfg.weights.lam_spec == "gevrey:2"
    assert cfg.kam.l == 4
    assert RunConfig.from_text(cfg.to_text()) == cfg


@pytest.mark.parametrize("text, msg", [
    ("[bogus]\nx = 1\n", "unknown section"),
    ("[kam]\nfoo = 1\n", "unknown key"),
    ("[kam]\nl = three\n", "cannot parse"),
    ("[kam]\ndelta = nan\n", "cannot parse"),
    ("[system]\nA = 1 0 0 0\n", "traceless"),
    ("[system]\nfamily = spline\n", "family"),
    ("[system]\nfamily = file\n", "needs system.F"),
    ("[system]\nk = 1 1\n", "differ in length"),
    ("[system]\nr0 = -1\n", "positive"),
    ("[weights]\nlambda = quadratic\n", "unknown weight"),
    ("[weights]\npsi = table:/nonexistent/psi.txt\n", ""),
    ("[kam]\nmatrix_norm = fro\n", ""),
    ("[kam]\nl = 0\n", ""),
    ("[output]\ngrid = 0\n", "grid"),
    ("not an ini file", ""),
])
def test_invalid_configs(text, msg):
    with pytest.raises(ConfigError, match=msg or None):
        RunConfig.from_text(text)


def test_parse_floats():
    assert parse_floats("1, 2 3") == [1.0, 2.0, 3.0]
    with pytest.raises(ConfigError):
        parse_floats("1 2", 3)
    with pytest.raises(ConfigError):
        parse_floats("1 inf")
    with pytest.raises(ConfigError):
        parse_floats("")


def test_perturbation_families():
    cfg = RunConfig()
    F = cfg.perturbation()
    assert math.isclose(weighted_norm(F, cfg.lam(), cfg.system.r0), cfg.system.amplitude, rel_tol=1e-14)
    cfg.system.family = "zero"
    assert len(cfg.perturbation()) == 0
    cfg.system.family = "schrodinger"
    cfg.system.E = 2.0
    assert np.array_equal(cfg.A_matrix(), [[0.0, 1.0], [-2.0, 0.0]])
    F = cfg.perturbation()
    # q = 2 lam cos(2 pi theta) sits in the lower-left entry
    assert math.isclose(F.evaluate([0.0])[1, 0].real, 2 * cfg.system.lam, rel_tol=1e-14)


def test_paper_mode_step_config():
    cfg = RunConfig.from_text("[kam]\nmode = paper\n")
    sc = cfg.step_config()
    assert sc.mode == "paper"
    assert sc.delta == 1e5
