import json
import math
import subprocess
import sys


from kamcocycle.cli import main
from kamcocycle.fourier import MatrixSeries
from kamcocycle.io import read_series, write_series

from conftest import GOLDEN


def _err(capsys):
    lines = capsys.readouterr().err.strip().splitlines()
    return json.loads(lines[-1])


def _write_cfg(path, text=""):
    path.write_text(text)
    return str(path)


def test_check_freq_golden(capsys):
    assert main(["check-freq", "--omega", repr(GOLDEN), "--psi", "power:1", "--order", "1000"]) == 0
    out = capsys.readouterr().out.splitlines()
    kappa = float(out[0].split("=")[1])
    # Psi = id: the minimum of |k| |k omega| over the scan is attained at k = 1
    assert math.isclose(kappa, GOLDEN, rel_tol=1e-12)
    assert out[1] == "worst_k = 1"
    main(["check-freq", "--omega", repr(GOLDEN), "--psi", "power:1", "--order", "1000"])
    assert capsys.readouterr().out.splitlines() == out


def test_check_freq_rational_fails(capsys):
    code = main(["check-freq", "--omega", "0.3,0.6", "--order", "10", "--min-kappa", "1e-3"])
    assert code == 3
    assert _err(capsys)["error"] == "CheckFailed"


def test_missing_flag_is_usage_error(capsys):
    assert main(["check-freq", "--omega", "0.5"]) == 2
    rec = _err(capsys)
    assert rec["exit"] == 2 and rec["error"] == "UsageError"


def test_bad_number_is_usage_error(capsys):
    assert main(["check-freq", "--omega", "half", "--order", "3"]) == 2
    assert _err(capsys)["error"] == "ConfigError"


def test_schedule_default(capsys, tmp_path):
    csv_path = tmp_path / "s.csv"
    assert main(["schedule", "--csv", str(csv_path)]) == 0
    out = capsys.readouterr().out
    r_limit = float([ln for ln in out.splitlines() if ln.startswith("# r_limit =")][0].split("=")[1])
    assert 0 < r_limit < 1
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "k,log_eps,r,log_N,log_R,log_kappa2,log_decrement"
    assert len(rows) == 12


def test_schedule_exhausted(capsys):
    assert main(["schedule", "--log-eps0=-10"]) == 3
    assert "exhausted" in _err(capsys)["message"]


def test_schedule_both_eps_flags(capsys):
    assert main(["schedule", "--eps0", "1e-5", "--log-eps0=-3"]) == 2


def test_reduce_zero(tmp_path, capsys):
    cfg = _write_cfg(tmp_path / "c.ini", "[system]\nfamily = zero\n")
    out = tmp_path / "out"
    assert main(["reduce", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "trace.jsonl").read_text().splitlines()
    assert len(lines) == 1
    summary = json.loads((out / "summary.json").read_text())
    assert summary["residuals_ok"] is True


def test_reduce_scenario(tmp_path, capsys):
    cfg = _write_cfg(tmp_path / "c.ini")
    out = tmp_path / "out"
    assert main(["reduce", "--config", cfg, "--out", str(out)]) == 0
    recs = [json.loads(ln) for ln in (out / "trace.jsonl").read_text().splitlines()]
    eps = [recs[0]["log_eps_before"]] + [r["log_eps_after"] for r in recs]
    assert all(b < a for a, b in zip(eps, eps[1:]))
    for name in ("Z", "Z_inv", "psi", "F_bar", "G", "A_eps"):
        assert isinstance(read_series(str(out / f"{name}.txt")), MatrixSeries)
    header = (out / "summary.csv").read_text().splitlines()[0]
    assert header == "k,log_eps_before,log_eps_after,r,branch,residual"
    # the copied config reproduces the run
    assert (out / "config.ini").exists()


def test_reduce_deterministic(tmp_path, capsys):
    cfg = _write_cfg(tmp_path / "c.ini")
    for name in ("a", "b"):
        assert main(["reduce", "--config", cfg, "--out", str(tmp_path / name)]) == 0
    for f in ("trace.jsonl", "Z.txt", "summary.csv", "summary.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_reduce_residual_failure(tmp_path, capsys):
    cfg = _write_cfg(tmp_path / "c.ini", "[kam]\nresidual_tol = 0\n")
    out = tmp_path / "out"
    assert main(["reduce", "--config", cfg, "--out", str(out)]) == 3
    rec = json.loads((out / "error.json").read_text())
    assert rec["exit"] == 3
    assert _err(capsys) == rec


def test_reduce_config_error(tmp_path, capsys):
    cfg = _write_cfg(tmp_path / "c.ini", "[kam]\nunknown = 1\n")
    assert main(["reduce", "--config", cfg]) == 2
    assert _err(capsys)["error"] == "ConfigError"
    assert main(["reduce", "--config", str(tmp_path / "missing.ini")]) == 2


def test_reduce_sweep(tmp_path, capsys):
    cfg = _write_cfg(tmp_path / "c.ini", "[kam]\nmax_steps = 1\n")
    out = tmp_path / "sw"
    assert main(["reduce", "--config", cfg, "--out", str(out), "--sweep", "system.amplitude=1e-4,1e-5"]) == 0
    dirs = sorted(p.name for p in out.iterdir())
    assert dirs == ["sweep_000", "sweep_001"]
    assert "amplitude = 1e-5" in (out / "sweep_001" / "config.ini").read_text().replace("1e-05", "1e-5")
    assert main(["reduce", "--config", cfg, "--out", str(out), "--sweep", "kam.nokey=1"]) == 2


def test_verify_identity(tmp_path, capsys):
    F = MatrixSeries.cosine([[0.1, 0.2], [0.3, -0.1]], [1])
    write_series(str(tmp_path / "F.txt"), F)
    csv_path = tmp_path / "v.csv"
    code = main(["verify", "--omega", repr(GOLDEN), "--A", "0 -0.4 0.4 0", "--F", str(tmp_path / "F.txt"),
                 "--grid", "64", "--csv", str(csv_path)])
    assert code == 0
    assert float(capsys.readouterr().out.split("=")[1]) == 0.0
    assert csv_path.read_text().splitlines()[0] == "grid_n,residual"


def test_verify_mismatch(capsys):
    code = main(["verify", "--omega", repr(GOLDEN), "--A", "0 -0.4 0.4 0", "--A-after", "0 -0.5 0.5 0"])
    assert code == 3


def test_lyapunov_hyperbolic(tmp_path, capsys):
    csv_path = tmp_path / "l.csv"
    code = main(["lyapunov", "--omega", repr(GOLDEN), "--A", "0.3 0 0 -0.3", "--T", "50", "--samples", "4",
                 "--csv", str(csv_path)])
    assert code == 0
    out = capsys.readouterr().out.splitlines()
    assert abs(float(out[0].split("=")[1]) - 0.3) < 1e-6
    assert csv_path.read_text().splitlines()[0] == "theta,T,log_norm,rotation"


def test_lyapunov_needs_system(capsys):
    assert main(["lyapunov", "--omega", "0.5"]) == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "kamcocycle.cli", "check-freq", "--omega", "0.5"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stderr.strip().splitlines()[-1])["exit"] == 2
    proc = subprocess.run([sys.executable, "-m", "kamcocycle.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("check-freq", "schedule", "reduce", "verify", "lyapunov"):
        assert cmd in proc.stdout
