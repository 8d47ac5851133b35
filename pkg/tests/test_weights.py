import itertools
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import GOLDEN
from kamcocycle.weights import (PAPER_DELTA, PAPER_L, PAPER_ZETA, ApproxSpec, FrequencyVector,
                                ScheduleExhausted, WeightSpec, brjuno_russmann_integral,
                                build_schedule, check_frequency, check_smallness, read_table,
                                schedule_bound, step_parameters)

LAM = WeightSpec.analytic()
PSI2 = ApproxSpec.power(2)


def brute_kappa(omega, psi, K):
    """Plain-loop scan over the whole l1 ball (both signs of k)."""
    best, arg = math.inf, None
    d = len(omega)
    for k in itertools.product(range(-K, K + 1), repeat=d):
        n = sum(map(abs, k))
        if n == 0 or n > K:
            continue
        v = abs(sum(a * b for a, b in zip(k, omega))) * float(psi(n))
        if v < best:
            best, arg = v, k
    return best, arg


# -- weight and approximating functions ------------------------------------


def test_analytic_weight_is_identity():
    t = np.array([0.0, 0.5, 3.0, 1e5])
    assert np.array_equal(LAM(t), t)
    assert np.array_equal(LAM.inv(t), t)
    assert np.all(LAM.deriv(t) == 1.0)


@given(st.floats(1.01, 10), st.lists(st.floats(0, 1e4), min_size=2, max_size=12))
def test_gevrey_weight_invariants(s, xs):
    lam = WeightSpec.gevrey(s)
    assert lam.check(xs) == {"increasing": True, "subadditive": True, "inverse": True}


@given(st.floats(1, 6), st.lists(st.floats(1, 1e3), min_size=2, max_size=12))
def test_power_psi_invariants(tau, xs):
    assert ApproxSpec.power(tau).check(xs) == {"dominates_identity": True, "superadditive": True}


def test_power_psi_below_one_is_reported():
    # t^tau < t on (0, 1): the sampled check reports it rather than hiding it
    assert ApproxSpec.power(2).check([0.0, 0.5])["dominates_identity"] is False
    assert ApproxSpec.power(1).check([0.0, 0.5])["dominates_identity"] is True


@given(st.floats(1, 6), st.floats(1, 1e3), st.integers(1, 50))
def test_superadditivity_consequence(tau, x, n):
    psi = ApproxSpec.power(tau)
    assert psi(n * x) >= n * psi(x) * (1 - 1e-12)


def test_tabulated_round_trip_and_extension(tmp_path):
    t = np.linspace(0.0, 10.0, 41)
    p = tmp_path / "lam.txt"
    p.write_text("# sqrt weight\n" + "\n".join(f"{float(a)!r} {math.sqrt(a)!r}" for a in t) + "\n")
    lam = WeightSpec.from_file(p)
    xs = np.linspace(1.1, 9.7, 25)  # away from the infinite slope at 0
    assert np.allclose(lam(xs), np.sqrt(xs), rtol=2e-3)
    assert lam.check(np.linspace(0, 30, 40))["inverse"]
    # past the last sample the table continues as a power law
    assert math.isclose(lam.log_at(math.log(1e6)), 0.5 * math.log(1e6), rel_tol=0.05)


def test_read_table_rejects_bad_files(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1 1\n1 2\n")
    with pytest.raises(ValueError, match="strictly increasing"):
        read_table(p)
    p.write_text("1 2 3\n2 3\n")
    with pytest.raises(ValueError, match="two columns"):
        read_table(p)


def test_spec_validation():
    with pytest.raises(ValueError):
        WeightSpec.gevrey(1.0)
    with pytest.raises(ValueError):
        ApproxSpec.power(0.5)
    with pytest.raises(ValueError):
        FrequencyVector(())
    with pytest.raises(ValueError):
        FrequencyVector((1.5,))


# -- arithmetic condition --------------------------------------------------


def test_check_frequency_half_example():
    kappa, k = check_frequency([0.5], LAM, 2)
    assert kappa == 0.5 and k == (1,)


def test_check_frequency_golden_matches_scan():
    kappa, k = check_frequency([GOLDEN], PSI2, 100)
    ref, kref = brute_kappa([GOLDEN], PSI2, 100)
    assert kappa == pytest.approx(ref, rel=1e-14)
    assert k in (kref, tuple(-x for x in kref))
    # with Psi = t^2 the first mode wins: |omega| * 1
    assert kappa == pytest.approx(GOLDEN, rel=1e-15) and k == (1,)


def test_check_frequency_detects_rational_relation():
    # omega_2 = 2 omega_1 is killed by k = (2, -1)
    kappa, k = check_frequency([0.3, 0.6], PSI2, 10)
    assert kappa < 1e-6
    assert abs(2 * k[0] + k[1] * 1) < 1e-12 or abs(0.3 * k[0] + 0.6 * k[1]) < 1e-12


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(1, 3), st.integers(1, 8))
def test_check_frequency_equals_diophantine_scan(w1, w2, tau, K):
    psi = ApproxSpec.power(tau)
    kappa, _ = check_frequency([w1, w2], psi, K)
    ref, _ = brute_kappa([w1, w2], psi, K)
    assert kappa == pytest.approx(ref, rel=1e-12, abs=1e-14)


def test_check_frequency_rejects_order():
    with pytest.raises(ValueError):
        check_frequency([GOLDEN], PSI2, 0)


# -- Brjuno-Russmann integral ----------------------------------------------


def test_br_integral_closed_form():
    assert brjuno_russmann_integral(LAM, PSI2, math.e) == pytest.approx(4 / math.e, rel=1e-10)
    assert brjuno_russmann_integral(LAM, PSI2, 1.0) == pytest.approx(2.0, rel=1e-10)


def test_br_integral_matches_mpmath_for_gevrey():
    lam = WeightSpec.gevrey(2.0)
    got = brjuno_russmann_integral(lam, ApproxSpec.power(3), 2.0)
    # Lambda = sqrt(t): integrand 3 ln t / (2 t^1.5)
    mp.mp.dps = 30
    ref = mp.quad(lambda t: 3 * mp.log(t) / (2 * t ** mp.mpf(1.5)), [2, 100, 1e6, mp.inf])
    closed = mp.mpf(1.5) / mp.sqrt(2) * (2 * mp.log(2) + 4)
    assert float(ref) == pytest.approx(float(closed), rel=1e-20)
    assert got == pytest.approx(float(ref), rel=1e-10)


def _subexp_psi():
    t = np.geomspace(1.0, 2.0e4, 600)
    return ApproxSpec.tabulated(t, np.exp(t / np.log(t + 2) ** 2))


def test_br_integral_tabulated_against_trapezoid():
    psi = _subexp_psi()
    got = brjuno_russmann_integral(LAM, psi, 1.0)
    # Lambda = id, s = ln t: integrand exp(-s) log Psi(e^s); dense trapezoid
    # over the table, closed form over the power-law extension past it
    s_hi = math.log(2.0e4)
    s = np.linspace(0.0, s_hi, 200_001)
    lp = np.array([psi.log_at(x) for x in s])
    body = np.trapezoid(np.exp(-s) * lp, s)
    p = psi.elasticity(s_hi + 1.0)
    tail = math.exp(-s_hi) * (psi.log_at(s_hi) + p)
    assert got == pytest.approx(body + tail, rel=1e-8)


def test_br_integral_divergence_sentinel():
    t = np.geomspace(1.0, 1e300, 2000)
    lam = WeightSpec.tabulated(t, np.log1p(t))
    assert brjuno_russmann_integral(lam, PSI2, 2.0) == math.inf


def test_br_integral_rejects_bad_arguments():
    with pytest.raises(ValueError):
        brjuno_russmann_integral(LAM, PSI2, 0.5)
    with pytest.raises(ValueError):
        brjuno_russmann_integral(LAM, PSI2, 1.0, tol=0)


# -- parameters and schedules ----------------------------------------------


def test_step_parameters_N_example():
    p = step_parameters(1.0, -math.pi, LAM, PSI2, zeta=PAPER_ZETA, strict=False)
    assert p.N == pytest.approx(50.0, rel=1e-14)


def test_step_parameters_R_against_mpmath():
    mp.mp.dps = 50
    p = step_parameters(1.0, -math.pi, LAM, PSI2, zeta=PAPER_ZETA, strict=False)
    ref = mp.sqrt(mp.exp(mp.pi / 1728)) / 150
    assert p.R == pytest.approx(float(ref), rel=1e-13)
    assert not p.R_ok


def test_paper_constants():
    assert (PAPER_DELTA, PAPER_ZETA, PAPER_L) == (100000, 1 / 1728, 56)


@given(st.floats(0.01, 10), st.floats(-1e6, -1e-3), st.floats(1.01, 5))
def test_step_parameters_round_trip(r, log_eps, s):
    lam = WeightSpec.gevrey(s)
    p = step_parameters(r, log_eps, lam, PSI2, 1.1, 0.01, strict=False)
    target = 50 * abs(log_eps) / (math.pi * r)
    assert math.exp(lam.log_at(p.log_N)) == pytest.approx(target, rel=1e-10)
    assert p.log_kappa2 == pytest.approx(0.01 * log_eps)


def test_step_parameters_errors():
    with pytest.raises(ScheduleExhausted):
        step_parameters(1.0, -10.0, LAM, PSI2)
    with pytest.raises(ValueError):
        step_parameters(0.0, -10.0, LAM, PSI2)
    with pytest.raises(ValueError):
        step_parameters(1.0, 0.0, LAM, PSI2)
    p = step_parameters(1.0, -10.0, LAM, PSI2, 1.1, 0.01, R_min=2)
    assert p.R == 2.0 and p.R_ok


def test_schedule_base_case():
    s = build_schedule(1.0, -1e6, LAM, PSI2, k_max=0)
    assert len(s.records) == 1
    assert (s.records[0].log_eps, s.records[0].r) == (-1e6, 1.0)


def test_schedule_failure_flag():
    s = build_schedule(1.0, -10.0, LAM, PSI2)
    assert s.failed and s.failed_at == 1 and s.r_limit == -math.inf


def test_schedule_recurrence_and_monotonicity():
    s = build_schedule(1.0, -1e5, LAM, PSI2, k_max=6)
    for a, b in zip(s.records, s.records[1:]):
        assert b.log_eps == 2 * PAPER_DELTA * a.log_eps
        assert b.r <= a.r
        assert b.log_decrement < a.log_decrement
    assert s.records[1].r < s.records[0].r
    assert 0 < s.r_limit < 1


def test_schedule_against_extended_precision():
    mp.mp.dps = 200
    s = build_schedule(1.0, -1e6, LAM, PSI2, k_max=5)
    # Lambda = id, Psi = t^2: R N = exp(zeta a / 2) / 3, term = 150 delta a exp(-zeta a/2) / pi
    delta, zeta = mp.mpf(PAPER_DELTA), mp.mpf(1) / 1728
    a = mp.mpf(10) ** 6
    total = mp.mpf(0)
    r = mp.mpf(1)
    for k in range(6):
        term = 150 * delta * a * mp.exp(-zeta * a / 2) / mp.pi
        assert float(mp.log(term)) == pytest.approx(s.records[k].log_decrement, rel=1e-12)
        assert float(r) == pytest.approx(s.records[k].r, rel=1e-15)
        total += term
        r -= term
        a *= 2 * delta
    assert float(mp.log(total)) == pytest.approx(s.log_total_decrement, rel=1e-10)
    assert s.r_limit > 0 and s.assumption_holds


def test_schedule_bound_dominates_series():
    for le in (-1e5, -1e6):
        s = build_schedule(1.0, le, LAM, PSI2)
        assert s.bound >= math.exp(s.log_total_decrement)
        assert schedule_bound(1.0, le, LAM, PSI2, PAPER_DELTA, PAPER_ZETA) == s.bound


# -- smallness ---------------------------------------------------------------


def test_smallness_fails_at_one():
    rep = check_smallness(0.0, 0.5, 1.0)
    names = {e.name for e in rep.failed()}
    assert "cond2.7" in names and len(names) > 3
    assert rep.get("cond2.7").threshold_passed is False


def test_smallness_all_pass_deep():
    rep = check_smallness(-1e8, 0.5, 1.0)
    assert rep.all_passed
    assert all(e.threshold_passed in (True, None) for e in rep.entries)
    assert len([e for e in rep.entries if e.name == "cond2.1"]) == PAPER_L - 1


def test_smallness_cond11_threshold_conflict():
    x = 1728 / 2123 * math.log(0.5 / 4)
    e = check_smallness(x, 0.5).get("cond1.1")
    # the quoted threshold is met with zero margin ...
    assert e.threshold_passed and e.threshold_margin == 0.0
    # ... but the displayed inequality fails there; 1728/1689 is the exact exponent
    assert not e.passed
    e2 = check_smallness(1728 / 1689 * math.log(0.5 / 4), 0.5).get("cond1.1")
    assert abs(e2.margin) < 1e-12
