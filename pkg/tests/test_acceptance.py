"""Acceptance suite: one pass/fail line per criterion.

Each test prints "[acceptance] <label>: PASS|FAIL" through the summary hook
in conftest.py and then asserts, so a red criterion is visible both ways.
Tolerances are fixed here, not tuned to the implementation.

All runs use the benchmark cavity: lam = pi (so omega1 = 1), epsilon = 1e-4,
t_final = 1000, k_max = 16 unless a criterion says otherwise.
"""

import json
import math

import numpy as np
import pytest

from conftest import make_cfg

from vibracav.analytic import photon_spectrum
from vibracav.cli import main as cli_main
from vibracav.core import CavityConfig, Truncation
from vibracav.dynamics import (
    evolve_fundamental,
    extract_bogoliubov,
    normalization_defect,
    numeric_spectrum,
)
from vibracav.sweep import additivity_check, phase_scan

TRUNC = Truncation(k_max=16)


def check(request, label, ok, detail=""):
    line = f"[acceptance] {label}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    request.config._acceptance_lines.append(line)
    assert ok, line


def numeric_numbers(cfg, trunc=TRUNC):
    pair = extract_bogoliubov(evolve_fundamental(cfg, trunc))
    return np.asarray(numeric_spectrum(pair).photon_numbers), pair


# ---------------------------------------------------------------------------
# shared expensive runs


@pytest.fixture(scope="module")
def single_wall_g4():
    """Right wall at gamma = 4, benchmark drive, both engines."""
    cfg = make_cfg(a_right=1.0, gamma_right=4.0)
    nums, pair = numeric_numbers(cfg)
    return cfg, nums, pair


@pytest.fixture(scope="module")
def opposed_phase_runs():
    """Both walls at gamma = 2 for phase differences 0, pi/2, pi."""
    out = {}
    for dphi in (0.0, math.pi / 2, math.pi):
        cfg = make_cfg(a_left=1.0, a_right=1.0, gamma_left=2.0,
                       gamma_right=2.0, phi_left=dphi)
        nums, _ = numeric_numbers(cfg)
        out[dphi] = (cfg, nums)
    return out


@pytest.fixture(scope="module")
def beta_doubling():
    """gamma_R = 2 runs at T and 2T for the secular growth check."""
    out = {}
    for t_final in (1000.0, 2000.0):
        cfg = make_cfg(a_right=1.0, gamma_right=2.0, t_final=t_final)
        _, pair = numeric_numbers(cfg)
        out[t_final] = pair
    return out


@pytest.fixture(scope="module")
def off_resonance_runs():
    """gamma_R = 2.5 at T and 2T: no secular channel exists."""
    out = {}
    for t_final in (1000.0, 2000.0):
        cfg = make_cfg(a_right=1.0, gamma_right=2.5, t_final=t_final)
        nums, _ = numeric_numbers(cfg)
        out[t_final] = (cfg, nums)
    return out


@pytest.fixture(scope="module")
def high_order_run():
    """Right wall at gamma = 6."""
    cfg = make_cfg(a_right=1.0, gamma_right=6.0)
    nums, _ = numeric_numbers(cfg)
    return cfg, nums


# ---------------------------------------------------------------------------
# criteria


def test_c1_single_wall_spectrum(request, single_wall_g4):
    cfg, nums, _ = single_wall_g4
    ana = np.asarray(photon_spectrum(cfg, k_max=16).photon_numbers)
    expected = np.zeros(16)
    expected[0] = 0.0075
    expected[1] = 0.0100
    expected[2] = 0.0075
    ok_ana = np.allclose(ana, expected, rtol=1e-12, atol=0.0)
    rel = np.abs(nums[:3] - expected[:3]) / expected[:3]
    ok_num = bool(np.all(rel <= 0.05))
    leak = nums[3:].max() / nums.max()
    ok_leak = leak <= 1e-2
    check(request, "C1 single-wall spectrum at gamma=4",
          ok_ana and ok_num and ok_leak,
          f"max rel dev {rel.max():.2e}, leakage {leak:.1e}")


def test_c2_counterphase_doubling(request, opposed_phase_runs):
    n_pi = opposed_phase_runs[math.pi][1][0]
    n_half = opposed_phase_runs[math.pi / 2][1][0]
    n_zero = opposed_phase_runs[0.0][1][0]
    ratio = n_pi / n_half
    ok_ratio = abs(ratio - 2.0) <= 0.05 * 2.0
    ok_null = n_zero <= 1e-2 * n_pi
    cfg_pi = opposed_phase_runs[math.pi][0]
    ana_pi = photon_spectrum(cfg_pi).value(1)
    ok_ana = math.isclose(ana_pi, 0.01, rel_tol=1e-12)
    check(request, "C2 counterphase doubling and in-phase null",
          ok_ratio and ok_null and ok_ana,
          f"ratio {ratio:.4f}, null fraction {n_zero / n_pi:.1e}")


def test_c3_interference_fringe(request):
    base = make_cfg(a_left=1.0, a_right=1.0, gamma_left=3.0, gamma_right=3.0)
    deltas = np.linspace(0.0, 2 * math.pi, 16, endpoint=False)
    result = phase_scan(base, TRUNC, deltas, engines=("numeric",))
    assert not result.failures
    n1 = result.photon_numbers("numeric", 1)
    ok_peak = int(np.argmax(n1)) == 0
    ok_null = int(np.argmin(n1)) == 8  # deltas[8] = pi
    # least-squares fringe a + b cos(dphi) against the samples
    design = np.column_stack([np.ones_like(deltas), np.cos(deltas)])
    coef, *_ = np.linalg.lstsq(design, n1, rcond=None)
    resid = np.max(np.abs(n1 - design @ coef)) / n1.max()
    ok_fit = resid <= 0.05
    vis = coef[1] / coef[0]  # closed form gives +1 at odd gamma
    check(request, "C3 fringe shape at gamma=3",
          ok_peak and ok_null and ok_fit,
          f"fit residual {resid:.2e}, fitted visibility {vis:+.3f}")


def test_c4_distinct_resonances_additive(request):
    base = make_cfg(a_left=1.0, a_right=1.0, gamma_left=2.0, gamma_right=4.0)
    deltas = np.linspace(0.0, 2 * math.pi, 16, endpoint=False)
    result = phase_scan(base, TRUNC, deltas, engines=("numeric",))
    assert not result.failures
    spread = []
    for k in (1, 2, 3):
        nk = result.photon_numbers("numeric", k)
        spread.append((nk.max() - nk.min()) / nk.mean())
    ok_flat = max(spread) < 0.02
    report = additivity_check(base, TRUNC, tolerance=0.05)
    nums = np.array([row.n_both for row in report.rows])
    # two groups: gamma_L = 2 feeds k = 1, gamma_R = 4 peaks at k = 2
    ok_peaks = nums[0] > nums[2] and nums[1] > nums[2] and (
        nums[2] > nums[3:].max())
    check(request, "C4 distinct resonances stay additive",
          ok_flat and report.passed and ok_peaks,
          f"max phase spread {max(spread):.2e} (bound 2e-2), "
          f"max additivity dev {report.max_rel_deviation:.2e} (bound 5e-2), "
          f"peaks at k=1,2 {'ok' if ok_peaks else 'WRONG'}")


def test_c5_secular_amplitude_growth(request, beta_doubling):
    b_t = abs(beta_doubling[1000.0].beta[0, 0])
    b_2t = abs(beta_doubling[2000.0].beta[0, 0])
    ratio = b_2t / b_t
    ok = abs(ratio - 2.0) <= 0.05 * 2.0
    check(request, "C5 pair amplitude doubles with runtime", ok,
          f"ratio {ratio:.4f}")


def test_c6_off_resonance_stays_bounded(request, off_resonance_runs):
    cfg_t, nums_t = off_resonance_runs[1000.0]
    _, nums_2t = off_resonance_runs[2000.0]
    spec = photon_spectrum(cfg_t)
    ok_flag = "no_secular_term" in spec.flags
    ok_zero = spec.total == 0.0
    growth = nums_2t.max() / nums_t.max()
    ok_bounded = growth < 1.5
    check(request, "C6 no growth at fractional gamma",
          ok_flag and ok_zero and ok_bounded,
          f"max growth factor {growth:.3f}")


def test_c7_normalization_defect(request, beta_doubling):
    pair = beta_doubling[1000.0]
    d1 = normalization_defect(pair)[0]
    ok_small = d1 <= 1e-3
    cfg_half = make_cfg(a_right=1.0, gamma_right=2.0, epsilon=5e-5)
    _, pair_half = numeric_numbers(cfg_half)
    ratio = d1 / normalization_defect(pair_half)[0]
    ok_quad = 3.0 <= ratio <= 5.0
    check(request, "C7 normalization defect small and quadratic",
          ok_small and ok_quad, f"d1 {d1:.2e}, halving ratio {ratio:.2f}")


def test_c8_high_order_parabola(request, high_order_run):
    cfg, nums = high_order_run
    ana = np.asarray(photon_spectrum(cfg, k_max=16).photon_numbers)
    scale = (cfg.epsilon * cfg.omega1 * cfg.t_final / 2.0) ** 2
    expected = scale * np.array([k * (6 - k) for k in range(1, 17)],
                                dtype=float).clip(min=0.0)
    ok_ana = np.allclose(ana, expected, rtol=1e-12, atol=0.0)
    ok_peak = int(np.argmax(nums)) == 2  # k = 3
    r15 = nums[0] / nums[4]
    r24 = nums[1] / nums[3]
    ok_sym = abs(r15 - 1.0) <= 0.05 and abs(r24 - 1.0) <= 0.05
    check(request, "C8 parabolic spectrum at gamma=6",
          ok_ana and ok_peak and ok_sym,
          f"N1/N5 {r15:.4f}, N2/N4 {r24:.4f}")


def test_c9_deterministic_outputs(request, tmp_path, single_wall_g4):
    overrides = ["a_right=1", "gamma_right=4"]
    paths = [tmp_path / name for name in ("a.csv", "b.csv")]
    for path in paths:
        code = cli_main(["spectrum", "--engine", "analytic", "--out",
                         str(path), "--quiet", *overrides])
        assert code == 0
    ok_csv = paths[0].read_bytes() == paths[1].read_bytes()

    jpath = tmp_path / "run.json"
    code = cli_main(["spectrum", "--engine", "analytic", "--format", "json",
                     "--out", str(jpath), "--quiet", *overrides])
    assert code == 0
    payload = json.loads(jpath.read_text())
    cfg_back = CavityConfig(**payload["metadata"]["config"])
    trunc_back = Truncation(**payload["metadata"]["truncation"])
    ok_json = cfg_back == single_wall_g4[0] and trunc_back == TRUNC

    scan_args = ["phase-scan", "--engine", "analytic", "--points", "8",
                 "--quiet", "a_left=1", "a_right=1", "gamma_left=2",
                 "gamma_right=2", "t_final=200", "k_max=6"]
    spaths = [tmp_path / name for name in ("s1.csv", "s2.csv")]
    for path in spaths:
        assert cli_main([*scan_args, "--out", str(path)]) == 0
    ok_scan = spaths[0].read_bytes() == spaths[1].read_bytes()

    check(request, "C9 bitwise deterministic output",
          ok_csv and ok_json and ok_scan)
