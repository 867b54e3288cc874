"""Tests for the coupled-mode integrator and Bogoliubov extraction."""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from conftest import make_cfg
from vibracav.analytic import photon_spectrum
from vibracav.core import (
    Truncation,
    drive_terms,
    free_matrix,
    perturbation_matrix,
    state_index,
)
from vibracav.dynamics import (
    IntegrationError,
    evolve_fundamental,
    extract_bogoliubov,
    normalization_defect,
    numeric_spectrum,
)


def numeric(cfg, trunc):
    return numeric_spectrum(extract_bogoliubov(evolve_fundamental(cfg, trunc)))


# ---------------------------------------------------------------------------
# exact limits


def test_static_cavity_is_free_rotation():
    cfg = make_cfg(t_final=7.3)
    trunc = Truncation(k_max=3)
    sol = evolve_fundamental(cfg, trunc)
    # no drive: the transition matrix is exactly diag(exp(i sigma w_k T))
    off = sol.phi_t - np.diag(np.diag(sol.phi_t))
    assert np.all(off == 0)
    for k in range(1, 4):
        idx = state_index(k, -1)
        assert sol.phi_t[idx, idx] == pytest.approx(
            np.exp(-1j * k * cfg.omega1 * cfg.t_final), rel=1e-14)
    pair = extract_bogoliubov(sol)
    assert np.allclose(pair.alpha, np.eye(3), atol=1e-14)
    assert np.all(pair.beta == 0)
    assert np.all(normalization_defect(pair) < 1e-14)
    assert numeric_spectrum(pair).photon_numbers == (0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# reference integrator
#
# Oracle: integrate the lab-frame system dX/dt = (V0 + eps*V1(t)) X
# with an unrelated adaptive scheme at tight tolerance and compare the
# full transition matrix.


def test_matches_reference_integrator():
    cfg = make_cfg(epsilon=1e-3, t_final=60.0, a_right=1.0, gamma_right=2.0,
                   phi_right=0.6)
    trunc = Truncation(k_max=4)
    terms = drive_terms(cfg, trunc)
    v0 = free_matrix(cfg, trunc)
    dim = 2 * trunc.k_max

    def rhs(t, y):
        v1 = perturbation_matrix(t, cfg, trunc, terms=terms)
        return ((v0 + cfg.epsilon * v1) @ y.reshape(dim, dim)).ravel()

    ref = solve_ivp(rhs, (0.0, cfg.t_final),
                    np.eye(dim, dtype=complex).ravel(),
                    method="DOP853", rtol=1e-11, atol=1e-13)
    assert ref.success
    phi_ref = ref.y[:, -1].reshape(dim, dim)
    sol = evolve_fundamental(cfg, trunc)
    np.testing.assert_allclose(sol.phi_t, phi_ref, atol=1e-6)


# ---------------------------------------------------------------------------
# integrator mechanics


def test_determinism_bitwise():
    cfg = make_cfg(t_final=200.0, a_right=1.0, gamma_right=2.0)
    trunc = Truncation(k_max=4)
    sol1 = evolve_fundamental(cfg, trunc)
    sol2 = evolve_fundamental(cfg, trunc)
    assert np.array_equal(sol1.phi_t, sol2.phi_t)
    assert (numeric_spectrum(extract_bogoliubov(sol1)).photon_numbers
            == numeric_spectrum(extract_bogoliubov(sol2)).photon_numbers)


def test_refinement_ladder_reports():
    cfg = make_cfg(t_final=150.0, a_right=1.0, gamma_right=2.0)
    loose = evolve_fundamental(cfg, Truncation(k_max=4, rel_tolerance=1e-4))
    assert loose.diagnostics.refinements == 0
    assert loose.diagnostics.error_estimate <= 1e-4
    tight = evolve_fundamental(cfg, Truncation(k_max=4, rel_tolerance=1e-9))
    assert tight.diagnostics.refinements >= 1
    assert tight.diagnostics.error_estimate <= 1e-9
    assert tight.diagnostics.n_steps > loose.diagnostics.n_steps


def test_refine_disabled_single_pass():
    cfg = make_cfg(t_final=50.0, a_right=1.0, gamma_right=2.0)
    sol = evolve_fundamental(cfg, Truncation(k_max=4), refine=False)
    assert sol.diagnostics.refinements == 0
    assert math.isnan(sol.diagnostics.error_estimate)


def test_unreachable_tolerance_raises():
    cfg = make_cfg(t_final=5.0, a_right=1.0, gamma_right=2.0)
    trunc = Truncation(k_max=2, rel_tolerance=1e-30)
    with pytest.raises(IntegrationError) as err:
        evolve_fundamental(cfg, trunc)
    assert err.value.error_estimate > 1e-30
    assert err.value.refinements > 0


def test_unresolved_truncation_refused():
    cfg = make_cfg(a_right=1.0, gamma_right=4.0)
    with pytest.raises(ValueError, match="k_max"):
        evolve_fundamental(cfg, Truncation(k_max=3))


# ---------------------------------------------------------------------------
# Bogoliubov extraction


def test_extraction_matches_manual_indexing():
    cfg = make_cfg(t_final=120.0, a_right=1.0, gamma_right=3.0, phi_right=0.4)
    trunc = Truncation(k_max=5)
    sol = evolve_fundamental(cfg, trunc)
    pair = extract_bogoliubov(sol)
    t = cfg.t_final
    for n in (1, 2, 4):
        for k in (1, 3, 5):
            wk = k * cfg.omega1
            alpha_manual = (np.exp(1j * wk * t)
                            * sol.phi_t[state_index(k, -1), state_index(n, -1)])
            beta_manual = (np.exp(-1j * wk * t)
                           * sol.phi_t[state_index(k, 1), state_index(n, -1)])
            assert pair.alpha[n - 1, k - 1] == pytest.approx(alpha_manual,
                                                             rel=1e-12)
            assert pair.beta[n - 1, k - 1] == pytest.approx(beta_manual,
                                                            rel=1e-12)


def test_resonant_pair_selectivity():
    # gamma = 3 pumps only (n, k) with n + k = 3; all other pair
    # amplitudes stay at the non-secular background
    cfg = make_cfg(t_final=300.0, a_right=1.0, gamma_right=3.0)
    pair = extract_bogoliubov(evolve_fundamental(cfg, Truncation(k_max=6)))
    mag = np.abs(pair.beta)
    on_pair = np.zeros_like(mag, dtype=bool)
    for n in range(1, 7):
        k = 3 - n
        if 1 <= k <= 6:
            on_pair[n - 1, k - 1] = True
    assert mag[on_pair].min() > 0.2 * mag.max()
    assert mag[~on_pair].max() < 0.05 * mag.max()


def test_secular_growth_matches_closed_form():
    cfg = make_cfg(t_final=300.0, a_right=1.0, gamma_right=2.0)
    spec = numeric(cfg, Truncation(k_max=6))
    want = photon_spectrum(cfg, k_max=6)
    assert spec.value(1) == pytest.approx(want.value(1), rel=1e-2)
    # beta_11 doubles when the window doubles
    b1 = abs(extract_bogoliubov(
        evolve_fundamental(cfg, Truncation(k_max=6))).beta[0, 0])
    cfg2 = make_cfg(t_final=600.0, a_right=1.0, gamma_right=2.0)
    b2 = abs(extract_bogoliubov(
        evolve_fundamental(cfg2, Truncation(k_max=6))).beta[0, 0])
    assert b2 / b1 == pytest.approx(2.0, rel=0.02)


def test_common_phase_shift_leaves_spectrum():
    # shifting both drive phases together only translates the drive
    # inside the window; the secular spectrum is unchanged
    kw = dict(t_final=500.0, a_left=0.5, a_right=1.0,
              gamma_left=2.0, gamma_right=2.0)
    trunc = Truncation(k_max=6)
    base = numeric(make_cfg(phi_left=0.7, phi_right=0.0, **kw), trunc)
    shifted = numeric(make_cfg(phi_left=1.8, phi_right=1.1, **kw), trunc)
    a = np.asarray(base.photon_numbers)
    b = np.asarray(shifted.photon_numbers)
    assert np.abs(a - b).max() <= 0.02 * a.max()


def test_normalization_defect_small_and_quadratic_in_epsilon():
    trunc = Truncation(k_max=6)
    defects = {}
    for eps in (1e-4, 5e-5):
        cfg = make_cfg(epsilon=eps, t_final=300.0, a_right=1.0,
                       gamma_right=2.0)
        pair = extract_bogoliubov(evolve_fundamental(cfg, trunc))
        d = normalization_defect(pair)
        assert d.shape == (6,)
        defects[eps] = d[0]
    assert defects[1e-4] < 1e-5
    # halving epsilon divides the defect by ~4
    assert 3.3 <= defects[1e-4] / defects[5e-5] <= 4.7


def test_numeric_spectrum_carries_diagnostics_and_flags():
    cfg = make_cfg(epsilon=5e-3, t_final=80.0, a_right=1.0, gamma_right=2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        spec = numeric(cfg, Truncation(k_max=4))
    assert spec.provenance == "numeric"
    assert spec.details["n_steps"] > 0
    assert "epsilon_omega1_t_large" in spec.flags


def test_arrays_are_frozen():
    cfg = make_cfg(t_final=50.0, a_right=1.0, gamma_right=2.0)
    sol = evolve_fundamental(cfg, Truncation(k_max=3))
    pair = extract_bogoliubov(sol)
    with pytest.raises(ValueError):
        sol.phi_t[0, 0] = 0
    with pytest.raises(ValueError):
        pair.beta[0, 0] = 0
