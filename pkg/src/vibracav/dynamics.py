"""Direct integration of the truncated coupled-mode equations.

The quadrature amplitudes obey dX/dt = [V0 + epsilon*V1(t)] X with the
matrices of :mod:`vibracav.core`.  Integrating this as written wastes
effort on the fast free rotation exp(V0 t), so the propagation works in
the rotating frame Y = exp(-V0 t) X, where

    dY/dt = epsilon * W(t) Y,
    W(t) = exp(-V0 t) V1(t) exp(V0 t),

and Y stays within O(epsilon*w1*T) of the identity.  A classical
fixed-step fourth-order Runge-Kutta scheme propagates the full
fundamental matrix from the identity; the step count doubles until two
successive resolutions agree to the requested relative tolerance.

From the lab-frame transition matrix of the drive window the
Bogoliubov coefficients follow by reading off the quadrature response
to each single-mode initial condition and undoing the free rotation of
the final instant; mode k then holds N_k = sum_n |beta_nk|**2 photons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import Spectrum, validity_flags
from .core import (
    CavityConfig,
    CouplingTables,
    Truncation,
    drive_terms,
    interleaved_frequencies,
    interleaved_signs,
    require_resolved,
)

__all__ = [
    "MAX_REFINEMENTS",
    "BogoliubovPair",
    "FundamentalSolution",
    "IntegrationError",
    "IntegratorDiagnostics",
    "evolve_fundamental",
    "extract_bogoliubov",
    "normalization_defect",
    "numeric_spectrum",
]

# Upper bound on step-halving rounds; 12 rounds give a 4096-fold
# refinement over the base resolution before giving up.
MAX_REFINEMENTS = 12


class IntegrationError(RuntimeError):
    """Step halving failed to reach the requested tolerance."""

    def __init__(self, message: str, *, error_estimate: float,
                 n_steps: int, refinements: int) -> None:
        super().__init__(message)
        self.error_estimate = error_estimate
        self.n_steps = n_steps
        self.refinements = refinements


@dataclass(frozen=True)
class IntegratorDiagnostics:
    """Accuracy record of one fundamental-matrix integration.

    ``error_estimate`` is the step-halving estimate of the relative
    error of the accepted run (nan when refinement was disabled),
    ``n_steps`` its step count and ``refinements`` the number of
    doublings applied beyond the base resolution.
    """

    error_estimate: float
    n_steps: int
    refinements: int


@dataclass(frozen=True)
class FundamentalSolution:
    """Lab-frame transition matrix over the drive window [0, t_final]."""

    phi_t: np.ndarray
    cfg: CavityConfig
    trunc: Truncation
    diagnostics: IntegratorDiagnostics


@dataclass(frozen=True)
class BogoliubovPair:
    """Bogoliubov coefficients alpha_nk, beta_nk of the drive window.

    Entry [n-1, k-1] couples input mode n to output mode k; row n of
    ``beta`` collects the pair amplitudes seeded by vacuum mode n.
    """

    alpha: np.ndarray
    beta: np.ndarray
    cfg: CavityConfig
    trunc: Truncation
    diagnostics: IntegratorDiagnostics


def _rotating_rhs(t: float, rates: np.ndarray, freqs: np.ndarray,
                  mats: np.ndarray) -> np.ndarray:
    """epsilon * W(t) (the epsilon factor is folded into ``mats``)."""
    w = np.tensordot(np.exp(1j * freqs * t), mats, axes=1)
    rot = np.exp(-1j * rates * t)
    w *= rot[:, None]
    w *= np.conj(rot)[None, :]
    return w


def _propagate(rates: np.ndarray, freqs: np.ndarray, mats: np.ndarray,
               t_final: float, n_steps: int) -> np.ndarray:
    """Rotating-frame fundamental matrix Y(t_final) by fixed-step RK4."""
    dim = mats.shape[1]
    h = t_final / n_steps
    y = np.eye(dim, dtype=complex)
    f_lo = _rotating_rhs(0.0, rates, freqs, mats)
    for i in range(n_steps):
        t = i * h
        f_mid = _rotating_rhs(t + 0.5 * h, rates, freqs, mats)
        f_hi = _rotating_rhs((i + 1) * h, rates, freqs, mats)
        k1 = f_lo @ y
        k2 = f_mid @ (y + (0.5 * h) * k1)
        k3 = f_mid @ (y + (0.5 * h) * k2)
        k4 = f_hi @ (y + h * k3)
        y += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        f_lo = f_hi
    return y


def evolve_fundamental(cfg: CavityConfig, trunc: Truncation, *,
                       refine: bool = True) -> FundamentalSolution:
    """Integrate the coupled-mode equations over the drive window.

    The base resolution puts ``trunc.steps_per_fastest_period`` steps
    into each period of the fastest retained mode.  With ``refine``
    (the default) the step count doubles until two successive runs
    agree to ``trunc.rel_tolerance`` in the maximum entry of the
    rotating-frame fundamental matrix; :class:`IntegrationError` is
    raised if MAX_REFINEMENTS doublings do not suffice.  With
    ``refine=False`` a single pass at the base resolution is returned
    and no error estimate is available.

    Returns
    -------
    FundamentalSolution
        Lab-frame transition matrix with integrator diagnostics.
    """
    require_resolved(cfg, trunc)
    tables = CouplingTables.build(trunc.k_max)
    terms = drive_terms(cfg, trunc, tables)
    rates = interleaved_signs(trunc.k_max) * interleaved_frequencies(
        cfg, trunc.k_max)
    mats = cfg.epsilon * terms.matrices
    fastest_period = 2.0 * math.pi / (trunc.k_max * cfg.omega1)
    h_target = fastest_period / trunc.steps_per_fastest_period
    n_steps = max(math.ceil(cfg.t_final / h_target), 8)

    y = _propagate(rates, terms.frequencies, mats, cfg.t_final, n_steps)
    if not refine:
        diag = IntegratorDiagnostics(error_estimate=math.nan,
                                     n_steps=n_steps, refinements=0)
        return _package(y, cfg, trunc, rates, diag)
    for refinement in range(MAX_REFINEMENTS + 1):
        y_fine = _propagate(rates, terms.frequencies, mats, cfg.t_final,
                            2 * n_steps)
        err = float(np.max(np.abs(y_fine - y)) / np.max(np.abs(y_fine)))
        if err <= trunc.rel_tolerance:
            diag = IntegratorDiagnostics(error_estimate=err,
                                         n_steps=2 * n_steps,
                                         refinements=refinement)
            return _package(y_fine, cfg, trunc, rates, diag)
        y = y_fine
        n_steps *= 2
    raise IntegrationError(
        f"step halving stalled at estimated relative error {err:.3e} "
        f"after {MAX_REFINEMENTS} refinements ({n_steps} steps); "
        f"requested {trunc.rel_tolerance:.3e}",
        error_estimate=err, n_steps=n_steps, refinements=MAX_REFINEMENTS,
    )


def _package(y: np.ndarray, cfg: CavityConfig, trunc: Truncation,
             rates: np.ndarray, diag: IntegratorDiagnostics
             ) -> FundamentalSolution:
    # undo the frame change: Phi(T) = exp(V0 T) Y(T)
    phi = np.exp(1j * rates * cfg.t_final)[:, None] * y
    phi.flags.writeable = False
    return FundamentalSolution(phi_t=phi, cfg=cfg, trunc=trunc,
                               diagnostics=diag)


def extract_bogoliubov(sol: FundamentalSolution) -> BogoliubovPair:
    """Bogoliubov coefficients from a fundamental solution.

    Seeding the negative quadrature of mode n and reading mode k's
    quadratures at t_final gives, after stripping the free rotation
    accumulated over the window,

        alpha_nk = e^{+i w_k T} Phi[(k,-), (n,-)],
        beta_nk  = e^{-i w_k T} Phi[(k,+), (n,-)].
    """
    cfg = sol.cfg
    kmax = sol.trunc.k_max
    w = np.arange(1, kmax + 1) * cfg.omega1
    derot = np.exp(1j * w * cfg.t_final)
    phi_mm = sol.phi_t[0::2, 0::2]  # rows (k,-), columns (n,-)
    phi_pm = sol.phi_t[1::2, 0::2]  # rows (k,+), columns (n,-)
    alpha = np.ascontiguousarray((derot[:, None] * phi_mm).T)
    beta = np.ascontiguousarray((np.conj(derot)[:, None] * phi_pm).T)
    alpha.flags.writeable = False
    beta.flags.writeable = False
    return BogoliubovPair(alpha=alpha, beta=beta, cfg=cfg, trunc=sol.trunc,
                          diagnostics=sol.diagnostics)


def numeric_spectrum(pair: BogoliubovPair) -> Spectrum:
    """Photon spectrum N_k = sum_n |beta_nk|**2 of a Bogoliubov pair."""
    n_k = np.sum(np.abs(pair.beta) ** 2, axis=0)
    diag = pair.diagnostics
    return Spectrum(
        photon_numbers=tuple(float(v) for v in n_k),
        provenance="numeric",
        config=pair.cfg,
        flags=validity_flags(pair.cfg),
        details={
            "error_estimate": diag.error_estimate,
            "n_steps": diag.n_steps,
            "refinements": diag.refinements,
        },
    )


def normalization_defect(pair: BogoliubovPair) -> np.ndarray:
    """Per-mode violation of the Bogoliubov normalization.

    The exact coefficients satisfy sum_k (|alpha_nk|**2 - |beta_nk|**2)
    = 1 for every n; truncation and discretization leave a small
    defect d_n, returned as an array over n.  The defect scales as
    epsilon**2 when the integration error is kept below it.
    """
    norms = np.sum(np.abs(pair.alpha) ** 2 - np.abs(pair.beta) ** 2, axis=1)
    return np.abs(norms - 1.0)
