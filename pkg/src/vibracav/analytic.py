"""Closed-form first-order photon spectra.

A wall driven at gamma times the fundamental mode frequency resonantly
pumps the mode pairs (n, k) with n + k = gamma, provided gamma is a
positive integer with gamma >= 2.  To first order in epsilon the pair
correlation grows linearly in time (secular growth) and the photon
number in mode k after a drive of duration T is

    N_k = (epsilon*w1*T/2)**2 * [ k*(gr-k)*a_R**2        (right wall)
                                + k*(gl-k)*a_L**2        (left wall)
                                - cross ]

with the cross term present only when both walls drive the same
integer resonance gl = gr = gamma:

    cross = (-1)**gamma * 2*k*(gamma-k)*a_L*a_R*cos(phi_L - phi_R).

Each wall's own term is restricted to 1 <= k <= gamma - 1.  The
formulas hold while the total conversion stays weak
(epsilon*w1*T <~ 0.3) and the drive lasts many cycles; outside that
regime results carry flags and a ValidityWarning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import CavityConfig

__all__ = [
    "INTEGER_GAMMA_TOL",
    "MIN_FUNDAMENTAL_PHASE",
    "SECULAR_STRENGTH_MAX",
    "AnalyticBeta",
    "Spectrum",
    "ValidityWarning",
    "beta_first_order",
    "interference_visibility",
    "photon_number_pair",
    "photon_spectrum",
]

# How close gamma must be to an integer to count as resonant.
INTEGER_GAMMA_TOL = 1e-9
# First-order (linear secular) treatment degrades beyond this value of
# epsilon * w1 * t_final.
SECULAR_STRENGTH_MAX = 0.3
# Below this value of w1 * t_final the drive covers too few cycles for
# the secular average to dominate.
MIN_FUNDAMENTAL_PHASE = 20.0


class ValidityWarning(UserWarning):
    """Configuration is outside the regime of the first-order formulas."""


def resonant_order(gamma: float) -> int | None:
    """Integer resonance order of a frequency ratio, or None.

    Returns round(gamma) when gamma sits within INTEGER_GAMMA_TOL of a
    positive integer, else None.  Order 1 is returned but produces no
    mode pairs (n + k = 1 has no solutions with n, k >= 1).
    """
    nearest = round(gamma)
    if nearest >= 1 and abs(gamma - nearest) <= INTEGER_GAMMA_TOL:
        return nearest
    return None


def validity_flags(cfg: CavityConfig) -> tuple[str, ...]:
    """Flags for configurations straining the first-order treatment."""
    flags = []
    if cfg.epsilon * cfg.omega1 * cfg.t_final > SECULAR_STRENGTH_MAX:
        flags.append("epsilon_omega1_t_large")
    if cfg.omega1 * cfg.t_final < MIN_FUNDAMENTAL_PHASE:
        flags.append("few_drive_cycles")
    return tuple(flags)


def _warn_validity(cfg: CavityConfig) -> tuple[str, ...]:
    flags = validity_flags(cfg)
    for flag in flags:
        if flag == "epsilon_omega1_t_large":
            warnings.warn(
                "epsilon*omega1*t_final = "
                f"{cfg.epsilon * cfg.omega1 * cfg.t_final:g} exceeds "
                f"{SECULAR_STRENGTH_MAX:g}; first-order secular formulas "
                "degrade",
                ValidityWarning,
                stacklevel=3,
            )
        else:
            warnings.warn(
                f"omega1*t_final = {cfg.omega1 * cfg.t_final:g} is below "
                f"{MIN_FUNDAMENTAL_PHASE:g}; the drive covers too few "
                "cycles for secular dominance",
                ValidityWarning,
                stacklevel=3,
            )
    return flags


def _check_mode_index(name: str, value: int) -> None:
    if not isinstance(value, (int, np.integer)) or value < 1:
        raise ValueError(f"{name} must be an integer >= 1")


@dataclass(frozen=True)
class AnalyticBeta:
    """First-order pair amplitude between modes n and k."""

    n: int
    k: int
    value: complex

    @property
    def is_secular(self) -> bool:
        return self.value != 0

    @property
    def photon_contribution(self) -> float:
        """|value|**2, the pair's share of the photon number."""
        return abs(self.value) ** 2


def beta_first_order(n: int, k: int, cfg: CavityConfig) -> AnalyticBeta:
    """First-order Bogoliubov pair amplitude beta_{nk}.

    Nonzero only when a driven wall is resonant (integer gamma) and
    n + k equals its resonance order:

        beta_nk = (epsilon*w1*T/2) * sqrt(k*n)
                  * [ (-1)**gr * a_R * e^{i phi_R} * [n + k == gr]
                      - a_L * e^{i phi_L} * [n + k == gl] ]

    Returns an :class:`AnalyticBeta`; its ``value`` is 0 off resonance.
    """
    _check_mode_index("n", n)
    _check_mode_index("k", k)
    _warn_validity(cfg)
    scale = 0.5 * cfg.epsilon * cfg.omega1 * cfg.t_final * math.sqrt(k * n)
    value = 0j
    gr = resonant_order(cfg.gamma_right)
    if gr is not None and n + k == gr and cfg.a_right > 0:
        value += ((-1.0) ** gr * cfg.a_right
                  * complex(math.cos(cfg.phi_right), math.sin(cfg.phi_right)))
    gl = resonant_order(cfg.gamma_left)
    if gl is not None and n + k == gl and cfg.a_left > 0:
        value -= cfg.a_left * complex(math.cos(cfg.phi_left),
                                      math.sin(cfg.phi_left))
    return AnalyticBeta(n=n, k=k, value=scale * value)


def photon_number_pair(n: int, k: int, cfg: CavityConfig) -> float:
    """Photon number produced in mode k by the (n, k) pair resonance.

    Sum of the single-wall contributions plus the interference term:

        N_nk = N^L + N^R - 2*(-1)**gamma * sqrt(N^L N^R) * cos(dphi)

    with N^A = (epsilon*w1*T/2)**2 * k*n * a_A**2 when n + k equals
    wall A's integer resonance order (else 0); the cross term needs
    both walls on the same resonance.
    """
    _check_mode_index("n", n)
    _check_mode_index("k", k)
    flags = _warn_validity(cfg)
    del flags
    scale2 = (0.5 * cfg.epsilon * cfg.omega1 * cfg.t_final) ** 2 * k * n
    gr = resonant_order(cfg.gamma_right)
    gl = resonant_order(cfg.gamma_left)
    n_right = scale2 * cfg.a_right**2 if (gr is not None and n + k == gr) else 0.0
    n_left = scale2 * cfg.a_left**2 if (gl is not None and n + k == gl) else 0.0
    total = n_left + n_right
    if n_left > 0.0 and n_right > 0.0:
        # both walls pump this pair, hence gl == gr == n + k
        total -= (2.0 * (-1.0) ** (n + k) * math.sqrt(n_left * n_right)
                  * math.cos(cfg.delta_phi))
    # full destructive interference may leave rounding dust below zero
    return max(total, 0.0)


@dataclass(frozen=True)
class Spectrum:
    """Per-mode photon numbers with provenance and validity flags.

    ``photon_numbers[i]`` is the photon number of mode ``i + 1``;
    ``provenance`` is "analytic" or "numeric"; ``flags`` carries
    validity and resonance annotations; ``details`` holds
    provenance-specific extras (e.g. integrator diagnostics).
    """

    photon_numbers: tuple[float, ...]
    provenance: str
    config: CavityConfig
    flags: tuple[str, ...] = ()
    details: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.provenance not in ("analytic", "numeric"):
            raise ValueError("provenance must be 'analytic' or 'numeric'")
        if any(n < 0 for n in self.photon_numbers):
            raise ValueError("photon numbers must be >= 0")

    @property
    def k_max(self) -> int:
        return len(self.photon_numbers)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.k_max + 1)

    def value(self, k: int) -> float:
        _check_mode_index("k", k)
        if k > self.k_max:
            raise ValueError(f"mode index k must be in 1..{self.k_max}")
        return self.photon_numbers[k - 1]

    @property
    def total(self) -> float:
        return float(sum(self.photon_numbers))


def photon_spectrum(cfg: CavityConfig, k_max: int | None = None) -> Spectrum:
    """Closed-form photon spectrum after the drive window.

    Parameters
    ----------
    cfg : CavityConfig
        Drive configuration.
    k_max : int, optional
        Number of modes to report.  Defaults to the highest mode any
        resonant wall can populate (gamma - 1); 0 modes when no wall is
        resonant.

    Returns
    -------
    Spectrum
        Analytic spectrum.  Flags: per-side ``left_off_resonance`` /
        ``right_off_resonance`` when a driven wall has non-integer
        gamma, ``no_secular_term`` when the whole spectrum vanishes
        identically, plus any validity flags.
    """
    flags = list(_warn_validity(cfg))
    gr = resonant_order(cfg.gamma_right)
    gl = resonant_order(cfg.gamma_left)
    right_on = cfg.a_right > 0 and gr is not None
    left_on = cfg.a_left > 0 and gl is not None
    if cfg.a_right > 0 and gr is None:
        flags.append("right_off_resonance")
    if cfg.a_left > 0 and gl is None:
        flags.append("left_off_resonance")
    if k_max is None:
        reach = [g - 1 for g, on in ((gr, right_on), (gl, left_on)) if on]
        k_max = max(reach, default=0)
    elif not isinstance(k_max, (int, np.integer)) or k_max < 0:
        raise ValueError("k_max must be an integer >= 0")

    scale2 = (0.5 * cfg.epsilon * cfg.omega1 * cfg.t_final) ** 2
    k = np.arange(1, k_max + 1, dtype=float)
    n_k = np.zeros(k_max)
    if right_on:
        partner = gr - k
        n_k += scale2 * cfg.a_right**2 * np.where(partner >= 1, k * partner, 0.0)
    if left_on:
        partner = gl - k
        n_k += scale2 * cfg.a_left**2 * np.where(partner >= 1, k * partner, 0.0)
    if right_on and left_on and gl == gr:
        partner = gr - k
        n_k -= ((-1.0) ** gr * 2.0 * cfg.a_left * cfg.a_right
                * math.cos(cfg.delta_phi) * scale2
                * np.where(partner >= 1, k * partner, 0.0))
    # interference can cancel a mode to zero but never below it;
    # clip the rounding dust so the Spectrum invariant holds
    n_k = np.clip(n_k, 0.0, None)
    if not n_k.any():
        flags.append("no_secular_term")
    return Spectrum(
        photon_numbers=tuple(float(v) for v in n_k),
        provenance="analytic",
        config=cfg,
        flags=tuple(flags),
    )


def interference_visibility(cfg: CavityConfig) -> float:
    """Fringe visibility of the two-wall interference term.

    When both walls drive the same integer resonance gamma, the photon
    number in every populated mode varies with dphi = phi_L - phi_R as
    N(dphi) = N0 * [1 + v*cos(dphi)] with the k-independent visibility

        v = -(-1)**gamma * 2*a_L*a_R / (a_L**2 + a_R**2).

    Requires gamma_left == gamma_right at an integer value; returns 0
    when either wall is static.
    """
    gl = resonant_order(cfg.gamma_left)
    gr = resonant_order(cfg.gamma_right)
    if gl is None or gr is None or gl != gr:
        raise ValueError(
            "interference visibility needs both walls on the same integer "
            f"resonance; got gamma_left = {cfg.gamma_left:g}, "
            f"gamma_right = {cfg.gamma_right:g}"
        )
    if cfg.a_left == 0.0 or cfg.a_right == 0.0:
        return 0.0
    return (-((-1.0) ** gl) * 2.0 * cfg.a_left * cfg.a_right
            / (cfg.a_left**2 + cfg.a_right**2))
