"""Parameter scans and cross-validation of the two spectrum engines.

The "analytic" engine evaluates the closed-form first-order spectrum,
the "numeric" engine integrates the truncated coupled-mode equations;
both report photons per mode after the drive window.  This module
scans configurations along one axis, checks the single-wall additivity
of distinct resonances, studies convergence in truncation and step
size, and compares the engines mode by mode.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .analytic import Spectrum, photon_spectrum, resonant_order
from .core import CavityConfig, Truncation, require_resolved
from .dynamics import (
    IntegrationError,
    evolve_fundamental,
    extract_bogoliubov,
    normalization_defect,
    numeric_spectrum,
)

__all__ = [
    "ADDITIVITY_REL_TOL",
    "COMPARE_EMPTY_FRACTION",
    "COMPARE_REL_TOL",
    "ENGINES",
    "SCAN_AXES",
    "AdditivityReport",
    "CompareReport",
    "CompareRow",
    "ConvergenceReport",
    "ConvergenceRow",
    "ScanResult",
    "ScanRow",
    "ScanSpec",
    "additivity_check",
    "compare_engines",
    "convergence_report",
    "phase_scan",
    "run_scan",
]

SCAN_AXES = ("phase_delta", "gamma_right", "epsilon", "t_final")
ENGINES = ("analytic", "numeric")

# Cross-validation tolerances.  Modes the closed form populates must
# agree to COMPARE_REL_TOL in relative terms; modes it leaves empty
# must stay below COMPARE_EMPTY_FRACTION of the analytic peak.
COMPARE_REL_TOL = 0.05
COMPARE_EMPTY_FRACTION = 1e-2
# Distinct-resonance spectra must superpose to this relative accuracy.
ADDITIVITY_REL_TOL = 0.05


def _engine_spectrum(engine: str, cfg: CavityConfig,
                     trunc: Truncation) -> Spectrum:
    if engine == "analytic":
        return photon_spectrum(cfg, k_max=trunc.k_max)
    if engine == "numeric":
        return numeric_spectrum(extract_bogoliubov(
            evolve_fundamental(cfg, trunc)))
    raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")


# ---------------------------------------------------------------------------
# axis scans


@dataclass(frozen=True, kw_only=True)
class ScanSpec:
    """One-axis scan around a base configuration.

    ``axis`` is one of SCAN_AXES; ``values`` must be strictly
    increasing.  ``phase_delta`` sets phi_left = phi_right + value so
    the value is the phase difference between the drives.
    """

    base: CavityConfig
    trunc: Truncation
    axis: str
    values: tuple[float, ...]
    engines: tuple[str, ...] = ENGINES

    def __post_init__(self) -> None:
        if self.axis not in SCAN_AXES:
            raise ValueError(f"axis must be one of {SCAN_AXES}, got {self.axis!r}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("values must not be empty")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("values must be finite")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("values must be strictly increasing")
        object.__setattr__(self, "values", vals)
        engines = tuple(self.engines)
        if not engines or any(e not in ENGINES for e in engines):
            raise ValueError(f"engines must be a non-empty subset of {ENGINES}")
        object.__setattr__(self, "engines", engines)

    def config_at(self, value: float) -> CavityConfig:
        if self.axis == "phase_delta":
            return replace(self.base, phi_left=self.base.phi_right + value)
        return replace(self.base, **{self.axis: value})


class ScanRow(NamedTuple):
    axis_value: float
    engine: str
    k: int
    photon_number: float


@dataclass(frozen=True)
class ScanResult:
    """Rows (axis_value, engine, k, photon_number) plus failures."""

    spec: ScanSpec
    rows: tuple[ScanRow, ...]
    failures: tuple[str, ...] = ()

    def photon_numbers(self, engine: str, k: int) -> np.ndarray:
        """N_k along the scan axis for one engine (nan where failed)."""
        table = {(r.axis_value, r.engine, r.k): r.photon_number
                 for r in self.rows}
        return np.array([table.get((v, engine, k), math.nan)
                         for v in self.spec.values])

    @property
    def axis_values(self) -> np.ndarray:
        return np.array(self.spec.values)


def _scan_point(args):
    value, cfg, trunc, engines = args
    out = {}
    for engine in engines:
        try:
            out[engine] = _engine_spectrum(engine, cfg, trunc).photon_numbers
        except (ValueError, IntegrationError) as exc:
            out[engine] = f"{type(exc).__name__}: {exc}"
    return value, out


def run_scan(spec: ScanSpec, workers: int = 1) -> ScanResult:
    """Evaluate every engine at every point of the scan axis.

    Per-point failures are collected as messages instead of aborting
    the scan.  ``workers`` > 1 distributes points over processes; the
    row order is independent of scheduling.
    """
    jobs = [(value, spec.config_at(value), spec.trunc, spec.engines)
            for value in spec.values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_point, jobs))
    else:
        results = [_scan_point(job) for job in jobs]
    rows = []
    failures = []
    for value, per_engine in results:
        for engine in spec.engines:
            payload = per_engine[engine]
            if isinstance(payload, str):
                failures.append(f"{spec.axis}={value:g} {engine}: {payload}")
                continue
            for k, n_k in enumerate(payload, start=1):
                rows.append(ScanRow(value, engine, k, n_k))
    return ScanResult(spec=spec, rows=tuple(rows), failures=tuple(failures))


def phase_scan(base: CavityConfig, trunc: Truncation,
               phase_deltas, engines: tuple[str, ...] = ENGINES,
               workers: int = 1) -> ScanResult:
    """Scan the drive phase difference phi_left - phi_right."""
    spec = ScanSpec(base=base, trunc=trunc, axis="phase_delta",
                    values=tuple(float(v) for v in phase_deltas),
                    engines=engines)
    return run_scan(spec, workers=workers)


# ---------------------------------------------------------------------------
# additivity of distinct resonances


class AdditivityRow(NamedTuple):
    k: int
    n_both: float
    n_left: float
    n_right: float
    abs_deviation: float
    rel_deviation: float


@dataclass(frozen=True)
class AdditivityReport:
    """Numeric check that distinct resonances superpose without cross talk."""

    rows: tuple[AdditivityRow, ...]
    max_rel_deviation: float
    passed: bool
    tolerance: float


def additivity_check(cfg: CavityConfig, trunc: Truncation,
                     tolerance: float = ADDITIVITY_REL_TOL
                     ) -> AdditivityReport:
    """Compare the two-wall numeric spectrum with the sum of single-wall runs.

    Walls driving distinct integer resonances populate disjoint mode
    pairs, so their photon spectra must add with no interference term.
    Requires gamma_left != gamma_right, both integer.  Deviations are
    measured relative to the peak of the summed single-wall spectrum.
    """
    gl = resonant_order(cfg.gamma_left)
    gr = resonant_order(cfg.gamma_right)
    if gl is None or gr is None or gl == gr:
        raise ValueError(
            "additivity needs two distinct integer resonances; got "
            f"gamma_left = {cfg.gamma_left:g}, gamma_right = {cfg.gamma_right:g}"
        )
    n_both = np.asarray(_engine_spectrum(
        "numeric", cfg, trunc).photon_numbers)
    n_left = np.asarray(_engine_spectrum(
        "numeric", replace(cfg, a_right=0.0), trunc).photon_numbers)
    n_right = np.asarray(_engine_spectrum(
        "numeric", replace(cfg, a_left=0.0), trunc).photon_numbers)
    n_sum = n_left + n_right
    scale = float(n_sum.max()) if n_sum.max() > 0 else 1.0
    abs_dev = np.abs(n_both - n_sum)
    rel_dev = abs_dev / scale
    rows = tuple(
        AdditivityRow(k, float(n_both[k - 1]), float(n_left[k - 1]),
                      float(n_right[k - 1]), float(abs_dev[k - 1]),
                      float(rel_dev[k - 1]))
        for k in range(1, trunc.k_max + 1)
    )
    max_rel = float(rel_dev.max())
    return AdditivityReport(rows=rows, max_rel_deviation=max_rel,
                            passed=max_rel <= tolerance, tolerance=tolerance)


# ---------------------------------------------------------------------------
# convergence study


class ConvergenceRow(NamedTuple):
    k_max: int
    steps_per_fastest_period: int
    photon_numbers: tuple | None
    max_defect: float
    drift_vs_finest: float
    runtime_s: float
    flags: tuple


@dataclass(frozen=True)
class ConvergenceReport:
    """Raw fixed-step runs over a (k_max, steps) grid.

    Each row integrates once at its stated resolution (no adaptive
    refinement) so the grid itself exposes the convergence behavior.
    ``drift_vs_finest`` is the largest photon-number change against the
    finest successful row, relative to that row's peak; ``max_defect``
    is the worst per-mode normalization violation.  Rows whose
    truncation cannot resolve the drive are flagged, not fatal.
    """

    rows: tuple[ConvergenceRow, ...]
    finest: tuple[int, int] | None


def convergence_report(cfg: CavityConfig, k_max_values, steps_values
                       ) -> ConvergenceReport:
    runs = {}
    order = []
    for k_max in k_max_values:
        for steps in steps_values:
            flags = []
            spectrum = None
            defect = math.nan
            start = time.perf_counter()
            try:
                trunc = Truncation(k_max=int(k_max),
                                   steps_per_fastest_period=int(steps))
                sol = evolve_fundamental(cfg, trunc, refine=False)
                pair = extract_bogoliubov(sol)
                spectrum = numeric_spectrum(pair).photon_numbers
                defect = float(normalization_defect(pair).max())
            except ValueError:
                flags.append("unresolved_truncation")
            except IntegrationError:
                flags.append("integration_failed")
            runtime = time.perf_counter() - start
            key = (int(k_max), int(steps))
            order.append(key)
            runs[key] = (spectrum, defect, runtime, tuple(flags))

    finest = None
    for key in order:
        if runs[key][0] is not None:
            finest = key  # grids are ascending, so the last success is finest
    rows = []
    for key in order:
        spectrum, defect, runtime, flags = runs[key]
        drift = math.nan
        if spectrum is not None and finest is not None and key != finest:
            ref = np.asarray(runs[finest][0])
            cur = np.asarray(spectrum)
            m = min(len(ref), len(cur))
            scale = float(ref.max()) if ref.max() > 0 else 1.0
            drift = float(np.abs(cur[:m] - ref[:m]).max() / scale)
        rows.append(ConvergenceRow(key[0], key[1], spectrum, defect, drift,
                                   runtime, flags))
    return ConvergenceReport(rows=tuple(rows), finest=finest)


# ---------------------------------------------------------------------------
# engine comparison


class CompareRow(NamedTuple):
    k: int
    n_analytic: float
    n_numeric: float
    deviation: float
    criterion: str
    within: bool


@dataclass(frozen=True)
class CompareReport:
    """Mode-by-mode agreement between the two engines."""

    rows: tuple[CompareRow, ...]
    passed: bool
    rel_tol: float
    empty_fraction: float
    reference: float


def compare_engines(cfg: CavityConfig, trunc: Truncation, *,
                    rel_tol: float = COMPARE_REL_TOL,
                    empty_fraction: float = COMPARE_EMPTY_FRACTION
                    ) -> CompareReport:
    """Cross-validate numeric against analytic photon numbers.

    Modes with a nonzero analytic prediction must agree relatively to
    ``rel_tol``; modes predicted empty must stay below
    ``empty_fraction`` of the analytic peak.  Every driven wall must
    sit on an integer resonance, else the closed form has no secular
    prediction to compare against and ValueError is raised.
    """
    for side in ("left", "right"):
        if cfg.amplitude(side) > 0 and resonant_order(cfg.gamma(side)) is None:
            raise ValueError(
                f"cross-validation needs integer gamma_{side} while "
                f"a_{side} > 0; got gamma_{side} = {cfg.gamma(side):g}"
            )
    require_resolved(cfg, trunc)
    ana = np.asarray(photon_spectrum(cfg, k_max=trunc.k_max).photon_numbers)
    num = np.asarray(_engine_spectrum("numeric", cfg, trunc).photon_numbers)
    peak = float(ana.max()) if ana.size else 0.0
    if peak > 0.0:
        reference = peak
    else:
        # no secular production predicted; measure leakage against the
        # single-pair squeezing scale of a unit-strength resonance
        reference = ((0.5 * cfg.epsilon * cfg.omega1 * cfg.t_final) ** 2
                     * max(cfg.a_left, cfg.a_right) ** 2)
    rows = []
    passed = True
    for k in range(1, trunc.k_max + 1):
        a_k = float(ana[k - 1])
        n_k = float(num[k - 1])
        if a_k > 0.0:
            deviation = abs(n_k - a_k) / a_k
            within = deviation <= rel_tol
            criterion = "relative"
        elif reference > 0.0:
            deviation = n_k / reference
            within = deviation <= empty_fraction
            criterion = "absolute"
        else:
            deviation = n_k
            within = n_k == 0.0
            criterion = "absolute"
        passed &= within
        rows.append(CompareRow(k, a_k, n_k, deviation, criterion, within))
    return CompareReport(rows=tuple(rows), passed=bool(passed),
                         rel_tol=rel_tol, empty_fraction=empty_fraction,
                         reference=reference)
