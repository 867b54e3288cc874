"""Photon production in a cavity with two independently vibrating walls.

The package computes the photon spectrum generated by parametric
amplification of vacuum fluctuations when one or both mirrors of a 1D
cavity oscillate harmonically.  Two independent routes are provided:

* :mod:`vibracav.analytic` evaluates the closed-form first-order
  resonance formulas (valid for small amplitude and integer ratios of
  drive frequency to fundamental mode frequency).
* :mod:`vibracav.dynamics` integrates the truncated coupled-mode
  equations directly and extracts Bogoliubov coefficients.

:mod:`vibracav.sweep` scans parameters and cross-validates the two
routes; :mod:`vibracav.cli` exposes everything as a command line tool.
"""

from .core import (
    CavityConfig,
    CouplingTables,
    ModeBasis,
    Truncation,
    coupling_coefficient,
    free_matrix,
    mode_frequency,
    perturbation_matrix,
    wall_position,
)
from .analytic import (
    AnalyticBeta,
    Spectrum,
    ValidityWarning,
    beta_first_order,
    interference_visibility,
    photon_number_pair,
    photon_spectrum,
)
from .dynamics import (
    BogoliubovPair,
    FundamentalSolution,
    IntegrationError,
    evolve_fundamental,
    extract_bogoliubov,
    normalization_defect,
    numeric_spectrum,
)
from .sweep import (
    ScanResult,
    ScanSpec,
    additivity_check,
    compare_engines,
    convergence_report,
    phase_scan,
    run_scan,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticBeta",
    "BogoliubovPair",
    "CavityConfig",
    "CouplingTables",
    "FundamentalSolution",
    "IntegrationError",
    "ModeBasis",
    "ScanResult",
    "ScanSpec",
    "Spectrum",
    "Truncation",
    "ValidityWarning",
    "additivity_check",
    "beta_first_order",
    "compare_engines",
    "convergence_report",
    "coupling_coefficient",
    "evolve_fundamental",
    "extract_bogoliubov",
    "free_matrix",
    "interference_visibility",
    "mode_frequency",
    "normalization_defect",
    "numeric_spectrum",
    "perturbation_matrix",
    "phase_scan",
    "photon_number_pair",
    "photon_spectrum",
    "run_scan",
    "wall_position",
]
