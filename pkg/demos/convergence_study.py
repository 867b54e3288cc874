"""How many modes and how fine a step the integrator actually needs.

Runs the same drive over a grid of truncation sizes and step densities,
then reports the normalization defect (an internal error gauge that
needs no reference answer) and the drift of the spectrum against the
finest grid point. Rows that cannot resolve the resonance are flagged
rather than silently extrapolated.
"""

import math

from vibracav import CavityConfig, convergence_report

cfg = CavityConfig(
    epsilon=1e-4,
    t_final=300.0,
    a_right=1.0,
    gamma_right=4.0,
)

k_max_values = (2, 4, 8, 12)       # k_max = 2 cannot hold the n + k = 4 pairs
steps_values = (4, 8, 16, 32)

print("grid: k_max in %r, steps per fastest period in %r" %
      (k_max_values, steps_values))
print("each cell is one integration, no step-halving ladder")
print()

report = convergence_report(cfg, k_max_values, steps_values)

print(" K  steps     peak N_k      defect     drift        time   flags")
for row in report.rows:
    if row.photon_numbers is None:
        body = "     -            -          -    "
    else:
        drift = ("reference" if math.isnan(row.drift_vs_finest)
                 else "%.2e" % row.drift_vs_finest)
        body = "%.6e   %.2e   %9s" % (
            max(row.photon_numbers), row.max_defect, drift)
    print("%2d  %4d   %s   %5.2fs  %s" %
          (row.k_max, row.steps_per_fastest_period, body, row.runtime_s,
           ",".join(row.flags) or "-"))

finest = report.finest
print()
print("reference grid point: K = %d, %d steps per period" % finest)
print("defect scales with eps^2 and is flat in the step count once the")
print("drive is resolved; spectrum drift collapses well before the")
print("defect floor, so k_max is the cheaper knob to turn first")
