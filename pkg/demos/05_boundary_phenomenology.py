"""The phenomenological phase boundary: two suppression envelopes and a level set.

Evaluates the boundary function, calibrates the level constant from the
built-in critical-point tables, and prints a solved boundary curve for each
potential family.  Run with `python demos/05_boundary_phenomenology.py`.
"""

import numpy as np

from monfermi import (
    BoundaryParams,
    DEFAULT_BOUNDARY_LEVEL,
    boundary_value,
    fit_c0,
    solve_boundary,
)
from monfermi.analysis import QPP_CRITICAL_POINTS, SP_CRITICAL_POINTS
from monfermi.exceptions import InfeasibleLevelError, NoSolutionError

print("envelope sum at selected points (bounded by 2, strictly decreasing):")
for gamma, strength in ((0.0, 0.0), (0.3, 0.1), (0.8, 0.8)):
    print(
        f"  gamma={gamma}, delta={strength}: tilt {boundary_value(gamma, strength, 'sp'):.4f}, "
        f"quasi-periodic {boundary_value(gamma, strength, 'qpp'):.4f}"
    )

print("\nlevel constant calibrated from the critical-point tables:")
for kind, points in (("sp", SP_CRITICAL_POINTS), ("qpp", QPP_CRITICAL_POINTS)):
    c0, rms = fit_c0(points, kind)
    print(f"  {kind}: c0 = {c0:.4f} (rms spread {rms:.4f})")
print(f"  pooled default level: {DEFAULT_BOUNDARY_LEVEL:.4f}")

print("\nthe general parameter set quotes a level of 3, which is infeasible:")
try:
    solve_boundary(0.2, "sp", BoundaryParams(c0=3.0))
except InfeasibleLevelError as err:
    print(f"  rejected: {err}")

print("\nsolved boundary curves at the calibrated level (critical strength vs gamma):")
print(f"{'gamma':>6} | {'delta_c (tilt)':>14} | {'V_c (quasi-periodic)':>20}")
for gamma in np.linspace(0.02, 0.34, 9):
    cells = []
    for kind in ("sp", "qpp"):
        try:
            cells.append(f"{solve_boundary(float(gamma), kind):14.4f}")
        except NoSolutionError:
            cells.append(f"{'-':>14}")
    print(f"{gamma:6.2f} | {cells[0]} | {cells[1]:>20}")
print("(the curve terminates where the measurement envelope alone reaches the level)")
