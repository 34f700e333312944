"""Diagonal left-invariant metrics on 3D unimodular Lie groups.

The flow of (A, B, C) is a system of ODEs. For negatively curved families
the outcome depends on alpha times the curvature: small alpha behaves like
Ricci flow, large alpha makes every direction contract. Writes
sol_phase_plane.svg in the working directory.
"""

import numpy as np

from rg2lab import svg
from rg2lab.homogeneous import (
    AsymptoticsClass,
    Family,
    MilnorGeometry,
    classify_asymptotics,
    evolve_homogeneous,
    milnor_ricci,
    phase_plane_scan,
)

for fam in (Family.SU2, Family.NIL, Family.SOL, Family.SL2R):
    print(fam.value, "Ricci at A=B=C=1:", milnor_ricci(MilnorGeometry(fam, 1, 1, 1)).as_array())

nil = MilnorGeometry(Family.NIL, 1.0, 1.0, 1.0)
for alpha in (0.0, 1e-3, 1.0, 1e3):
    traj = evolve_homogeneous(nil, alpha, 1e3)
    print(f"Nil, alpha = {alpha:g}: {traj.termination.kind.value} at t = {traj.termination.time:.4g}, "
          f"(A, B, C) = {np.array2string(traj.final_state, precision=4)}, "
          f"class {classify_asymptotics(traj).value}")

# Symmetric Sol, B = C: a vertical line in the (A0, B0) plane separates
# blow-up from immortal cigars.
scan = phase_plane_scan(Family.SOL, 0.01, np.geomspace(1e-3, 1e-1, 16), np.geomspace(0.1, 10.0, 6))
print({k.value: v for k, v in scan.counts().items() if v}, "contiguous:", scan.boundary_is_contiguous())
classes = list(AsymptoticsClass)
codes = np.vectorize(classes.index)(scan.labels)
with open("sol_phase_plane.svg", "w", encoding="utf-8") as fh:
    fh.write(svg.class_raster(codes, [c.value for c in classes], scan.a_values, scan.b_values,
                              title="symmetric Sol, alpha = 0.01", xlabel="A0", ylabel="B0 = C0"))
print("wrote sol_phase_plane.svg")
