"""Fixed points of the flow in three dimensions.

A metric is stationary when -2 Rc - (alpha/2) Rm2 = 0. Diagonalizing Ricci
turns this into three quadratics in the principal curvatures, solved here by
Newton from a cube of seeds.
"""

import numpy as np

from rg2lab.curvature3d import (
    check_parabolicity,
    fixed_point_residual,
    kn_local_homogeneity,
    rm2_brute_force,
    rm2_eigen_from_ricci,
    sectional_from_ricci,
    solve_fixed_points,
)

for alpha in (1.0, -1.0):
    print(f"alpha = {alpha}")
    for r, label in solve_fixed_points(alpha):
        s = sectional_from_ricci(r)
        print(f"  {label.value:24s} Ricci {np.round(r.as_array(), 12)}  sectional {np.round(s.as_array(), 12)}  "
              f"|F| = {np.linalg.norm(fixed_point_residual(r, alpha)):.1e}  "
              f"locally homogeneous: {kn_local_homogeneity(r)}  parabolic: {check_parabolicity(s, alpha)}")

# Rm2 from the Ricci identity against the literal index contraction
r = (0.5, -0.5, -0.5)
print("Rm2 of Nil from the identity:", rm2_eigen_from_ricci(r))
print("Rm2 of Nil by contraction:   ", rm2_brute_force(sectional_from_ricci(r)))
