"""Scale factor of a constant-curvature metric g(t) = phi(t) g_K.

The flow reduces to phi' = -(n-1) K (2 + alpha K / phi). Spheres collapse
sooner than under Ricci flow; hyperbolic space expands when 2 + alpha K > 0,
collapses when 2 + alpha K < 0, and is frozen in between.
"""

import numpy as np

from rg2lab.constant_curvature import (
    ConstantCurvatureProblem,
    classify_regime,
    evolve_phi,
    extinction_from_trajectory,
    extinction_time,
    phi_closed_form,
    ricci_collapse_time,
)
from rg2lab.curvature3d import FlowParams

params = FlowParams(alpha=1.0, n=3)

for K in (1.0, -6.0, -0.5, -2.0, 0.0):
    prob = ConstantCurvatureProblem(K=K, params=params)
    T = extinction_time(prob)
    traj = evolve_phi(prob, 2.0)
    print(f"K = {K:5}: {classify_regime(K, params).value:22s} "
          f"T (formula) = {T}   T (ODE event) = {extinction_from_trajectory(traj)}   "
          f"phi at end = {traj.final_state[0]:.6g}")

# The Lambert-W expression tracks the integrated solution.
prob = ConstantCurvatureProblem(K=1.0, params=params)
T = extinction_time(prob)
grid = np.linspace(0.0, 0.99 * T, 8)
traj = evolve_phi(prob, grid[-1], t_eval=grid)
for t, phi in zip(traj.times, traj.states[:, 0]):
    print(f"t = {t:.5f}  ODE {phi:.12f}  closed form {phi_closed_form(t, prob):.12f}")

print("round S^3: RG-2 extinction", T, "vs Ricci flow", ricci_collapse_time(1.0, 3))
