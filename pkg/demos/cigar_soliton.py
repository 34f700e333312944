"""The rotationally symmetric steady soliton in two dimensions.

Integrate phi'' = (phi/alpha)(1 - sqrt(1 + 2 c alpha phi')) from phi(0) = 0,
phi'(0) = 1 and compare with the Ricci-flow cigar sqrt(2/c) tanh(sqrt(c/2) s).
Writes cigar_comparison.svg in the working directory.
"""

import numpy as np

from rg2lab import svg
from rg2lab.cigar import (
    CigarParams,
    first_integral_drift,
    integrate_cigar,
    plateau_radius,
    ricci_cigar_profile,
    soliton_residual,
)

c = 1.0
series = []
for alpha in (1.0, 0.1, 0.01, 0.001):
    p = CigarParams(c, alpha)
    prof = integrate_cigar(p, 20.0)
    psi, _ = ricci_cigar_profile(c, prof.s)
    print(f"alpha = {alpha:6}: K(0) = {prof.K[0]:.6f}  plateau {plateau_radius(p):.6f}  "
          f"gap to Ricci cigar {np.max(np.abs(prof.phi - psi)):.2e}  "
          f"residual {soliton_residual(prof, p):.1e}  invariant drift {first_integral_drift(prof, p):.1e}")
    series.append((f"alpha={alpha:g}", prof.s, prof.phi))

s = np.linspace(0.0, 20.0, 400)
series.append(("Ricci cigar", s, ricci_cigar_profile(c, s)[0]))
with open("cigar_comparison.svg", "w", encoding="utf-8") as fh:
    fh.write(svg.line_plot(series, title="soliton profiles, c = 1", xlabel="s", ylabel="phi"))
print("wrote cigar_comparison.svg")
