"""Lambert W on its two real branches.

Both branches meet at z = -1/e where w = -1. The principal branch W0 grows
like log z; the lower branch W-1 runs off to -inf as z -> 0-.
"""

import math

import numpy as np

from rg2lab.special_functions import BRANCH_POINT, WBranch, lambert_w

print("branch point z = -1/e =", BRANCH_POINT)
for z in (BRANCH_POINT, -0.3, -0.1, -1e-3):
    w0 = lambert_w(WBranch.PRINCIPAL, z)
    wm = lambert_w(WBranch.MINUS_ONE, z)
    print(f"z = {z: .6f}   W0 = {w0: .12f}   W-1 = {wm: .12f}")

# a few values of W0 for large arguments, with the residual w e^w - z
for z in (1.0, math.e, 3 * math.exp(3), 1e6, 1e12):
    w = lambert_w(WBranch.PRINCIPAL, z)
    print(f"W0({z:.6g}) = {w:.15g}   residual {w * math.exp(w) - z:.1e}")

# round trip over a sweep of w
ws = np.linspace(-1.0, 20.0, 2000)
err = max(abs(lambert_w(WBranch.PRINCIPAL, w * math.exp(w)) - w) for w in ws if abs(w + 1) > 1e-3)
print("max round-trip error on W0:", err)
