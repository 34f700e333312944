"""Real Lambert W function on its two real branches.

The Lambert W function inverts ``w -> w * exp(w)``. On the real line the
inverse has two branches that meet at the branch point ``z = -1/e``:

* ``WBranch.PRINCIPAL`` (W_0) maps ``[-1/e, inf)`` onto ``[-1, inf)``;
* ``WBranch.MINUS_ONE`` (W_-1) maps ``[-1/e, 0)`` onto ``(-inf, -1]``.

Values are obtained by Halley iteration started from series or asymptotic
approximations (Corless, Gonnet, Hare, Jeffrey and Knuth, "On the Lambert W
function", Adv. Comput. Math. 5, 1996).
"""

import enum
import math

__all__ = ["WBranch", "lambert_w", "BRANCH_POINT"]

BRANCH_POINT = -math.exp(-1.0)

# z values this close below -1/e are rounding noise from w*exp(w) at w = -1
_BRANCH_SLACK = 4.0 * 2.220446049250313e-16 * math.exp(-1.0)


class WBranch(enum.Enum):
    PRINCIPAL = 0
    MINUS_ONE = -1


def _branch_point_series(p):
    # w = -1 + p - p^2/3 + 11/72 p^3 - 43/540 p^4 + 769/17280 p^5, p = +-sqrt(2(ez+1))
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * 769.0 / 17280.0))))


def _initial_guess(branch, z):
    q = 2.0 * (math.e * z + 1.0)
    p = math.sqrt(max(q, 0.0))
    if branch is WBranch.PRINCIPAL:
        if q < 0.5:
            return _branch_point_series(p)
        if z < 1.0:
            # Pade-type approximation around the origin
            return z * (1.0 + 4.0 / 3.0 * z) / (1.0 + 7.0 / 3.0 * z + 5.0 / 6.0 * z * z)
        lz = math.log(z)
        return lz - math.log(lz) if z > 3.0 else 0.5 * lz + 0.3
    if q < 0.5:
        return _branch_point_series(-p)
    lz = math.log(-z)
    return lz - math.log(-lz)


def lambert_w(branch, z):
    """Evaluate the real Lambert W function.

    Parameters
    ----------
    branch : WBranch
        ``PRINCIPAL`` (W_0) or ``MINUS_ONE`` (W_-1).
    z : float
        Argument. Must satisfy ``z >= -1/e``; the ``MINUS_ONE`` branch
        additionally needs ``z < 0``.

    Returns
    -------
    float
        ``w`` with ``w * exp(w) == z``; ``w >= -1`` on the principal branch
        and ``w <= -1`` on the other.

    Raises
    ------
    ValueError
        If ``z`` lies outside the branch's domain or is not finite.
    """
    branch = WBranch(branch)
    z = float(z)
    if not math.isfinite(z):
        raise ValueError(f"lambert_w: non-finite argument {z!r}")
    if z < BRANCH_POINT - _BRANCH_SLACK:
        raise ValueError(f"lambert_w: argument {z!r} below the branch point -1/e")
    if branch is WBranch.MINUS_ONE and z >= 0.0:
        raise ValueError(f"lambert_w: W_-1 is only real for -1/e <= z < 0, got {z!r}")
    if z <= BRANCH_POINT:
        return -1.0
    if z == 0.0:
        return 0.0

    w = _initial_guess(branch, z)
    # very close to the branch point the series is already exact to rounding
    if 2.0 * (math.e * z + 1.0) < 1e-10:
        return w
    for _ in range(64):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w_new = w - dw
        if branch is WBranch.PRINCIPAL:
            w_new = max(w_new, -1.0)
        else:
            w_new = min(w_new, -1.0)
        if abs(w_new - w) <= 4.0 * 2.220446049250313e-16 * (1.0 + abs(w_new)):
            return w_new
        w = w_new
    return w
