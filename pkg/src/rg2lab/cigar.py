"""Rotationally symmetric steady gradient soliton in two dimensions.

For ``g = ds^2 + phi(s)^2 dtheta^2`` with potential ``f' = c phi`` the soliton
condition is the second-order ODE

    phi'' = (phi / alpha) (1 - sqrt(1 + 2 c alpha phi')),   phi(0) = 0, phi'(0) = 1,

whose Gaussian curvature is ``K = (sqrt(1 + 2 c alpha phi') - 1) / alpha``.
Both are evaluated in the rationalized form ``1 - sqrt(1+x) = -x / (1 + sqrt(1+x))``
so that ``alpha = 0`` gives the Ricci-flow cigar ``phi'' = -c phi phi'``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .ode import IntegratorOptions, Termination, integrate_with_event

__all__ = [
    "CigarParams",
    "CigarProfile",
    "cigar_rhs",
    "cigar_curvature",
    "integrate_cigar",
    "ricci_cigar_profile",
    "ricci_cigar_as_profile",
    "soliton_residual",
    "first_integral",
    "first_integral_drift",
    "negative_c_reference",
    "plateau_radius",
]

PLATEAU_V = 1e-10
ORIGIN_SKIP = 1e-3


@dataclass(frozen=True)
class CigarParams:
    """Soliton constant ``c`` (``f' = c phi``) and coupling ``alpha``.

    ``alpha = 0`` selects the Ricci-flow limit.
    """

    c: float
    alpha: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("the soliton constant c must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")


@dataclass
class CigarProfile:
    s: np.ndarray
    phi: np.ndarray
    v: np.ndarray
    K: np.ndarray
    f: np.ndarray
    termination: Termination | None = None

    def __len__(self):
        return len(self.s)


def _root(p, v):
    rad = 1.0 + 2.0 * p.c * p.alpha * v
    if not rad > 0:
        raise ValueError(f"radicand 1 + 2 c alpha v = {rad!r} is not positive")
    return math.sqrt(rad)


def cigar_rhs(phi, v, p):
    """Return ``(phi', v')`` for the first-order system."""
    u = _root(p, v)
    return v, -2.0 * p.c * phi * v / (1.0 + u)


def cigar_curvature(v, p):
    """Gaussian curvature as a function of ``v = phi'``."""
    if np.ndim(v):
        return np.array([cigar_curvature(x, p) for x in v])
    return 2.0 * p.c * v / (1.0 + _root(p, v))


def first_integral(phi, v, p):
    """Quantity conserved along solutions: ``c phi^2/2 + v/2 + (u^3 - 1)/(6 c alpha)``.

    ``u = sqrt(1 + 2 c alpha v)``; the last term is written as
    ``v (u^2 + u + 1) / (3 (u + 1))`` to stay finite at ``alpha = 0``, where the
    invariant reduces to ``c phi^2/2 + v``.
    """
    u = _root(p, v)
    return 0.5 * p.c * phi * phi + 0.5 * v + v * (u * u + u + 1.0) / (3.0 * (u + 1.0))


def plateau_radius(p):
    """Limit of ``phi`` as ``s -> inf`` (``v -> 0``), from the first integral."""
    return math.sqrt(2.0 * first_integral(0.0, 1.0, p) / p.c)


def integrate_cigar(p, s_max, opts=None):
    """Integrate the soliton profile from the origin.

    Stops at ``s_max`` or as soon as ``v < 1e-10`` (the profile is flat to
    working precision from there on). ``f`` is the trapezoidal integral of
    ``c phi`` on the accepted steps, with ``f(0) = 0``.
    """
    if not s_max > 0:
        raise ValueError("s_max must be positive")
    opts = opts or IntegratorOptions(rel_tol=1e-12, abs_tol=1e-14)

    def field(s, y):
        return cigar_rhs(y[0], y[1], p)

    traj = integrate_with_event(field, [0.0, 1.0], 0.0, s_max, opts,
                                {"plateau": lambda s, y: y[1] - PLATEAU_V})
    s = traj.times
    phi, v = traj.states[:, 0], traj.states[:, 1]
    K = cigar_curvature(v, p)
    f = cumulative_trapezoid(p.c * phi, s, initial=0.0)
    return CigarProfile(s=s, phi=phi, v=v, K=K, f=f, termination=traj.termination)


def soliton_residual(profile, p, skip=ORIGIN_SKIP, lam=0.0):
    """Maximum violation of the soliton equations on a profile.

    Checks, at samples with ``s >= skip`` and ``phi > 1e-6``:

    * the reduced equation ``-phi''/phi + (alpha/2)(phi''/phi)^2 - c phi' + lam = 0``
      with ``phi'' = -K phi`` taken from the profile's curvature;
    * the two Hessian components ``f'' = K + (alpha/2) K^2 + lam`` and
      ``(phi'/phi) f' = K + (alpha/2) K^2 + lam`` with ``f' = c phi``.

    ``lam = 0`` is the steady case; a nonzero ``lam`` tests expanding or
    shrinking data such as the flat plane with ``f = lam s^2 / 2``.
    """
    s, phi, v, K = profile.s, profile.phi, profile.v, profile.K
    m = (s >= skip) & (phi > 1e-6)
    if not np.any(m):
        return 0.0
    phi, v, K = phi[m], v[m], K[m]
    ratio = -K  # phi''/phi
    reduced = -ratio + 0.5 * p.alpha * ratio ** 2 - p.c * v + lam
    rhs = K + 0.5 * p.alpha * K ** 2 + lam
    f1 = p.c * phi
    f2 = p.c * v
    hess_ss = f2 - rhs
    hess_tt = (v / phi) * f1 - rhs
    return float(max(np.max(np.abs(reduced)), np.max(np.abs(hess_ss)), np.max(np.abs(hess_tt))))


def first_integral_drift(profile, p):
    """Largest change of :func:`first_integral` along the profile."""
    e0 = first_integral(0.0, 1.0, p)
    vals = np.array([first_integral(a, b, p) for a, b in zip(profile.phi, profile.v)])
    return float(np.max(np.abs(vals - e0)))


def ricci_cigar_profile(c, s):
    """Ricci-flow cigar ``psi = sqrt(2/c) tanh(sqrt(c/2) s)`` and its curvature."""
    if not c > 0:
        raise ValueError("c must be positive")
    s = np.asarray(s, dtype=float)
    th = np.tanh(np.sqrt(c / 2.0) * s)
    return np.sqrt(2.0 / c) * th, c - c * th ** 2


def ricci_cigar_as_profile(c, s):
    """The Ricci cigar packaged as a :class:`CigarProfile` (``f' = c psi``)."""
    s = np.asarray(s, dtype=float)
    psi, K = ricci_cigar_profile(c, s)
    v = 1.0 / np.cosh(np.sqrt(c / 2.0) * s) ** 2
    f = 2.0 * np.log(np.cosh(np.sqrt(c / 2.0) * s))
    return CigarProfile(s=s, phi=psi, v=v, K=K, f=f)


def negative_c_reference(c, s):
    """Negative-curvature Ricci soliton ``psi = sqrt(2/|c|) tan(sqrt(|c|/2) s)``."""
    if not c < 0:
        raise ValueError("c must be negative")
    s = np.asarray(s, dtype=float)
    k = math.sqrt(abs(c) / 2.0)
    pole = math.pi / (2.0 * k)
    if np.any(s < 0) or np.any(s >= pole):
        raise ValueError(f"s must lie in [0, {pole}) to avoid the tangent pole")
    return np.sqrt(2.0 / abs(c)) * np.tan(k * s)
