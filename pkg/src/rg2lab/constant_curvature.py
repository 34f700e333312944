"""Scale-factor evolution of constant-curvature metrics under RG-2 flow.

For ``g(t) = phi(t) g_K`` with ``g_K`` of constant sectional curvature ``K``
in dimension ``n`` the flow reduces to

    phi' = -2 K (n-1) - (alpha / phi) K^2 (n-1).

The ODE integrates implicitly, its solutions are Lambert-W expressions, and
the time at which ``phi`` reaches zero is explicit.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .curvature3d import FlowParams
from .ode import IntegratorOptions, TerminationKind, integrate_reparametrized
from .special_functions import WBranch, lambert_w

__all__ = [
    "ConstantCurvatureProblem",
    "Regime",
    "EXTINCTION_THRESHOLD",
    "phi_rhs",
    "evolve_phi",
    "phi_implicit_residual",
    "phi_closed_form",
    "closed_form_parameters",
    "extinction_time",
    "ricci_collapse_time",
    "classify_regime",
    "scalar_curvature",
    "rm_norm_sq",
    "volume_rate",
    "normalized_rhs",
    "homothety_admissible",
]

EXTINCTION_THRESHOLD = 1e-8


@dataclass(frozen=True)
class ConstantCurvatureProblem:
    K: float
    params: FlowParams = field(default_factory=lambda: FlowParams(alpha=1.0, n=3))
    phi0: float = 1.0

    def __post_init__(self):
        if not self.phi0 > 0:
            raise ValueError("phi0 must be positive")

    @property
    def alpha(self):
        return self.params.alpha

    @property
    def n(self):
        return self.params.n


class Regime(enum.Enum):
    FIXED_FLAT = "fixed-flat"
    COLLAPSING_SPHERE = "collapsing-sphere"
    COLLAPSING_HYPERBOLIC = "collapsing-hyperbolic"
    EXPANDING_HYPERBOLIC = "expanding-hyperbolic"
    FIXED_HYPERBOLIC = "fixed-hyperbolic"


def _is_fixed(prob):
    return prob.K == 0 or 2.0 + prob.alpha * prob.K == 0


def phi_rhs(phi, prob):
    if not phi > 0:
        raise ValueError(f"scale factor must be positive, got {phi!r}")
    K, a, n = prob.K, prob.alpha, prob.n
    # -2K(n-1) - (a/phi)K^2(n-1), grouped so the fixed point 2 + aK = 0 cancels exactly
    return -(n - 1) * K * (2.0 + a * K / phi)


def evolve_phi(prob, t_end, opts=None, t_eval=None):
    """Integrate the scale factor until ``t_end`` or extinction.

    The run stops with an event labelled ``"extinction"`` when ``phi``
    reaches ``EXTINCTION_THRESHOLD``. Integration uses the clock
    ``dt = phi/(1+phi) dtau`` so the ``1/phi`` term never controls the step
    size; the singular field itself is never evaluated at ``phi <= 1e-12``.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    K, a, n = prob.K, prob.alpha, prob.n

    def field(t, y):
        return [-(n - 1) * K * (2.0 + a * K / y[0])]

    def speed(t, y, f):
        return y[0] / (1.0 + y[0])

    return integrate_reparametrized(
        field, [prob.phi0], 0.0, t_end, opts or IntegratorOptions(), speed=speed,
        event={"extinction": lambda t, y: y[0] - EXTINCTION_THRESHOLD}, t_eval=t_eval,
    )


def phi_implicit_residual(phi, t, prob):
    """Residual of the implicit relation satisfied by solutions with ``phi(0) = 1``."""
    K, a, n = prob.K, prob.alpha, prob.n
    if not phi > 0:
        raise ValueError("phi must be positive")
    num = 2.0 * phi + a * K
    den = 2.0 + a * K
    if num == 0 or den == 0:
        raise ValueError("logarithm argument is singular")
    return phi - (-2.0 * K * (n - 1) * t + 1.0 + 0.5 * a * K * math.log(abs(num / den)))


def closed_form_parameters(prob):
    """Return ``(A, rate, branch)`` with ``phi = -(aK/2)(1 + W_b(A exp(A + rate t)))``.

    ``A = -(2 + aK)/(aK)`` and ``rate = 4(n-1)/alpha``; the branch is the one
    on which ``W_b(A e^A) = A`` so that ``phi(0) = 1``.
    """
    K, a, n = prob.K, prob.alpha, prob.n
    if _is_fixed(prob):
        raise ValueError("closed form is undefined at the fixed points K = 0 and K = -2/alpha")
    A = -(2.0 + a * K) / (a * K)
    branch = WBranch.MINUS_ONE if A < -1.0 else WBranch.PRINCIPAL
    return A, 4.0 * (n - 1) / a, branch


def phi_closed_form(t, prob):
    if prob.phi0 != 1.0:
        raise ValueError("closed form assumes phi(0) = 1")
    A, rate, branch = closed_form_parameters(prob)
    z = A * math.exp(A + rate * t)
    return -0.5 * prob.alpha * prob.K * (1.0 + lambert_w(branch, z))


def extinction_time(prob):
    """Time at which ``phi`` reaches zero, or None if the solution is immortal.

    Assumes ``phi(0) = 1``. Writing ``phi' = -(n-1) K (2 phi + alpha K) / phi``
    shows that ``phi`` decreases to zero exactly when ``alpha > 0`` and
    ``K (2 + alpha K) > 0``; otherwise None is returned, even where the formula
    would produce a positive number.
    """
    K, a, n = prob.K, prob.alpha, prob.n
    if _is_fixed(prob) or not (a > 0 and K * (2.0 + a * K) > 0):
        return None
    ratio = abs(a * K / (2.0 + a * K))
    T = 1.0 / (2.0 * K * (n - 1)) + a / (4.0 * (n - 1)) * math.log(ratio)
    if math.isfinite(T) and T > 0:
        return T
    return None


def ricci_collapse_time(K, n):
    """Extinction time of the unit-scaled sphere under Ricci flow."""
    return 1.0 / (2.0 * K * (n - 1))


def classify_regime(K, params):
    """Qualitative behaviour for ``phi(0) = 1``, read off from sign(K) and sign(2 + alpha K).

    The case split is the one valid for ``alpha > 0``.
    """
    if K == 0:
        return Regime.FIXED_FLAT
    if K > 0:
        return Regime.COLLAPSING_SPHERE
    d = 2.0 + params.alpha * K
    if d < 0:
        return Regime.COLLAPSING_HYPERBOLIC
    if d > 0:
        return Regime.EXPANDING_HYPERBOLIC
    return Regime.FIXED_HYPERBOLIC


def scalar_curvature(prob, phi):
    """``R = n(n-1) K / phi`` for ``phi g_K``."""
    return prob.n * (prob.n - 1) * prob.K / phi


def rm_norm_sq(prob, phi):
    """``|Rm|^2 = 2 n (n-1) K^2 / phi^2`` for ``phi g_K``."""
    return 2.0 * prob.n * (prob.n - 1) * prob.K ** 2 / phi ** 2


def volume_rate(R, rm_norm_sq, alpha):
    """Logarithmic rate of the volume element, ``-R - (alpha/4)|Rm|^2``."""
    if rm_norm_sq < 0:
        raise ValueError("|Rm|^2 must be non-negative")
    return -R - 0.25 * alpha * rm_norm_sq


def normalized_rhs(prob, phi):
    """Scale-factor speed under the volume-normalized flow.

    The normalization adds ``(2/n) <R + (alpha/4)|Rm|^2> g``, the multiple of
    ``g`` whose trace cancels the mean volume rate. For constant curvature the
    average is pointwise and ``g = phi g_K`` contributes the factor ``phi``.
    """
    base = phi_rhs(phi, prob)
    R = scalar_curvature(prob, phi)
    avg = R + 0.25 * prob.alpha * rm_norm_sq(prob, phi)
    return base + 2.0 * phi * avg / prob.n


def homothety_admissible(a, b, tol):
    """Whether Ricci and Rm2 eigenvalue triples allow pure scaling ``g = sigma(t) g0``.

    Non-constant scaling forces each triple to be constant, so the test is on
    the spread ``max - min`` of each.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(np.ptp(a) <= tol and np.ptp(b) <= tol)


def extinction_from_trajectory(traj):
    """Event time of an :func:`evolve_phi` run, or None."""
    term = traj.termination
    if term.kind is TerminationKind.EVENT and term.label == "extinction":
        return term.time
    return None
