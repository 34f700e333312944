"""RG-2 flow of diagonal left-invariant metrics on 3D unimodular Lie groups.

A Milnor frame ``e1, e2, e3`` has brackets ``[e2, e3] = c1 e1`` (cyclically).
For the metric ``diag(A, B, C)`` in that frame the normalized frame
``f_i = e_i / sqrt(A_i)`` has structure constants

    l1 = c1 sqrt(A / (B C)),  l2 = c2 sqrt(B / (A C)),  l3 = c3 sqrt(C / (A B)),

and Ricci is diagonal with ``Rc(f1, f1) = (l1^2 - (l2 - l3)^2) / 2`` (cyclic),
from the Koszul formula (Milnor 1976). The 3D identity expressing Rm2 through
Ricci then gives the flow ``A' = (-2 a1 - (alpha/2) b1) A`` and cyclic.

H3 and H2 x R are not treated through structure constants: H3 is the round
hyperbolic metric scaled by ``A = B = C`` and H2 x R is a hyperbolic plane of
scale ``A = B`` times a line of scale ``C``.
"""

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .curvature3d import RicciEigenvalues, rm2_eigen_from_ricci
from .ode import IntegratorOptions, TerminationKind, integrate_reparametrized

__all__ = [
    "Family",
    "MilnorGeometry",
    "AsymptoticsClass",
    "STRUCTURE_CONSTANTS",
    "family_from_constants",
    "milnor_ricci",
    "rg2_rhs_homogeneous",
    "evolve_homogeneous",
    "classify_asymptotics",
    "phase_plane_scan",
    "PhasePlaneScan",
    "EXTINCTION_THRESHOLD",
]

EXTINCTION_THRESHOLD = 1e-8
STATIC_DRIFT = 1e-8
RATE_TOL = 1e-6


class Family(enum.Enum):
    SU2 = "su2"
    SL2R = "sl2r"
    SOL = "sol"
    NIL = "nil"
    EUCLIDEAN = "euclidean"
    H3 = "h3"
    H2xR = "h2xr"


# ordered so that directions 2 and 3 form the symmetric pair
STRUCTURE_CONSTANTS = {
    Family.SU2: (2.0, 2.0, 2.0),
    Family.SL2R: (-2.0, 2.0, 2.0),
    Family.SOL: (0.0, 1.0, -1.0),
    Family.NIL: (1.0, 0.0, 0.0),
    Family.EUCLIDEAN: (0.0, 0.0, 0.0),
}


def family_from_constants(c):
    """Identify the unimodular group from the signs of its structure constants.

    Signs are read up to permutation and an overall flip (which reverses the
    orientation of the frame).
    """
    signs = tuple(sorted(int(np.sign(x)) for x in c))
    flipped = tuple(sorted(-x for x in signs))
    table = {
        (1, 1, 1): Family.SU2,
        (-1, 1, 1): Family.SL2R,
        (-1, 0, 1): Family.SOL,
        (0, 0, 1): Family.NIL,
        (0, 0, 0): Family.EUCLIDEAN,
    }
    return table.get(signs) or table.get(flipped)


@dataclass(frozen=True)
class MilnorGeometry:
    family: Family
    A: float
    B: float
    C: float
    c1: float = None
    c2: float = None
    c3: float = None

    def __post_init__(self):
        if not (self.A > 0 and self.B > 0 and self.C > 0):
            raise ValueError("metric coefficients must be positive")
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if fam in (Family.H3, Family.H2xR):
            return
        default = STRUCTURE_CONSTANTS[fam]
        cs = tuple(default[i] if v is None else float(v)
                   for i, v in enumerate((self.c1, self.c2, self.c3)))
        if family_from_constants(cs) is not fam:
            raise ValueError(f"structure constants {cs} do not describe {fam.name}")
        object.__setattr__(self, "c1", cs[0])
        object.__setattr__(self, "c2", cs[1])
        object.__setattr__(self, "c3", cs[2])

    @property
    def metric(self):
        return np.array([self.A, self.B, self.C])

    @property
    def constants(self):
        return np.array([self.c1, self.c2, self.c3], dtype=float)

    def with_metric(self, A, B, C):
        return replace(self, A=float(A), B=float(B), C=float(C))


class AsymptoticsClass(enum.Enum):
    FINITE_TIME_SHRINKER = "shrinker"
    IMMORTAL_CIGAR = "cigar"
    IMMORTAL_PANCAKE = "pancake"
    STATIC = "static"
    INDETERMINATE = "indeterminate"

    @property
    def immortal(self):
        return self in (AsymptoticsClass.IMMORTAL_CIGAR, AsymptoticsClass.IMMORTAL_PANCAKE)


def _ricci_from_metric(family, c, g):
    A, B, C = g
    if family is Family.H3:
        if not (math.isclose(A, B, rel_tol=1e-12) and math.isclose(A, C, rel_tol=1e-12)):
            raise ValueError("H3 is only represented by A = B = C")
        return (-2.0 / A,) * 3
    if family is Family.H2xR:
        if not math.isclose(A, B, rel_tol=1e-12):
            raise ValueError("H2xR is represented with the hyperbolic plane in directions 1, 2 (A = B)")
        return (-1.0 / A, -1.0 / A, 0.0)
    l1 = c[0] * math.sqrt(A / (B * C))
    l2 = c[1] * math.sqrt(B / (A * C))
    l3 = c[2] * math.sqrt(C / (A * B))
    return (
        0.5 * (l1 * l1 - (l2 - l3) ** 2),
        0.5 * (l2 * l2 - (l1 - l3) ** 2),
        0.5 * (l3 * l3 - (l1 - l2) ** 2),
    )


def milnor_ricci(geom):
    """Principal Ricci curvatures in the orthonormalized Milnor frame."""
    return RicciEigenvalues.from_array(_ricci_from_metric(geom.family, geom.constants, geom.metric))


def _log_rates(family, c, g, alpha):
    a1, a2, a3 = _ricci_from_metric(family, c, g)
    if not alpha:
        return np.array([-2.0 * a1, -2.0 * a2, -2.0 * a3])
    # Rm2 through Ricci, inlined on scalars since this is the hot loop
    R = a1 + a2 + a3
    k = a1 * a1 + a2 * a2 + a3 * a3 - 0.5 * R * R
    return np.array([-2.0 * x - alpha * (-x * x + R * x + k) for x in (a1, a2, a3)])


def rg2_rhs_homogeneous(geom, alpha):
    """``(A', B', C')`` under ``dg/dt = -2 Rc - (alpha/2) Rm2``."""
    return _log_rates(geom.family, geom.constants, tuple(geom.metric), alpha) * geom.metric


def evolve_homogeneous(geom, alpha, t_end, opts=None, t_eval=None):
    """Integrate ``(A, B, C)`` to ``t_end`` or until ``min(A, B, C) = 1e-8``.

    The system is advanced in ``log A_i`` on the clock
    ``dt = dtau / (1 + max_i |d log A_i / dt|)``, which keeps finite-time
    collapse resolvable. The extinction event is labelled ``"extinction"``.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    fam, c = geom.family, geom.constants
    log_floor = math.log(EXTINCTION_THRESHOLD)

    def field(t, u):
        return _log_rates(fam, c, [math.exp(x) for x in u], alpha)

    def speed(t, u, rates):
        return 1.0 / (1.0 + max(abs(rates[0]), abs(rates[1]), abs(rates[2])))

    traj = integrate_reparametrized(
        field, np.log(geom.metric), 0.0, t_end, opts or IntegratorOptions(), speed=speed,
        event={"extinction": lambda t, u: np.min(u) - log_floor}, t_eval=t_eval,
    )
    traj.states = np.exp(traj.states)
    return traj


def classify_asymptotics(traj):
    """Label the long-time behaviour of an ``(A, B, C)`` trajectory.

    * step-size underflow, or an extinction event reached with every
      coefficient still decreasing: shrinker (all directions contract);
    * otherwise at the horizon, from the log-slopes ``r_i`` of ``A_i`` over the
      final decade of time: static if the relative drift is below ``1e-8``;
      directions with ``r_i < max(r) - 1e-6`` shrink relative to the fastest;
      one such direction is a pancake, two a cigar, none indeterminate.

    A finite-time event during which some coefficient grows is reported as
    indeterminate.
    """
    term = traj.termination
    g0 = traj.states[0]
    g1 = traj.states[-1]
    if term.kind is TerminationKind.STEP_SIZE_UNDERFLOW:
        return AsymptoticsClass.FINITE_TIME_SHRINKER
    if term.kind is TerminationKind.EVENT and term.label == "extinction":
        if len(traj) < 2 or np.all(g1 < traj.states[-2]):
            return AsymptoticsClass.FINITE_TIME_SHRINKER
        return AsymptoticsClass.INDETERMINATE

    drift = np.max(np.abs(traj.states / g0 - 1.0))
    if drift < STATIC_DRIFT:
        return AsymptoticsClass.STATIC
    t = traj.times
    i0 = min(int(np.searchsorted(t, t[-1] / 10.0)), len(t) - 2)
    slopes = (np.log(g1) - np.log(traj.states[i0])) / math.log(t[-1] / t[i0]) if t[i0] > 0 \
        else np.log(g1) - np.log(traj.states[i0])
    shrinking = int(np.sum(slopes < np.max(slopes) - RATE_TOL))
    if shrinking == 1:
        return AsymptoticsClass.IMMORTAL_PANCAKE
    if shrinking == 2:
        return AsymptoticsClass.IMMORTAL_CIGAR
    return AsymptoticsClass.INDETERMINATE


@dataclass
class PhasePlaneScan:
    """Classification of a grid of symmetric initial data.

    ``labels[i, j]`` belongs to the initial metric with ``A0 = a_values[i]``
    and ``B0 = C0 = b_values[j]``.
    """

    family: Family
    alpha: float
    a_values: np.ndarray
    b_values: np.ndarray
    labels: np.ndarray
    t_horizon: float

    def counts(self):
        out = {cls: 0 for cls in AsymptoticsClass}
        for lab in self.labels.ravel():
            out[lab] += 1
        return out

    def immortal_mask(self):
        return np.vectorize(lambda c: c.immortal)(self.labels)

    def shrinker_mask(self):
        return self.labels == AsymptoticsClass.FINITE_TIME_SHRINKER

    def boundary_mask(self):
        """Cells with a 4-neighbour on the other side of the shrinker/immortal split."""
        shr = self.shrinker_mask()
        out = np.zeros_like(shr)
        out[1:, :] |= shr[1:, :] != shr[:-1, :]
        out[:-1, :] |= shr[1:, :] != shr[:-1, :]
        out[:, 1:] |= shr[:, 1:] != shr[:, :-1]
        out[:, :-1] |= shr[:, 1:] != shr[:, :-1]
        return out

    def boundary_is_contiguous(self):
        """Both regions are 4-connected and the boundary cells form one 8-connected set."""
        shr = self.shrinker_mask()
        imm = self.immortal_mask()
        if not shr.any() or not imm.any():
            return False
        n_shr = ndimage.label(shr)[1]
        n_imm = ndimage.label(imm)[1]
        n_bd = ndimage.label(self.boundary_mask(), structure=np.ones((3, 3)))[1]
        return n_shr == 1 and n_imm == 1 and n_bd == 1


def phase_plane_scan(family, alpha, a_values, b_values, t_horizon=1e3, opts=None):
    """Classify the symmetric slice ``B0 = C0`` on a grid of ``(A0, B0)``.

    Each cell is integrated independently, so the result does not depend on
    the order in which cells are visited.
    """
    family = Family(family)
    if family in (Family.H3, Family.H2xR):
        raise ValueError("phase-plane scans use structure-constant families")
    a_values = np.asarray(a_values, dtype=float)
    b_values = np.asarray(b_values, dtype=float)
    if a_values.size == 0 or b_values.size == 0:
        raise ValueError("grid must be nonempty")
    labels = np.empty((a_values.size, b_values.size), dtype=object)
    for i, a0 in enumerate(a_values):
        for j, b0 in enumerate(b_values):
            geom = MilnorGeometry(family, a0, b0, b0)
            traj = evolve_homogeneous(geom, alpha, t_horizon, opts)
            labels[i, j] = classify_asymptotics(traj)
    return PhasePlaneScan(family, float(alpha), a_values, b_values, labels, float(t_horizon))
