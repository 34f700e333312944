"""Curvature algebra of 3-manifolds and RG-2 fixed points.

In three dimensions the Riemann tensor is determined by the Ricci tensor, so
in an orthonormal frame diagonalizing Ricci everything reduces to triples:
the principal Ricci curvatures ``(lam, mu, nu)``, the sectional curvatures of
the three coordinate planes, and the eigenvalues of

    Rm2_ij = Rm_iklm Rm_jpqr g^kp g^lq g^mr.

The RG-2 flow ``dg/dt = -2 Rc - (alpha/2) Rm2`` has a fixed point wherever
``Rc = -(alpha/4) Rm2``, which for the triples is a system of three quadratics.
"""

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .ode import IntegratorOptions, integrate_adaptive, newton_multistart

__all__ = [
    "RicciEigenvalues",
    "SectionalTriple",
    "FixedPointClass",
    "FlowParams",
    "sectional_from_ricci",
    "ricci_from_sectional",
    "rm2_eigen_from_ricci",
    "riemann_from_sectional",
    "rm2_brute_force",
    "rg2_rate",
    "fixed_point_residual",
    "fixed_point_jacobian",
    "solve_fixed_points",
    "classify_fixed_point",
    "kn_local_homogeneity",
    "check_parabolicity",
    "frozen_frame_drift",
]


@dataclass(frozen=True)
class RicciEigenvalues:
    lam: float
    mu: float
    nu: float

    def __iter__(self):
        return iter((self.lam, self.mu, self.nu))

    def as_array(self):
        return np.array([self.lam, self.mu, self.nu], dtype=float)

    def sorted(self):
        """Canonical ascending order, used when comparing unordered triples."""
        return RicciEigenvalues(*sorted(self))

    @classmethod
    def from_array(cls, a):
        return cls(*(float(x) for x in a))


@dataclass(frozen=True)
class SectionalTriple:
    """Sectional curvatures of the planes (e2,e3), (e1,e3), (e1,e2)."""

    k23: float
    k13: float
    k12: float

    def __iter__(self):
        return iter((self.k23, self.k13, self.k12))

    def as_array(self):
        return np.array([self.k23, self.k13, self.k12], dtype=float)


class FixedPointClass(enum.Enum):
    FLAT_R3 = "R3"
    HYPERBOLIC_H3 = "H3"
    PRODUCT_H2xR = "H2xR"
    NON_LOCALLY_HOMOGENEOUS = "non-locally-homogeneous"
    SPHERE_S3 = "S3"
    PRODUCT_S2xR = "S2xR"
    # the {-4,-2,-2}/alpha family once alpha < 0, where it is locally homogeneous
    FAMILY4_HOMOGENEOUS = "family-4-homogeneous"


@dataclass(frozen=True)
class FlowParams:
    alpha: float
    n: int = 3

    def __post_init__(self):
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")
        if self.n < 2:
            raise ValueError("dimension must be at least 2")


def sectional_from_ricci(r):
    lam, mu, nu = r
    return SectionalTriple(0.5 * (mu + nu - lam), 0.5 * (lam + nu - mu), 0.5 * (lam + mu - nu))


def ricci_from_sectional(s):
    # Ricci eigenvalue of e_i is the sum of sectional curvatures of planes containing e_i
    return RicciEigenvalues(s.k13 + s.k12, s.k23 + s.k12, s.k23 + s.k13)


def rm2_eigen_from_ricci(r):
    """Eigenvalues of Rm2 from the principal Ricci curvatures (3D only).

    ``Rm2_i = 2 (-a_i^2 + R a_i + |Rc|^2 - R^2/2)`` with ``R`` the scalar
    curvature and ``|Rc|^2`` the sum of squares.
    """
    a = np.array(list(r), dtype=float)
    R = a.sum()
    rc2 = np.dot(a, a)
    return 2.0 * (-a * a + R * a + rc2 - 0.5 * R * R)


def riemann_from_sectional(s):
    """Full (0,4) Riemann tensor in the orthonormal eigenframe.

    Only ``R_1212, R_1313, R_2323`` are independent; the remaining entries
    follow from antisymmetry in each pair and pair symmetry.
    """
    Rm = np.zeros((3, 3, 3, 3))
    for (i, j), k in (((0, 1), s.k12), ((0, 2), s.k13), ((1, 2), s.k23)):
        Rm[i, j, i, j] = k
        Rm[j, i, j, i] = k
        Rm[i, j, j, i] = -k
        Rm[j, i, i, j] = -k
    return Rm


def rm2_brute_force(s):
    """Contract the Riemann tensor against itself index by index.

    Independent check of :func:`rm2_eigen_from_ricci`: the metric is the
    identity in the orthonormal frame, so ``g^kp`` etc. are Kronecker deltas.
    """
    Rm = riemann_from_sectional(s)
    g_inv = np.eye(3)
    rm2 = np.einsum("iklm,jpqr,kp,lq,mr->ij", Rm, Rm, g_inv, g_inv, g_inv)
    off = rm2 - np.diag(np.diag(rm2))
    assert np.max(np.abs(off)) <= 1e-14 * max(1.0, np.max(np.abs(rm2)))
    return np.diag(rm2).copy()


def rg2_rate(r, alpha):
    """Right side ``-2 Rc - (alpha/2) Rm2`` of the flow, as an eigenvalue triple."""
    return -2.0 * np.asarray(list(r), dtype=float) - 0.5 * alpha * rm2_eigen_from_ricci(r)


def fixed_point_residual(r, alpha):
    """The three quadratic fixed-point equations, written out term by term."""
    lam, mu, nu = (float(x) for x in r)
    s = lam + mu + nu
    q = lam * lam + mu * mu + nu * nu
    out = []
    for x in (lam, mu, nu):
        out.append(-2.0 * x + 0.5 * alpha * s * s - alpha * x * s - alpha * q + alpha * x * x)
    return np.array(out)


def fixed_point_jacobian(r, alpha):
    lam, mu, nu = (float(x) for x in r)
    a = np.array([lam, mu, nu])
    s = a.sum()
    jac = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            d = 1.0 if i == j else 0.0
            # d/da_j of: -2 a_i + (alpha/2) s^2 - alpha a_i s - alpha q + alpha a_i^2
            jac[i, j] = (-2.0 * d + alpha * s - alpha * (d * s + a[i]) - 2.0 * alpha * a[j]
                         + 2.0 * alpha * a[i] * d)
    return jac


def _families(alpha):
    a = float(alpha)
    fams = [
        ((0.0, 0.0, 0.0), FixedPointClass.FLAT_R3),
        ((-4 / a, -4 / a, -4 / a), None),
        ((-2 / a, -2 / a, 0.0), None),
        ((-4 / a, -2 / a, -2 / a), None),
    ]
    if a > 0:
        labels = [FixedPointClass.HYPERBOLIC_H3, FixedPointClass.PRODUCT_H2xR,
                  FixedPointClass.NON_LOCALLY_HOMOGENEOUS]
    else:
        labels = [FixedPointClass.SPHERE_S3, FixedPointClass.PRODUCT_S2xR,
                  FixedPointClass.FAMILY4_HOMOGENEOUS]
    out = [fams[0]]
    for (vals, _), lab in zip(fams[1:], labels):
        out.append((tuple(sorted(vals)), lab))
    return out


def classify_fixed_point(r, alpha, tol=None):
    """Match a root to one of the four known families, or return None.

    A root matches when its sorted triple lies within ``1e-6 / |alpha|``.
    """
    tol = 1e-6 / abs(alpha) if tol is None else tol
    key = np.sort(np.asarray(list(r), dtype=float))
    for vals, label in _families(alpha):
        if np.max(np.abs(key - np.array(vals))) <= tol:
            return label
    return None


def solve_fixed_points(alpha, seed_grid=17, tol=1e-12):
    """Find all real fixed-point triples by Newton from a cube of seeds.

    Seeds fill ``[-8/|alpha|, 8/|alpha|]^3`` with ``seed_grid`` points per
    axis. Roots are collapsed to unordered triples (one entry per family)
    and classified.

    Returns
    -------
    list of (RicciEigenvalues, FixedPointClass)
        Sorted by the canonical (ascending) triple.

    Raises
    ------
    AssertionError
        If a converged root belongs to no known family.
    """
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    ext = 8.0 / abs(alpha)
    axis = np.linspace(-ext, ext, seed_grid)
    seeds = [np.array(p) for p in itertools.product(axis, axis, axis)]
    roots = newton_multistart(
        lambda x: fixed_point_residual(x, alpha),
        lambda x: fixed_point_jacobian(x, alpha),
        seeds,
        tol=tol,
    )
    found = {}
    for root in roots:
        label = classify_fixed_point(root, alpha)
        if label is None:
            raise AssertionError(f"root {root} matches no known fixed-point family")
        found.setdefault(label, RicciEigenvalues.from_array(np.sort(root)))
    return sorted(((r, lab) for lab, r in found.items()), key=lambda item: tuple(item[0]))


def _close(x, y, tol):
    return abs(x - y) <= tol


def kn_local_homogeneity(r, tol=1e-9):
    """Whether principal Ricci curvatures can belong to a locally homogeneous 3-manifold.

    Tests the three (overlapping) condition sets of Kowalski and Nikcevic
    (Math. Z. 1996) on principal Ricci curvatures; set iii) is tried under
    every renumbering.
    Equalities and zero tests use the absolute tolerance ``tol`` scaled by
    the size of the triple.
    """
    a = [float(x) for x in r]
    scale = max(1.0, max(abs(x) for x in a))
    eps = tol * scale

    def zero(x):
        return abs(x) <= eps

    # i) all equal, or two equal and the last zero
    for x, y, z in itertools.permutations(a):
        if _close(x, y, eps) and (_close(y, z, eps) or zero(z)):
            return True
    # ii) lam*mu*nu > 0, or at least two vanish
    if a[0] * a[1] * a[2] > eps ** 3 or sum(zero(x) for x in a) >= 2:
        return True
    # iii) all non-positive, at most one zero, and for some renumbering
    #      2 lam < mu + nu and lam (mu + nu) <= mu^2 + nu^2
    if all(x <= eps for x in a) and sum(zero(x) for x in a) <= 1:
        for lam, mu, nu in itertools.permutations(a):
            if 2 * lam < mu + nu - eps and lam * (mu + nu) <= mu * mu + nu * nu + eps * scale:
                return True
    return False


def check_parabolicity(s, alpha):
    """Strict condition ``1 + alpha K > 0`` for every sectional curvature."""
    return all(1.0 + alpha * k > 0.0 for k in s)


def frozen_frame_drift(r, alpha, t_end=1.0, opts=None):
    """Pointwise flow of frame scale factors started from a curvature triple.

    The metric in the eigenframe is ``diag(A1, A2, A3)`` and each sectional
    curvature scales as ``K_ij(0) / sqrt(A_i A_j)``. This is exact for
    constant-curvature and product geometries and serves as a stationarity
    probe for the other families. Returns ``max |A_i(t) - 1|`` over the run.
    """
    s0 = sectional_from_ricci(r)

    def rhs(t, A):
        k23 = s0.k23 / np.sqrt(A[1] * A[2])
        k13 = s0.k13 / np.sqrt(A[0] * A[2])
        k12 = s0.k12 / np.sqrt(A[0] * A[1])
        ric = ricci_from_sectional(SectionalTriple(k23, k13, k12))
        return rg2_rate(ric, alpha) * A

    traj = integrate_adaptive(rhs, np.ones(3), 0.0, t_end, opts or IntegratorOptions())
    return float(np.max(np.abs(traj.states - 1.0)))
