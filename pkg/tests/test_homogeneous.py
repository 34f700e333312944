import itertools
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from rg2lab.constant_curvature import ConstantCurvatureProblem, evolve_phi, extinction_time
from rg2lab.curvature3d import FlowParams, rm2_eigen_from_ricci
from rg2lab.homogeneous import (
    STRUCTURE_CONSTANTS,
    AsymptoticsClass as AC,
    Family,
    MilnorGeometry,
    PhasePlaneScan,
    classify_asymptotics,
    evolve_homogeneous,
    family_from_constants,
    milnor_ricci,
    phase_plane_scan,
    rg2_rhs_homogeneous,
)
from rg2lab.ode import Termination, TerminationKind, Trajectory

coef = st.floats(0.05, 20.0)
LIE = [Family.SU2, Family.SL2R, Family.SOL, Family.NIL, Family.EUCLIDEAN]


def koszul_ricci(l):
    """Ricci matrix of a Lie group in an orthonormal frame with [f2,f3] = l1 f1 (cyclic).

    Built from scratch: structure tensor -> Levi-Civita connection (Koszul)
    -> curvature operator -> trace.
    """
    Cs = np.zeros((3, 3, 3))  # [f_i, f_j] = sum_k Cs[i, j, k] f_k
    for i, j, k in ((1, 2, 0), (2, 0, 1), (0, 1, 2)):
        Cs[i, j, k] = l[k]
        Cs[j, i, k] = -l[k]
    # <nabla_i f_j, f_k> = (C_ijk - C_jki + C_kij) / 2
    G = 0.5 * (Cs - np.einsum("jki->ijk", Cs) + np.einsum("kij->ijk", Cs))

    def nabla(i, vec):
        # covariant derivative along f_i of the left-invariant field sum_j vec_j f_j
        return vec @ G[i]

    ric = np.zeros((3, 3))
    for y, z in itertools.product(range(3), repeat=2):
        ez = np.eye(3)[z]
        for i in range(3):
            r = nabla(i, nabla(y, ez)) - nabla(y, nabla(i, ez)) - sum(
                Cs[i, y, k] * nabla(k, ez) for k in range(3))
            ric[y, z] += r[i]
    return ric


def frame_constants(geom):
    A, B, C = geom.metric
    c1, c2, c3 = geom.constants
    return (c1 * math.sqrt(A / (B * C)), c2 * math.sqrt(B / (A * C)), c3 * math.sqrt(C / (A * B)))


@given(st.sampled_from(LIE), coef, coef, coef)
def test_ricci_matches_koszul(fam, A, B, C):
    geom = MilnorGeometry(fam, A, B, C)
    ric = koszul_ricci(frame_constants(geom))
    assert np.allclose(ric, ric.T, atol=1e-9)
    assert np.allclose(ric - np.diag(np.diag(ric)), 0.0, atol=1e-9 * max(1.0, np.abs(ric).max()))
    assert np.allclose(milnor_ricci(geom).as_array(), np.diag(ric), rtol=1e-10,
                       atol=1e-10 * max(1.0, np.abs(ric).max()))


def test_heisenberg_coordinate_ricci():
    x, y, z = sp.symbols("x y z")
    X = [x, y, z]
    # dx^2 + dy^2 + (dz - x dy)^2
    g = sp.Matrix([[1, 0, 0], [0, 1 + x ** 2, -x], [0, -x, 1]])
    gi = sp.simplify(g.inv())
    Gam = [[[sp.simplify(sum(gi[a, d] * (sp.diff(g[d, b], X[c]) + sp.diff(g[d, c], X[b])
                                         - sp.diff(g[b, c], X[d])) for d in range(3)) / 2)
             for c in range(3)] for b in range(3)] for a in range(3)]
    Ric = sp.zeros(3, 3)
    for b, c in itertools.product(range(3), repeat=2):
        Ric[b, c] = sp.simplify(sum(
            sp.diff(Gam[a][b][c], X[a]) - sp.diff(Gam[a][b][a], X[c])
            + sum(Gam[a][a][d] * Gam[d][b][c] - Gam[a][c][d] * Gam[d][b][a] for d in range(3))
            for a in range(3)))
    # frame dx, dy, dz - x dy is orthonormal; its dual vectors are d_x, d_y + x d_z, d_z
    E = sp.Matrix([[1, 0, 0], [0, 1, x], [0, 0, 1]]).T
    frame_ric = sp.simplify(E.T * Ric * E)
    assert frame_ric == sp.diag(sp.Rational(-1, 2), sp.Rational(-1, 2), sp.Rational(1, 2))
    # the central direction d_z carries the positive eigenvalue, as e1 does for (1, 0, 0)
    ours = milnor_ricci(MilnorGeometry(Family.NIL, 1, 1, 1)).as_array()
    assert ours == pytest.approx([0.5, -0.5, -0.5])


def test_reference_ricci():
    assert milnor_ricci(MilnorGeometry(Family.EUCLIDEAN, 1.3, 0.2, 7.0)).as_array() == pytest.approx([0, 0, 0])
    assert milnor_ricci(MilnorGeometry(Family.SU2, 1, 1, 1)).as_array() == pytest.approx([2, 2, 2])


def test_reference_rates():
    assert rg2_rhs_homogeneous(MilnorGeometry(Family.EUCLIDEAN, 1, 2, 3), 1.0) == pytest.approx([0, 0, 0])
    round_ = MilnorGeometry(Family.SU2, 1, 1, 1)
    assert rg2_rhs_homogeneous(round_, 0.0) == pytest.approx([-4, -4, -4])
    assert rg2_rhs_homogeneous(round_, 1.0) == pytest.approx([-6, -6, -6])


@given(st.sampled_from(LIE), coef, coef, coef, st.floats(0.0, 5.0))
def test_rate_formula(fam, A, B, C, alpha):
    geom = MilnorGeometry(fam, A, B, C)
    a = milnor_ricci(geom).as_array()
    expected = (-2.0 * a - 0.5 * alpha * rm2_eigen_from_ricci(a)) * geom.metric
    scale = max(1.0, np.abs(expected).max())
    assert np.allclose(rg2_rhs_homogeneous(geom, alpha), expected, atol=1e-10 * scale)
    assert np.allclose(rg2_rhs_homogeneous(geom, 0.0), -2.0 * a * geom.metric, atol=1e-10 * scale)


@given(st.sampled_from(LIE), coef, coef, coef, st.floats(0.0, 5.0))
def test_cyclic_equivariance(fam, A, B, C, alpha):
    g = MilnorGeometry(fam, A, B, C)
    c1, c2, c3 = g.constants
    h = MilnorGeometry(fam, B, C, A, c1=c2, c2=c3, c3=c1)
    r, s = milnor_ricci(g).as_array(), milnor_ricci(h).as_array()
    assert np.allclose(np.roll(r, -1), s, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(r).max()))
    u, w = rg2_rhs_homogeneous(g, alpha), rg2_rhs_homogeneous(h, alpha)
    assert np.allclose(np.roll(u, -1), w, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(u).max()))


@given(st.sampled_from([Family.SU2, Family.SL2R, Family.SOL]), st.floats(0.1, 5.0), st.floats(0.1, 5.0),
       st.floats(0.0, 2.0))
def test_symmetric_pair_preserved(fam, A, B, alpha):
    traj = evolve_homogeneous(MilnorGeometry(fam, A, B, B), alpha, 10.0)
    Bt, Ct = traj.states[:, 1], traj.states[:, 2]
    assert np.all(np.abs(Bt - Ct) <= 1e-9 * np.maximum(1.0, Bt))


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_round_sphere_is_scale_flow(alpha):
    T = 0.25 if alpha == 0 else extinction_time(ConstantCurvatureProblem(K=1.0))
    grid = np.linspace(0.0, 0.95 * T, 40)
    traj = evolve_homogeneous(MilnorGeometry(Family.SU2, 1, 1, 1), alpha, grid[-1], t_eval=grid)
    if alpha == 0:
        phi = 1.0 - 4.0 * grid
    else:
        phi = evolve_phi(ConstantCurvatureProblem(K=1.0), grid[-1], t_eval=grid).states[:, 0]
    assert np.max(np.abs(traj.states - phi[:, None])) <= 1e-6
    full = evolve_homogeneous(MilnorGeometry(Family.SU2, 1, 1, 1), alpha, 1.0)
    assert full.termination.label == "extinction"
    # min(A) = 1e-8 is reached within a hair of the true extinction time
    assert abs(full.termination.time - T) <= 1e-6
    assert classify_asymptotics(full) is AC.FINITE_TIME_SHRINKER


@pytest.mark.parametrize("alpha", [1.0, 3.0])
def test_h3_is_constant_curvature(alpha):
    prob = ConstantCurvatureProblem(K=-1.0, params=FlowParams(alpha=alpha))
    grid = np.linspace(0.0, 0.5, 11)
    a = evolve_homogeneous(MilnorGeometry(Family.H3, 1, 1, 1), alpha, 0.5, t_eval=grid)
    b = evolve_phi(prob, 0.5, t_eval=grid)
    n = min(len(a), len(b))
    assert np.allclose(a.states[:n], b.states[:n, :1], rtol=1e-7)


def test_h2xr_product():
    fixed = evolve_homogeneous(MilnorGeometry(Family.H2xR, 1, 1, 1), 2.0, 10.0)
    assert classify_asymptotics(fixed) is AC.STATIC
    small = evolve_homogeneous(MilnorGeometry(Family.H2xR, 1, 1, 1), 0.5, 10.0)
    assert small.final_state[0] > 1.0 and small.final_state[2] == pytest.approx(1.0)
    big = evolve_homogeneous(MilnorGeometry(Family.H2xR, 1, 1, 1), 4.0, 10.0)
    assert big.termination.label == "extinction"
    with pytest.raises(ValueError):
        milnor_ricci(MilnorGeometry(Family.H2xR, 1, 2, 1))


def test_nil_small_and_large_alpha():
    start = MilnorGeometry(Family.NIL, 1.0, 1.0, 1.0)
    small = evolve_homogeneous(start, 1e-3, 1e3)
    assert small.termination.kind is TerminationKind.REACHED_HORIZON
    assert classify_asymptotics(small).immortal
    large = evolve_homogeneous(start, 1e3, 1e3)
    assert large.termination.label == "extinction"
    assert classify_asymptotics(large) is AC.FINITE_TIME_SHRINKER


def test_nil_ricci_flow_pancake():
    traj = evolve_homogeneous(MilnorGeometry(Family.NIL, 1.0, 1.0, 1.0), 0.0, 1e3)
    A, B, C = traj.final_state
    assert A < 1.0 < B and B == pytest.approx(C)
    assert classify_asymptotics(traj) is AC.IMMORTAL_PANCAKE


def test_sol_ricci_flow_cigar():
    traj = evolve_homogeneous(MilnorGeometry(Family.SOL, 1.0, 1.0, 1.0), 0.0, 1e3)
    assert classify_asymptotics(traj) is AC.IMMORTAL_CIGAR


def test_static_classification():
    traj = evolve_homogeneous(MilnorGeometry(Family.EUCLIDEAN, 1, 2, 3), 1.0, 10.0)
    assert classify_asymptotics(traj) is AC.STATIC
    const = Trajectory(times=np.linspace(0, 1, 5), states=np.ones((5, 3)),
                       termination=Termination(TerminationKind.REACHED_HORIZON, 1.0))
    assert classify_asymptotics(const) is AC.STATIC


def test_underflow_is_shrinker():
    traj = Trajectory(times=np.array([0.0, 1.0]), states=np.array([[1.0, 1.0, 1.0], [0.5, 2.0, 2.0]]),
                      termination=Termination(TerminationKind.STEP_SIZE_UNDERFLOW, 1.0))
    assert classify_asymptotics(traj) is AC.FINITE_TIME_SHRINKER


def test_indeterminate_when_drift_without_trend():
    t = np.geomspace(1e-3, 1e3, 60)
    states = np.column_stack([1.0 + 0.0 * t, 1.0 + 1e-7 * np.sin(t), 1.0 + 0.0 * t])
    traj = Trajectory(times=t, states=states, termination=Termination(TerminationKind.REACHED_HORIZON, 1e3))
    assert classify_asymptotics(traj) is AC.INDETERMINATE


def test_family_from_constants():
    for fam, c in STRUCTURE_CONSTANTS.items():
        assert family_from_constants(c) is fam
        assert family_from_constants(tuple(-x for x in c)) is fam
        for p in itertools.permutations(c):
            assert family_from_constants(p) is fam
    assert family_from_constants((1.0, 1.0, -1.0)) is Family.SL2R
    assert family_from_constants((1.0, -1.0, 0.0)) is Family.SOL


def test_geometry_validation():
    with pytest.raises(ValueError):
        MilnorGeometry(Family.SU2, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        MilnorGeometry(Family.SU2, 1.0, 1.0, 1.0, c1=-2.0)
    assert MilnorGeometry("nil", 1, 1, 1).family is Family.NIL
    with pytest.raises(ValueError):
        evolve_homogeneous(MilnorGeometry(Family.NIL, 1, 1, 1), 1.0, 0.0)


def test_su2_scan_all_shrinkers():
    scan = phase_plane_scan(Family.SU2, 1.0, np.geomspace(0.05, 20.0, 5), np.geomspace(0.05, 20.0, 5),
                            t_horizon=100.0)
    assert scan.counts()[AC.FINITE_TIME_SHRINKER] == 25


def test_euclidean_scan_static():
    scan = phase_plane_scan(Family.EUCLIDEAN, 1.0, [0.1, 1.0, 10.0], [0.5, 2.0], t_horizon=10.0)
    assert scan.counts()[AC.STATIC] == 6
    assert not scan.boundary_mask().any()
    assert not scan.boundary_is_contiguous()


def test_scan_order_independent():
    a = np.geomspace(1e-3, 0.1, 5)
    b = np.array([0.3, 3.0])
    fwd = phase_plane_scan(Family.SOL, 0.01, a, b, t_horizon=1e3)
    rev = phase_plane_scan(Family.SOL, 0.01, a[::-1], b[::-1], t_horizon=1e3)
    assert np.array_equal(fwd.labels, rev.labels[::-1, ::-1])
    assert fwd.shrinker_mask().any() and fwd.immortal_mask().any()


def test_scan_validation():
    with pytest.raises(ValueError):
        phase_plane_scan(Family.H3, 1.0, [1.0], [1.0])
    with pytest.raises(ValueError):
        phase_plane_scan(Family.SOL, 1.0, [], [1.0])


def test_boundary_helpers():
    S, I = AC.FINITE_TIME_SHRINKER, AC.IMMORTAL_CIGAR
    labels = np.array([[S, S, I], [S, I, I], [I, I, I]], dtype=object)
    scan = PhasePlaneScan(Family.SOL, 0.1, np.arange(3.0) + 1, np.arange(3.0) + 1, labels, 1.0)
    assert scan.boundary_is_contiguous()
    assert scan.boundary_mask().sum() == 5
    split = np.array([[S, I, S], [S, I, S], [S, I, S]], dtype=object)
    scan = PhasePlaneScan(Family.SOL, 0.1, np.arange(3.0) + 1, np.arange(3.0) + 1, split, 1.0)
    assert not scan.boundary_is_contiguous()
