import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rg2lab.curvature3d import (
    FixedPointClass as FP,
    FlowParams,
    RicciEigenvalues,
    SectionalTriple,
    check_parabolicity,
    classify_fixed_point,
    fixed_point_jacobian,
    fixed_point_residual,
    frozen_frame_drift,
    kn_local_homogeneity,
    ricci_from_sectional,
    riemann_from_sectional,
    rm2_brute_force,
    rm2_eigen_from_ricci,
    sectional_from_ricci,
    solve_fixed_points,
)

curv = st.floats(-5.0, 5.0)
triples = st.tuples(curv, curv, curv)

_cache = {}


def solved(alpha):
    if alpha not in _cache:
        _cache[alpha] = solve_fixed_points(alpha)
    return _cache[alpha]


def as_dict(sols):
    return {label: r.as_array() for r, label in sols}


@pytest.mark.parametrize("r, s", [
    ((2.0, 2.0, 2.0), (1.0, 1.0, 1.0)),
    ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
    ((-4.0, -2.0, -2.0), (0.0, -2.0, -2.0)),
])
def test_sectional_examples(r, s):
    got = sectional_from_ricci(RicciEigenvalues(*r))
    assert tuple(got) == pytest.approx(s)
    assert tuple(ricci_from_sectional(SectionalTriple(*s))) == pytest.approx(r)


@given(triples)
def test_sectional_round_trip(r):
    back = ricci_from_sectional(sectional_from_ricci(RicciEigenvalues(*r)))
    assert np.allclose(back.as_array(), r, atol=1e-12)


@pytest.mark.parametrize("r, b", [
    ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
    ((2.0, 2.0, 2.0), (4.0, 4.0, 4.0)),
    ((0.5, -0.5, -0.5), (0.25, 1.25, 1.25)),
])
def test_rm2_examples(r, b):
    assert rm2_eigen_from_ricci(RicciEigenvalues(*r)) == pytest.approx(b)
    assert rm2_brute_force(sectional_from_ricci(RicciEigenvalues(*r))) == pytest.approx(b)


def test_rm2_brute_force_unit_sectionals():
    assert rm2_brute_force(SectionalTriple(1.0, 1.0, 1.0)) == pytest.approx([4.0, 4.0, 4.0])
    assert rm2_brute_force(SectionalTriple(0.0, 0.0, 0.0)) == pytest.approx([0.0, 0.0, 0.0])


@given(triples)
def test_rm2_identity_matches_contraction(r):
    r = RicciEigenvalues(*r)
    fast = rm2_eigen_from_ricci(r)
    slow = rm2_brute_force(sectional_from_ricci(r))
    assert np.allclose(fast, slow, rtol=1e-12, atol=1e-12 * max(1.0, np.max(np.abs(slow))))


@given(triples, st.integers(0, 2 ** 32 - 1))
def test_riemann_symmetries_and_rotation(s, seed):
    Rm = riemann_from_sectional(SectionalTriple(*s))
    assert np.allclose(Rm, -Rm.transpose(1, 0, 2, 3))
    assert np.allclose(Rm, -Rm.transpose(0, 1, 3, 2))
    assert np.allclose(Rm, Rm.transpose(2, 3, 0, 1))
    # first Bianchi identity
    assert np.allclose(Rm + Rm.transpose(0, 2, 3, 1) + Rm.transpose(0, 3, 1, 2), 0.0)
    # Rm2 is a tensor: in a rotated orthonormal frame its spectrum is unchanged
    q, _ = np.linalg.qr(np.random.default_rng(seed).normal(size=(3, 3)))
    Rq = np.einsum("ai,bj,ck,dl,ijkl->abcd", q, q, q, q, Rm)
    rm2q = np.einsum("iklm,jklm->ij", Rq, Rq)
    expected = np.sort(rm2_brute_force(SectionalTriple(*s)))
    assert np.allclose(np.linalg.eigvalsh(rm2q), expected, atol=1e-10 * max(1.0, np.max(np.abs(expected))))


@pytest.mark.parametrize("r", [(0.0, 0.0, 0.0), (-4.0, -4.0, -4.0), (-4.0, -2.0, -2.0), (-2.0, -2.0, 0.0)])
def test_residual_vanishes_on_families(r):
    for alpha in (1.0, 0.5, 3.0):
        scaled = tuple(x / alpha for x in r)
        assert np.allclose(fixed_point_residual(scaled, alpha), 0.0, atol=1e-12)


@given(triples, st.floats(0.1, 5.0))
def test_residual_is_flow_rate(r, alpha):
    # the quadratic system is -2 Rc - (alpha/2) Rm2 written out
    rate = -2.0 * np.array(r) - 0.5 * alpha * rm2_eigen_from_ricci(RicciEigenvalues(*r))
    assert np.allclose(fixed_point_residual(r, alpha), rate, atol=1e-10 * max(1.0, np.max(np.abs(rate))))


@given(triples, st.floats(-3.0, 3.0).filter(lambda a: abs(a) > 0.1))
def test_jacobian_matches_differences(r, alpha):
    x = np.array(r)
    J = fixed_point_jacobian(x, alpha)
    h = 1e-6
    num = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        num[:, j] = (fixed_point_residual(x + e, alpha) - fixed_point_residual(x - e, alpha)) / (2 * h)
    assert np.allclose(J, num, atol=1e-6 * max(1.0, abs(alpha)) * 10)


def test_four_families_alpha_one():
    got = as_dict(solved(1.0))
    assert set(got) == {FP.FLAT_R3, FP.HYPERBOLIC_H3, FP.PRODUCT_H2xR, FP.NON_LOCALLY_HOMOGENEOUS}
    assert got[FP.FLAT_R3] == pytest.approx([0, 0, 0], abs=1e-10)
    assert got[FP.HYPERBOLIC_H3] == pytest.approx([-4, -4, -4])
    assert got[FP.PRODUCT_H2xR] == pytest.approx([-2, -2, 0], abs=1e-10)
    assert got[FP.NON_LOCALLY_HOMOGENEOUS] == pytest.approx([-4, -2, -2])
    for r, _ in solved(1.0):
        assert np.linalg.norm(fixed_point_residual(r, 1.0)) <= 1e-10


def test_sphere_families_negative_alpha():
    got = as_dict(solved(-1.0))
    assert got[FP.SPHERE_S3] == pytest.approx([4, 4, 4])
    assert got[FP.PRODUCT_S2xR] == pytest.approx([0, 2, 2], abs=1e-10)
    assert len(got) == 4


@pytest.mark.parametrize("c", [2.0, 10.0])
def test_scaling_covariance(c):
    base = as_dict(solved(1.0))
    scaled = as_dict(solved(c))
    assert set(base) == set(scaled)
    for label in base:
        assert np.allclose(scaled[label], base[label] / c, atol=1e-8)


def test_only_flat_is_parabolic():
    for r, label in solved(1.0):
        ok = check_parabolicity(sectional_from_ricci(r), 1.0)
        assert ok == (label is FP.FLAT_R3)


@pytest.mark.parametrize("s, alpha, expected", [
    ((0.0, 0.0, 0.0), 1.0, True),
    ((-2.0, -2.0, -2.0), 1.0, False),
    ((-1.0, 0.0, 0.0), 1.0, False),  # strict inequality
    ((-0.9, 5.0, 0.0), 1.0, True),
])
def test_parabolicity_examples(s, alpha, expected):
    assert check_parabolicity(SectionalTriple(*s), alpha) is expected


@given(st.floats(0.01, 100.0))
def test_hyperbolic_fixed_point_not_parabolic(alpha):
    s = sectional_from_ricci(RicciEigenvalues(-4 / alpha, -4 / alpha, -4 / alpha))
    assert not check_parabolicity(s, alpha)


@pytest.mark.parametrize("r, expected", [
    ((0.0, 0.0, 0.0), True),
    ((-4.0, -2.0, -2.0), False),
    ((-2.0, -2.0, 0.0), True),
    ((-4.0, -4.0, -4.0), True),
    ((2.0, 2.0, 2.0), True),
    ((1.0, 2.0, 3.0), True),     # positive product
    ((0.0, 0.0, -3.0), True),    # two vanish
    ((0.5, -0.5, -0.5), True),   # Nil
    ((-1.0, 0.0, 1.0), False),
    ((-2.0, 0.0, 0.0), True),    # Sol-type signature, two vanish
])
def test_kn_examples(r, expected):
    assert kn_local_homogeneity(RicciEigenvalues(*r)) is expected


@given(triples)
def test_kn_permutation_invariant(r):
    results = {kn_local_homogeneity(RicciEigenvalues(*p)) for p in itertools.permutations(r)}
    assert len(results) == 1


@given(st.floats(0.1, 10.0))
def test_kn_family_four_never_homogeneous(alpha):
    assert not kn_local_homogeneity(RicciEigenvalues(-4 / alpha, -2 / alpha, -2 / alpha))


def test_classifier_rejects_non_roots():
    assert classify_fixed_point((-1.0, -1.0, -1.0), 1.0) is None
    assert classify_fixed_point((-2.0, -4.0, -2.0), 1.0) is FP.NON_LOCALLY_HOMOGENEOUS


def test_frozen_frame_stationary():
    for r, _ in solved(1.0):
        assert frozen_frame_drift(r, 1.0) < 1e-8
    assert frozen_frame_drift((2.0, 2.0, 2.0), 1.0) > 1e-2


def test_flow_params_validation():
    with pytest.raises(ValueError):
        FlowParams(alpha=0.0)
    with pytest.raises(ValueError):
        FlowParams(alpha=1.0, n=1)
    with pytest.raises(ValueError):
        solve_fixed_points(0.0)
