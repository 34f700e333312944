import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import lambertw as scipy_lambertw

from rg2lab.special_functions import BRANCH_POINT, WBranch, lambert_w

P, M = WBranch.PRINCIPAL, WBranch.MINUS_ONE


@pytest.mark.parametrize("branch, z, w", [
    (P, 0.0, 0.0),
    (P, math.e, 1.0),
    (M, -1.0 / math.e, -1.0),
    (P, 3.0 * math.exp(3.0), 3.0),
])
def test_reference_values(branch, z, w):
    assert lambert_w(branch, z) == pytest.approx(w, abs=1e-14)


@pytest.mark.parametrize("branch, z", [(P, -0.5), (M, -0.5), (M, 0.0), (M, 1.0), (P, math.inf), (P, math.nan)])
def test_domain_errors(branch, z):
    with pytest.raises(ValueError):
        lambert_w(branch, z)


def test_branch_point_both_branches():
    for b in (P, M):
        assert abs(lambert_w(b, BRANCH_POINT) + 1.0) <= 1e-8


@given(st.floats(-1.0, 20.0))
def test_round_trip_principal(w):
    # W0 >= -1, so only w >= -1 is reachable; the branch point itself is ill-conditioned
    if abs(w + 1.0) < 1e-3:
        return
    got = lambert_w(P, w * math.exp(w))
    assert got == pytest.approx(w, rel=1e-10, abs=1e-10)


@given(st.floats(-20.0, -1.0))
def test_round_trip_minus_one(w):
    if abs(w + 1.0) < 1e-3:
        return
    got = lambert_w(M, w * math.exp(w))
    assert got == pytest.approx(w, rel=1e-10)


@given(st.floats(BRANCH_POINT, 1e6))
def test_forward_residual_principal(z):
    w = lambert_w(P, z)
    assert w >= -1.0
    assert abs(w * math.exp(w) - z) <= 1e-12 * max(1.0, abs(z))


@given(st.floats(BRANCH_POINT, -1e-300))
def test_forward_residual_minus_one(z):
    w = lambert_w(M, z)
    assert w <= -1.0
    assert abs(w * math.exp(w) - z) <= 1e-12 * max(1.0, abs(z))


def test_monotone():
    z = np.linspace(BRANCH_POINT, 50.0, 4001)
    w0 = np.array([lambert_w(P, x) for x in z])
    assert np.all(np.diff(w0) > 0)
    z = np.linspace(BRANCH_POINT, -1e-6, 4001)[1:]
    wm = np.array([lambert_w(M, x) for x in z])
    assert np.all(np.diff(wm) < 0)


def test_against_scipy():
    # dW/dz ~ 1/sqrt(z + 1/e): start away from the branch point so argument rounding stays below 1e-12
    z = np.concatenate([np.linspace(BRANCH_POINT + 1e-4, 0.0, 300, endpoint=False),
                        np.geomspace(1e-12, 1e12, 300)])
    ref = scipy_lambertw(z, 0).real
    got = np.array([lambert_w(P, x) for x in z])
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-14)
    z = np.linspace(BRANCH_POINT + 1e-4, -1e-12, 300)
    ref = scipy_lambertw(z, -1).real
    got = np.array([lambert_w(M, x) for x in z])
    assert np.allclose(got, ref, rtol=1e-12)
