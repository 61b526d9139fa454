import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import gamma

from levinson_ab.errors import InputError
from levinson_ab.extensions import negative_count_cdstar, random_pair
from levinson_ab.weyl_spectrum import bound_states, sigma_min, weyl_m

I2 = np.eye(2, dtype=complex)
Z2 = np.zeros((2, 2), dtype=complex)
alphas = st.floats(min_value=0.05, max_value=0.95)


def decoupled_roots(alpha, e1, e2):
    """Closed-form roots of M(z) + diag(e1, e2) = 0 for e1, e2 > 0."""
    s = np.sin(np.pi * alpha)
    t1 = (np.pi * e1 / (2 * s * gamma(1 - alpha) ** 2)) ** (1 / alpha)
    t2 = (np.pi * e2 / (2 * s * gamma(alpha) ** 2)) ** (1 / (1 - alpha))
    return sorted([-4 * t1, -4 * t2])


def test_weyl_m_examples():
    np.testing.assert_allclose(weyl_m(0.5, -1.0), -np.eye(2), atol=1e-14)
    np.testing.assert_allclose(weyl_m(0.5, -4.0), -2 * np.eye(2), atol=1e-14)


@given(alphas, st.floats(min_value=-1e6, max_value=-1e-6))
def test_weyl_m_negative_diagonal(alpha, z):
    M = weyl_m(alpha, z)
    assert M[0, 1] == 0 and M[1, 0] == 0
    assert M[0, 0] < 0 and M[1, 1] < 0


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.8])
def test_weyl_m_monotone_and_vanishing(alpha):
    zs = -np.logspace(-10, 4, 200)
    d = np.array([np.diag(weyl_m(alpha, z)) for z in zs])
    assert np.all(np.diff(d, axis=0) < 0)
    assert np.all(np.abs(np.diag(weyl_m(alpha, -1e-200))) < 1e-15)


def test_weyl_m_rejects_nonnegative_z():
    with pytest.raises(InputError):
        weyl_m(0.5, 0.0)
    with pytest.raises(InputError):
        weyl_m(0.5, 1.0)


def test_double_root_closed_form():
    pts = bound_states(-I2, I2, 0.5)
    assert len(pts) == 1
    assert pts[0].z == pytest.approx(-1.0, abs=1e-10)
    assert pts[0].multiplicity == 2
    assert pts[0].kernel_dim == 2


@pytest.mark.parametrize("alpha,e1,e2", [(0.3, 1.0, 1.0), (0.5, 0.5, 2.0), (0.8, 3.0, 0.2)])
def test_decoupled_roots(alpha, e1, e2):
    pts = bound_states(-np.diag([e1, e2]), I2, alpha)
    zs = sorted(p.z for p in pts)
    np.testing.assert_allclose(zs, decoupled_roots(alpha, e1, e2), rtol=1e-9)


def test_no_bound_states_for_trivial_cases():
    assert bound_states(I2, Z2, 0.3) == []
    assert bound_states(Z2, I2, 0.3) == []


@given(st.integers(min_value=0, max_value=10 ** 6), alphas)
def test_count_matches_cdstar(seed, alpha):
    C, D = random_pair(seed)
    pts = bound_states(C, D, alpha)
    assert sum(p.multiplicity for p in pts) == negative_count_cdstar(C, D)
    for p in pts:
        assert p.z < 0


@given(st.integers(min_value=0, max_value=10 ** 6), alphas)
def test_roots_are_gauge_invariant(seed, alpha):
    C, D = random_pair(seed)
    V = np.array([[1.0, 2j], [0.3, -1.5]])
    a = bound_states(C, D, alpha)
    b = bound_states(V @ C, V @ D, alpha)
    np.testing.assert_allclose([p.z for p in a], [p.z for p in b], rtol=1e-9)
    for p in b:
        assert sigma_min(V @ C, V @ D, alpha, p.z) <= 1e-8 * (1 + np.linalg.norm(V, 2))
