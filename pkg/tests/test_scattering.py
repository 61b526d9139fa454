import numpy as np
import pytest
from hypothesis import given, strategies as st

from levinson_ab.errors import InputError, KernelDimension, SingularBracket
from levinson_ab.extensions import from_unitary, random_pair, to_unitary
from levinson_ab.fixtures import GENERIC_P, clause_fixtures, kernel_c_unitary, kernel_d_unitary
from levinson_ab.scattering import (asymptotic_clause, gamma_edges, phi_minus, phi_tilde,
                                    phi_tilde_direct, s_asymptotic, s_matrix, s_matrix_cayley,
                                    s_matrix_general, s_tilde)
from levinson_ab.special_fn import log_gamma

I2 = np.eye(2, dtype=complex)
Z2 = np.zeros((2, 2), dtype=complex)
seeds = st.integers(min_value=0, max_value=10 ** 6)
alphas = st.floats(min_value=0.02, max_value=0.98)
log_kappas = st.floats(min_value=-12, max_value=12)

# 40-digit mpmath evaluations of the three-factor formula, rounded to double
FROZEN_S = [
    (-I2, I2, 0.5, 2.0, np.diag([-0.8 + 0.6j, 0.8 - 0.6j])),
    (np.array([[1, 2], [2, 1]]), I2, 0.3, 0.7,
     np.array([[0.4716841355440893 - 0.6798427384227403j, -0.5347310670127658 + 0.17143690752368207j],
               [0.5347310670127658 - 0.17143690752368207j, 0.7790460197472622 + 0.27885367457871846j]])),
    (np.array([[0.5, 0.25j], [-0.25j, -1]]), I2, 0.8, 13.0,
     np.array([[-0.8061509255924593 + 0.5905060281870063j, 0.034391650886262004 - 0.015509035770970578j],
               [0.034391650886262004 - 0.015509035770970578j, 0.9762625193782352 - 0.21327957571233425j]])),
]


def unitarity(S):
    return np.linalg.norm(S.conj().T @ S - I2, 2)


def test_phi_minus_endpoints():
    for m in (0, -1, 2):
        d = 0.5 * np.pi * (abs(m) - abs(m + 0.3))
        assert phi_minus(m, 0.3, -np.inf) == 1
        assert phi_minus(m, 0.3, np.inf) == pytest.approx(np.exp(2j * d))
        assert phi_minus(m, 0.3, 0.0) == pytest.approx(np.exp(1j * d), abs=1e-15)


def test_phi_tilde_endpoints():
    for m in (0, -1):
        assert phi_tilde(m, 0.4, -np.inf) == 0
        assert phi_tilde(m, 0.4, np.inf) == 1
        assert abs(phi_tilde(m, 0.4, -60.0)) < 1e-20
        err = [abs(phi_tilde(m, 0.4, x) - 1) for x in (1e2, 1e4, 1e6)]
        assert err[0] > err[1] > err[2] and err[2] < 1e-5
    with pytest.raises(InputError):
        phi_tilde(1, 0.4, 0.0)


def test_phi_tilde_at_zero_half_flux():
    # direct product of log_gamma values as the oracle
    lg = log_gamma(0.5) - log_gamma(0.5) + log_gamma(0.75) + log_gamma(0.25)
    expected = np.exp(lg).real / (2 * np.pi)
    assert phi_tilde(0, 0.5, 0.0) == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(np.sqrt(0.5), rel=1e-14)


@given(st.sampled_from([0, -1]), alphas, st.floats(min_value=-30, max_value=30))
def test_phi_tilde_matches_direct_product(m, alpha, x):
    assert abs(phi_tilde(m, alpha, x) - phi_tilde_direct(m, alpha, x)) <= 1e-11


@pytest.mark.parametrize("C,D,alpha,kappa,expected", FROZEN_S)
def test_s_matrix_frozen(C, D, alpha, kappa, expected):
    np.testing.assert_allclose(s_matrix(C, D, alpha, kappa), expected, atol=1e-12)
    np.testing.assert_allclose(s_matrix_general(C, D, alpha, kappa), expected, atol=1e-12)
    np.testing.assert_allclose(s_matrix_cayley(C, D, alpha, kappa), expected, atol=1e-12)


def test_s_tilde_examples():
    for k in (0.01, 1.0, 100.0):
        np.testing.assert_array_equal(s_tilde(I2, Z2, 0.3, k), Z2)
    st2 = s_tilde(-I2, I2, 0.5, 2.0)
    np.testing.assert_allclose(st2, np.diag([-0.8 + 0.6j, 0.8 - 0.6j]) - np.diag([-1j, 1j]), atol=1e-12)


def test_s_matrix_examples():
    a = 0.3
    for k in (0.0, 1e-3, 1.0, 1e3, np.inf):
        np.testing.assert_allclose(s_matrix(I2, Z2, a, k), np.diag([np.exp(-1j * np.pi * a), np.exp(1j * np.pi * a)]),
                                   atol=1e-14)
    np.testing.assert_allclose(s_matrix(Z2, I2, a, 0.0), np.diag([np.exp(1j * np.pi * a), np.exp(-1j * np.pi * a)]))


def test_s_matrix_rejects_negative_kappa():
    with pytest.raises(InputError):
        s_matrix(I2, Z2, 0.3, -1.0)


@given(seeds, alphas, log_kappas)
def test_unitarity(seed, alpha, lk):
    S = s_matrix(*random_pair(seed), alpha, 10.0 ** lk)
    assert unitarity(S) <= 1e-10


@given(seeds, st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=-3, max_value=3))
def test_stable_form_matches_general_form(seed, alpha, lk):
    C, D = random_pair(seed)
    k = 10.0 ** lk
    try:
        ref = s_matrix_general(C, D, alpha, k)
    except SingularBracket:
        return
    assert np.abs(s_matrix(C, D, alpha, k) - ref).max() <= 1e-9


@given(st.lists(st.floats(min_value=-3, max_value=3), min_size=4, max_size=4),
       st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=-3, max_value=3))
def test_cayley_matches_general(v, alpha, lk):
    E = np.array([[v[0], v[1] + 1j * v[2]], [v[1] - 1j * v[2], v[3]]])
    k = 10.0 ** lk
    diff = np.abs(s_matrix_cayley(E, I2, alpha, k) - s_matrix_general(E, I2, alpha, k)).max()
    assert diff <= 1e-10


def test_cayley_requires_invertible_d():
    with pytest.raises(KernelDimension):
        s_matrix_cayley(I2, Z2, 0.3, 1.0)


@pytest.mark.parametrize("clause", sorted(clause_fixtures()))
def test_clause_fixture_limits(clause):
    C, D, alpha, end = clause_fixtures()[clause]
    assert asymptotic_clause(C, D, alpha, end)[0] == clause
    k = 1e8 if end == np.inf else 1e-8
    err = np.linalg.norm(s_matrix(C, D, alpha, k) - s_asymptotic(C, D, alpha, end), 2)
    assert err <= 1e-3


@pytest.mark.parametrize("clause", sorted(clause_fixtures()))
def test_endpoint_convergence_is_monotone(clause):
    C, D, alpha, end = clause_fixtures()[clause]
    ref = s_asymptotic(C, D, alpha, end)
    ks = 10.0 ** np.arange(3, 7) if end == np.inf else 10.0 ** -np.arange(3, 7)
    errs = [np.abs(s_matrix(C, D, alpha, k) - ref).max() for k in ks]
    if errs[0] > 1e-13:
        assert all(b < a for a, b in zip(errs, errs[1:]))


def test_s_asymptotic_examples():
    a = 0.3
    ea = np.exp(1j * np.pi * a)
    np.testing.assert_allclose(s_asymptotic(np.diag([1.0, 2.0]), I2, a, np.inf), np.diag([ea, 1 / ea]))
    C, D = from_unitary(kernel_c_unitary([1, 0], 0.5))
    np.testing.assert_allclose(s_asymptotic(C, D, a, 0), np.diag([ea, ea]), atol=1e-14)
    C, D = from_unitary(kernel_d_unitary(GENERIC_P, -0.5))
    p = GENERIC_P / np.linalg.norm(GENERIC_P)
    P = I2 - np.outer(p, p.conj())
    np.testing.assert_allclose(s_asymptotic(C, D, 0.5, np.inf), (2 * P - I2) @ np.diag([1j, -1j]), atol=1e-14)


@given(seeds, alphas)
def test_edge_corners_and_unitarity(seed, alpha):
    e = gamma_edges(*random_pair(seed), alpha)
    x = np.concatenate([[-np.inf], np.sinh(np.linspace(-20, 20, 41)), [np.inf]])
    k = np.concatenate([[0.0], np.logspace(-8, 8, 33), [np.inf]])
    for G in (e.gamma1(x), e.gamma2(k), e.gamma3(x), e.gamma4(k)):
        res = np.linalg.norm(np.conj(np.swapaxes(G, -1, -2)) @ G - I2, 2, axis=(-2, -1))
        assert res.max() <= 1e-9
    np.testing.assert_allclose(e.gamma1(-np.inf)[0], I2, atol=1e-15)
    np.testing.assert_allclose(e.gamma1(np.inf)[0], e.gamma2(0.0)[0], atol=1e-8)
    np.testing.assert_allclose(e.gamma2(np.inf)[0], e.gamma3(np.inf)[0], atol=1e-8)
    np.testing.assert_allclose(e.gamma3(-np.inf)[0], e.gamma4(np.inf)[0], atol=1e-8)
    np.testing.assert_array_equal(e.gamma4(k), np.broadcast_to(I2, k.shape + (2, 2)))


@given(seeds, alphas, log_kappas)
def test_log_kappa_route(seed, alpha, lk):
    C, D = random_pair(seed)
    e = gamma_edges(C, D, alpha)
    np.testing.assert_allclose(e.gamma2_log(lk * np.log(10)), e.gamma2(10.0 ** lk), atol=1e-12)
    np.testing.assert_allclose(s_matrix(C, D, alpha, 10.0 ** lk),
                               s_matrix(*from_unitary(to_unitary(C, D)), alpha, 10.0 ** lk), atol=1e-12)
