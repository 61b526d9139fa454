import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from levinson_ab.errors import PoleError, RefinementNeeded
from levinson_ab.special_fn import (digamma, gamma_phase, gamma_phase_ratio, log_gamma,
                                    phase_steps, principal_arg, unwrap)

# mpmath, 30 digits
FROZEN = [
    (0.3 + 2.1j, -2.5264658415795274 - 0.8456678795818999j, 0.736859872997788 + 1.6676869447091796j),
    (5.5 - 0.7j, 3.9091308701016145 - 1.1300166137420022j, 1.6207055134128359 - 0.13865280698329557j),
    (-2.5 + 0.1j, -0.10314924404281921 - 9.314444268359837j, 1.1036973777788084 + 0.9226992914585989j),
    (0.01 + 40j, -63.72046496576199 + 106.78352833781172j, 3.688928446943874 + 1.583046352063775j),
    (12 + 0j, 17.502307845873887 + 0j, 2.442661679975812 + 0j),
]


@pytest.mark.parametrize("z, lg, psi", FROZEN)
def test_frozen_values(z, lg, psi):
    assert abs(log_gamma(z) - lg) <= 1e-12 * max(1, abs(lg))
    assert abs(digamma(z) - psi) <= 1e-12 * max(1, abs(psi))


finite = st.floats(-30, 30, allow_nan=False)


@given(finite, finite)
def test_log_gamma_matches_mpmath(x, y):
    z = complex(x, y)
    if y == 0 and x <= 0 and x == round(x):
        return
    if abs(z - round(x)) < 1e-6 and x <= 0:
        return
    ref = complex(mpmath.loggamma(z))
    assert abs(log_gamma(z) - ref) <= 1e-10 * max(1.0, abs(ref))


@given(finite, finite)
def test_digamma_matches_mpmath(x, y):
    z = complex(x, y)
    if x <= 0 and abs(y) < 1e-3 and abs(x - round(x)) < 1e-3:
        return
    if abs(z) < 1e-300:
        return  # psi ~ -1/z is not representable
    ref = complex(mpmath.digamma(z))
    assert abs(digamma(z) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_vectorized_shape():
    z = np.array([[1 + 1j, 2.5], [0.3 - 4j, 7j + 0.1]])
    assert log_gamma(z).shape == (2, 2)
    assert digamma(z).shape == (2, 2)


@pytest.mark.parametrize("z", [0, -1, -7, -0.0])
def test_poles_raise(z):
    with pytest.raises(PoleError):
        log_gamma(z)
    with pytest.raises(PoleError):
        digamma(z)


@given(st.floats(0.01, 10), st.floats(-500, 500))
def test_gamma_phase_ratio_unimodular(a, x):
    assert abs(abs(gamma_phase_ratio(a, x)) - 1) < 1e-12


def test_gamma_phase_is_odd_and_continuous():
    x = np.linspace(-50, 50, 20001)
    ph = gamma_phase(0.75, x)
    assert np.allclose(ph, -ph[::-1], atol=1e-10)
    assert np.abs(np.diff(ph)).max() < 0.05


def test_principal_arg_range():
    assert principal_arg(-1 + 0j) == np.pi
    assert principal_arg(-1 - 0j) == np.pi
    assert principal_arg(1j) == pytest.approx(np.pi / 2)


def test_unwrap_full_turn():
    t = np.linspace(0, 1, 101)
    track = unwrap(np.exp(2j * np.pi * 3 * t))
    assert track.variation == pytest.approx(6 * np.pi, abs=1e-12)


def test_unwrap_refuses_large_step():
    s = np.exp(1j * np.array([0.0, 0.1, 2.0, 2.1]))
    with pytest.raises(RefinementNeeded) as err:
        unwrap(s)
    assert list(err.value.index) == [1]
    assert np.abs(phase_steps(s)).max() > np.pi / 2
