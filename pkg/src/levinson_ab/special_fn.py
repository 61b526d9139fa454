"""Complex Gamma/digamma numerics and phase bookkeeping.

All functions accept scalars or numpy arrays and return the same shape.
"""
from dataclasses import dataclass

import numpy as np

from .errors import PoleError, RefinementNeeded

# Lanczos approximation, g = 7, nine coefficients.
LANCZOS_G = 7.0
LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])

HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
LOG_PI = np.log(np.pi)

# B_{2k} for k = 1..8, used by the digamma asymptotic series.
_BERNOULLI_EVEN = np.array([
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
])

_PHASE_STEP_LIMIT = np.pi / 2


def _check_poles(z):
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise PoleError(f"argument is a non-positive integer: {z[bad][0].real:g}")


def _lanczos_log_gamma(z):
    # valid for Re z >= 1/2
    z = z - 1.0
    acc = np.full(z.shape, LANCZOS_COEF[0], dtype=complex)
    for k in range(1, LANCZOS_COEF.size):
        acc = acc + LANCZOS_COEF[k] / (z + k)
    t = z + LANCZOS_G + 0.5
    return HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def _log_sin_pi_upper(z):
    """log sin(pi z) for Im z >= 0, continuous across the upper half plane."""
    # 1 - e^{2 pi i z} through expm1 keeps relative accuracy near integers
    return np.log(0.5) + 0.5j * np.pi - 1j * np.pi * z + np.log(-np.expm1(2j * np.pi * z))


def log_gamma(z):
    """Principal branch of log Gamma(z).

    Lanczos approximation for Re z >= 1/2, one recurrence step for
    ``|z| < 1/2`` and the reflection formula otherwise.  The branch agrees with the analytic continuation of the real
    log Gamma on the positive axis, with a cut along the negative axis.

    Parameters
    ----------
    z : complex or array_like
        Argument; must not be a non-positive integer.

    Returns
    -------
    complex or ndarray
    """
    zin = np.asarray(z, dtype=complex)
    scalar = zin.ndim == 0
    z = np.atleast_1d(zin).copy()
    _check_poles(z)
    z.imag[z.imag == 0] = 0.0           # -0.0 would select the lower side of the cut
    lower = z.imag < 0
    z[lower] = np.conj(z[lower])
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _lanczos_log_gamma(z[right])
    near0 = ~right & (np.abs(z) < 0.5)
    out[near0] = _lanczos_log_gamma(z[near0] + 1.0) - np.log(z[near0])
    left = ~right & ~near0
    if np.any(left):
        zl = z[left]
        out[left] = LOG_PI - _log_sin_pi_upper(zl) - _lanczos_log_gamma(1.0 - zl)
    out[lower] = np.conj(out[lower])
    return out[0] if scalar else out.reshape(zin.shape)


def gamma_phase(a, x):
    """Continuous phase 2 Im log Gamma(a + ix) of Gamma(a+ix)/Gamma(a-ix), a > 0."""
    return 2.0 * np.imag(log_gamma(np.asarray(a) + 1j * np.asarray(x)))


def gamma_phase_ratio(a, x):
    """Gamma(a+ix)/Gamma(a-ix) for a > 0 and real x; modulus one by construction."""
    if np.any(np.asarray(a) <= 0):
        raise PoleError("gamma_phase_ratio needs a > 0")
    return np.exp(1j * gamma_phase(a, x))


def _cot_pi(z):
    w = np.pi * z
    out = np.empty_like(w)
    up = w.imag >= 0
    p = np.expm1(2j * w[up])
    out[up] = -1j * (2 + p) / (-p)
    q = np.expm1(-2j * w[~up])
    out[~up] = 1j * (2 + q) / (-q)
    return out


def _digamma_asymptotic(w):
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(w)
    power = np.ones_like(w)
    for k, b in enumerate(_BERNOULLI_EVEN, start=1):
        power = power * inv2
        series = series + b / (2 * k) * power
    return np.log(w) - 0.5 / w - series


def digamma(z):
    """psi(z) = d/dz log Gamma(z).

    One recurrence step for ``|z| < 1/2``, reflection for Re z < 1/2,
    upward recurrence until Re z >= 8, then the
    asymptotic series with Bernoulli numbers up to B_16.
    """
    zin = np.asarray(z, dtype=complex)
    scalar = zin.ndim == 0
    z = np.atleast_1d(zin).copy()
    _check_poles(z)
    z.imag[z.imag == 0] = 0.0
    near0 = np.abs(z) < 0.5
    refl = np.zeros_like(z)
    refl[near0] = -1.0 / z[near0]
    z[near0] += 1.0
    left = z.real < 0.5
    if np.any(left):
        refl[left] += -np.pi * _cot_pi(z[left])
        z[left] = 1.0 - z[left]
    shift = np.zeros_like(z)
    w = z.copy()
    while True:
        small = w.real < 8.0
        if not np.any(small):
            break
        shift[small] -= 1.0 / w[small]
        w[small] += 1.0
    out = _digamma_asymptotic(w) + shift + refl
    return out[0] if scalar else out.reshape(zin.shape)


def principal_arg(z):
    """Argument in (-pi, pi]."""
    a = np.angle(z)
    return np.where(a <= -np.pi, np.pi, a)


@dataclass(frozen=True)
class PhaseTrack:
    samples: np.ndarray
    unwrapped_args: np.ndarray

    @property
    def variation(self):
        return float(self.unwrapped_args[-1] - self.unwrapped_args[0])


def phase_steps(samples):
    """Principal-value phase increments between consecutive samples."""
    s = np.asarray(samples, dtype=complex)
    return principal_arg(s[1:] * np.conj(s[:-1]))


def unwrap(samples):
    """Continuous argument along a sequence of nonzero complex samples.

    Raises
    ------
    RefinementNeeded
        If any raw step has magnitude >= pi/2; ``err.index`` lists the
        offending step positions so the caller can subdivide there.
    """
    s = np.asarray(samples, dtype=complex).ravel()
    if s.size == 0:
        raise ValueError("unwrap needs at least one sample")
    if np.any(s == 0):
        raise ValueError("unwrap needs nonzero samples")
    steps = phase_steps(s)
    bad = np.nonzero(np.abs(steps) >= _PHASE_STEP_LIMIT)[0]
    if bad.size:
        raise RefinementNeeded(f"{bad.size} phase steps >= pi/2", bad)
    args = np.concatenate([[principal_arg(s[0])], principal_arg(s[0]) + np.cumsum(steps)])
    return PhaseTrack(samples=s, unwrapped_args=args)
