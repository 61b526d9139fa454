"""Weyl matrix and negative bound states of the extension family.

The bound states are the ``z < 0`` at which ``D M(z) - C`` is singular.  In
unitary form ``D M - C = V [1 + U W(z)] (iM - 1) / 2`` with the diagonal
unitary ``W(z) = diag((1 + i m_j)/(i m_j - 1))``, so singular points are the
values of ``z`` where an eigenvalue of ``U W(z)`` passes through ``-1``.  Both
eigenphases of ``U W(z)`` are continuous in ``log(-z)``; roots are located by
sign changes of ``cos(theta/2)`` along a logarithmic grid and polished with
Brent's method.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .errors import CountMismatch, InputError
from .extensions import (as_matrix, check_alpha, negative_count_cdstar,
                         require_admissible, to_unitary)

POINTS_PER_DECADE = 200
SCAN_RANGE = (1e-12, 1e12)
MAX_DECADES = 250
MERGE_REL = 1e-6
KERNEL_REL = 1e-8


@dataclass(frozen=True)
class SpectralPoint:
    z: float
    multiplicity: int
    residual: float
    kernel_dim: int
    merged: bool = False

    def to_dict(self):
        return {"z": self.z, "multiplicity": self.multiplicity,
                "residual": self.residual, "kernel_dim": self.kernel_dim,
                "merged_cluster": self.merged}


def weyl_log_coeffs(alpha):
    """log of the positive prefactors of -M: (2/pi) sin(pi a) Gamma(1-a)^2, ... Gamma(a)^2."""
    alpha = check_alpha(alpha)
    base = np.log(2.0 / np.pi * np.sin(np.pi * alpha))
    return base + 2 * gammaln(1 - alpha), base + 2 * gammaln(alpha)


def weyl_diag_logt(alpha, logt):
    """Diagonal of ``M`` as a function of ``log t`` with ``t = -z/4`` (array-friendly)."""
    k1, k2 = weyl_log_coeffs(alpha)
    logt = np.asarray(logt, dtype=float)
    return -np.exp(k1 + alpha * logt), -np.exp(k2 + (1 - alpha) * logt)


def weyl_m(alpha, z):
    """Weyl matrix ``M(z) = -(2/pi) sin(pi a) diag(Gamma(1-a)^2 t^a, Gamma(a)^2 t^(1-a))``, ``t = -z/4``.

    Parameters
    ----------
    alpha : float
        Flux in (0, 1).
    z : float
        Negative energy.

    Returns
    -------
    ndarray
        2x2 real diagonal matrix with strictly negative diagonal.
    """
    z = float(z)
    if not z < 0:
        raise InputError(f"weyl_m needs z < 0, got {z}")
    m1, m2 = weyl_diag_logt(alpha, np.log(-z / 4.0))
    return np.diag([float(m1), float(m2)])


def _eigenphases(U, alpha, logt):
    """Continuous eigenphases of U W(t) along an increasing ``logt`` grid.

    Uses ``det(UW) = e^{i Theta}`` with Theta continuous and writes the two
    eigenphases as ``Theta/2 +- eta`` where ``2 cos(eta) = tr(UW) e^{-i Theta/2}``.
    """
    m1, m2 = weyl_diag_logt(alpha, logt)
    beta1 = np.pi + 2 * np.arctan(m1)
    beta2 = np.pi + 2 * np.arctan(m2)
    gam = np.angle(np.linalg.det(U))
    theta = gam + beta1 + beta2
    w1, w2 = np.exp(1j * beta1), np.exp(1j * beta2)
    tr = U[0, 0] * w1 + U[1, 1] * w2
    c = np.clip(np.real(tr * np.exp(-0.5j * theta)) / 2, -1.0, 1.0)
    eta = np.arccos(c)
    return theta / 2 + eta, theta / 2 - eta


def _crossings(phase, logt):
    """Brackets where ``phase`` crosses an odd multiple of pi."""
    k = np.floor((phase - np.pi) / (2 * np.pi))
    idx = np.nonzero(k[1:] != k[:-1])[0]
    out = []
    for i in idx:
        k0, k1 = k[i], k[i + 1]
        # monotone decreasing phase: one crossing per level passed
        for level in range(int(min(k0, k1)) + 1, int(max(k0, k1)) + 1):
            out.append((logt[i], logt[i + 1], np.pi + 2 * np.pi * level))
    return out


def _residual(C, D, alpha, z):
    M = weyl_m(alpha, z)
    A = D @ M - C
    s = np.linalg.svd(A, compute_uv=False)
    scale = np.linalg.norm(D @ M, 2) + np.linalg.norm(C, 2)
    return s, scale


def _scan(U, alpha, lo, hi):
    n = max(2, int(np.ceil((np.log10(hi) - np.log10(lo)) * POINTS_PER_DECADE)) + 1)
    # grid in log t, t = -z/4
    logt = np.linspace(np.log(lo / 4), np.log(hi / 4), n)
    branches = _eigenphases(U, alpha, logt)
    roots = []
    for b in range(2):
        for a, c, level in _crossings(branches[b], logt):
            def f(lt, b=b, level=level):
                return _eigenphases(U, alpha, np.array([lt]))[b][0] - level
            fa, fc = f(a), f(c)
            if fa == 0:
                r = a
            elif fc == 0:
                r = c
            else:
                r = brentq(f, a, c, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
            roots.append(r)
    return sorted(roots)


def bound_states(C, D, alpha):
    """Negative eigenvalues of the extension with multiplicities.

    The scan covers ``-z`` in ``[1e-12, 1e12]`` and widens by a factor
    ``1e10`` on each side while the number of crossings found is below the
    count of negative eigenvalues of ``C D*``.  Roots closer than a relative
    ``1e-6`` are merged into one point with summed multiplicity.

    Returns
    -------
    list of SpectralPoint
        Sorted by increasing ``z``.

    Raises
    ------
    CountMismatch
        If the total multiplicity never matches the ``C D*`` count.
    """
    alpha = check_alpha(alpha)
    C, D = require_admissible(C, D)
    U = to_unitary(C, D)
    expected = negative_count_cdstar(C, D)
    lo, hi = SCAN_RANGE
    while True:
        roots = _scan(U, alpha, lo, hi)
        if len(roots) >= expected or np.log10(hi) >= MAX_DECADES:
            break
        lo, hi = lo * 1e-10, hi * 1e10
    if len(roots) != expected:
        raise CountMismatch(f"found {len(roots)} crossings, C D* predicts {expected}")
    # cluster in log t
    clusters = []
    for r in roots:
        if clusters and abs(r - clusters[-1][-1]) <= MERGE_REL:
            clusters[-1].append(r)
        else:
            clusters.append([r])
    points = []
    for cl in clusters:
        lt = float(np.mean(cl))
        z = -4.0 * np.exp(lt)
        s, scale = _residual(C, D, alpha, z)
        kdim = int(np.sum(s <= KERNEL_REL * scale))
        points.append(SpectralPoint(z=float(z), multiplicity=len(cl),
                                    residual=float(s[-1]), kernel_dim=kdim,
                                    merged=len(cl) > 1))
    return sorted(points, key=lambda p: p.z)


def sigma_min(C, D, alpha, z):
    """Smallest singular value of ``D M(z) - C``."""
    s, _ = _residual(as_matrix(C), as_matrix(D), alpha, z)
    return float(s[-1])
