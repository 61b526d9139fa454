"""Channel symbols, scattering matrix and the four edge functions.

Three evaluations of the 2x2 scattering matrix are provided:

* :func:`s_tilde` evaluates the three-factor product literally,
* :func:`s_matrix_cayley` uses the Cayley form ``Phi (X + is)(X - is)^{-1} Phi J``
  for invertible ``D``,
* :func:`s_matrix` (the default) uses a unitary-parametrized rewrite of the
  same formula which avoids the cancellation between ``diag(e^{-i pi a},
  e^{i pi a})`` and ``S~`` at large or small ``kappa``.

With ``s = sin(pi a)``, ``c = pi / (2 s)``, ``w_j = i b_j^2 conj(z_j)`` and
``z = (e^{i pi a}, -e^{-i pi a})`` the rewrite reads

    S = Phi [ diag((c - conj w)/(c + w)) - 4 c s  d N d ] Phi J,
    d = diag(b / (c + w)),  N = (1 + U diag(W))^{-1} U,  W = (w - c)/(w + c).

``|W_j| < 1`` for finite ``kappa > 0`` so the inverse always exists, and every
factor stays bounded as ``kappa`` goes to 0 or infinity.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateCase, InputError, KernelDimension, SingularBracket
from .extensions import (ZERO_TOL, _sign, alpha_side, as_matrix, check_alpha, from_unitary,
                         kernel_data, require_admissible, to_unitary)
from .special_fn import gamma_phase

J = np.diag([1.0, -1.0]).astype(complex)


def channel_phase(m, alpha):
    """delta_m = (pi/2)(|m| - |m + alpha|)."""
    return 0.5 * np.pi * (abs(m) - abs(m + alpha))


def _ratio_phase(m, alpha, x):
    """Phase of Gamma((|m|+1+ix)/2)/Gamma((|m|+1-ix)/2) * Gamma((|m+a|+1-ix)/2)/Gamma((|m+a|+1+ix)/2)."""
    a1 = 0.5 * (abs(m) + 1)
    a2 = 0.5 * (abs(m + alpha) + 1)
    return gamma_phase(a1, 0.5 * x) - gamma_phase(a2, 0.5 * x)


def _with_endpoints(x, finite_fn, minus_inf, plus_inf):
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty(x.shape, dtype=complex)
    fin = np.isfinite(x)
    if np.any(fin):
        out[fin] = finite_fn(x[fin])
    out[x == -np.inf] = minus_inf
    out[x == np.inf] = plus_inf
    if np.any(np.isnan(x)):
        raise InputError("x is NaN")
    return out[0] if scalar else out


def phi_minus(m, alpha, x):
    """Channel symbol phi^-_m(x); accepts +-inf as endpoints."""
    alpha = check_alpha(alpha)
    d = channel_phase(m, alpha)
    return _with_endpoints(
        x, lambda t: np.exp(1j * (d + _ratio_phase(m, alpha, t))),
        1.0 + 0j, np.exp(2j * d))


def _half_reflection(c, x):
    """e^{pi x/2} / (2 sin(pi (c + ix/2))) without overflow."""
    a = np.pi * c
    sa, ca = np.sin(a), np.cos(a)
    out = np.empty(x.shape, dtype=complex)
    pos = x >= 0
    t = np.exp(-np.pi * x[pos])
    out[pos] = 1.0 / (sa * (1 + t) + 1j * ca * (1 - t))
    t = np.exp(np.pi * x[~pos])
    out[~pos] = t / (sa * (t + 1) + 1j * ca * (t - 1))
    return out


def phi_tilde(m, alpha, x):
    """Channel symbol phi~_m(x) for m in {0, -1}.

    The product ``Gamma((1+nu-ix)/2) Gamma((1-nu-ix)/2)`` is folded with the
    ``Gamma((nu+1+ix)/2)`` of the ratio into ``pi / sin`` so that the growth of
    ``e^{pi x/2}`` cancels analytically.
    """
    if m not in (0, -1):
        raise InputError("phi_tilde is defined for m in {0, -1} only")
    alpha = check_alpha(alpha)
    c = 0.5 * (1 + abs(m + alpha))
    pref = np.exp(-0.5j * np.pi * abs(m))

    def finite(t):
        return np.exp(1j * _ratio_phase(m, alpha, t)) * pref * _half_reflection(c, t)

    return _with_endpoints(x, finite, 0j, 1.0 + 0j)


def phi_tilde_direct(m, alpha, x):
    """Unreduced product of Gamma values; overflows for large |x|, used as an oracle."""
    from .special_fn import log_gamma
    x = np.asarray(x, dtype=float)
    nu = abs(m + alpha)
    lg = (log_gamma(0.5 * (abs(m) + 1 + 1j * x)) - log_gamma(0.5 * (abs(m) + 1 - 1j * x))
          + log_gamma(0.5 * (1 + nu - 1j * x)) + log_gamma(0.5 * (1 - nu - 1j * x)))
    return np.exp(lg + 0.5 * np.pi * x - 0.5j * np.pi * abs(m)) / (2 * np.pi)


def b_diag(alpha, kappa):
    """Diagonal of ``B(kappa)``: Gamma(1-a) kappa^a / 2^a and Gamma(a) kappa^(1-a) / 2^(1-a)."""
    k = np.asarray(kappa, dtype=float)
    lk = np.log(k / 2)
    b1 = np.exp(gammaln(1 - alpha) + alpha * lk)
    b2 = np.exp(gammaln(alpha) + (1 - alpha) * lk)
    return np.stack([b1, b2], axis=-1)


def phi_diag(alpha):
    """Diagonal of ``Phi``."""
    return np.array([np.exp(-0.5j * np.pi * alpha), np.exp(-0.5j * np.pi * (1 - alpha))])


def l_matrix(C, alpha):
    """``L = (pi / (2 sin(pi a))) C``."""
    return np.pi / (2 * np.sin(np.pi * alpha)) * as_matrix(C)


def free_diag(alpha):
    return np.array([np.exp(-1j * np.pi * alpha), np.exp(1j * np.pi * alpha)])


def s_tilde(C, D, alpha, kappa):
    """Literal three-factor product for ``S~(kappa)``, ``kappa > 0`` finite."""
    alpha = check_alpha(alpha)
    C, D = as_matrix(C), as_matrix(D)
    kappa = float(kappa)
    if not (0 < kappa < np.inf):
        raise InputError("s_tilde needs 0 < kappa < inf")
    s = np.sin(np.pi * alpha)
    bp = b_diag(alpha, kappa) * phi_diag(alpha)
    bracket = D @ np.diag(bp ** 2) + np.pi / (2 * s) * C
    if np.linalg.cond(bracket) > 1e14:
        raise SingularBracket(f"bracket is numerically singular at kappa={kappa:g}")
    mid = np.linalg.solve(bracket, D)
    return 2j * s * (bp[:, None] * mid * (bp * np.array([1, -1]))[None, :])


def s_matrix_general(C, D, alpha, kappa):
    """``diag(e^{-i pi a}, e^{i pi a}) + S~(kappa)`` with the literal S~."""
    return np.diag(free_diag(check_alpha(alpha))) + s_tilde(C, D, alpha, kappa)


def s_matrix_cayley(C, D, alpha, kappa):
    """Cayley form ``Phi (X + is)(X - is)^{-1} Phi J`` with ``X = B^-1 L B^-1 + cos(pi a) J``.

    Requires ``det D != 0``; the pair is first normalized to ``(D^{-1} C, 1)``.
    """
    alpha = check_alpha(alpha)
    C, D = as_matrix(C), as_matrix(D)
    sv = np.linalg.svd(D, compute_uv=False)
    if sv[-1] <= 1e-12 * max(1.0, sv[0]):
        raise KernelDimension("Cayley form needs an invertible D")
    E = np.linalg.solve(D, C)
    E = 0.5 * (E + E.conj().T)
    s, co = np.sin(np.pi * alpha), np.cos(np.pi * alpha)
    L = l_matrix(E, alpha)
    b1, b2 = b_diag(alpha, float(kappa))
    x11 = L[0, 0].real / b1 ** 2 + co
    x22 = L[1, 1].real / b2 ** 2 - co
    x12 = L[0, 1] / (b1 * b2)
    x21 = L[1, 0] / (b1 * b2)
    detL = (L[0, 0] * L[1, 1] - L[0, 1] * L[1, 0]).real
    f = (detL / (b1 * b2) ** 2 - 1 + co * (L[1, 1].real / b2 ** 2 - L[0, 0].real / b1 ** 2)
         - 1j * s * (L[0, 0].real / b1 ** 2 + L[1, 1].real / b2 ** 2))
    adj = np.array([[x22 - 1j * s, -x12], [-x21, x11 - 1j * s]])
    cay = np.eye(2) + 2j * s * adj / f
    ph = phi_diag(alpha)
    return ph[:, None] * cay * (ph * np.array([1, -1]))[None, :]


def log_b_diag(alpha, logk):
    """``log`` of the diagonal of ``B`` as a function of ``log kappa``; never overflows."""
    lk = np.asarray(logk, dtype=float) - np.log(2.0)
    return np.stack([gammaln(1 - alpha) + alpha * lk, gammaln(alpha) + (1 - alpha) * lk], axis=-1)


def s_matrix_grid(U, alpha, kappa):
    """Stable evaluation of ``S(kappa)`` on an array of finite ``kappa > 0``.

    Returns an array of shape ``kappa.shape + (2, 2)``.
    """
    return s_matrix_logk(U, alpha, np.log(np.asarray(kappa, dtype=float)))


LOG_B_CLAMP = 170.0


def s_matrix_logk(U, alpha, logk):
    """``S`` on an array of ``log kappa`` values, valid far outside the float range of kappa.

    With ``w_j = i b_j^2 zbar_j``, ``W = (w - c)/(w + c)`` and ``d = b/(c + w)``
    one has ``S = Phi [diag((c - conj w)/(c + w)) - 4 c s d N d] Phi J`` where
    ``N = (U* + W)^{-1}``.  Each channel is written as ``W_j = sigma_j + eps_j``
    with ``sigma_j = -1`` for ``b_j < 1`` and ``+1`` otherwise, and ``d N d``
    is formed from the adjugate of ``A + diag(eps)``, ``A = U* + sigma``, using
    the finite ratios ``d^2/eps`` and ``d/eps``.  A saturated channel
    (``eps -> 0``) then contributes its exact limit instead of ``0/0``.
    Entries of ``A`` and ``det A`` below ``ZERO_TOL`` are structural zeros, and
    ``log b`` is clamped to ``+-LOG_B_CLAMP`` so ``eps1 eps2`` never underflows.
    """
    U = as_matrix(U)
    lk = np.asarray(logk, dtype=float)
    shape = lk.shape
    lk = lk.ravel()
    s = np.sin(np.pi * alpha)
    c = np.pi / (2 * s)
    lb = np.clip(log_b_diag(alpha, lk), -LOG_B_CLAMP, LOG_B_CLAMP)
    iz = 1j * np.array([np.exp(-1j * np.pi * alpha), -np.exp(1j * np.pi * alpha)])
    small = lb < 0
    ls = np.where(small, lb, 0.0)
    ll = np.where(small, 0.0, lb)
    # b < 1
    w = np.exp(2 * ls) * iz
    eps_s = 2 * w / (w + c)
    q_s = 1 / (2 * iz * (c + w))
    r_s = np.exp(-ls) / (2 * iz)
    diag_s = (c - np.conj(w)) / (c + w)
    # b >= 1, through r = c / w
    r = c * np.exp(-2 * ll) / iz
    eps_l = -2 * r / (1 + r)
    q_l = -1 / (2 * c * iz * (1 + r))
    r_l = -np.exp(ll) / (2 * c)
    diag_l = (r - np.conj(iz) / iz) / (1 + r)
    eps = np.where(small, eps_s, eps_l)
    q = np.where(small, q_s, q_l)          # d^2 / eps
    de = np.where(small, r_s, r_l)         # d / eps
    diag = np.where(small, diag_s, diag_l)
    sigma = np.where(small, -1.0, 1.0)

    Us = U.conj().T
    A = np.empty(lk.shape + (2, 2), dtype=complex)
    A[:] = Us
    A[:, 0, 0] += sigma[:, 0]
    A[:, 1, 1] += sigma[:, 1]
    A[np.abs(A) <= ZERO_TOL] = 0.0
    e1, e2 = eps[:, 0], eps[:, 1]
    det_a = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
    det_a[np.abs(det_a) <= ZERO_TOL * (1 + np.abs(A).max(axis=(1, 2)) ** 2)] = 0.0
    # det(A + diag eps), with d^2 = q eps and d1 d2 = eps1 eps2 (d1/eps1)(d2/eps2)
    det_m = det_a + e1 * A[:, 1, 1] + e2 * A[:, 0, 0] + e1 * e2
    dnd = np.empty_like(A)
    dnd[:, 0, 0] = q[:, 0] * e1 * (A[:, 1, 1] + e2) / det_m
    dnd[:, 1, 1] = q[:, 1] * e2 * (A[:, 0, 0] + e1) / det_m
    cross = (de[:, 0] * e1) * (de[:, 1] * e2) / det_m
    dnd[:, 0, 1] = -cross * A[:, 0, 1]
    dnd[:, 1, 0] = -cross * A[:, 1, 0]
    cay = -4 * c * s * dnd
    cay[:, 0, 0] += diag[:, 0]
    cay[:, 1, 1] += diag[:, 1]
    ph = phi_diag(alpha)
    out = ph[None, :, None] * cay * (ph * np.array([1, -1]))[None, None, :]
    return out.reshape(shape + (2, 2))


def asymptotic_clause(C, D, alpha, end):
    """Name of the asymptotic clause that applies at ``end`` in {0, inf}.

    Clauses at infinity: ``i`` (D = 0), ``ii`` (det D != 0), ``iii``
    (dim ker D = 1, alpha = 1/2), ``iv``, ``v``; at zero: ``i``, ``a`` (C = 0),
    ``b`` (det C != 0), ``c`` (dim ker C = 1, alpha = 1/2), ``d``, ``e``.
    """
    alpha = check_alpha(alpha)
    U = to_unitary(*require_admissible(C, D))
    info = kernel_data(U)
    if info["rank_D"] == 0:
        return "i", info
    side = alpha_side(alpha)
    if _end_is_inf(end):
        if info["rank_D"] == 2:
            return "ii", info
        p = info["kernel_D"]
        if side == 0:
            return "iii", info
        z1 = _sign(abs(p[0]), "|p1|") == 0
        z2 = _sign(abs(p[1]), "|p2|") == 0
        if z2 or (side < 0 and not z1):
            return "iv", info
        return "v", info
    if info["rank_C"] == 0:
        return "a", info
    if info["rank_C"] == 2:
        return "b", info
    q = info["kernel_C"]
    if side == 0:
        return "c", info
    z1 = _sign(abs(q[0]), "|q1|") == 0
    z2 = _sign(abs(q[1]), "|q2|") == 0
    if z1 or (side > 0 and not z2):
        return "d", info
    return "e", info


def _end_is_inf(end):
    if end in ("inf", "infinity", np.inf) or (isinstance(end, float) and end == np.inf):
        return True
    if end in (0, 0.0, "0"):
        return False
    raise InputError(f"end must be 0 or inf, got {end!r}")


def _projection_onto_complement(v):
    v = v / np.linalg.norm(v)
    return np.eye(2) - np.outer(v, v.conj())


def s_asymptotic(C, D, alpha, end):
    """Analytic value of ``S`` at ``kappa = 0`` or ``kappa = inf``.

    Raises
    ------
    DegenerateCase
        Near a clause boundary.
    """
    alpha = check_alpha(alpha)
    clause, info = asymptotic_clause(C, D, alpha, end)
    ea = np.exp(1j * np.pi * alpha)
    sig = np.diag([1j, -1j])
    if clause == "i":
        return np.diag([1 / ea, ea])
    if clause == "ii" or clause == "a":
        return np.diag([ea, 1 / ea])
    if clause == "b":
        return np.diag([1 / ea, ea])
    if clause == "iii":
        P = _projection_onto_complement(info["kernel_D"])
        return (2 * P - np.eye(2)) @ sig
    if clause == "c":
        Pi = _projection_onto_complement(info["kernel_C"])
        return (np.eye(2) - 2 * Pi) @ sig
    if clause in ("iv", "d"):
        return np.diag([1 / ea, 1 / ea])
    return np.diag([ea, ea])


def s_matrix(C, D, alpha, kappa):
    """Scattering matrix at ``kappa`` in ``[0, inf]``; endpoints use :func:`s_asymptotic`."""
    alpha = check_alpha(alpha)
    C, D = require_admissible(C, D)
    kappa = float(kappa)
    if kappa < 0 or np.isnan(kappa):
        raise InputError("kappa must be >= 0")
    if kappa == 0:
        return s_asymptotic(C, D, alpha, 0)
    if kappa == np.inf:
        return s_asymptotic(C, D, alpha, np.inf)
    return s_matrix_grid(to_unitary(C, D), alpha, np.array([kappa]))[0]


@dataclass
class EdgeFunctionSet:
    """The four edge functions of one extension; all methods are vectorized.

    ``gamma1``/``gamma3`` take ``x`` in ``[-inf, inf]`` and ``gamma2``/``gamma4``
    take ``kappa`` in ``[0, inf]``; each returns an array ``(..., 2, 2)``.
    """
    U: np.ndarray
    alpha: float
    s0: np.ndarray
    sinf: np.ndarray

    @property
    def st0(self):
        return self.s0 - np.diag(free_diag(self.alpha))

    @property
    def stinf(self):
        return self.sinf - np.diag(free_diag(self.alpha))

    def _threshold(self, x, st):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        a = self.alpha
        pm = np.stack([phi_minus(0, a, x), phi_minus(-1, a, x)], axis=-1)
        pt = np.stack([phi_tilde(0, a, x), phi_tilde(-1, a, x)], axis=-1)
        out = pt[:, :, None] * st[None]
        out[:, 0, 0] += pm[:, 0]
        out[:, 1, 1] += pm[:, 1]
        return out

    def gamma1(self, x):
        return self._threshold(x, self.st0)

    def gamma3(self, x):
        return self._threshold(x, self.stinf)

    def gamma2(self, kappa):
        k = np.atleast_1d(np.asarray(kappa, dtype=float))
        out = np.empty(k.shape + (2, 2), dtype=complex)
        fin = (k > 0) & np.isfinite(k)
        if np.any(fin):
            out[fin] = s_matrix_grid(self.U, self.alpha, k[fin])
        out[k == 0] = self.s0
        out[k == np.inf] = self.sinf
        return out

    def gamma2_log(self, logk):
        """``S`` at ``kappa = exp(logk)``; ``logk = -inf`` and ``+inf`` give the endpoint limits."""
        v = np.atleast_1d(np.asarray(logk, dtype=float))
        out = np.empty(v.shape + (2, 2), dtype=complex)
        fin = np.isfinite(v)
        if np.any(fin):
            out[fin] = s_matrix_logk(self.U, self.alpha, v[fin])
        out[v == -np.inf] = self.s0
        out[v == np.inf] = self.sinf
        return out

    def gamma4(self, kappa):
        k = np.atleast_1d(np.asarray(kappa, dtype=float))
        return np.broadcast_to(np.eye(2, dtype=complex), k.shape + (2, 2)).copy()


def gamma_edges(C, D, alpha):
    """Edge functions ``Gamma_1..Gamma_4`` of an admissible pair."""
    alpha = check_alpha(alpha)
    C, D = require_admissible(C, D)
    U = to_unitary(C, D)
    Cu, Du = from_unitary(U)
    return EdgeFunctionSet(U=U, alpha=alpha,
                           s0=s_asymptotic(Cu, Du, alpha, 0),
                           sinf=s_asymptotic(Cu, Du, alpha, np.inf))
