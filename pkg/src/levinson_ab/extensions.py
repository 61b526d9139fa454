"""Parametrization and case classification of the self-adjoint extensions.

An extension is given either by an admissible pair ``(C, D)`` of 2x2 complex
matrices (``C D*`` self-adjoint, ``C C* + D D*`` invertible) or by a unitary
``U``.  The two are related by ``C = (1 - U)/2``, ``D = (i/2)(1 + U)`` up to a
left multiplication ``(C, D) -> (V C, V D)`` with ``V`` invertible.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import schur

from .errors import DegenerateCase, InputError, KernelDimension

I2 = np.eye(2, dtype=complex)

# |q| <= ZERO_TOL: structural zero; ZERO_TOL < |q| <= GRAY_TOL: ambiguous.
ZERO_TOL = 1e-12
GRAY_TOL = 1e-9


@dataclass(frozen=True)
class AdmissibilityCheck:
    ok: bool
    hermitian_residual: float
    gram_det: float


@dataclass
class CaseLabel:
    label: str
    phi: tuple
    bound_count: int
    E: Optional[np.ndarray] = None
    ell: Optional[float] = None
    p: Optional[np.ndarray] = None
    kernel_C: Optional[np.ndarray] = None
    kernel_D: Optional[np.ndarray] = None
    extra: dict = field(default_factory=dict)

    @property
    def phi_sum(self):
        return float(sum(self.phi))

    def to_dict(self):
        out = {"label": self.label,
               "phi": [float(v) for v in self.phi],
               "phi_sum": self.phi_sum,
               "bound_count": int(self.bound_count)}
        if self.E is not None:
            out["E"] = matrix_to_json(self.E)
        if self.ell is not None:
            out["ell"] = float(self.ell)
        if self.p is not None:
            out["p"] = [[float(v.real), float(v.imag)] for v in self.p]
        return out


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in M]


def as_matrix(M):
    M = np.asarray(M, dtype=complex)
    if M.shape != (2, 2):
        raise InputError(f"expected a 2x2 matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InputError("matrix has non-finite entries")
    return M


def is_admissible(C, D, tol=1e-10):
    """Check the two admissibility conditions.

    Returns
    -------
    AdmissibilityCheck
        ``ok`` together with the self-adjointness residual of ``C D*`` and
        ``|det(C C* + D D*)|``.
    """
    C, D = as_matrix(C), as_matrix(D)
    K = C @ D.conj().T
    herm = float(np.linalg.norm(K - K.conj().T, 2))
    gram = float(abs(np.linalg.det(C @ C.conj().T + D @ D.conj().T)))
    scale = 1.0 + np.linalg.norm(C, 2) * np.linalg.norm(D, 2)
    return AdmissibilityCheck(herm <= tol * scale and gram > tol, herm, gram)


def require_admissible(C, D):
    chk = is_admissible(C, D)
    if not chk.ok:
        raise InputError(
            f"pair is not admissible (hermitian residual {chk.hermitian_residual:.3g}, "
            f"|det(CC*+DD*)| {chk.gram_det:.3g})")
    return as_matrix(C), as_matrix(D)


def from_unitary(U, tol=1e-10):
    """Canonical pair ``(C, D) = ((1-U)/2, (i/2)(1+U))``."""
    U = as_matrix(U)
    res = np.linalg.norm(U.conj().T @ U - I2, 2)
    if res > tol:
        raise InputError(f"U is not unitary (residual {res:.3g})")
    return 0.5 * (I2 - U), 0.5j * (I2 + U)


def to_unitary(C, D):
    """Unitary ``U`` of an admissible pair: ``U = -(C - iD)^{-1} (C + iD)``.

    ``C - iD`` is invertible for admissible pairs since
    ``(C - iD)(C - iD)* = C C* + D D*`` when ``C D*`` is self-adjoint.
    """
    C, D = as_matrix(C), as_matrix(D)
    U = -np.linalg.solve(C - 1j * D, C + 1j * D)
    # polar projection removes rounding drift off U(2)
    W, _, Vh = np.linalg.svd(U)
    return W @ Vh


def canonical_pair(C, D):
    return from_unitary(to_unitary(C, D))


def negative_count_cdstar(C, D):
    """Number of eigenvalues of ``C D*`` below ``-tau``, ``tau = 1e-10 (1 + ||C D*||)``."""
    C, D = as_matrix(C), as_matrix(D)
    K = C @ D.conj().T
    K = 0.5 * (K + K.conj().T)
    tau = 1e-10 * (1.0 + np.linalg.norm(K, 2))
    return int(np.sum(np.linalg.eigvalsh(K) < -tau))


def negative_count_unitary(U):
    """Same count computed from ``i(U - U*)/4``."""
    U = as_matrix(U)
    K = 0.25j * (U - U.conj().T)
    K = 0.5 * (K + K.conj().T)
    tau = 1e-10 * (1.0 + np.linalg.norm(K, 2))
    return int(np.sum(np.linalg.eigvalsh(K) < -tau))


def random_unitary(seed):
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    Q, R = np.linalg.qr(Z)
    # fix the column phases so the map seed -> U is well defined
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_pair(seed):
    """Deterministic admissible pair from a seeded Gaussian unitary."""
    return from_unitary(random_unitary(seed))


def check_alpha(alpha):
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def _sign(q, what):
    """Three-way sign with a gray zone that raises DegenerateCase."""
    a = abs(q)
    if a <= ZERO_TOL:
        return 0
    if a <= GRAY_TOL:
        raise DegenerateCase(f"{what} = {q:.3e} is within {GRAY_TOL:g} of zero")
    return 1 if q > 0 else -1


def alpha_side(alpha):
    """-1, 0, +1 according to alpha <, =, > 1/2."""
    return _sign(check_alpha(alpha) - 0.5, "alpha - 1/2")


def _unit_kernel_vector(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    k = 0 if abs(v[0]) > ZERO_TOL else 1
    return v * (abs(v[k]) / v[k])


def eigen_split(U):
    """Eigenvalues and orthonormal eigenvectors of a unitary (complex Schur form)."""
    T, Z = schur(as_matrix(U), output="complex")
    lam = np.diag(T)
    return lam / np.abs(lam), Z


def kernel_data(U):
    """Ranks and kernel vectors of ``C(U)`` and ``D(U)``.

    Returns a dict with ``rank_C``, ``rank_D`` and unit vectors spanning the
    one-dimensional kernels when they occur.
    """
    lam, V = eigen_split(U)
    d = np.abs(1 + lam) / 2  # singular values of D(U)
    c = np.abs(1 - lam) / 2  # singular values of C(U)
    info = {"lambda": lam, "vectors": V}
    for name, sv in (("D", d), ("C", c)):
        signs = [_sign(s, f"singular value of {name}") for s in sv]
        zero = [j for j in range(2) if signs[j] == 0]
        info["rank_" + name] = 2 - len(zero)
        info["kernel_" + name] = _unit_kernel_vector(V[:, zero[0]]) if len(zero) == 1 else None
    return info


def ell_and_kernel(C, D, alpha):
    """Coupling ``ell`` and kernel direction ``p`` when ``dim ker D = 1``.

    ``p`` spans ``ker D`` with its first nonzero component real positive;
    ``ell = -(pi / (2 sin(pi alpha))) tan(theta / 2)`` with ``e^{i theta}``
    the eigenvalue of ``U`` other than ``-1``.
    """
    alpha = check_alpha(alpha)
    U = to_unitary(C, D)
    info = kernel_data(U)
    if info["rank_D"] != 1:
        raise KernelDimension(f"dim ker D = {2 - info['rank_D']}, expected 1")
    # other eigenvalue is -det U because the product of both is det U
    other = -np.linalg.det(U)
    theta = np.angle(other)
    ell = -np.pi / (2 * np.sin(np.pi * alpha)) * np.sin(theta) / (1 + np.cos(theta))
    return float(ell), info["kernel_D"]


def _entry_sign(q, scale, what):
    return _sign(q / scale, what)


def _table_phases(label, alpha):
    a = alpha
    tp = 2 * np.pi
    pi = np.pi
    table = {
        "I": (0, 0, 0, 0),
        "III": (tp, 0, -tp, 0),
        "II.1": (0, tp, -tp, 0),
        "II.2": (0, 0, -tp, 1),
        "II.3": (0, -tp, -tp, 2),
        "II.4": (0, 0, -tp, 1),
        "II.5": (0, 0, -tp, 1),
        "II.6": (0, 0, -tp, 1),
        "II.7": (tp * a, tp * (1 - a), -tp, 0),
        "II.8": (tp * a, -tp * a, -tp, 1),
        "II.9": (tp * (1 - a), tp * a, -tp, 0),
        "II.10": (tp * (1 - a), -tp * (1 - a), -tp, 1),
        "II.11": (pi, pi, -tp, 0),
        "II.12": (pi, -pi, -tp, 1),
        "IV.1": (0, pi, -pi, 0),
        "IV.2": (pi, 0, -pi, 0),
        "IV.3": (0, -pi, -pi, 1),
        "IV.4": (0, -tp * a, -tp * (1 - a), 1),
        "IV.5": (0, -tp * (1 - a), -tp * a, 1),
        "IV.6": (0, tp * (1 - a), -tp * (1 - a), 0),
        "IV.7": (0, tp * a, -tp * a, 0),
        "IV.8": (tp * a, tp * (1 - 2 * a), -tp * (1 - a), 0),
        "IV.9.a": (tp * a, 0, -tp * a, 0),
        "IV.9.b": (tp * (1 - a), 0, -tp * (1 - a), 0),
        "IV.10": (0, -tp * (1 - a), -tp * a, 1),
        "IV.11": (0, -tp * a, -tp * (1 - a), 1),
        "IV.12": (0, tp * a, -tp * a, 0),
        "IV.13": (0, tp * (1 - a), -tp * (1 - a), 0),
        "IV.14": (tp * (1 - a), -tp * (1 - 2 * a), -tp * a, 0),
        "IV.15.a": (tp * a, 0, -tp * a, 0),
        "IV.15.b": (tp * (1 - a), 0, -tp * (1 - a), 0),
    }
    key = label
    if key not in table:
        key = label.rsplit(".", 1)[0]  # II.7.a -> II.7
    p1, p2, p3, n = table[key]
    return (float(p1), float(p2), float(p3)), int(n)


def table_prediction(label, alpha):
    """Predicted (phi_1, phi_2, phi_3) and bound-state count of a table row."""
    return _table_phases(label, check_alpha(alpha))


def _classify_regular_D(C, D, alpha):
    E = np.linalg.solve(D, C)
    herm = np.linalg.norm(E - E.conj().T, 2)
    scale = 1.0 + np.linalg.norm(E, 2)
    if herm > 1e-8 * scale:
        raise InputError(f"D^-1 C is not self-adjoint (residual {herm:.3g})")
    E = 0.5 * (E + E.conj().T)
    e11, e22 = E[0, 0].real, E[1, 1].real
    s11 = _entry_sign(e11, scale, "e11")
    s22 = _entry_sign(e22, scale, "e22")
    sdet = _entry_sign(np.linalg.det(E).real, scale ** 2, "det E")
    str_ = _entry_sign(e11 + e22, scale, "tr E")
    if sdet != 0:
        if s11 * s22 < 0:
            label = "II.6"
        elif s11 == 0 and s22 == 0:
            label = "II.5"
        elif str_ == 0:
            raise DegenerateCase("tr E vanishes with det E != 0 and e11 e22 >= 0")
        else:
            label = {(1, 1): "II.1", (1, -1): "II.2",
                     (-1, 1): "II.3", (-1, -1): "II.4"}[(str_, sdet)]
    else:
        if s11 == 0:
            label = "II.7.a" if str_ > 0 else "II.8.a"
        elif s22 == 0:
            label = "II.9.a" if str_ > 0 else "II.10.a"
        else:
            side = alpha_side(alpha)
            if side < 0:
                label = "II.7.b" if str_ > 0 else "II.8.b"
            elif side > 0:
                label = "II.9.b" if str_ > 0 else "II.10.b"
            else:
                label = "II.11" if str_ > 0 else "II.12"
    return label, E


def _classify_kernel_D(ell, p, alpha):
    sl = _sign(ell, "ell")
    z1 = _sign(abs(p[0]), "|p1|") == 0
    z2 = _sign(abs(p[1]), "|p2|") == 0
    side = alpha_side(alpha)
    if side == 0:
        return {1: "IV.1", 0: "IV.2", -1: "IV.3"}[sl]
    if side < 0:
        if sl < 0:
            return "IV.5" if z1 else "IV.4"
        if sl > 0:
            return "IV.7" if z1 else "IV.6"
        if z1:
            return "IV.9.a"
        if z2:
            return "IV.9.b"
        return "IV.8"
    if sl < 0:
        return "IV.11" if z2 else "IV.10"
    if sl > 0:
        return "IV.13" if z2 else "IV.12"
    if z1:
        return "IV.15.a"
    if z2:
        return "IV.15.b"
    return "IV.14"


def classify(C, D, alpha):
    """Case label of an admissible pair together with the predicted phases.

    The decision quantities are computed from the canonical pair
    ``(C(U), D(U))`` so that the result does not depend on the gauge
    ``(C, D) -> (V C, V D)``.

    Returns
    -------
    CaseLabel
        ``phi`` holds the predicted ``(phi_1, phi_2, phi_3)``, ``bound_count``
        the predicted number of bound states.

    Raises
    ------
    DegenerateCase
        When a decision quantity lies in the gray zone ``(1e-12, 1e-9]``.
    """
    alpha = check_alpha(alpha)
    C, D = require_admissible(C, D)
    U = to_unitary(C, D)
    Cu, Du = from_unitary(U)
    info = kernel_data(U)
    kwargs = {"kernel_C": info["kernel_C"], "kernel_D": info["kernel_D"]}
    if info["rank_D"] == 0:
        label = "I"
    elif info["rank_C"] == 0:
        label = "III"
    elif info["rank_D"] == 2:
        label, E = _classify_regular_D(Cu, Du, alpha)
        kwargs["E"] = E
    else:
        ell, p = ell_and_kernel(Cu, Du, alpha)
        label = _classify_kernel_D(ell, p, alpha)
        kwargs["ell"], kwargs["p"] = ell, p
    phi, n = _table_phases(label, alpha)
    return CaseLabel(label=label, phi=phi, bound_count=n, **kwargs)
