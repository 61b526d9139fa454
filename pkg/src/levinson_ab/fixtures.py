"""Constructed extensions for every row of the case table and every endpoint clause.

Rows with an invertible ``D`` use ``(C, D) = (E, 1)``.  Rows with
``dim ker D = 1`` use ``U = -p p* + e^{i theta} q q*`` with ``q`` orthogonal to
``p``; then ``ker D = span(p)`` and the sign of ``ell`` is opposite to the
sign of ``theta``.
"""
from dataclasses import dataclass

import numpy as np

from .extensions import from_unitary

GENERIC_P = np.array([0.6, 0.8j])


@dataclass(frozen=True)
class Fixture:
    label: str
    C: np.ndarray
    D: np.ndarray
    alpha: float


def kernel_d_unitary(p, theta):
    """Unitary with eigenvalue -1 on ``p`` and ``e^{i theta}`` on its complement."""
    p = np.asarray(p, dtype=complex)
    p = p / np.linalg.norm(p)
    q = np.array([-np.conj(p[1]), np.conj(p[0])])
    return -np.outer(p, p.conj()) + np.exp(1j * theta) * np.outer(q, q.conj())


def kernel_c_unitary(p, theta):
    """Unitary with eigenvalue +1 on ``p`` (so ``ker C = span(p)``) and ``e^{i theta}`` elsewhere."""
    return -kernel_d_unitary(p, theta + np.pi)


def _pair_from_e(E):
    return np.asarray(E, dtype=complex), np.eye(2, dtype=complex)


def _pair_from_u(U):
    return from_unitary(U)


E1 = np.array([[1.0, 1.0], [1.0, 1.0]])
_E_ROWS = [
    ("II.1", np.diag([1.0, 2.0]), 0.3),
    ("II.2", [[1.0, 2.0], [2.0, 1.0]], 0.3),
    ("II.3", -np.eye(2), 0.3),
    ("II.4", [[-1.0, 2.0], [2.0, -1.0]], 0.3),
    ("II.5", [[0.0, 1.0], [1.0, 0.0]], 0.3),
    ("II.6", np.diag([1.0, -2.0]), 0.3),
    ("II.7.a", np.diag([0.0, 1.0]), 0.3),
    ("II.7.b", E1, 0.3),
    ("II.8.a", np.diag([0.0, -1.0]), 0.3),
    ("II.8.b", -E1, 0.3),
    ("II.9.a", np.diag([1.0, 0.0]), 0.7),
    ("II.9.b", E1, 0.7),
    ("II.10.a", np.diag([-1.0, 0.0]), 0.7),
    ("II.10.b", -E1, 0.7),
    ("II.11", E1, 0.5),
    ("II.12", -E1, 0.5),
]

E_1 = np.array([1.0, 0.0])
E_2 = np.array([0.0, 1.0])
_U_ROWS = [
    # label, kernel direction p, theta (theta < 0 gives ell > 0), alpha
    ("IV.1", GENERIC_P, -np.pi / 2, 0.5),
    ("IV.2", GENERIC_P, 0.0, 0.5),
    ("IV.3", E_1, np.pi / 2, 0.5),
    ("IV.4", GENERIC_P, np.pi / 2, 0.3),
    ("IV.5", E_2, np.pi / 2, 0.3),
    ("IV.6", GENERIC_P, -np.pi / 2, 0.3),
    ("IV.7", E_2, -np.pi / 2, 0.3),
    ("IV.8", GENERIC_P, 0.0, 0.3),
    ("IV.9.a", E_2, 0.0, 0.3),
    ("IV.9.b", E_1, 0.0, 0.3),
    ("IV.10", GENERIC_P, np.pi / 2, 0.7),
    ("IV.11", E_1, np.pi / 2, 0.7),
    ("IV.12", GENERIC_P, -np.pi / 2, 0.7),
    ("IV.13", E_1, -np.pi / 2, 0.7),
    ("IV.14", GENERIC_P, 0.0, 0.7),
    ("IV.15.a", E_2, 0.0, 0.7),
    ("IV.15.b", E_1, 0.0, 0.7),
]


def table_fixtures():
    """One admissible pair per table row, in table order."""
    out = [Fixture("I", np.eye(2, dtype=complex), np.zeros((2, 2), dtype=complex), 0.3)]
    for label, E, a in _E_ROWS:
        out.append(Fixture(label, *_pair_from_e(E), a))
    out.append(Fixture("III", np.zeros((2, 2), dtype=complex), np.eye(2, dtype=complex), 0.3))
    for label, p, theta, a in _U_ROWS:
        out.append(Fixture(label, *_pair_from_u(kernel_d_unitary(p, theta)), a))
    return out


def clause_fixtures():
    """One pair per endpoint clause: ``clause -> (C, D, alpha, end)``.

    Clauses with a generic kernel direction approach their limit like
    ``kappa^{+-|1 - 2 alpha|}``, so those fixtures use alpha = 0.2 / 0.8.
    """
    I2 = np.eye(2, dtype=complex)
    Z2 = np.zeros((2, 2), dtype=complex)
    out = {
        "i": (I2, Z2, 0.3, np.inf),
        "ii": (*_pair_from_e(np.diag([1.0, 2.0])), 0.3, np.inf),
        "iii": (*_pair_from_u(kernel_d_unitary(GENERIC_P, -np.pi / 2)), 0.5, np.inf),
        "iv": (*_pair_from_u(kernel_d_unitary(GENERIC_P, np.pi / 2)), 0.2, np.inf),
        "v": (*_pair_from_u(kernel_d_unitary(GENERIC_P, np.pi / 2)), 0.8, np.inf),
        "a": (Z2, I2, 0.3, 0.0),
        "b": (*_pair_from_e(np.diag([1.0, 2.0])), 0.3, 0.0),
        "c": (*_pair_from_u(kernel_c_unitary(GENERIC_P, np.pi / 2)), 0.5, 0.0),
        "d": (*_pair_from_u(kernel_c_unitary(GENERIC_P, np.pi / 2)), 0.8, 0.0),
        "e": (*_pair_from_u(kernel_c_unitary(GENERIC_P, np.pi / 2)), 0.2, 0.0),
    }
    return out
