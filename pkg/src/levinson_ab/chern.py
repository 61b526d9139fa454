"""Bound-state bundle over the conjugation orbit X = {V diag(l1, l2) V*} and its pairings.

Points of X are written with ``rho = sin(beta)``, ``beta in [0, pi/2]``; in
that chart ``rho (1 - rho^2)^{1/2} = sin(2 beta)/2`` and the unitary is smooth
up to both poles, which is what the finite-difference and lattice routes
need.  ``ManifoldPoint`` still carries ``rho``.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BracketFailure, InputError, NonConvergence, VortexOnPlaquette
from .extensions import check_alpha, from_unitary
from .scattering import gamma_edges
from .weyl_spectrum import weyl_diag_logt

LOGT_BRACKET = (np.log(1e-14 / 4), np.log(1e14 / 4))
TRACE3_ORIENTATION = -1.0


@dataclass(frozen=True)
class ManifoldSpec:
    l1: complex
    l2: complex
    alpha: float

    def __post_init__(self):
        check_alpha(self.alpha)
        for lam in (self.l1, self.l2):
            if abs(abs(lam) - 1) > 1e-12:
                raise InputError(f"|lambda| = {abs(lam)!r} is not 1")
        if not (np.imag(self.l1) < 0 < np.imag(self.l2)):
            raise InputError("need Im l1 < 0 < Im l2")

    @property
    def r1(self):
        return float(np.tan(np.angle(self.l1) / 2))

    @property
    def r2(self):
        return float(np.tan(np.angle(self.l2) / 2))


@dataclass(frozen=True)
class ManifoldPoint:
    rho: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise InputError(f"rho = {self.rho} outside [0, 1]")

    @property
    def beta(self):
        return float(np.arcsin(self.rho))

    @property
    def at_pole(self):
        return self.rho in (0.0, 1.0)

    @classmethod
    def from_beta(cls, beta, phi):
        return cls(float(np.clip(np.sin(beta), 0.0, 1.0)), float(phi))


@dataclass
class ChernResult:
    value: float
    method: str
    grid: dict
    integer_residual: float
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {"value": float(self.value), "rounded": int(round(self.value)),
                "method": self.method, "grid": dict(self.grid),
                "integer_residual": float(self.integer_residual), **self.extra}


def _result(value, method, grid, **extra):
    return ChernResult(float(value), method, grid, float(abs(value - round(value))), extra)


def _chart(beta):
    beta = np.asarray(beta, dtype=float)
    return np.sin(beta) ** 2, np.cos(beta) ** 2, 0.5 * np.sin(2 * beta)


def manifold_unitary_beta(spec, beta, phi):
    """The orbit unitary at ``rho = sin(beta)``; broadcasts over ``beta`` and ``phi``."""
    s2, c2, sc = _chart(beta)
    phi = np.asarray(phi, dtype=float)
    s2, c2, sc, phi = np.broadcast_arrays(s2, c2, sc, phi)
    U = np.empty(s2.shape + (2, 2), dtype=complex)
    dl = spec.l1 - spec.l2
    U[..., 0, 0] = s2 * spec.l1 + c2 * spec.l2
    U[..., 0, 1] = sc * np.exp(1j * phi) * dl
    U[..., 1, 0] = sc * np.exp(-1j * phi) * dl
    U[..., 1, 1] = c2 * spec.l1 + s2 * spec.l2
    return U


def manifold_unitary(spec, pt):
    """Orbit unitary with entries ``rho^2 l1 + (1-rho^2) l2``, ``rho (1-rho^2)^{1/2} e^{+-i phi} (l1 - l2)``."""
    rho = pt.rho
    s = np.sqrt(max(0.0, 1 - rho * rho))
    dl = spec.l1 - spec.l2
    return np.array([
        [rho ** 2 * spec.l1 + (1 - rho ** 2) * spec.l2, rho * s * np.exp(1j * pt.phi) * dl],
        [rho * s * np.exp(-1j * pt.phi) * dl, (1 - rho ** 2) * spec.l1 + rho ** 2 * spec.l2],
    ])


def _abf(spec, rho2, f):
    r1, r2 = spec.r1, spec.r2
    a = rho2 * r1 + (1 - rho2) * r2
    b = (1 - rho2) * r1 + rho2 * r2
    return a, b, f * (r1 - r2)


def _solve_logt(spec, rho2, f):
    a, b, ff = _abf(spec, rho2, f)

    def F(lt):
        m1, m2 = weyl_diag_logt(spec.alpha, lt)
        return float((m1 + a) * (m2 + b) - ff * ff)

    lo, hi = LOGT_BRACKET
    flo, fhi = F(lo), F(hi)
    if not (flo < 0 < fhi):
        if flo == 0:
            return lo
        raise BracketFailure(f"no sign change for -z in [1e-14, 1e14] (F = {flo:.3g}, {fhi:.3g})")
    return brentq(F, lo, hi, xtol=1e-13, rtol=1e-14, maxiter=500)


def solve_z(spec, pt):
    """The single negative ``z`` with ``(M11 + a)(M22 + b) = (r1 - r2)^2 (1 - rho^2) rho^2``."""
    rho = pt.rho
    lt = _solve_logt(spec, rho * rho, rho * np.sqrt(max(0.0, 1 - rho * rho)))
    return -4.0 * float(np.exp(lt))


def _g_from_logt(spec, rho2, f, phi, lt):
    a, b, ff = _abf(spec, rho2, f)
    m1, m2 = weyl_diag_logt(spec.alpha, lt)
    return np.array([[m1 + a, ff * np.exp(1j * phi)], [ff * np.exp(-1j * phi), m2 + b]])


def g_matrix(spec, pt):
    """``M(z) + T(U)`` at the bound-state energy; Hermitian and of rank one."""
    rho2 = pt.rho ** 2
    f = pt.rho * np.sqrt(max(0.0, 1 - rho2))
    lt = _solve_logt(spec, rho2, f)
    return _g_from_logt(spec, rho2, f, pt.phi, lt)


def fgh(spec, pt):
    """``f``, ``g`` and ``h`` of the bound-state condition ``g h = f^2``."""
    G = g_matrix(spec, pt)
    f = pt.rho * np.sqrt(max(0.0, 1 - pt.rho ** 2)) * (spec.r1 - spec.r2)
    return f, G[0, 0].real, G[1, 1].real


def boundary_integrand(spec, eps, nphi=256):
    """``f^2/(f^2 + g^2)`` on the circle ``rho = eps`` at ``nphi`` equally spaced angles."""
    phis = 2 * np.pi * np.arange(nphi) / nphi
    vals = np.empty(nphi)
    for i, ph in enumerate(phis):
        f, g, _ = fgh(spec, ManifoldPoint(eps, ph))
        vals[i] = f * f / (f * f + g * g)
    return phis, vals


def chern_boundary(spec, eps_list=(0.16, 0.08, 0.04, 0.02, 0.01), nphi=256):
    """Chern number of the bound-state bundle from the small circle around ``rho = 0``.

    ``ch(E) = (1/2 pi) lim_{eps -> 0} int f^2/(f^2 + g^2) dphi``; the circle
    integrals (trapezoid, exact for periodic data up to aliasing) are
    extrapolated to ``eps = 0`` by Richardson's scheme in ``eps^2``.
    """
    eps = np.asarray(eps_list, dtype=float)
    if eps.size < 2 or np.any(eps <= 0) or np.any(eps > 0.2) or np.any(np.diff(eps) >= 0):
        raise InputError("eps_list must be decreasing values in (0, 0.2]")
    if nphi < 256:
        raise InputError("nphi must be at least 256")
    vals = []
    for e in eps:
        _, w = boundary_integrand(spec, e, nphi)
        vals.append(w.mean())            # (1/2pi) * trapezoid over the circle
    # Neville table in h = eps^2
    h = eps ** 2
    table = [np.array(vals)]
    for k in range(1, eps.size):
        prev = table[-1]
        table.append((h[k:] * prev[:-1] - h[:-k] * prev[1:]) / (h[k:] - h[:-k]))
    diag = np.array([t[-1] for t in table])
    if abs(diag[-1] - diag[-2]) > 1e-4:
        raise NonConvergence(f"extrapolation not settled: {diag[-2]:.8f} vs {diag[-1]:.8f}")
    return _result(diag[-1], "boundary_integral",
                   {"eps": [float(e) for e in eps], "nphi": int(nphi)},
                   raw=[float(v) for v in vals], extrapolated=[float(d) for d in diag])


def kernel_vector(G):
    """Unit right-singular vector of the smallest singular value."""
    _, _, vh = np.linalg.svd(G)
    return vh[-1].conj()


def kernel_field(spec, n_beta, n_phi):
    """Kernel vectors of ``G`` on the ``beta x phi`` lattice, poles included.

    The pole rows use the exact kernels ``e1`` (rho = 0) and ``e2`` (rho = 1).
    """
    betas = np.linspace(0.0, np.pi / 2, n_beta + 1)
    phis = 2 * np.pi * np.arange(n_phi) / n_phi
    psi = np.empty((betas.size, n_phi, 2), dtype=complex)
    psi[0] = [1.0, 0.0]
    psi[-1] = [0.0, 1.0]
    for i in range(1, betas.size - 1):
        s2, c2, sc = _chart(betas[i])
        lt = _solve_logt(spec, float(s2), float(sc))
        for j, ph in enumerate(phis):
            psi[i, j] = kernel_vector(_g_from_logt(spec, float(s2), float(sc), ph, lt))
    return betas, phis, psi


def _links(a, b):
    ov = np.sum(a.conj() * b, axis=-1)
    mag = np.abs(ov)
    out = np.ones_like(ov)
    ok = mag > 0
    out[ok] = ov[ok] / mag[ok]
    return out


def plaquette_flux(psi, orientation=1):
    """Lattice field strength ``arg(U_phi U_beta U_phi^-1 U_beta^-1)`` per plaquette.

    Axis 0 of ``psi`` is ``beta`` (open), axis 1 is ``phi`` (periodic).  The
    loop runs ``phi`` first, then ``beta``; ``orientation = -1`` reverses it.
    """
    nxt = np.roll(psi, -1, axis=1)
    u_phi = _links(psi, nxt)                   # (nb+1, nphi)
    u_beta = _links(psi[:-1], psi[1:])         # (nb, nphi)
    loop = u_phi[:-1] * np.roll(u_beta, -1, axis=1) * np.conj(u_phi[1:]) * np.conj(u_beta)
    flux = np.angle(loop)
    return flux if orientation > 0 else -flux


def chern_lattice(spec, grid=(64, 64), orientation=1, psi_field=None):
    """Chern number of the kernel bundle by the plaquette (lattice field-strength) method.

    Parameters
    ----------
    grid : (int, int)
        ``(N_beta, N_phi)``, both at least 32.  The pole rows close the
        surface, so the flux sum is an integer multiple of 2 pi.
    orientation : {1, -1}
        ``-1`` reverses the orientation (``phi -> -phi``).
    psi_field : ndarray, optional
        Precomputed unit vectors ``(N_beta + 1, N_phi, 2)``; used for tests
        with a prescribed bundle.

    Raises
    ------
    VortexOnPlaquette
        If some plaquette carries a flux within 0.1 of pi.
    """
    nb, nphi = grid
    if nb < 32 or nphi < 32:
        raise InputError("lattice needs at least 32 x 32 sites")
    if psi_field is None:
        betas, phis, psi = kernel_field(spec, nb, nphi)
    else:
        psi = np.asarray(psi_field)
        betas = np.linspace(0.0, np.pi / 2, psi.shape[0])
        phis = 2 * np.pi * np.arange(psi.shape[1]) / psi.shape[1]
    flux = plaquette_flux(psi, orientation)
    worst = float(np.abs(flux).max())
    if worst >= np.pi - 0.1:
        raise VortexOnPlaquette(f"plaquette flux {worst:.3f} too close to pi; refine the grid")
    total = flux.sum() / (2 * np.pi)
    bc = 0.5 * (betas[:-1] + betas[1:])
    pc = phis + np.pi / nphi
    curv = [(float(np.sin(b)), float(p), float(flux[i, j]))
            for i, b in enumerate(bc) for j, p in enumerate(pc)]
    return _result(total, "lattice_plaquette",
                   {"n_beta": int(nb), "n_phi": int(nphi), "chart": "rho = sin(beta)"},
                   max_plaquette_flux=worst, orientation=int(orientation), curvature=curv)


def chern_lattice_flux_csv(result):
    """CSV lines ``rho,phi,flux`` for the plaquettes of a lattice result."""
    lines = ["rho,phi,flux"]
    lines += [f"{r:.12g},{p:.12g},{f:.12g}" for r, p, f in result.extra["curvature"]]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- degree 3

def _kappa_of_t(t, alpha):
    """``log kappa`` on the compactified B2 coordinate ``t in [0, 1]``.

    ``kappa = (t/(1-t))^{1/gamma}`` with ``gamma = 2 min(alpha, 1-alpha)``, so
    ``S`` approaches its end values linearly in ``t``.
    """
    gam = 2 * min(alpha, 1 - alpha)
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return (np.log(t) - np.log1p(-t)) / gam


def _x_of_t(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        x = np.tan(np.pi * (t - 0.5))
    x = np.where(t <= 0, -np.inf, np.where(t >= 1, np.inf, x))
    return x


def _edge_values(edges, edge, t):
    """Gamma on one edge at loop parameter ``t`` in [0, 1] (traversal direction)."""
    if edge == "B1":
        return edges.gamma1(_x_of_t(t))
    if edge == "B2":
        return edges.gamma2_log(_kappa_of_t(t, edges.alpha))
    if edge == "B3":
        return edges.gamma3(_x_of_t(1 - t))
    if edge == "B4":
        return edges.gamma4(np.zeros_like(t))
    raise InputError(f"unknown edge {edge!r}")


def gamma_on_slab(spec, edge, betas, phis, ts):
    """``Gamma`` on the grid ``beta x phi x t`` of one slab, shape ``(nb, nphi, nt, 2, 2)``."""
    ts = np.asarray(ts, dtype=float)
    out = np.empty((len(betas), len(phis), len(ts), 2, 2), dtype=complex)
    for i, b in enumerate(betas):
        for j, p in enumerate(phis):
            U = manifold_unitary_beta(spec, b, p)
            edges = gamma_edges(*from_unitary(U), spec.alpha)
            out[i, j] = _edge_values(edges, edge, ts)
    return out


def _grad(G, h, axis, periodic):
    if periodic:
        return (np.roll(G, -1, axis=axis) - np.roll(G, 1, axis=axis)) / (2 * h)
    return np.gradient(G, h, axis=axis, edge_order=2)


def three_form_density(G, dG):
    """``eps^{abc} tr[G* d_a G d_b G* d_c G]`` from a list of three partial derivatives."""
    Gs = np.conj(np.swapaxes(G, -1, -2))
    dGs = [np.conj(np.swapaxes(d, -1, -2)) for d in dG]
    out = np.zeros(G.shape[:-2], dtype=complex)
    perms = [((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
             ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)]
    for (a, b, c), sgn in perms:
        prod = Gs @ dG[a] @ dGs[b] @ dG[c]
        out += sgn * np.trace(prod, axis1=-2, axis2=-1)
    return out


def _trap_weights(n, h):
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return w


def slab_integral(spec, edge, n_beta, n_phi, n_t, reverse=False):
    """``(1/24 pi^2) int tr[G* dG ^ dG* ^ dG]`` over ``X x edge`` in the chart ``(beta, phi, t)``."""
    betas = np.linspace(0.0, np.pi / 2, n_beta)
    phis = 2 * np.pi * np.arange(n_phi) / n_phi
    ts = np.linspace(0.0, 1.0, n_t)
    G = gamma_on_slab(spec, edge, betas, phis, ts)
    if reverse:
        G = G[:, :, ::-1]
    hb, hp, ht = betas[1] - betas[0], phis[1] - phis[0], ts[1] - ts[0]
    dG = [_grad(G, hb, 0, False), _grad(G, hp, 1, True), _grad(G, ht, 2, False)]
    dens = three_form_density(G, dG)
    w = (_trap_weights(n_beta, hb)[:, None, None] * hp
         * _trap_weights(n_t, ht)[None, None, :])
    return float(np.real(np.sum(dens * w))) / (24 * np.pi ** 2)


EDGES = ("B1", "B2", "B3", "B4")


def trace3_degree(spec, grid=(48, 48, 96), reverse=False, check_doubling=False):
    """Degree-3 pairing ``(1/24 pi^2) int_{X x loop} tr[G* dG ^ dG* ^ dG]``.

    Each of the four slabs ``X x B_k`` is integrated with second-order finite
    differences and the trapezoid rule in ``(beta, phi, t)``, ``t`` following
    the loop traversal; ``reverse`` traverses the loop backwards.  The
    coordinate orientation is multiplied by ``TRACE3_ORIENTATION``.

    Returns
    -------
    dict
        ``value``, the per-slab parts and the orientation; with
        ``check_doubling`` also the value on the doubled grid.

    Raises
    ------
    NonConvergence
        If ``check_doubling`` and the doubled grid moves the value by more than 0.02.
    """
    nb, nphi, nt = grid
    parts = {e: TRACE3_ORIENTATION * slab_integral(spec, e, nb, nphi, nt, reverse) for e in EDGES}
    value = sum(parts.values())
    out = {"value": float(value), "parts": parts, "grid": list(grid),
           "orientation": "(beta, phi, t) with t along the loop, sign %+d" % TRACE3_ORIENTATION,
           "reversed": bool(reverse)}
    if check_doubling:
        fine = trace3_degree(spec, (2 * nb, 2 * nphi, 2 * nt), reverse)["value"]
        out["doubled"] = fine
        if abs(fine - value) > 0.02:
            raise NonConvergence(f"grid doubling moved the value from {value:.4f} to {fine:.4f}")
    return out


def continuity_modulus(spec, pt, pt2, n=1000):
    """``max_kappa max_ij |S^U(kappa) - S^U'(kappa)|`` over a log grid plus both endpoints."""
    lk = np.concatenate([[-np.inf], np.linspace(np.log(1e-8), np.log(1e8), n - 2), [np.inf]])
    vals = []
    for p in (pt, pt2):
        U = manifold_unitary(spec, p)
        edges = gamma_edges(*from_unitary(U), spec.alpha)
        vals.append(edges.gamma2_log(lk))
    return float(np.abs(vals[0] - vals[1]).max())
