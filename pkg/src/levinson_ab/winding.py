"""Phase variations along the four edges and the total winding of det Gamma.

Loop order: B1 (x from -inf to +inf, Gamma_1), B2 (kappa from 0 to inf,
Gamma_2), B3 (x from +inf to -inf, Gamma_3), B4 (kappa from inf to 0,
Gamma_4 = 1).  Each edge is sampled on a finite grid plus its exact endpoint
values, so the per-edge variation is exact once every unwrap step is small.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .errors import DegenerateCase, IntegerDrift, NonConvergence
from .extensions import check_alpha, classify, negative_count_cdstar, require_admissible
from .scattering import channel_phase, gamma_edges, log_b_diag, phi_minus, phi_tilde
from .special_fn import _BERNOULLI_EVEN, digamma, phase_steps, unwrap

X_MAX = 40.0
X_LIMIT = 1e8
KAPPA_RANGE = (1e-8, 1e8)
LOG10_KAPPA_LIMIT = 2e4
MAX_SAMPLES = 2 ** 20
ENDPOINT_GAP = 0.25
STEP_MAX = 0.5


def det2(M):
    M = np.asarray(M)
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


@dataclass
class EdgeTrace:
    """Sampled edge in traversal order with the unwrapped det phase."""
    name: str
    params: np.ndarray
    dets: np.ndarray
    args: np.ndarray
    endpoint_gap: float

    @property
    def variation(self):
        return float(self.args[-1] - self.args[0])


def _refine(coord, bad):
    mids = 0.5 * (coord[bad] + coord[bad + 1])
    return np.sort(np.concatenate([coord, mids]))


def _steps(dets):
    return phase_steps(dets)


def trace_edge(fn, lo, hi, n0, end_lo, end_hi, extend, limit, name=""):
    """Adaptive sampling of ``det fn`` on ``[lo, hi]`` plus two exact endpoints.

    An interval is accepted once its det-phase step is below ``STEP_MAX`` and
    equals the sum of the two half steps through its midpoint, which guards
    against a full turn hiding between two samples.  The interior range grows
    by ``extend`` on a side whose last sample is further than
    ``ENDPOINT_GAP`` from the endpoint value.

    Parameters
    ----------
    fn : callable
        Maps an array of interior coordinates to 2x2 matrices.
    lo, hi : float
        Initial interior coordinate range.
    end_lo, end_hi : ndarray
        Matrices at the two (infinite) endpoints.
    extend : float
        Coordinate increment used when an endpoint is not yet reached.
    limit : float
        Maximal ``|coordinate|`` before giving up.

    Returns
    -------
    coord, dets, args, gap
        Interior coordinates, dets including both endpoints, the unwrapped
        args and the larger endpoint gap.
    """
    coord = np.linspace(lo, hi, n0)
    vals = fn(coord)
    checked = np.zeros(coord.size - 1, dtype=bool)

    def insert(new_c, new_v, keep):
        # ``keep`` marks accepted intervals of the current grid; an interval of
        # the new grid stays accepted only if both of its ends are unchanged
        nonlocal coord, vals, checked
        left, right = coord[:-1][keep], coord[1:][keep]
        c = np.concatenate([coord, new_c])
        order = np.argsort(c, kind="stable")
        coord = c[order]
        vals = np.concatenate([vals, new_v])[order]
        if coord.size > MAX_SAMPLES:
            raise NonConvergence(f"edge {name}: more than 2^20 samples")
        j = np.clip(np.searchsorted(left, coord[:-1]), 0, max(left.size - 1, 0))
        if left.size:
            checked = (left[j] == coord[:-1]) & (right[j] == coord[1:])
        else:
            checked = np.zeros(coord.size - 1, dtype=bool)

    while True:
        dets = det2(vals)
        steps = _steps(dets)
        big = np.abs(steps) > STEP_MAX
        if np.any(big):
            i = np.nonzero(big)[0]
            mc = 0.5 * (coord[i] + coord[i + 1])
            insert(mc, fn(mc), checked)
            continue
        todo = np.nonzero(~checked)[0]
        if todo.size:
            mc = 0.5 * (coord[todo] + coord[todo + 1])
            mv = fn(mc)
            md = det2(mv)
            h = _steps(np.stack([dets[todo], md, dets[todo + 1]], axis=-1).reshape(-1, 3).T).T
            bad = (np.abs(h[:, 0] + h[:, 1] - steps[todo]) > 1e-6) | (np.abs(h).max(axis=1) > STEP_MAX)
            keep = checked.copy()
            keep[todo[~bad]] = True
            if np.any(bad):
                insert(mc[bad], mv[bad], keep)
            else:
                checked = keep
            continue
        gap_lo = float(np.abs(vals[0] - end_lo).max())
        gap_hi = float(np.abs(vals[-1] - end_hi).max())
        d_lo = abs(phase_steps(np.array([det2(end_lo), dets[0]]))[0])
        d_hi = abs(phase_steps(np.array([dets[-1], det2(end_hi)]))[0])
        grow_lo = gap_lo > ENDPOINT_GAP or d_lo > STEP_MAX
        grow_hi = gap_hi > ENDPOINT_GAP or d_hi > STEP_MAX
        if grow_lo or grow_hi:
            h0 = coord[1] - coord[0]
            h1 = coord[-1] - coord[-2]
            new = []
            if grow_lo:
                if abs(coord[0]) >= limit:
                    raise NonConvergence(f"edge {name}: endpoint not reached at {coord[0]:g}")
                new.append(np.arange(coord[0] - extend, coord[0] - 0.5 * h0, h0))
            if grow_hi:
                if abs(coord[-1]) >= limit:
                    raise NonConvergence(f"edge {name}: endpoint not reached at {coord[-1]:g}")
                new.append(np.arange(coord[-1] + h1, coord[-1] + extend + 0.5 * h1, h1))
            add = np.concatenate(new)
            insert(add, fn(add), checked)
            continue
        all_dets = np.concatenate([[det2(end_lo)], dets, [det2(end_hi)]])
        track = unwrap(all_dets)
        return coord, all_dets, track.unwrapped_args, max(gap_lo, gap_hi)


def edge_variation(samples):
    """Unwrapped change of ``arg det`` along a sampled path of 2x2 matrices."""
    return unwrap(det2(np.asarray(samples))).variation


def _x_of_u(u):
    return np.sinh(u)


def edge_B1(edges, reverse=False):
    """Gamma_1 along x from -inf to +inf (or back when ``reverse``)."""
    return _threshold_edge(edges.gamma1, "B1", reverse)


def edge_B3(edges, reverse=False):
    """Gamma_3 along x from +inf to -inf (or forward when ``reverse``)."""
    return _threshold_edge(edges.gamma3, "B3", not reverse)


def _threshold_edge(gamma, name, backwards):
    um = np.arcsinh(X_MAX)
    coord, dets, args, gap = trace_edge(
        lambda u: gamma(_x_of_u(u)), -um, um, 161,
        gamma(-np.inf)[0], gamma(np.inf)[0],
        extend=np.log(4.0), limit=np.arcsinh(X_LIMIT), name=name)
    x = np.concatenate([[-np.inf], _x_of_u(coord), [np.inf]])
    if backwards:
        x, dets, args = x[::-1], dets[::-1], args[::-1]
    return EdgeTrace(name, x, dets, args, gap)


SATURATION = 20.0


def kappa_window(alpha):
    """``log kappa`` range outside of which both channels of ``B`` are saturated.

    At the returned ends ``log b_j`` is at most ``-SATURATION`` (left) and at
    least ``+SATURATION`` (right) for both channels, and the window always
    contains ``[1e-8, 1e8]``.
    """
    lb0 = log_b_diag(alpha, np.log(2.0))
    nu = np.array([alpha, 1 - alpha])
    lo = np.log(2.0) + np.min((-SATURATION - lb0) / nu)
    hi = np.log(2.0) + np.max((SATURATION - lb0) / nu)
    return min(lo, np.log(KAPPA_RANGE[0])), max(hi, np.log(KAPPA_RANGE[1]))


def edge_B2(edges, reverse=False):
    """Gamma_2 = S along kappa from 0 to inf (or back when ``reverse``)."""
    lo, hi = kappa_window(edges.alpha)
    n0 = int(round((hi - lo) / np.log(10) * 8)) + 1
    coord, dets, args, gap = trace_edge(
        edges.gamma2_log, lo, hi, n0, edges.s0, edges.sinf,
        extend=4 * np.log(10), limit=np.log(10) * LOG10_KAPPA_LIMIT, name="B2")
    with np.errstate(over="ignore"):
        k = np.concatenate([[0.0], np.exp(coord), [np.inf]])
    if reverse:
        k, dets, args = k[::-1], dets[::-1], args[::-1]
    return EdgeTrace("B2", k, dets, args, gap)


def edge_B4(edges, reverse=False):
    k = np.array([np.inf, 0.0]) if not reverse else np.array([0.0, np.inf])
    dets = det2(edges.gamma4(k))
    return EdgeTrace("B4", k, dets, np.zeros(2), 0.0)


@dataclass
class LevinsonReport:
    phi: tuple
    wind: int
    bound_count: int
    case_label: Optional[str]
    predicted_phi: Optional[tuple]
    max_corner_residual: float
    integer_residual: float
    samples: dict = field(default_factory=dict)
    reversed: bool = False

    @property
    def total(self):
        return float(sum(self.phi))

    def to_dict(self):
        return {
            "phi": [float(v) for v in self.phi],
            "phi_over_pi": [float(v / np.pi) for v in self.phi],
            "wind": int(self.wind),
            "bound_count": int(self.bound_count),
            "case_label": self.case_label,
            "predicted_phi": None if self.predicted_phi is None else [float(v) for v in self.predicted_phi],
            "max_corner_residual": float(self.max_corner_residual),
            "integer_residual": float(self.integer_residual),
            "samples": dict(self.samples),
            "reversed": self.reversed,
        }


def corner_residuals(edges):
    """The four corner mismatches of the loop, evaluated at the exact endpoints."""
    one = np.eye(2)
    pairs = [
        (edges.gamma1(np.inf)[0], edges.gamma2(0.0)[0]),
        (edges.gamma2(np.inf)[0], edges.gamma3(np.inf)[0]),
        (edges.gamma3(-np.inf)[0], edges.gamma4(np.inf)[0]),
        (edges.gamma4(0.0)[0], edges.gamma1(-np.inf)[0]),
        (edges.gamma3(-np.inf)[0], one),
    ]
    return [float(np.abs(a - b).max()) for a, b in pairs]


def loop_traces(C, D, alpha, reverse=False):
    """Sampled edges in traversal order (B1, B2, B3, B4), or reversed."""
    edges = gamma_edges(C, D, alpha)
    traces = [edge_B1(edges, reverse), edge_B2(edges, reverse),
              edge_B3(edges, reverse), edge_B4(edges, reverse)]
    if reverse:
        traces = traces[::-1]
    return edges, traces


def total_winding(C, D, alpha, reverse=False):
    """Per-edge phases, winding number and bound-state count of one extension.

    ``reverse=True`` traverses the loop in the opposite sense; every phase
    and the winding number change sign.

    Raises
    ------
    IntegerDrift
        If the total phase is not within 1e-6 of a multiple of 2 pi.
    """
    alpha = check_alpha(alpha)
    C, D = require_admissible(C, D)
    edges, traces = loop_traces(C, D, alpha, reverse)
    by_name = {t.name: t for t in traces}
    phi = tuple(by_name[n].variation for n in ("B1", "B2", "B3", "B4"))
    raw = sum(phi) / (2 * np.pi)
    wind = int(np.round(raw))
    resid = abs(raw - wind)
    if resid > 1e-6:
        raise IntegerDrift(f"winding {raw:.9f} is not an integer")
    try:
        case = classify(C, D, alpha)
        label, pred = case.label, case.phi
    except DegenerateCase:
        label, pred = None, None
    corner = max(corner_residuals(edges))
    return LevinsonReport(
        phi=phi, wind=wind, bound_count=negative_count_cdstar(C, D),
        case_label=label, predicted_phi=pred, max_corner_residual=corner,
        integer_residual=float(resid),
        samples={t.name: int(len(t.params)) for t in traces}, reversed=reverse)


def levinson_check(C, D, alpha, rtol=1e-6):
    """``wind == -bound_count`` and, when the case is not degenerate, table agreement."""
    rep = total_winding(C, D, alpha)
    ok = rep.wind == -rep.bound_count
    if rep.predicted_phi is not None:
        for got, want in zip(rep.phi[:3], rep.predicted_phi):
            ok = ok and abs(got - want) <= rtol * (1 + abs(want))
    return bool(ok), rep


def _digamma_tail(a, X):
    """Re int_X^inf [psi(a + ix) - ln x] dx from the asymptotic series."""
    # log part: 1/2 int ln(1 + a^2/x^2)
    out = 0.5 * (a * np.pi - X * np.log1p((a / X) ** 2) - 2 * a * np.arctan(X / a))
    # -1/(2z) part
    out -= 0.5 * (0.5 * np.pi - np.arctan(X / a))
    z = a + 1j * X
    for k, b in enumerate(_BERNOULLI_EVEN[:6], start=1):
        n = 2 * k
        out -= b / n * np.real(z ** (1 - n) / (1j * (n - 1)))
    return out


def var_phi_ab(a, b, X=60.0):
    """Total phase change of Gamma(a+ix)/Gamma(a-ix) * Gamma(b-ix)/Gamma(b+ix) over the real line.

    The derivative of the phase is ``2 Re[psi(a+ix) - psi(b+ix)]``, an even
    function; it is integrated numerically on ``[0, X]`` and the remainder on
    ``[X, inf)`` is added in closed form from the asymptotic series of psi.
    """
    a, b = float(a), float(b)
    if a <= 0 or b <= 0:
        raise ValueError("var_phi_ab needs a, b > 0")
    if a == b:
        return 0.0

    def f(x):
        return float(np.real(digamma(a + 1j * x) - digamma(b + 1j * x)))

    pts = sorted({p for p in (a, b, 3 * a, 3 * b, 10 * a, 10 * b, 1.0, 10.0) if 0 < p < X})
    edges = [0.0] + pts + [X]
    body = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = quad(f, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
        body += val
    tail = _digamma_tail(a, X) - _digamma_tail(b, X)
    return 4.0 * (body + tail)


def phi_channel(m, alpha, coef, x):
    """``phi_m(x, coef) = phi^-_m(x) + coef * phi~_m(x)``."""
    return phi_minus(m, alpha, x) + coef * phi_tilde(m, alpha, x)


def channel_variation(m, alpha, coef):
    """Var of ``phi_m(., coef)`` by adaptive unwrapping along the real line."""
    alpha = check_alpha(alpha)
    um = np.arcsinh(X_MAX)

    def fn(u):
        v = phi_channel(m, alpha, coef, _x_of_u(u))
        return np.stack([np.stack([v, np.zeros_like(v)], -1),
                         np.stack([np.zeros_like(v), np.ones_like(v)], -1)], -2)

    lo_end = fn(np.array([-np.inf]))[0]
    hi_end = fn(np.array([np.inf]))[0]
    _, _, args, _ = trace_edge(fn, -um, um, 161, lo_end, hi_end, np.log(4.0),
                               np.arcsinh(X_LIMIT), name=f"phi_{m}")
    return float(args[-1] - args[0])


def corollary_values(alpha):
    """The three threshold identities, each computed two ways.

    Returns a dict ``name -> (via_unwrap, via_var_phi_ab, expected)``.
    """
    alpha = check_alpha(alpha)
    ea = np.exp(1j * np.pi * alpha)
    out = {}
    for m in (0, -1):
        d = channel_phase(m, alpha)
        # phi_m(., 0) reduces to phi_{a1, a2}(x/2)
        ab = var_phi_ab(0.5 * (abs(m) + 1), 0.5 * (abs(m + alpha) + 1))
        out[f"phi_{m}(.,0)"] = (channel_variation(m, alpha, 0), ab, 2 * d)
    out["phi_0(.,e^{ia}-e^{-ia})"] = (
        channel_variation(0, alpha, ea - 1 / ea),
        var_phi_ab(0.5, 0.5 * (1 - alpha)), np.pi * alpha)
    out["phi_-1(.,e^{-ia}-e^{ia})"] = (
        channel_variation(-1, alpha, 1 / ea - ea),
        var_phi_ab(1.0, 0.5 * alpha), np.pi * (2 - alpha))
    return out


def edges_csv(traces):
    """CSV text with one row per sample: edge, parameter, 8 matrix columns, det phase.

    The matrix columns are re/im of S_11, S_12, S_21, S_22 reconstructed from
    the stored samples; ``traces`` is a list of ``(EdgeTrace, matrices)``.
    """
    cols = ["edge_id", "parameter", "re11", "im11", "re12", "im12",
            "re21", "im21", "re22", "im22", "det_phase"]
    lines = [",".join(cols)]
    for tr, mats in traces:
        for p, m, a in zip(tr.params, mats, tr.args):
            vals = [m[0, 0], m[0, 1], m[1, 0], m[1, 1]]
            nums = ",".join(f"{v.real:.12g},{v.imag:.12g}" for v in vals)
            lines.append(f"{tr.name},{p:.12g},{nums},{a:.12g}")
    return "\n".join(lines) + "\n"


def loop_samples(C, D, alpha):
    """Sampled edges together with the matrices at every sample, for export."""
    edges, traces = loop_traces(C, D, alpha)
    out = []
    for tr in traces:
        if tr.name == "B1":
            mats = edges.gamma1(tr.params)
        elif tr.name == "B3":
            mats = edges.gamma3(tr.params)
        elif tr.name == "B2":
            with np.errstate(divide="ignore"):
                mats = edges.gamma2_log(np.log(tr.params))
        else:
            mats = edges.gamma4(tr.params)
        out.append((tr, mats))
    return out
