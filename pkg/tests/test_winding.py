import numpy as np
import pytest
from hypothesis import given, strategies as st

from levinson_ab.errors import InputError
from levinson_ab.extensions import from_unitary, negative_count_cdstar, random_pair
from levinson_ab.scattering import gamma_edges
from levinson_ab.special_fn import unwrap
from levinson_ab.winding import (det2, edge_B1, edge_B2, edge_B3, edge_B4, edge_variation, edges_csv,
                                 corollary_values, kappa_window, levinson_check, loop_samples,
                                 loop_traces, total_winding, var_phi_ab)

I2 = np.eye(2, dtype=complex)
Z2 = np.zeros((2, 2), dtype=complex)
TWO_PI = 2 * np.pi
seeds = st.integers(min_value=0, max_value=10 ** 6)
alphas = st.floats(min_value=0.05, max_value=0.95)


def doubled_variation(edges, trace):
    """Variation of ``trace`` recomputed with a midpoint inserted in every finite interval."""
    p = np.asarray(trace.params, dtype=float)
    fin = p[np.isfinite(p) & (p != 0)] if trace.name == "B2" else p[np.isfinite(p)]
    if trace.name == "B2":
        u = np.log(fin)
        mids = np.exp(0.5 * (u[1:] + u[:-1]))
        gamma = edges.gamma2
    else:
        u = np.arcsinh(fin)
        mids = np.sinh(0.5 * (u[1:] + u[:-1]))
        gamma = edges.gamma1 if trace.name == "B1" else edges.gamma3
    inner = np.empty(2 * len(fin) - 1)
    inner[0::2], inner[1::2] = fin, mids
    full = np.concatenate([p[:1], inner, p[-1:]])
    return unwrap(det2(gamma(full))).variation


def test_edge_examples():
    e = gamma_edges(Z2, I2, 0.4)
    assert edge_B1(e).variation == pytest.approx(TWO_PI, abs=1e-8)
    assert edge_B4(e).variation == 0
    assert edge_variation(np.broadcast_to(I2, (5, 2, 2))) == 0
    for a in (0.1, 0.5, 0.9):
        assert edge_B2(gamma_edges(-I2, I2, a)).variation == pytest.approx(-TWO_PI, abs=1e-8)


@pytest.mark.parametrize("C,D,alpha,wind,count", [
    (I2, Z2, 0.3, 0, 0),
    (-I2, I2, 0.3, -2, 2),
    (-I2, I2, 0.7, -2, 2),
    (*from_unitary(np.diag([-1, 1j])), 0.5, -1, 1),
])
def test_total_winding_examples(C, D, alpha, wind, count):
    rep = total_winding(C, D, alpha)
    assert rep.wind == wind
    assert rep.bound_count == count
    assert rep.integer_residual <= 1e-6


def test_case_three_phases():
    ok, rep = levinson_check(Z2, I2, 0.5)
    assert ok
    np.testing.assert_allclose(rep.phi, (TWO_PI, 0, -TWO_PI, 0), atol=1e-8)
    assert rep.case_label == "III"


def test_input_validation():
    with pytest.raises(InputError):
        total_winding(Z2, Z2, 0.3)
    with pytest.raises(InputError):
        total_winding(I2, Z2, 1.5)


@given(seeds, alphas)
def test_levinson_random(seed, alpha):
    C, D = random_pair(seed)
    rep = total_winding(C, D, alpha)
    assert rep.wind == -negative_count_cdstar(C, D)
    assert rep.max_corner_residual <= 1e-8


@given(seeds, alphas)
def test_reverse_negates(seed, alpha):
    C, D = random_pair(seed)
    fwd = total_winding(C, D, alpha)
    bwd = total_winding(C, D, alpha, reverse=True)
    assert bwd.wind == -fwd.wind
    np.testing.assert_allclose(bwd.phi, [-v for v in fwd.phi], atol=1e-12)


@pytest.mark.parametrize("seed,alpha", [(0, 0.3), (1, 0.5), (2, 0.8), (17, 0.1)])
def test_doubling_invariance(seed, alpha):
    edges, traces = loop_traces(*random_pair(seed), alpha)
    for tr in traces[:3]:
        assert abs(doubled_variation(edges, tr) - tr.variation) <= 1e-8


def test_kappa_window_contains_default_range():
    for a in (0.02, 0.3, 0.5, 0.98):
        lo, hi = kappa_window(a)
        assert lo <= np.log(1e-8) and hi >= np.log(1e8)


def test_var_phi_examples():
    assert var_phi_ab(2.0, 2.0) == 0
    assert var_phi_ab(1.0, 0.5) == pytest.approx(np.pi, abs=1e-10)
    with pytest.raises(ValueError):
        var_phi_ab(0.0, 1.0)


@given(st.floats(min_value=1e-2, max_value=10), st.floats(min_value=1e-2, max_value=10))
def test_var_phi_lemma(a, b):
    assert abs(var_phi_ab(a, b) - TWO_PI * (a - b)) <= 1e-6


@pytest.mark.parametrize("a,b", [(0.3, 2.0), (1.0, 0.5), (7.5, 0.1)])
def test_var_phi_tail_truncation(a, b):
    assert abs(var_phi_ab(a, b, X=60.0) - var_phi_ab(a, b, X=120.0)) <= 1e-8


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_corollaries(alpha):
    for name, (via_unwrap, via_lemma, expected) in corollary_values(alpha).items():
        assert abs(via_unwrap - expected) <= 1e-6, name
        assert abs(via_lemma - expected) <= 1e-6, name


def test_edges_csv():
    text = edges_csv(loop_samples(Z2, I2, 0.5))
    lines = text.strip().split("\n")
    assert lines[0].split(",")[0] == "edge_id" and len(lines[0].split(",")) == 11
    names = {ln.split(",")[0] for ln in lines[1:]}
    assert names == {"B1", "B2", "B3", "B4"}
    assert all(len(ln.split(",")) == 11 for ln in lines[1:])
