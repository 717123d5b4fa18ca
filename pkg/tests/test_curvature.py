import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grf_homog import reference
from grf_homog.catalog import bi_invariant_group, flat_torus, mpq, su2, su2_su2
from grf_homog.curvature import (
    bismut_nomizu,
    bismut_ricci,
    curvature_tensor,
    is_flat,
    levi_civita_nomizu,
    orthonormal_frame,
    ricci,
    scalar,
)
from grf_homog.errors import NonInvariantMetric, NotUnimodular
from grf_homog.forms import Metric, codifferential
from grf_homog.lie import lie_algebra_from_brackets, lie_group_space

from strategies import invariant_form, mpq_metric_params, space_choice

PQ = [(2, 1), (3, 1), (3, 2), (5, 2)]


def rel_err(A, B):
    return np.abs(A - B).max() / max(np.abs(B).max(), 1e-300)


# ------------------------------------------------------------- Ricci oracles


def test_su2_ricci(su2_model):
    G = su2_model
    Ric = ricci(G.space, G.metric).components
    assert np.allclose(Ric, np.diag([0.5, 0.25, 0.25]), atol=1e-15)
    assert scalar(G.space, G.metric) == pytest.approx(0.75)


@pytest.mark.parametrize("L", [su2(), su2_su2()], ids=["su2", "su2xsu2"])
@pytest.mark.parametrize("scale", [1.0, 3.5])
def test_bi_invariant_ricci_is_quarter_metric(L, scale):
    G = bi_invariant_group(L, scale)
    assert np.allclose(ricci(G.space, G.metric).components, 0.25 * G.metric.components / scale, atol=1e-14)


def test_torus_is_ricci_flat():
    S, g, _ = flat_torus(4)
    assert ricci(S, g).max_abs() == 0.0
    assert scalar(S, g) == 0.0


@pytest.mark.parametrize("p,q", PQ)
@pytest.mark.parametrize("mu,a,b", [(1.0, 1.0, 1.0), (1.3, 0.6, 1.9), (0.2, 3.0, 0.7)])
def test_ricci_matches_closed_form(p, q, mu, a, b):
    M = mpq(p, q)
    Ric = ricci(M.space, M.metric(mu, a, b)).components
    assert rel_err(Ric, reference.ricci_diagonal(p, q, mu, a, b)) < 1e-12


@pytest.mark.parametrize("mu,a,b,c", [(1.0, 1.0, 1.0, 0.3), (2.0, 0.7, 1.4, -0.5), (0.6, 2.0, 2.0, 3.1)])
def test_ricci_p_eq_q_matches_closed_form(m11, mu, a, b, c):
    Ric = ricci(m11.space, m11.metric(mu, a, b, c)).components
    assert rel_err(Ric, reference.ricci_p_eq_q(mu, a, b, c)) < 1e-12


@given(st.floats(0.0, 6.3), mpq_metric_params(p_eq_q=True))
def test_ricci_natural_under_tau(t, params):
    M = mpq(1, 1)
    g = M.metric(*params)
    A = M.tau(t)
    lhs = ricci(M.space, M.tau_pullback(g, t)).components
    rhs = A.T @ ricci(M.space, g).components @ A
    assert np.allclose(lhs, rhs, atol=1e-11)


@given(space_choice, st.data())
def test_ricci_frame_independent(pq, data):
    p, q = pq
    M = mpq(p, q)
    g = M.metric(*data.draw(mpq_metric_params(p_eq_q=p == q)))
    order = data.draw(st.permutations(range(5)))
    E = orthonormal_frame(g, order=order)
    assert np.allclose(E.T @ g.components @ E, np.eye(5), atol=1e-12)
    base = ricci(M.space, g).components
    assert np.allclose(ricci(M.space, g, frame=E).components, base, atol=1e-11)


@given(space_choice, st.data(), st.floats(0.2, 5.0))
def test_ricci_scale_invariant(pq, data, t):
    p, q = pq
    M = mpq(p, q)
    G = M.metric(*data.draw(mpq_metric_params(p_eq_q=p == q))).components
    assert np.allclose(ricci(M.space, Metric(t * G)).components, ricci(M.space, Metric(G)).components, atol=1e-11)


def test_preconditions():
    L = lie_algebra_from_brackets(2, {(0, 1): {1: 1.0}})
    S = lie_group_space(L)
    with pytest.raises(NotUnimodular):
        ricci(S, Metric(np.eye(2)))
    M = mpq(2, 1)
    G = np.eye(5)
    G[1, 1] = 2.0
    with pytest.raises(NonInvariantMetric):
        ricci(M.space, Metric(G))


# ------------------------------------------------------------- Nomizu maps


@given(space_choice, st.data())
def test_levi_civita_nomizu(pq, data):
    p, q = pq
    M = mpq(p, q)
    g = M.metric(*data.draw(mpq_metric_params(p_eq_q=p == q)))
    Lam = levi_civita_nomizu(M.space, g)
    assert np.abs(Lam.torsion(M.space)).max() < 1e-12
    assert Lam.metric_defect(g) < 1e-12
    R = curvature_tensor(M.space, Lam)
    assert np.allclose(R.ricci_contraction(), ricci(M.space, g).components, atol=1e-11)
    # first Bianchi identity for a torsion-free connection
    C = R.components
    assert np.abs(C + C.transpose(1, 2, 0, 3) + C.transpose(2, 0, 1, 3)).max() < 1e-11


@given(space_choice, st.data())
def test_bismut_nomizu(pq, data):
    p, q = pq
    M = mpq(p, q)
    g = M.metric(*data.draw(mpq_metric_params(p_eq_q=p == q)))
    H = data.draw(invariant_form(p, q, 3))
    Lam = bismut_nomizu(M.space, g, H)
    assert Lam.metric_defect(g) < 1e-12
    T_low = np.einsum("ijk,kz->ijz", Lam.torsion(M.space), g.components)
    assert np.allclose(T_low, H.tensor, atol=1e-12)
    # the contraction carries -1/2 delta H as its skew part; bismut_ricci carries -delta H
    Rc = curvature_tensor(M.space, Lam).ricci_contraction()
    Rb = bismut_ricci(M.space, g, H)
    assert np.allclose(0.5 * (Rc + Rc.T), Rb.sym, atol=1e-10)
    assert np.allclose(0.5 * (Rc - Rc.T), 0.5 * Rb.skew, atol=1e-10)


@pytest.mark.parametrize("L", [su2(), su2_su2()], ids=["su2", "su2xsu2"])
def test_bi_invariant_bismut_is_flat(L):
    G = bi_invariant_group(L)
    flat, m = is_flat(curvature_tensor(G.space, bismut_nomizu(G.space, G.metric, G.torsion)))
    assert flat and m < 1e-13
    assert not is_flat(curvature_tensor(G.space, levi_civita_nomizu(G.space, G.metric)))[0]


def test_bismut_ricci_skew_part_is_minus_codifferential(m11):
    g = m11.metric(1.1, 0.8, 1.3, 0.2, -0.3)
    H = m11.general_form(0.4, -1.2, 0.7, 0.3)
    Rc = bismut_ricci(m11.space, g, H)
    assert np.allclose(Rc.skew, -codifferential(m11.space, g, H).tensor, atol=1e-14)
    assert np.abs(Rc.skew).max() > 1e-3
    assert np.allclose(Rc.sym - Rc.components, -Rc.skew)


def test_bismut_ricci_of_brf_pair_vanishes(m21):
    g, H = m21.brf_pair()
    assert bismut_ricci(m21.space, g, H).max_abs() < 1e-13
    g, H = m21.brf_pair(0.37)
    assert bismut_ricci(m21.space, g, H).max_abs() < 1e-12
