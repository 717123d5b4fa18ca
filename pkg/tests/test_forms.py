import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grf_homog.catalog import direct_sum, mpq, su2
from grf_homog.errors import DegreeOverflow, SingularMetric
from grf_homog.forms import (
    AltForm,
    Metric,
    codifferential,
    form_norm_sq,
    fundamental_four_form,
    h_squared,
    hodge_star,
    inner,
    interior,
    invariant_forms,
    is_harmonic,
    koszul_d,
    wedge,
)
from grf_homog.lie import abelian, isotropy_invariance_check, lie_group_space

from strategies import invariant_form, mpq_metric_params, space_choice

PQ = [(2, 1), (3, 1), (3, 2), (5, 2)]


# ------------------------------------------------------------- storage


def test_form_evaluation_sign_extension():
    f = AltForm.from_terms(5, {(1, 2, 3): 2.0})
    E = np.eye(5)
    assert f(E[0], E[1], E[2]) == 2.0
    assert f(E[1], E[0], E[2]) == -2.0
    assert f(E[0], E[0], E[2]) == 0.0


def test_from_terms_sorts_with_sign():
    assert np.array_equal(AltForm.from_terms(4, {(2, 1): 1.0}).coeffs, (-AltForm.from_terms(4, {(1, 2): 1.0})).coeffs)


def test_json_round_trip():
    f = AltForm.from_terms(5, {(1, 2, 3): 0.5, (1, 4, 5): -2.0})
    doc = f.to_json()
    assert doc["degree"] == 3 and doc["terms"][0]["idx"] == [1, 2, 3]
    assert np.array_equal(AltForm.from_json(5, doc).coeffs, f.coeffs)


def test_wedge_and_interior():
    e1, e2 = AltForm.from_terms(3, {(1,): 1.0}), AltForm.from_terms(3, {(2,): 1.0})
    w = wedge(e1, e2)
    assert w[1, 2] == 1.0
    assert np.allclose(interior(np.eye(3)[0], w).coeffs, e2.coeffs)
    with pytest.raises(DegreeOverflow):
        wedge(w, w)


# ------------------------------------------------------------- Koszul d


@pytest.mark.parametrize("p,q", PQ)
def test_d_of_diagonal_three_forms(p, q):
    S = mpq(p, q).space
    for h1, h2 in [(1.0, 0.0), (0.3, 1.7), (q, p)]:
        dH = koszul_d(S, AltForm.from_terms(5, {(1, 2, 3): h1, (1, 4, 5): h2}))
        expected = (p * h1 - q * h2) / (2 * (p * p + q * q))
        assert dH[2, 3, 4, 5] == pytest.approx(expected, abs=1e-15)
        assert (dH - AltForm.from_terms(5, {(2, 3, 4, 5): expected})).max_abs() < 1e-15


@pytest.mark.parametrize("p,q", PQ)
def test_d_e1(p, q):
    S = mpq(p, q).space
    d = koszul_d(S, AltForm.from_terms(5, {(1,): 1.0}))
    s = 2 * (p * p + q * q)
    assert (d - AltForm.from_terms(5, {(2, 3): -q / s, (4, 5): p / s})).max_abs() < 1e-15


def test_d_of_constant_and_degree_overflow(m21):
    S = m21.space
    assert koszul_d(S, AltForm(5, 0, [3.0])).max_abs() == 0.0
    with pytest.raises(DegreeOverflow):
        koszul_d(S, AltForm.zero(5, 5))


@pytest.mark.parametrize("p,q", PQ)
def test_d_vanishes_on_invariant_two_forms(p, q):
    S = mpq(p, q).space
    for b in invariant_forms(S, 2):
        assert koszul_d(S, b).max_abs() < 1e-14


# ------------------------------------------------------------- Hodge star


@pytest.mark.parametrize("p,q", PQ)
def test_star_of_harmonic_form(p, q):
    M = mpq(p, q)
    mu, a, b = 1.3, 0.6, 1.9
    g = M.metric(mu, a, b)
    star = hodge_star(M.space, g, M.diagonal_form())
    assert star[2, 3] == pytest.approx(a * a / (mu * b * b) * p, rel=1e-13)
    assert star[4, 5] == pytest.approx(b * b / (mu * a * a) * q, rel=1e-13)
    assert np.count_nonzero(np.abs(star.coeffs) > 1e-14) == 2


def test_star_of_one(m21):
    mu, a, b = 1.3, 0.6, 1.9
    star = hodge_star(m21.space, m21.metric(mu, a, b), AltForm(5, 0, [1.0]))
    assert star.coeffs[0] == pytest.approx(mu * a * a * b * b)


def test_orientation_flips_star():
    from grf_homog.lie import reductive_split

    M = mpq(2, 1)
    S_neg = reductive_split(M.algebra, (5,), range(5), orientation=-1)
    g, H = M.brf_pair()
    assert np.allclose(hodge_star(S_neg, g, H).coeffs, -hodge_star(M.space, g, H).coeffs)


def test_singular_metric_rejected():
    with pytest.raises(SingularMetric):
        Metric(np.diag([1.0, 0.0, 1.0]))
    with pytest.raises(SingularMetric):
        Metric(np.diag([1.0, -1.0, 1.0]))


@given(space_choice, st.data())
def test_star_star_sign(pq, data):
    p, q = pq
    M = mpq(p, q)
    mu, a, b, c, s = data.draw(mpq_metric_params(p_eq_q=p == q))
    g = M.metric(mu, a, b, c, s)
    k = data.draw(st.integers(0, 5))
    alpha = data.draw(invariant_form(p, q, k))
    twice = hodge_star(M.space, g, hodge_star(M.space, g, alpha))
    assert (twice - (-1) ** (k * (5 - k)) * alpha).max_abs() < 1e-12 * max(1.0, alpha.max_abs())


# ------------------------------------------------------------- d and delta


@given(space_choice, st.data())
def test_d_squared_vanishes(pq, data):
    p, q = pq
    S = mpq(p, q).space
    k = data.draw(st.integers(0, 3))
    alpha = data.draw(invariant_form(p, q, k))
    assert koszul_d(S, koszul_d(S, alpha)).max_abs() < 1e-12


@given(space_choice, st.data())
def test_d_delta_adjoint(pq, data):
    p, q = pq
    M = mpq(p, q)
    g = M.metric(*data.draw(mpq_metric_params(p_eq_q=p == q)))
    k = data.draw(st.integers(0, 4))
    beta = data.draw(invariant_form(p, q, k))
    alpha = data.draw(invariant_form(p, q, k + 1))
    lhs = inner(g, koszul_d(M.space, beta), alpha, normalized=True)
    rhs = inner(g, beta, codifferential(M.space, g, alpha), normalized=True)
    assert abs(lhs - rhs) < 1e-10


@given(space_choice, st.data())
def test_d_preserves_invariance(pq, data):
    p, q = pq
    S = mpq(p, q).space
    k = data.draw(st.integers(0, 4))
    alpha = data.draw(invariant_form(p, q, k))
    assert isotropy_invariance_check(S, koszul_d(S, alpha))[0]


@pytest.mark.parametrize("p,q", PQ)
def test_harmonic_diagonal_form_is_coclosed(p, q):
    M = mpq(p, q)
    for mu, a, b in [(1.0, 1.0, 1.0), (0.4, 2.2, 0.9)]:
        assert codifferential(M.space, M.metric(mu, a, b), M.diagonal_form(1.7)).max_abs() < 1e-13


def test_codifferential_rejects_zero_forms(m21):
    with pytest.raises(DegreeOverflow):
        codifferential(m21.space, m21.metric(1, 1, 1), AltForm(5, 0, [1.0]))


def test_p_eq_q_coclosed_only_on_harmonic_relation(m11):
    mu, a, b, c, h1 = 1.2, 0.9, 1.4, 0.3, 0.8
    g = m11.metric(mu, a, b, c)
    harmonic = m11.harmonic_form_p_eq_q(a, b, c, h1)
    assert codifferential(m11.space, g, harmonic).max_abs() < 1e-13
    assert codifferential(m11.space, g, m11.general_form(h1, h1)).max_abs() > 1e-3
    assert codifferential(m11.space, g, m11.general_form(h1, h1, harmonic[1, 2, 5], 0.2)).max_abs() > 1e-3


def test_is_harmonic_examples(m21, m11):
    ok, dn, cn = is_harmonic(m21.space, m21.metric(0.7, 1.1, 1.3), AltForm.from_terms(5, {(1, 2, 3): 1.0, (1, 4, 5): 2.0}))
    assert ok and dn < 1e-14 and cn < 1e-14
    assert is_harmonic(m21.space, m21.metric(1, 1, 1), AltForm.zero(5, 3))[0]
    assert not is_harmonic(m11.space, m11.metric(1, 1, 1, 0.3), m11.general_form(1.0, 1.0))[0]


# ------------------------------------------------------------- H^2 and norms


@pytest.mark.parametrize("p,q", PQ)
def test_h_squared_e1e1(p, q):
    M = mpq(p, q)
    mu, a, b = 1.3, 0.6, 1.9
    H2 = h_squared(M.space, M.metric(mu, a, b), M.diagonal_form()).components
    assert H2[0, 0] == pytest.approx(2 * (a**4 * p * p + b**4 * q * q) / (a**4 * b**4), rel=1e-13)


def test_h_squared_zero_form(m21):
    assert h_squared(m21.space, m21.metric(1, 2, 3), AltForm.zero(5, 3)).max_abs() == 0.0


def test_h_squared_on_su2_equals_metric(su2_model):
    G = su2_model
    H2 = h_squared(G.space, G.metric, G.torsion).components
    assert np.allclose(H2, G.metric.components, atol=1e-14)


def test_h_squared_matches_frame_sum(m11):
    g = m11.metric(1.1, 0.8, 1.3, 0.2, -0.3)
    H = m11.general_form(0.4, -1.2, 0.7, 0.3)
    from grf_homog.curvature import orthonormal_frame

    U = orthonormal_frame(g)
    X = np.array([0.3, -1.0, 0.5, 2.0, 0.1])
    direct = sum(H(X, U[:, i], U[:, j]) ** 2 for i in range(5) for j in range(5))
    assert X @ h_squared(m11.space, g, H).components @ X == pytest.approx(direct, rel=1e-12)


@given(space_choice, st.data(), st.floats(-3, 3))
def test_h_squared_quadratic(pq, data, lam):
    p, q = pq
    M = mpq(p, q)
    g = M.metric(*data.draw(mpq_metric_params(p_eq_q=p == q)))
    H = data.draw(invariant_form(p, q, 3))
    a = h_squared(M.space, g, lam * H).components
    b = lam * lam * h_squared(M.space, g, H).components
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_form_norm_conventions(m21):
    eye = Metric(np.eye(5))
    assert form_norm_sq(None, eye, AltForm.from_terms(5, {(1, 2, 3): 1.0})) == pytest.approx(6.0)
    assert inner(eye, AltForm.from_terms(5, {(1, 2, 3): 1.0}), AltForm.from_terms(5, {(1, 2, 3): 1.0}), normalized=True) == 1.0
    assert form_norm_sq(None, eye, AltForm.zero(5, 2)) == 0.0
    g, H = m21.brf_pair()
    tr = np.sum(g.inverse * h_squared(m21.space, g, H).components)
    assert form_norm_sq(m21.space, g, H) == pytest.approx(tr, rel=1e-14)


# ------------------------------------------------------------- sigma_H


def test_fundamental_four_form(m21):
    g, H = m21.brf_pair()
    assert fundamental_four_form(m21.space, g, AltForm.zero(5, 3)).max_abs() == 0.0
    assert koszul_d(m21.space, H).max_abs() < 1e-14
    assert fundamental_four_form(m21.space, g, H).max_abs() > 0.1


def test_four_form_vanishes_on_three_dim_support():
    L = direct_sum(su2(), abelian(2))
    S = lie_group_space(L)
    g = Metric(np.diag([2.0, 1.0, 1.0, 1.0, 1.0]))
    H = AltForm.from_terms(5, {(1, 2, 3): 1.0})
    assert fundamental_four_form(S, g, H).max_abs() < 1e-15


def test_four_form_frame_independent(m11):
    g = m11.metric(1.1, 0.8, 1.3, 0.2, -0.3)
    H = m11.general_form(0.4, -1.2, 0.7, 0.3)
    from grf_homog.curvature import orthonormal_frame

    sig = fundamental_four_form(m11.space, g, H)
    U = orthonormal_frame(g, order=[4, 2, 0, 3, 1])
    alt = AltForm.zero(5, 4)
    for i in range(5):
        v = interior(U[:, i], H)
        alt = alt + 0.5 * wedge(v, v)
    assert (sig - alt).max_abs() < 1e-13
