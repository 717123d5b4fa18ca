import math

import numpy as np
import pytest

from grf_homog.brf import brf_residual
from grf_homog.catalog import (
    CATALOG,
    KobayashiData,
    bi_invariant_group,
    flat_torus,
    hat,
    kobayashi_check,
    metric_matrix,
    mpq,
    named_group,
    su2,
    su2_su2,
    synthetic_kobayashi_data,
)
from grf_homog.curvature import bismut_nomizu, curvature_tensor, ricci
from grf_homog.errors import BadOrder, ConditionViolated, NotCompactType, NotCoprime
from grf_homog.forms import AltForm, Metric
from grf_homog.lie import abelian, isotropy_invariance_check, killing_form, lie_algebra_from_brackets

from conftest import e


def test_su2_brackets():
    L = su2()
    H, E, V = np.eye(3)
    assert np.allclose(L.bracket(H, E), V)
    assert np.allclose(L.bracket(H, V), -E)
    assert np.allclose(L.bracket(E, V), H / 2)


@pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (3, 1), (3, 2), (5, 2), (7, 4)])
def test_mpq_structure(p, q):
    M = mpq(p, q)
    L = M.algebra
    assert L.dim == 6 and M.s == p * p + q * q
    assert killing_form(L)[1, 1] == pytest.approx(-1.0)
    e6 = e(6, 6)
    assert np.allclose(L.bracket(e6, e(6, 2)), p * e(6, 3))
    assert np.allclose(L.bracket(e6, e(6, 4)), q * e(6, 5))
    assert np.allclose(L.bracket(e6, e(6, 1)), 0.0)
    # isotropy speeds (0, p, p, q, q)
    ad6 = M.space.isotropy_action[0]
    assert np.allclose(np.sort(np.abs(np.linalg.eigvals(ad6).imag)), sorted([0, p, p, q, q]))


def test_mpq_guards():
    with pytest.raises(BadOrder):
        mpq(2, 4)
    with pytest.raises(BadOrder):
        mpq(1, 0)
    with pytest.raises(NotCoprime):
        mpq(4, 2)
    with pytest.raises(BadOrder):
        mpq(2, 1).p_eq_q_chart()


def test_p_eq_q_modules_equivalent():
    ad6 = mpq(1, 1).space.isotropy_action[0]
    ev = np.sort(np.linalg.eigvals(ad6).imag)
    assert np.allclose(ev, [-1, -1, 0, 1, 1])


def test_metric_matrix_layout():
    G = metric_matrix(1.0, 2.0, 3.0, 0.5, 0.25)
    assert np.allclose(np.diag(G), [1, 2, 2, 3, 3])
    assert G[1, 3] == G[2, 4] == 0.5
    assert G[1, 4] == 0.25 and G[2, 3] == -0.25
    assert np.array_equal(G, G.T)


@pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (3, 2)])
def test_metrics_and_forms_are_invariant(p, q):
    M = mpq(p, q)
    g = M.metric(1.2, 0.7, 1.3, 0.2 if p == q else 0.0, 0.1 if p == q else 0.0)
    assert isotropy_invariance_check(M.space, g.components)[0]
    assert isotropy_invariance_check(M.space, M.diagonal_form())[0]
    if p == q:
        assert isotropy_invariance_check(M.space, M.general_form(1.0, 0.5, 0.3, -0.2))[0]
    else:
        assert not isotropy_invariance_check(M.space, M.general_form(1.0, 0.5, 0.3, -0.2))[0]


@pytest.mark.parametrize("p,q", [(2, 1), (3, 1), (3, 2), (5, 2)])
def test_brf_pair(p, q):
    M = mpq(p, q)
    g, H = M.brf_pair()
    s = p * p + q * q
    assert np.allclose(np.diag(g.components), [2 * s, q * q / s, q * q / s, p * p / s, p * p / s])
    assert brf_residual(M.space, g, H).norm < 1e-12


def test_tau_is_isometry_group(m11):
    A = m11.tau(0.7)
    assert np.allclose(A @ m11.tau(-0.7), np.eye(5), atol=1e-14)
    assert np.allclose(m11.tau(2 * math.pi), np.eye(5), atol=1e-12)
    g = m11.metric(1.0, 1.0, 1.0, 0.3, 0.0)
    gt = m11.tau_pullback(g, 0.4).components
    # the pullback rotates (c, s) and keeps mu, a, b
    assert np.allclose(np.diag(gt), np.diag(g.components))
    assert math.hypot(gt[1, 3], gt[1, 4]) == pytest.approx(0.3)


@pytest.mark.parametrize("p,q", [(2, 1), (1, 1)])
def test_random_initials_in_domain(p, q, rng):
    M = mpq(p, q)
    chart = M.diagonal_chart() if p != q else M.p_eq_q_chart()
    xs = M.random_initials(40, rng)
    assert xs.shape == (40, chart.dim)
    assert all(chart.domain_check(x) for x in xs)
    if p != q:
        assert np.all(xs[:, 0] == 1.0)


# ------------------------------------------------------------- groups


@pytest.mark.parametrize("L", [su2(), su2_su2()], ids=["su2", "su2xsu2"])
@pytest.mark.parametrize("scale", [1.0, 0.3])
def test_bi_invariant_models(L, scale):
    G = bi_invariant_group(L, scale)
    assert brf_residual(G.space, G.metric, G.torsion).norm < 1e-12
    R = curvature_tensor(G.space, bismut_nomizu(G.space, G.metric, G.torsion))
    assert R.max_abs() < 1e-12
    X, Y, Z = np.eye(L.dim)[:3]
    assert G.torsion(X, Y, Z) == pytest.approx(-G.metric(L.bracket(X, Y), Z))


def test_non_compact_rejected():
    with pytest.raises(NotCompactType):
        bi_invariant_group(abelian(3))
    sl2 = lie_algebra_from_brackets(
        3, {(0, 1): {1: 2.0}, (0, 2): {2: -2.0}, (1, 2): {0: 1.0}}
    )
    with pytest.raises(NotCompactType):
        bi_invariant_group(sl2)


def test_flat_torus():
    S, g, H = flat_torus(3)
    assert ricci(S, g).max_abs() == 0.0
    assert H.max_abs() == 0.0
    with pytest.raises(ValueError):
        flat_torus(0)


def test_named_groups():
    assert named_group("SU(2)").dim == 3
    assert named_group("su2xsu2").dim == 6
    with pytest.raises(KeyError):
        named_group("g2")
    assert set(CATALOG) >= {"su2", "su2xsu2", "mpq", "torus"}


# ------------------------------------------------------------- Kobayashi


def test_kobayashi_synthetic():
    res = kobayashi_check(synthetic_kobayashi_data(1.0, 2.0))
    assert res.c == pytest.approx(math.sqrt(2.0))
    assert res.h == pytest.approx(4.0)
    assert res.h**2 == pytest.approx(4 * 1.0 * 2.0**2)
    assert res.defects["eq1"] < 1e-12 and res.defects["eq2"] < 1e-12


@pytest.mark.parametrize("lam,mu", [(0.5, 0.3), (3.0, 1.7), (10.0, 0.01)])
def test_kobayashi_bundle_equations_hold(lam, mu):
    res = kobayashi_check(synthetic_kobayashi_data(lam, mu))
    assert res.c**4 == pytest.approx(0.25 * lam * res.h**2)
    assert res.defects["eq1"] < 1e-10


def test_kobayashi_violations():
    d = synthetic_kobayashi_data(2.0, 1.0)
    with pytest.raises(ConditionViolated) as exc:
        kobayashi_check(KobayashiData(d.g0, d.ric0, d.alpha, d.beta, 3.0, d.mu))
    assert exc.value.condition == "b"
    beta = AltForm.from_terms(4, {(1, 2): 1.0, (1, 3): 1.0})
    with pytest.raises(ConditionViolated) as exc:
        kobayashi_check(KobayashiData(d.g0, d.ric0, d.alpha, beta, 1.0, d.mu))
    assert exc.value.condition == "a"
    with pytest.raises(ConditionViolated) as exc:
        kobayashi_check(KobayashiData(d.g0, d.ric0 + np.eye(4), d.alpha, d.beta, d.lam, d.mu))
    assert exc.value.condition == "c"


def test_kobayashi_preconditions():
    d = synthetic_kobayashi_data(1.0, 1.0)
    with pytest.raises(ValueError):
        kobayashi_check(KobayashiData(d.g0, d.ric0, d.alpha, AltForm.zero(4, 2), 0.0, d.mu))
    with pytest.raises(ValueError):
        kobayashi_check(KobayashiData(d.g0, d.ric0, AltForm.zero(4, 2), d.beta, d.lam, d.mu))


def test_hat():
    alpha = AltForm.from_terms(4, {(1, 2): 1.0})
    assert np.allclose(hat(Metric(np.eye(4)), alpha), np.diag([1.0, 1.0, 0.0, 0.0]))
