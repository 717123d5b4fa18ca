"""Named Lie algebras, homogeneous spaces and model data."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import scipy.linalg

from .brf import Chart, in_p_eq_q_domain
from .errors import BadOrder, ConditionViolated, NotCompactType, NotCoprime
from .forms import AltForm, Metric, inner, wedge
from .lie import (
    LieAlgebra,
    ReductiveSpace,
    abelian,
    change_basis,
    direct_sum,
    lie_algebra_from_brackets,
    lie_group_space,
    reductive_split,
)


def su2() -> LieAlgebra:
    """su(2) in the basis (H, E, V): [H,E] = V, [H,V] = -E, [E,V] = H/2."""
    return lie_algebra_from_brackets(
        3,
        {(0, 1): {2: 1.0}, (0, 2): {1: -1.0}, (1, 2): {0: 0.5}},
        labels=("H", "E", "V"),
    )


def su2_su2() -> LieAlgebra:
    return direct_sum(su2(), su2())


@dataclasses.dataclass(frozen=True, eq=False)
class MpqSpace:
    """M_{p,q} = SU(2)xSU(2)/K_{p,q} with basis e1..e6, k = span(e6), m = span(e1..e5)."""

    p: int
    q: int
    space: ReductiveSpace

    @property
    def algebra(self) -> LieAlgebra:
        return self.space.algebra

    @property
    def s(self) -> int:
        """p^2 + q^2."""
        return self.p**2 + self.q**2

    def metric(self, mu, a, b, c=0.0, s=0.0) -> Metric:
        """mu^2 e1e1 + a^2 (e2e2 + e3e3) + b^2 (e4e4 + e5e5) + 2c(e2.e4 + e3.e5) + 2s(e2.e5 - e3.e4)."""
        return Metric(metric_matrix(mu**2, a**2, b**2, c, s))

    def diagonal_form(self, lam=1.0) -> AltForm:
        """lam (q e^{123} + p e^{145}), the closed invariant 3-forms when p != q."""
        return AltForm.from_terms(5, {(1, 2, 3): lam * self.q, (1, 4, 5): lam * self.p})

    def general_form(self, h1, h2, h3=0.0, h4=0.0) -> AltForm:
        """h1 e^{123} + h2 e^{145} + h3 (e^{125} - e^{134}) + h4 (e^{124} + e^{135})."""
        return AltForm.from_terms(
            5,
            {(1, 2, 3): h1, (1, 4, 5): h2, (1, 2, 5): h3, (1, 3, 4): -h3, (1, 2, 4): h4, (1, 3, 5): h4},
        )

    def harmonic_form_p_eq_q(self, a, b, c, h1) -> AltForm:
        """h1 (e^{123} + e^{145} + c (a^2+b^2)/(a^2 b^2 + c^2) (e^{125} - e^{134}))."""
        return self.general_form(h1, h1, h1 * c * (a * a + b * b) / (a * a * b * b + c * c))

    def brf_pair(self, t=1.0):
        """The BRF pair (t^2 g_o, t^2 H_o)."""
        p, q, s = self.p, self.q, self.s
        g = self.metric(t * math.sqrt(2 * s), t * q / math.sqrt(s), t * p / math.sqrt(s))
        return g, self.diagonal_form(t * t)

    def brf_params(self, t=1.0) -> np.ndarray:
        """(mu, a, b, lam) of :meth:`brf_pair` in the diagonal chart."""
        s = self.s
        return np.array([t * math.sqrt(2 * s), t * self.q / math.sqrt(s), t * self.p / math.sqrt(s), t * t])

    def diagonal_chart(self) -> Chart:
        """(mu, a, b, lam) -> (diag(mu^2, a^2, a^2, b^2, b^2), lam (q e^{123} + p e^{145}))."""
        return Chart(
            self.space,
            ("mu", "a", "b", "lam"),
            lambda x: (self.metric(x[0], x[1], x[2]), self.diagonal_form(x[3])),
            lambda x: bool(x[0] > 0 and x[1] > 0 and x[2] > 0),
            rescale=lambda x, t: np.array([t * x[0], t * x[1], t * x[2], t * t * x[3]]),
            flip=lambda x: np.array([x[0], x[1], x[2], -x[3]]),
            reference=("lam", 1.0),
            log_params=("mu", "a", "b", "lam"),
        )

    def p_eq_q_chart(self) -> Chart:
        """(mu, a, b, c, h1) -> (metric with s = 0, harmonic 3-form); only for p = q = 1."""
        if self.p != self.q:
            raise BadOrder("the five-parameter chart exists only for p = q")
        return Chart(
            self.space,
            ("mu", "a", "b", "c", "h1"),
            lambda x: (self.metric(x[0], x[1], x[2], x[3]), self.harmonic_form_p_eq_q(x[1], x[2], x[3], x[4])),
            in_p_eq_q_domain,
            rescale=lambda x, t: np.array([t * x[0], t * x[1], t * x[2], t * t * x[3], t * t * x[4]]),
            flip=lambda x: np.array([x[0], x[1], x[2], x[3], -x[4]]),
            reference=("h1", 2.0),
            log_params=("mu", "a", "b", "h1"),
        )

    def random_initials(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Chart points for multistart runs.

        Diagonal chart: mu = 1 and (a, b, lam) log-uniform in [0.1, 10]; mu
        only sets the scale along the solution ray, and solving with mu held
        at 1 is the most reliable gauge on this chart.  p = q chart:
        mu, a, b log-uniform in [0.1, 10], c = u a b with u uniform in
        (-0.9, 0.9), h1 log-uniform in [0.1, 10] with a random sign.
        """
        if self.p != self.q:
            x = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=(count, 4)))
            x[:, 0] = 1.0
            return x
        mab = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=(count, 3)))
        c = rng.uniform(-0.9, 0.9, size=count) * mab[:, 1] * mab[:, 2]
        h = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=count)) * rng.choice([-1.0, 1.0], size=count)
        return np.column_stack([mab, c, h])

    def tau(self, t) -> np.ndarray:
        """Matrix on m of Ad(exp(t e1)); e1 centralizes the isotropy."""
        ad_e1 = self.algebra.ad(np.eye(6)[0])[:5, :5]
        return scipy.linalg.expm(t * ad_e1)

    def tau_pullback(self, g: Metric, t) -> Metric:
        A = self.tau(t)
        return Metric(A.T @ g.components @ A)


def metric_matrix(M, A, B, c=0.0, s=0.0) -> np.ndarray:
    """Invariant metric on m(M_{p,q}) from squared parameters (M, A, B) and (c, s)."""
    g = np.diag([M, A, A, B, B]).astype(float)
    g[1, 3] = g[3, 1] = c
    g[2, 4] = g[4, 2] = c
    g[1, 4] = g[4, 1] = s
    g[2, 3] = g[3, 2] = -s
    return g


def mpq(p: int, q: int) -> MpqSpace:
    p, q = int(p), int(q)
    if q < 1 or p < q:
        raise BadOrder(f"need p >= q >= 1, got p={p}, q={q}")
    if math.gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) = {math.gcd(p, q)}")
    # columns: e1 = (qH, -pH), e2 = (E,0), e3 = (V,0), e4 = (0,E), e5 = (0,V), e6 = (pH, qH)
    P = np.zeros((6, 6))
    P[0, 0], P[3, 0] = q, -p
    P[1, 1] = P[2, 2] = P[4, 3] = P[5, 4] = 1.0
    P[0, 5], P[3, 5] = p, q
    L = change_basis(su2_su2(), P, labels=tuple(f"e{i}" for i in range(1, 7)))
    return MpqSpace(p, q, reductive_split(L, (5,), range(5)))


@dataclasses.dataclass(frozen=True, eq=False)
class GroupModel:
    """Bi-invariant metric -scale*B with torsion H(X,Y,Z) = -g([X,Y],Z) = scale * omega_B."""

    space: ReductiveSpace
    metric: Metric
    torsion: AltForm
    scale: float


def bi_invariant_group(L: LieAlgebra, scale: float = 1.0) -> GroupModel:
    B = L.killing
    ev = np.linalg.eigvalsh(B) if L.dim else np.array([])
    if L.dim == 0 or ev.max() >= -1e-12:
        raise NotCompactType("Killing form is not negative definite")
    S = lie_group_space(L)
    g = Metric(-scale * B)
    # H[i,j,k] = -g([e_i, e_j], e_k)
    H = -np.einsum("ijc,ck->ijk", L.C, g.components)
    return GroupModel(S, g, AltForm.from_tensor(H), float(scale))


def flat_torus(n: int):
    if n < 1:
        raise ValueError("torus dimension must be positive")
    S = lie_group_space(abelian(n))
    return S, Metric(np.eye(n)), AltForm.zero(n, 3)


CATALOG = {
    "su2": "su(2), bi-invariant metric -B with its flat Bismut torsion",
    "su2xsu2": "su(2)+su(2), product of flat bi-invariant models",
    "mpq": "M_{p,q} = SU(2)xSU(2)/K_{p,q}, gcd(p,q)=1, p>=q>=1",
    "torus": "flat torus T^n with H = 0",
}


def named_group(name: str) -> LieAlgebra:
    name = name.lower().replace("(", "").replace(")", "")
    if name == "su2":
        return su2()
    if name in ("su2xsu2", "su2+su2"):
        return su2_su2()
    raise KeyError(f"unknown group {name!r}")


# ---------------------------------------------------------------- Kobayashi


@dataclasses.dataclass(frozen=True, eq=False)
class KobayashiData:
    """Pointwise base data for a circle bundle: metric g0, Ricci ric0, 2-forms alpha, beta."""

    g0: Metric
    ric0: np.ndarray
    alpha: AltForm
    beta: AltForm
    lam: float
    mu: float

    @property
    def base_dim(self) -> int:
        return self.g0.n


@dataclasses.dataclass(frozen=True)
class KobayashiResult:
    c: float
    h: float
    defects: dict


def hat(g0: Metric, w: AltForm) -> np.ndarray:
    """w^(Z, W) = g0(i_Z w, i_W w)."""
    T = w.tensor
    return np.einsum("za,wb,ab->zw", T, T, g0.inverse)


def kobayashi_check(data: KobayashiData, tol: float = 1e-10) -> KobayashiResult:
    lam, mu = float(data.lam), float(data.mu)
    if not (lam > 0 and mu > 0):
        raise ValueError("lambda and mu must be positive")
    if data.alpha.max_abs() == 0.0:
        raise ValueError("alpha must be nonzero")
    g0 = data.g0
    n = g0.n
    defects = {}
    defects["a"] = wedge(data.alpha, data.beta).max_abs() if n >= 4 else 0.0
    na, nb = inner(g0, data.alpha, data.alpha), inner(g0, data.beta, data.beta)
    defects["b"] = abs(nb - lam * na)
    a_hat, b_hat = hat(g0, data.alpha), hat(g0, data.beta)
    ric0 = np.asarray(data.ric0, float)
    defects["c"] = float(np.abs(ric0 - 2 * a_hat - mu * b_hat).max())
    for cond in "abc":
        if defects[cond] >= tol:
            raise ConditionViolated(cond, defects[cond])
    c = math.sqrt(lam * mu)
    h = 2 * mu * math.sqrt(lam)
    # bundle equations with the returned constants
    defects["eq1"] = float(np.abs(ric0 - 2 * a_hat - h * h / (4 * c * c) * b_hat).max())
    defects["eq2"] = abs(c**4 - 0.25 * lam * h * h)
    return KobayashiResult(c, h, defects)


def synthetic_kobayashi_data(lam: float, mu: float, n: int = 4) -> KobayashiData:
    """Pointwise data on R^4 satisfying a)-c) by construction.

    alpha = e^{12} - e^{34}, beta = sqrt(lam) (e^{12} + e^{34}), so alpha ^ beta = 0
    and |beta|^2 = lam |alpha|^2; ric0 is defined as 2 alpha^ + mu beta^.
    """
    g0 = Metric(np.eye(n))
    alpha = AltForm.from_terms(n, {(1, 2): 1.0, (3, 4): -1.0})
    beta = AltForm.from_terms(n, {(1, 2): 1.0, (3, 4): 1.0}) * math.sqrt(lam)
    ric0 = 2 * hat(g0, alpha) + mu * hat(g0, beta)
    return KobayashiData(g0, ric0, alpha, beta, lam, mu)
