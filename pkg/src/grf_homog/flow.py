"""Generalized Ricci flow on invariant data.

The flow is

    dg/dt = -2 Ric_g + 1/2 H^2,    db/dt = -delta_g H,    H = H0 + db.

A :class:`GRFSystem` runs it on coefficients of a fixed basis of invariant
symmetric tensors (the metric is linear in them, so the projection of the
right-hand side is a linear solve) and of invariant 2-forms.  For the
diagonal family on M_{p,q}, p != q, :class:`MpqODE` is the closed-form
system in the squared parameters (M, A, B) = (mu^2, a^2, b^2).
"""

from __future__ import annotations

import dataclasses
import math
from typing import Sequence

import numpy as np

from . import ode
from .brf import brf_residual, central_jacobian
from .catalog import MpqSpace, metric_matrix
from .curvature import ricci
from .errors import ChartDegenerate, GeometryError, NotUnimodular, OutOfDomain
from .forms import AltForm, Metric, codifferential, form_norm_sq, h_squared, invariant_forms, invariant_symmetric, koszul_d
from .lie import ReductiveSpace


@dataclasses.dataclass(frozen=True)
class FlowState:
    t: float
    metric_params: np.ndarray
    b_params: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.metric_params, self.b_params])


@dataclasses.dataclass(frozen=True)
class Diagnostics:
    """Per-state diagnostics; ``norm_h2`` uses the full-contraction convention."""

    residual_norm: float
    scal: float
    norm_h2: float


@dataclasses.dataclass
class FlowTrajectory:
    states: list[FlowState]
    diagnostics: list[Diagnostics]
    converged: bool
    message: str
    n_steps: int = 0
    n_rejected: int = 0

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def metric_params(self) -> np.ndarray:
        return np.array([s.metric_params for s in self.states])

    @property
    def b_params(self) -> np.ndarray:
        return np.array([s.b_params for s in self.states])

    @property
    def final(self) -> FlowState:
        return self.states[-1]


class FlowSystem:
    """Common interface: a state vector y = (metric params, b params)."""

    space: ReductiveSpace
    metric_names: tuple[str, ...]
    b_names: tuple[str, ...]

    @property
    def dim(self) -> int:
        return len(self.metric_names) + len(self.b_names)

    def split(self, y) -> tuple[np.ndarray, np.ndarray]:
        y = np.asarray(y, dtype=float)
        k = len(self.metric_names)
        return y[:k], y[k:]

    def in_domain(self, y) -> bool:
        raise NotImplementedError

    def pair(self, y) -> tuple[Metric, AltForm]:
        raise NotImplementedError

    def field(self, y) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, y) -> np.ndarray:
        return self.field(y)

    def diagnostics(self, y) -> Diagnostics:
        g, H = self.pair(y)
        S = self.space
        res = brf_residual(S, g, H, check=False)
        scal = float(np.sum(g.inverse * ricci(S, g, check=False).components))
        return Diagnostics(res.norm, scal, form_norm_sq(S, g, H))


@dataclasses.dataclass(frozen=True, eq=False)
class GRFSystem(FlowSystem):
    """Flow on g = sum_i x_i G_i and b = sum_j y_j beta_j with H = H0 + db.

    ``metric_basis`` must span the invariant symmetric tensors (Ric and H^2
    of an invariant pair lie in that span) and ``b_basis`` the invariant
    2-forms; the defaults compute both.
    """

    space: ReductiveSpace
    H0: AltForm
    metric_basis: tuple[np.ndarray, ...]
    b_basis: tuple[AltForm, ...]
    metric_names: tuple[str, ...]
    b_names: tuple[str, ...]

    def __post_init__(self):
        S = self.space
        if not S.algebra.is_unimodular():
            raise NotUnimodular("the homogeneous Ricci formula needs a unimodular algebra")
        n = S.n
        iu = np.triu_indices(n)
        Dg = np.array([G[iu] for G in self.metric_basis]).T.reshape(len(iu[0]), -1)
        Db = np.array([b.coeffs for b in self.b_basis]).T.reshape(math.comb(n, 2), -1)
        dB = [koszul_d(S, b) for b in self.b_basis] if n >= 3 else []
        for name, D in (("metric", Dg), ("2-form", Db)):
            if D.shape[1] and np.linalg.matrix_rank(D) < D.shape[1]:
                raise ChartDegenerate(f"{name} basis is linearly dependent")
        object.__setattr__(self, "_iu", iu)
        object.__setattr__(self, "_Dg", Dg)
        object.__setattr__(self, "_Db", Db)
        object.__setattr__(self, "_dB", dB)

    def metric(self, x) -> Metric:
        return Metric(np.tensordot(np.asarray(x, float), np.array(self.metric_basis), axes=1))

    def torsion(self, yb) -> AltForm:
        H = self.H0
        for c, db in zip(yb, self._dB):
            if c != 0.0:
                H = H + c * db
        return H

    def in_domain(self, y) -> bool:
        x, _ = self.split(y)
        if not np.all(np.isfinite(y)):
            return False
        G = np.tensordot(x, np.array(self.metric_basis), axes=1)
        try:
            np.linalg.cholesky(G)
        except np.linalg.LinAlgError:
            return False
        return True

    def pair(self, y) -> tuple[Metric, AltForm]:
        x, yb = self.split(y)
        if not self.in_domain(y):
            raise OutOfDomain(f"metric parameters {x.tolist()} are not positive definite")
        return self.metric(x), self.torsion(yb)

    def field(self, y) -> np.ndarray:
        g, H = self.pair(y)
        S = self.space
        target = -2.0 * ricci(S, g, check=False).components + 0.5 * h_squared(S, g, H).components
        dx = _project(self._Dg, target[self._iu], "metric")
        if self._Db.shape[1]:
            dy = _project(self._Db, -codifferential(S, g, H).coeffs, "2-form")
        else:
            dy = np.zeros(0)
        return np.concatenate([dx, dy])

    def project_metric(self, G) -> np.ndarray:
        """Coefficients of an invariant symmetric matrix in ``metric_basis``."""
        return _project(self._Dg, np.asarray(G, float)[self._iu], "metric")


def _project(D, v, what):
    coef, _, rank, _ = np.linalg.lstsq(D, v, rcond=None)
    if rank < D.shape[1]:
        raise ChartDegenerate(f"{what} chart differential has rank {rank} < {D.shape[1]}")
    miss = np.linalg.norm(D @ coef - v)
    if miss > 1e-8 * max(1.0, np.linalg.norm(v)):
        raise ChartDegenerate(f"{what} right-hand side leaves the span of the basis (defect {miss:.3e})")
    return coef


def grf_system(S: ReductiveSpace, H0: AltForm, metric_basis=None, b_basis=None, metric_names=None) -> GRFSystem:
    """Generic flow with invariant bases computed from the isotropy action."""
    mb = tuple(invariant_symmetric(S)) if metric_basis is None else tuple(np.asarray(G, float) for G in metric_basis)
    bb = tuple(invariant_forms(S, 2)) if b_basis is None else tuple(b_basis)
    names = tuple(metric_names) if metric_names else tuple(f"x{i + 1}" for i in range(len(mb)))
    return GRFSystem(S, H0, mb, bb, names, tuple(f"b{j + 1}" for j in range(len(bb))))


def _unit_tensor(n, pairs):
    G = np.zeros((n, n))
    for (i, j), v in pairs.items():
        G[i, j] = G[j, i] = v
    return G


def mpq_flow_system(M: MpqSpace, lam: float = 1.0) -> GRFSystem:
    """Generic flow on M_{p,q} with H0 = lam (q e^{123} + p e^{145}).

    Metric parameters are (M, A, B) for p != q and (M, A, B, c, s) for
    p = q (the parametrization of :func:`catalog.metric_matrix`).  The
    2-form potential runs over e^{23}, e^{45} and, for p = q, also
    e^{24} + e^{35} and e^{25} - e^{34}.
    """
    names = ["M", "A", "B"]
    basis = [metric_matrix(1, 0, 0), metric_matrix(0, 1, 0), metric_matrix(0, 0, 1)]
    forms = [AltForm.from_terms(5, {(2, 3): 1.0}), AltForm.from_terms(5, {(4, 5): 1.0})]
    if M.p == M.q:
        names += ["c", "s"]
        basis += [metric_matrix(0, 0, 0, 1, 0), metric_matrix(0, 0, 0, 0, 1)]
        forms += [
            AltForm.from_terms(5, {(2, 4): 1.0, (3, 5): 1.0}),
            AltForm.from_terms(5, {(2, 5): 1.0, (3, 4): -1.0}),
        ]
    return GRFSystem(
        M.space,
        M.diagonal_form(lam),
        tuple(basis),
        tuple(forms),
        tuple(names),
        tuple(f"b{j + 1}" for j in range(len(forms))),
    )


# ----------------------------------------------------------- closed form


def mpq_ode_rhs(M, A, B, p, q, lam) -> np.ndarray:
    """(dM, dA, dB) of the reduced flow of the diagonal family on M_{p,q}."""
    if not (M > 0 and A > 0 and B > 0):
        raise OutOfDomain(f"need M, A, B > 0, got ({M}, {A}, {B})")
    s = p * p + q * q
    k = 1.0 / (4.0 * s * s)
    lam2 = lam * lam
    # 4 lam^2 s^2 - M^2, factored to avoid cancellation near the fixed point
    crit = 2.0 * lam * s
    dM = (p * p * k / (B * B) + q * q * k / (A * A)) * ((crit - M) * (crit + M))
    common = lam2 / M + k * M
    dA = q * q / A * common - 1.0
    dB = p * p / B * common - 1.0
    return np.array([dM, dA, dB])


def fixed_point_mpq(p, q, lam) -> np.ndarray:
    s = p * p + q * q
    return np.array([2.0 * lam * s, lam * q * q / s, lam * p * p / s])


def mpq_jacobian_closed_form(p, q, lam) -> np.ndarray:
    """Jacobian of :func:`mpq_ode_rhs` at :func:`fixed_point_mpq`."""
    s = p * p + q * q
    return np.diag([-(s * s) / (lam * p * p * q * q), -s / (lam * q * q), -s / (lam * p * p)])


@dataclasses.dataclass(frozen=True, eq=False)
class MpqODE(FlowSystem):
    """Closed-form flow in (M, A, B); H stays lam (q e^{123} + p e^{145})."""

    mpq_space: MpqSpace
    lam: float
    metric_names: tuple[str, ...] = ("M", "A", "B")
    b_names: tuple[str, ...] = ()

    @property
    def space(self) -> ReductiveSpace:
        return self.mpq_space.space

    def in_domain(self, y) -> bool:
        y = np.asarray(y, float)
        return bool(np.all(np.isfinite(y)) and np.all(y > 0))

    def pair(self, y) -> tuple[Metric, AltForm]:
        Mv, A, B = np.asarray(y, float)
        if not self.in_domain(y):
            raise OutOfDomain(f"need M, A, B > 0, got ({Mv}, {A}, {B})")
        return Metric(metric_matrix(Mv, A, B)), self.mpq_space.diagonal_form(self.lam)

    def field(self, y) -> np.ndarray:
        Mv, A, B = np.asarray(y, float)
        return mpq_ode_rhs(Mv, A, B, self.mpq_space.p, self.mpq_space.q, self.lam)

    @property
    def fixed_point(self) -> np.ndarray:
        return fixed_point_mpq(self.mpq_space.p, self.mpq_space.q, self.lam)


# ------------------------------------------------------------ integration


def integrate(
    system: FlowSystem,
    initial: FlowState | Sequence[float],
    t_max: float,
    samples: int | Sequence[float] | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    stop_tol: float | None = 1e-12,
    with_diagnostics: bool = True,
) -> FlowTrajectory:
    """Dormand-Prince 5(4) integration of ``system`` from ``initial``.

    ``samples`` is a count of equally spaced output times on [t0, t0 + t_max]
    (endpoints included) or an explicit increasing list of offsets from t0;
    by default only the two endpoints are returned.  Integration stops early
    once max|field| < ``stop_tol``; later samples then repeat the final
    state and the trajectory is flagged converged.
    """
    if isinstance(initial, FlowState):
        t0, y0 = float(initial.t), initial.vector
    else:
        t0, y0 = 0.0, np.asarray(initial, float)
    if y0.size != system.dim:
        raise ValueError(f"initial state has {y0.size} entries, the system expects {system.dim}")
    if not (t_max > 0 and math.isfinite(t_max)):
        raise ValueError("t_max must be positive and finite")
    if samples is None:
        t_eval = np.array([0.0, t_max])
    elif np.isscalar(samples):
        if int(samples) < 2:
            raise ValueError("need at least two samples")
        t_eval = np.linspace(0.0, t_max, int(samples))
    else:
        t_eval = np.asarray(samples, float)
        if np.any(np.diff(t_eval) <= 0):
            raise ValueError("sample times must be strictly increasing")

    res = ode.integrate(
        lambda t, y: system.field(y),
        y0,
        t_max,
        t_eval=t_eval,
        rtol=rtol,
        atol=atol,
        stop_tol=stop_tol,
        domain=system.in_domain,
    )
    k = len(system.metric_names)
    states = [FlowState(t0 + t, y[:k].copy(), y[k:].copy()) for t, y in zip(res.t, res.y)]
    diags = [system.diagnostics(y) for y in res.y] if with_diagnostics else []
    return FlowTrajectory(states, diags, res.converged, res.message, res.n_steps, res.n_rejected)


# -------------------------------------------------------------- stability


@dataclasses.dataclass(frozen=True)
class StabilityReport:
    point: np.ndarray
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    classification: str

    def to_json(self) -> dict:
        ev = self.eigenvalues
        return {
            "point": self.point.tolist(),
            "jacobian": self.jacobian.tolist(),
            "eigenvalues": {"real": ev.real.tolist(), "imag": ev.imag.tolist()},
            "classification": self.classification,
        }


def classify(eigenvalues, tol=0.0) -> str:
    re = np.real(eigenvalues)
    if re.size and np.all(re < -tol):
        return "asymptotically stable"
    if np.any(re > tol):
        return "unstable"
    return "inconclusive"


def jacobian_eigen(system, point, rel_step: float = 1e-6) -> StabilityReport:
    """Central-difference Jacobian of the field at ``point`` and its spectrum.

    ``system`` is a :class:`FlowSystem` or any callable y -> dy/dt.  Eigenvalues
    are sorted by real part, then imaginary part.
    """
    x = np.asarray(point, float)
    field = system.field if isinstance(system, FlowSystem) else system
    domain = system.in_domain if isinstance(system, FlowSystem) else None
    if domain is not None and not domain(x):
        raise OutOfDomain(f"{x.tolist()} outside the flow domain")
    try:
        J = central_jacobian(field, x, rel_step, domain)
    except GeometryError as exc:
        if isinstance(exc, OutOfDomain):
            raise
        raise OutOfDomain(str(exc)) from exc
    ev = np.linalg.eigvals(J) if J.size else np.zeros(0, complex)
    ev = ev[np.lexsort((ev.imag, ev.real))]
    if np.all(np.abs(ev.imag) == 0.0):
        ev = ev.real.astype(complex)
    return StabilityReport(x, J, ev, classify(ev))
