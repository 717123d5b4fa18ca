"""Bismut-Ricci-flat equations over parameter charts.

A pair (g, H) is BRF when Ric_g = H^2/4, dH = 0 and delta_g H = 0.  Charts map
a parameter vector to an invariant pair; the solver runs Levenberg-Marquardt
on the stacked residual

    [ (Ric - H^2/4)_{ij} for i <= j (row-major) | dH components | delta H components ]

with components of forms in lexicographic order of increasing index tuples.
"""

from __future__ import annotations

import dataclasses
import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .curvature import ricci
from .errors import GeometryError, LeftDomain, MaxIterations, OutOfDomain
from .forms import AltForm, Bilinear, Metric, codifferential, fundamental_four_form, h_squared, inner, koszul_d
from .lie import ReductiveSpace


@dataclasses.dataclass(frozen=True, eq=False)
class Chart:
    """Parameter vector -> (Metric, 3-form) on a fixed reductive space.

    ``rescale(x, t)`` returns the parameters of (t^2 g, t^2 H) and
    ``flip(x)`` those of (g, -H); both are optional and used to pick ray
    representatives.  ``reference`` is the representative's H-scale: the
    parameter named ``reference[0]`` is normalised to ``reference[1]``.
    Parameters listed in ``log_params`` keep their sign on the domain (or
    are never zero at a BRF point); the solver iterates on log|x| with the
    sign of the initial value.
    """

    space: ReductiveSpace
    param_names: tuple[str, ...]
    evaluate: Callable[[np.ndarray], tuple[Metric, AltForm]]
    domain_check: Callable[[np.ndarray], bool]
    rescale: Callable[[np.ndarray, float], np.ndarray] | None = None
    flip: Callable[[np.ndarray], np.ndarray] | None = None
    reference: tuple[str, float] | None = None
    log_params: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.param_names)

    def __call__(self, params):
        x = np.asarray(params, dtype=float)
        if not self.domain_check(x):
            raise OutOfDomain(f"parameters {x.tolist()} outside the chart domain")
        return self.evaluate(x)

    def representative(self, params) -> np.ndarray:
        """Point on the ray R+(g, H), up to H-sign, with the reference H-scale."""
        x = np.asarray(params, dtype=float)
        if self.reference is None or self.rescale is None:
            return x
        name, target = self.reference
        i = self.param_names.index(name)
        if x[i] < 0 and self.flip is not None:
            x = self.flip(x)
        if x[i] == 0:
            return x
        return self.rescale(x, math.sqrt(target / x[i]))


@lru_cache(maxsize=None)
def _upper(n: int):
    return np.triu_indices(n)


@dataclasses.dataclass(frozen=True, eq=False)
class BRFResidual:
    sym: Bilinear
    dH: AltForm
    delta_H: AltForm

    def stacked(self) -> np.ndarray:
        iu = _upper(self.sym.components.shape[0])
        return np.concatenate([self.sym.components[iu], self.dH.coeffs, self.delta_H.coeffs])

    @property
    def max_norm(self) -> float:
        return float(np.abs(self.stacked()).max(initial=0.0))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.stacked()))


def brf_residual(S: ReductiveSpace, g: Metric, H: AltForm, *, check: bool = True) -> BRFResidual:
    return _residual_parts(S, g, H, check)[0]


def _residual_parts(S, g, H, check=True):
    ric = ricci(S, g, check=check).components
    quarter_h2 = 0.25 * h_squared(S, g, H).components
    dH = koszul_d(S, H) if H.degree < H.n else AltForm.zero(H.n, H.n)
    res = BRFResidual(Bilinear(ric - quarter_h2), dH, codifferential(S, g, H))
    return res, ric, quarter_h2


# --------------------------------------------------------------- p = q = 1


def in_p_eq_q_domain(x) -> bool:
    mu, a, b, c, h1 = x
    return bool(mu > 0 and a > 0 and b > 0 and a * a * b * b - c * c > 0 and h1 != 0)


def residual_polynomials_p_eq_q(params) -> np.ndarray:
    """(p1, p2, p3, p4) at (mu, a, b, c, h1); all vanish exactly at BRF points of the chart."""
    x = np.asarray(params, dtype=float)
    if not in_p_eq_q_domain(x):
        raise OutOfDomain(f"{x.tolist()} outside mu, a, b > 0, a^2 b^2 > c^2, h1 != 0")
    mu, a, b, c, h = x
    a2, b2, c2, h2, mu2 = a * a, b * b, c * c, h * h, mu * mu
    mu4 = mu2 * mu2
    P = a2 * b2 + c2
    D = a2 * b2 - c2
    p1 = (a2 * a2 + b2 * b2 - 2 * c2) * (mu4 * P - 16 * h2 * D) - 128 * c2 * (a2 * a2 * b2 * b2 - c2 * c2)
    p2 = P * P * (16 * mu2 * D + 64 * a2 * c2 - b2 * mu4) - 16 * h2 * (
        a2 * a2 * b2**3 + c2 * (a2**3 + a2 * b2 * b2 - 2 * a2 * c2 - b2 * c2)
    )
    p3 = P * P * (16 * mu2 * D + 64 * b2 * c2 - a2 * mu4) - 16 * h2 * (
        a2**3 * b2 * b2 + c2 * (b2**3 + a2 * a2 * b2 - 2 * b2 * c2 - a2 * c2)
    )
    p4 = c * (P * P * (64 * a2 * b2 - mu4) - 16 * h2 * (a2 * b2 * (a2 + b2) ** 2 - P * P))
    return np.array([p1, p2, p3, p4])


def gauge_normalize(params) -> np.ndarray:
    """(mu, a, b, c, s, ...) -> (mu, a, b, sqrt(c^2 + s^2), 0, ...).

    Rotation by the torus generated by e1 in M_{1,1}; entries after s pass
    through unchanged.
    """
    x = np.array(params, dtype=float)
    x[3], x[4] = math.hypot(x[3], x[4]), 0.0
    return x


# ---------------------------------------------------------- differentials


@dataclasses.dataclass(frozen=True)
class Differential:
    matrix: np.ndarray
    singular_values: np.ndarray
    rank: int


def fd_steps(x, rel_step=1e-6) -> np.ndarray:
    return rel_step * np.maximum(1.0, np.abs(x))


def central_jacobian(fn, x, rel_step=1e-6, domain=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    h = fd_steps(x, rel_step)
    cols = []
    for i in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[i] += h[i]
        xm[i] -= h[i]
        if domain is not None and not (domain(xp) and domain(xm)):
            raise OutOfDomain(f"finite-difference stencil leaves the domain along parameter {i}")
        cols.append((np.asarray(fn(xp), float) - np.asarray(fn(xm), float)) / (2 * h[i]))
    return np.array(cols).T.reshape(-1, x.size)


def numerical_rank(M, rank_tol=1e-6):
    sv = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
    if sv.size == 0 or sv[0] == 0.0:
        return sv, 0
    return sv, int(np.sum(sv > rank_tol * sv[0]))


def differential_at(fn, params, domain=None, rel_step=1e-6, rank_tol=1e-6) -> Differential:
    """Central-difference differential of ``fn`` at ``params`` with SVD rank."""
    J = central_jacobian(fn, params, rel_step, domain)
    sv, rank = numerical_rank(J, rank_tol)
    return Differential(J, sv, rank)


# ------------------------------------------------------------------ solver


@dataclasses.dataclass
class SolveReport:
    params: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    jacobian_rank: int
    singular_values: np.ndarray
    param_names: tuple[str, ...] = ()
    message: str = ""

    def to_json(self) -> dict:
        return {
            "params": dict(zip(self.param_names, self.params.tolist())),
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "jacobian_rank": self.jacobian_rank,
            "singular_values": self.singular_values.tolist(),
            "message": self.message,
        }


def _relative_weights(ric, quarter_h2, n_tail) -> np.ndarray:
    # diagonal scales hypot(Ric_ii, H^2_ii/4); hypot rather than a plain sum
    # of magnitudes, which makes the weighted entry identically -1 wherever
    # Ric_ii < 0 < H^2_ii.  Off-diagonal entries use sqrt(s_ii s_jj): their
    # own magnitudes can vanish at a solution (e.g. c -> 0 on M_{1,1}).
    d = np.hypot(np.diag(ric), np.diag(quarter_h2))
    d = np.maximum(d, 1e-8 * d.max(initial=0.0) + 1e-300)
    scale = np.sqrt(np.outer(d, d))[_upper(len(d))]
    return np.concatenate([1.0 / scale, np.ones(n_tail)])


def chart_residual(chart: Chart, params, *, check: bool = True) -> np.ndarray:
    g, H = chart(params)
    return brf_residual(chart.space, g, H, check=check).stacked()


WEIGHTINGS = ("auto", "relative", "absolute")


def solve(
    chart: Chart,
    initial: Sequence[float],
    fix: dict | None = None,
    pin_norm: float | None = None,
    tol: float = 1e-12,
    max_iter: int = 200,
    rel_step: float = 1e-6,
    rank_tol: float = 1e-6,
    weighting: str = "auto",
    max_log_step: float = 1.0,
) -> SolveReport:
    """Levenberg-Marquardt on the stacked BRF residual with domain backtracking.

    ``fix`` holds parameters at given values; ``{"mu": mu0}`` removes the
    scaling ray and is the most reliable gauge on the M_{p,q} charts.
    ``pin_norm`` instead appends trace_g(H^2) - pin_norm to the residual.

    ``weighting="relative"`` divides each Ricci entry (i, j) by
    sqrt(s_i s_j), s_i = hypot(Ric_ii, H^2_ii/4).  That keeps the iteration
    out of collapsed limits (mu -> 0, a, b -> oo on M_{p,q}) where the
    absolute residual decays without a solution, but it saturates where
    single metric entries degenerate.  ``"absolute"`` has the
    opposite strengths; ``"auto"`` runs relative and retries absolute from
    the same start.  Convergence is always judged on the unweighted stacked
    residual.  Raises :class:`MaxIterations` (with the partial report) or
    :class:`LeftDomain` if it does not drop below ``tol``.
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}")
    x0 = np.array(initial, dtype=float)
    if x0.shape != (chart.dim,):
        raise ValueError(f"expected {chart.dim} initial parameters {chart.param_names}")
    fix = dict(fix or {})
    for name, v in fix.items():
        x0[chart.param_names.index(name)] = v
    if not chart.domain_check(x0):
        raise OutOfDomain(f"initial point {x0.tolist()} outside the chart domain")

    modes = ("relative", "absolute") if weighting == "auto" else (weighting,)
    total = 0
    for mode in modes:
        x, it, message = _levenberg_marquardt(
            chart, x0, fix, pin_norm, tol, max_iter, rel_step, mode == "relative", max_log_step
        )
        total += it
        final = float(np.linalg.norm(chart_residual(chart, x)))
        if final < tol:
            break

    # rank data from the BRF residual alone (pin row excluded)
    J_full = _safe_jacobian(chart, x, rel_step)
    sv, rank = numerical_rank(J_full, rank_tol)
    converged = final < tol
    report = SolveReport(x, final, total, converged, rank, sv, chart.param_names, message or "converged")
    if not converged:
        if "domain" in message:
            raise LeftDomain(message, last_params=x)
        raise MaxIterations(message, report=report)
    return report


def _levenberg_marquardt(chart, x0, fix, pin_norm, tol, max_iter, rel_step, relative, max_log_step):
    free = [i for i, n in enumerate(chart.param_names) if n not in fix]
    logs = np.array([chart.param_names[i] in chart.log_params for i in free], dtype=bool)
    signs = np.where(logs, np.sign(x0[free]), 1.0)
    if np.any(signs == 0):
        raise OutOfDomain("log-scaled parameters must start nonzero")

    def full(z):
        x = x0.copy()
        # an overflowing trial step becomes inf and fails the domain check
        with np.errstate(over="ignore"):
            x[free] = np.where(logs, signs * np.exp(np.where(logs, z, 0.0)), z)
        return x

    def dom(z):
        return chart.domain_check(full(z))

    def resid(z):
        # chart output is invariant by construction, so skip the checks
        g, H = chart.evaluate(full(z))
        res, ric, quarter_h2 = _residual_parts(chart.space, g, H, check=False)
        r = res.stacked()
        if relative:
            r = r * _relative_weights(ric, quarter_h2, r.size - ric.shape[0] * (ric.shape[0] + 1) // 2)
        if pin_norm is not None:
            pin = 4.0 * np.sum(quarter_h2 * g.inverse) - pin_norm
            r = np.append(r, pin / pin_norm if relative else pin)
        return r

    def jac(z):
        # stencil must stay in the domain; shrink it near the boundary
        step = rel_step
        while True:
            try:
                return central_jacobian(resid, z, step, dom)
            except OutOfDomain:
                step *= 0.1
                if step < 1e-12:
                    raise

    def raw_norm(z):
        return float(np.linalg.norm(chart_residual(chart, full(z), check=False)))

    z = x0[free].copy()
    z[logs] = np.log(np.abs(z[logs]))
    r = resid(z)
    cost = r @ r
    damping = 1e-3
    it = 0
    message = ""
    while raw_norm(z) >= tol:
        if it >= max_iter:
            message = f"no convergence in {max_iter} iterations"
            break
        it += 1
        try:
            J = jac(z)
        except OutOfDomain:
            message = "stalled against the domain boundary"
            break
        A = J.T @ J
        grad = J.T @ r
        accepted = False
        while damping < 1e20:
            try:
                step = np.linalg.solve(A + damping * (np.diag(np.diag(A)) + 1e-12 * np.eye(len(z))), -grad)
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            # a log-coordinate step above max_log_step rescales a parameter
            # by more than e^max_log_step; treat it as too long
            if not np.all(np.isfinite(step)) or np.abs(step[logs]).max(initial=0.0) > max_log_step:
                damping *= 10.0
                continue
            trial = z + step
            if not dom(trial):
                damping *= 10.0
                continue
            try:
                r_new = resid(trial)
            except GeometryError:
                damping *= 10.0
                continue
            c_new = r_new @ r_new
            if np.isfinite(c_new) and c_new < cost:
                z, r, cost = trial, r_new, c_new
                damping = max(damping / 10.0, 1e-15)
                accepted = True
                break
            damping *= 10.0
        if not accepted:
            if not dom(z + np.linalg.lstsq(J, -r, rcond=None)[0]):
                message = "stalled against the domain boundary"
            else:
                message = "stalled: no decrease at any damping"
            break
    return full(z), it, message


def _safe_jacobian(chart, x, rel_step):
    step = rel_step
    while step > 1e-12:
        try:
            return central_jacobian(lambda y: chart_residual(chart, y, check=False), x, step, chart.domain_check)
        except OutOfDomain:
            step *= 0.1
    return np.zeros((0, x.size))


def multistart(chart: Chart, initials, workers: int = 1, **options) -> list:
    """Run :func:`solve` from each initial point; results in input order.

    Failed runs are returned as the exception instance.
    """
    def run(x):
        try:
            return solve(chart, x, **options)
        except (MaxIterations, LeftDomain, OutOfDomain) as exc:
            return exc

    initials = [np.asarray(x, float) for x in initials]
    if workers <= 1:
        return [run(x) for x in initials]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, initials))


# ------------------------------------------------------- torsion tests


@dataclasses.dataclass(frozen=True)
class TorsionTest:
    """Normalized norms of dH and sigma_H together with the defect |dH - 2 sigma_H|.

    A parallel torsion form satisfies dH = 2 sigma_H, so a nonzero
    ``parallel_defect`` certifies that H is not Bismut-parallel.
    """

    dH_norm: float
    sigma_norm: float
    parallel_defect: float
    tol: float

    @property
    def closed(self) -> bool:
        return self.dH_norm < self.tol

    @property
    def parallel_possible(self) -> bool:
        return self.parallel_defect < self.tol


def torsion_test(S: ReductiveSpace, g: Metric, H: AltForm, tol: float = 1e-10) -> TorsionTest:
    n = H.n
    if n < 4:
        return TorsionTest(0.0, 0.0, 0.0, tol)
    dH = koszul_d(S, H)
    sigma = fundamental_four_form(S, g, H)

    def norm(a):
        return math.sqrt(max(inner(g, a, a, normalized=True), 0.0))

    return TorsionTest(norm(dH), norm(sigma), norm(dH - 2.0 * sigma), tol)


def trace_identity_defect(S: ReductiveSpace, g: Metric, H: AltForm) -> float:
    """|Scal_g - trace_g(H^2)/4|, which vanishes at every BRF pair."""
    scal = float(np.sum(g.inverse * ricci(S, g).components))
    tr = float(np.sum(g.inverse * h_squared(S, g, H).components))
    return abs(scal - 0.25 * tr)
