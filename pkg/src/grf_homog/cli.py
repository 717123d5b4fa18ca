"""grf-homog: command-line front end for the BRF solver and the generalized Ricci flow.

Exit codes: 0 success, 1 failed check, 2 usage or configuration error,
3 numerical failure (solver or integrator).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from . import reference as ref
from .brf import (
    brf_residual,
    differential_at,
    multistart,
    residual_polynomials_p_eq_q,
    torsion_test,
)
from .catalog import (
    CATALOG,
    KobayashiData,
    bi_invariant_group,
    flat_torus,
    kobayashi_check,
    mpq,
    named_group,
    synthetic_kobayashi_data,
)
from .curvature import bismut_nomizu, curvature_tensor, levi_civita_nomizu, ricci
from .errors import (
    BadOrder,
    ChartDegenerate,
    ConditionViolated,
    DomainExit,
    GeometryError,
    LeftDomain,
    MaxIterations,
    NotCompactType,
    NotCoprime,
    StepUnderflow,
)
from .flow import (
    MpqODE,
    fixed_point_mpq,
    grf_system,
    integrate,
    jacobian_eigen,
    mpq_flow_system,
    mpq_jacobian_closed_form,
    mpq_ode_rhs,
)
from .forms import AltForm, Metric, codifferential, h_squared, hodge_star, inner, koszul_d

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

NUMERIC_ERRORS = (MaxIterations, LeftDomain, StepUnderflow, DomainExit, ChartDegenerate)
USAGE_ERRORS = (NotCoprime, BadOrder, NotCompactType)


class UsageError(Exception):
    pass


# ------------------------------------------------------------ output


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in output")
    if x == 0.0:
        return "0.0"  # also folds -0.0
    s = f"{x:.17g}"
    return s if any(ch in s for ch in ".en") else s + ".0"


def to_json(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits; rejects NaN and Inf."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt(float(o))
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, np.ndarray):
            return enc(o.tolist(), level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return enc(obj, 0) + "\n"


def _emit(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _floats(text: str, name: str) -> list[float]:
    try:
        vals = [float(v) for v in str(text).strip().strip("[]").split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}") from exc
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"--{name}: values must be finite")
    return vals


def _positive(name, v):
    if not (math.isfinite(v) and v > 0):
        raise UsageError(f"--{name} must be positive and finite")
    return v


def _workers(requested: int) -> int:
    cap = os.environ.get("GRF_HOMOG_THREADS")
    n = max(1, int(requested))
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise UsageError(f"GRF_HOMOG_THREADS must be an integer, got {cap!r}") from exc
    return n


def _parse_space(args):
    """('mpq', MpqSpace) | ('group', name, GroupModel) | ('torus', n)."""
    text = args.space
    if text == "mpq":
        if args.p is None or args.q is None:
            raise UsageError("--space mpq needs --p and --q")
        return ("mpq", mpq(args.p, args.q))
    if text.startswith("group:"):
        name = text.split(":", 1)[1]
        try:
            L = named_group(name)
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
        return ("group", name, bi_invariant_group(L))
    if text == "torus" or text.startswith("torus:"):
        n = int(text.split(":", 1)[1]) if ":" in text else args.n
        if n is None or n < 1:
            raise UsageError("torus needs a positive dimension (--n or torus:N)")
        return ("torus", n)
    raise UsageError(f"unknown space {text!r}; use mpq, group:NAME or torus[:N]")


def _require_mpq(args):
    kind = _parse_space(args)
    if kind[0] != "mpq":
        raise UsageError(f"command {args.command} supports only --space mpq")
    return kind[1]


# ------------------------------------------------------------ verify


class _Checks:
    def __init__(self):
        self.items = []

    def add(self, name, computed, expected, tol, passed=None):
        if passed is None:
            passed = abs(computed - expected) <= tol
        self.items.append(
            {"name": name, "computed": float(computed), "expected": float(expected), "tol": float(tol), "passed": bool(passed)}
        )

    def below(self, name, value, tol):
        self.add(name, value, 0.0, tol, value < tol)

    def above(self, name, value, bound):
        self.add(name, value, bound, bound, value > bound)

    @property
    def ok(self) -> bool:
        return all(c["passed"] for c in self.items)


def _rel(A, B):
    A, B = np.asarray(A, float), np.asarray(B, float)
    return float(np.abs(A - B).max() / max(np.abs(B).max(), 1e-300))


def _verify_mpq(M, rng, samples, checks):
    S = M.space
    p, q = M.p, M.q
    rel_ric = rel_h2 = star = 0.0
    if p != q:
        for _ in range(samples):
            mu, a, b = np.exp(rng.uniform(-1, 1, 3))
            g = M.metric(mu, a, b)
            rel_ric = max(rel_ric, _rel(ricci(S, g).components, ref.ricci_diagonal(p, q, mu, a, b)))
            rel_h2 = max(rel_h2, _rel(h_squared(S, g, M.diagonal_form()).components, ref.h_squared_diagonal(p, q, mu, a, b)))
            h1, h2 = rng.normal(size=2)
            st = hodge_star(S, g, M.general_form(h1, h2)) - ref.star_diagonal(mu, a, b, h1, h2)
            star = max(star, st.max_abs())
        closed = koszul_d(S, M.diagonal_form()).max_abs()
        not_closed = koszul_d(S, M.general_form(q, p + 1.0)).max_abs()
        checks.below("d(q e123 + p e145)", closed, 1e-12)
        checks.above("d(q e123 + (p+1) e145)", not_closed, 1e-6)
    else:
        for _ in range(samples):
            mu, a, b = np.exp(rng.uniform(-1, 1, 3))
            c = rng.uniform(-0.9, 0.9) * a * b
            h1, h3, h4 = rng.normal(size=3)
            g = M.metric(mu, a, b, c)
            rel_ric = max(rel_ric, _rel(ricci(S, g).components, ref.ricci_p_eq_q(mu, a, b, c)))
            H = M.harmonic_form_p_eq_q(a, b, c, h1)
            rel_h2 = max(rel_h2, _rel(h_squared(S, g, H).components, ref.h_squared_p_eq_q(mu, a, b, c, h1)))
            st = hodge_star(S, g, M.general_form(h1, h1, h3, h4))
            star = max(
                star,
                (st - ref.star_p_eq_q(mu, a, b, c, h1, h3, h4)).max_abs(),
                (koszul_d(S, st) - ref.d_star_p_eq_q(mu, a, b, c, h1, h3, h4)).max_abs(),
            )
        x_o = ref.X_O
        poly = max(np.abs(residual_polynomials_p_eq_q(ref.gamma(t))).max() for t in (0.5, 1.0, 2.0))
        checks.below("polynomials on gamma(t), t in {0.5, 1, 2}", poly, 1e-9)
        D = differential_at(residual_polynomials_p_eq_q, x_o)
        checks.below("differential at x_o vs reference matrix (rel)", _rel(D.matrix, ref.F_AT_X_O), 1e-6)
        checks.add("rank of differential at x_o", D.rank, 4, 0)
        tangent = np.array([2 * math.sqrt(2), 1.0, 1.0, 0.0, 4.0])
        checks.below("curve tangent in kernel", float(np.abs(D.matrix @ tangent).max()), 1e-5)
    checks.below("Ricci table (rel)", rel_ric, 1e-10)
    checks.below("H^2 table (rel)", rel_h2, 1e-10)
    checks.below("Hodge star formula", star, 1e-10)

    g, H = M.brf_pair()
    checks.below("BRF residual at (g_o, H_o)", brf_residual(S, g, H).max_norm, 1e-10)
    scal = float(np.sum(g.inverse * ricci(S, g).components))
    tr = float(np.sum(g.inverse * h_squared(S, g, H).components))
    checks.below("Scal - tr(H^2)/4 at (g_o, H_o)", abs(scal - 0.25 * tr), 1e-10)
    tt = torsion_test(S, g, H)
    checks.below("|dH| at (g_o, H_o)", tt.dH_norm, 1e-10)
    checks.above("|sigma_H| at (g_o, H_o)", tt.sigma_norm, 1e-3)
    R_b = curvature_tensor(S, bismut_nomizu(S, g, H))
    checks.above("Bismut curvature max component", R_b.max_abs(), 1e-3)
    R_lc = curvature_tensor(S, levi_civita_nomizu(S, g))
    checks.below("LC curvature contraction vs Ricci", float(np.abs(R_lc.ricci_contraction() - ricci(S, g).components).max()), 1e-9)
    if p != q:
        for lam in (1.0, 0.5):
            x = fixed_point_mpq(p, q, lam)
            checks.below(f"flow field at fixed point, lambda={lam}", float(np.abs(mpq_ode_rhs(*x, p, q, lam)).max()), 1e-14)
            rep = jacobian_eigen(MpqODE(M, lam), x)
            expected = np.sort(np.diag(mpq_jacobian_closed_form(p, q, lam)))
            checks.below(f"Jacobian eigenvalues, lambda={lam}", float(np.abs(np.sort(rep.eigenvalues.real) - expected).max()), 1e-8)


def _verify_group(name, G, checks):
    S, g, H = G.space, G.metric, G.torsion
    checks.below(f"BRF residual ({name})", brf_residual(S, g, H).max_norm, 1e-12)
    checks.below(f"Bismut curvature ({name})", curvature_tensor(S, bismut_nomizu(S, g, H)).max_abs(), 1e-12)
    checks.above(f"LC curvature ({name})", curvature_tensor(S, levi_civita_nomizu(S, g)).max_abs(), 1e-3)


def _verify_torus(n, checks):
    S, g, H = flat_torus(n)
    checks.below("Ricci", ricci(S, g).max_abs(), 1e-14)
    checks.below("LC curvature", curvature_tensor(S, levi_civita_nomizu(S, g)).max_abs(), 1e-14)
    sysm = grf_system(S, H)
    y = np.concatenate([sysm.project_metric(g.components), np.zeros(len(sysm.b_names))])
    checks.below("flow field", float(np.abs(sysm.field(y)).max(initial=0.0)), 1e-14)


def _exterior_checks(S, rng, samples, checks):
    """Exterior-calculus identities checked on random invariant forms."""
    from .forms import invariant_forms, invariant_symmetric

    n = S.n
    sym = invariant_symmetric(S)
    bases = {k: invariant_forms(S, k) for k in range(n + 1)}

    def rand_form(k):
        B = bases[k]
        if not B:
            return AltForm.zero(n, k)
        out = AltForm.zero(n, k)
        for f, c in zip(B, rng.normal(size=len(B))):
            out = out + c * f
        return out

    def rand_metric():
        while True:
            G = sum(c * T for c, T in zip(rng.normal(size=len(sym)), sym))
            G = G @ G.T if len(sym) == n * (n + 1) // 2 else G
            if np.all(np.linalg.eigvalsh(G) > 0.05):
                return Metric(G)

    dd = adj = ss = 0.0
    for _ in range(samples):
        k = int(rng.integers(0, n))
        g = rand_metric()
        a = rand_form(k)
        if k + 2 <= n:
            dd = max(dd, koszul_d(S, koszul_d(S, a)).max_abs())
        b = rand_form(k + 1)
        lhs = inner(g, koszul_d(S, a), b, normalized=True)
        rhs = inner(g, a, codifferential(S, g, b), normalized=True)
        adj = max(adj, abs(lhs - rhs))
        c = rand_form(k)
        sign = (-1) ** (k * (n - k))
        ss = max(ss, (hodge_star(S, g, hodge_star(S, g, c)) - sign * c).max_abs())
    checks.below("d d = 0 on invariant forms", dd, 1e-10)
    checks.below("<d a, b> - <a, delta b>", adj, 1e-10)
    checks.below("** = (-1)^{k(n-k)}", ss, 1e-10)


def cmd_verify(args) -> int:
    kind = _parse_space(args)
    rng = np.random.default_rng(args.seed)
    checks = _Checks()
    if kind[0] == "mpq":
        M = kind[1]
        _verify_mpq(M, rng, args.samples, checks)
        _exterior_checks(M.space, rng, args.samples, checks)
        space = {"kind": "mpq", "p": M.p, "q": M.q}
    elif kind[0] == "group":
        _verify_group(kind[1], kind[2], checks)
        space = {"kind": "group", "name": kind[1]}
    else:
        _verify_torus(kind[1], checks)
        space = {"kind": "torus", "n": kind[1]}
    report = {"schema": SCHEMA, "command": "verify", "space": space, "seed": args.seed, "passed": checks.ok, "checks": checks.items}
    _emit(to_json(report), args.out)
    if args.out not in (None, "-"):
        for c in checks.items:
            status = "PASS" if c["passed"] else "FAIL"
            print(f"{status} {c['name']}: {c['computed']:.3e} (expected {c['expected']:.3e}, tol {c['tol']:.1e})", file=sys.stderr)
    return EXIT_OK if checks.ok else EXIT_FAIL


# ---------------------------------------------------------------- brf


GAUGES = ("auto", "fix-mu", "fix-h", "pin", "none")


def _gauge(args, M) -> str:
    if args.gauge != "auto":
        return args.gauge
    return "fix-mu" if M.p != M.q else "fix-h"


def _solve_options(args, chart, M, x0):
    """Gauge keyword arguments for brf.solve: fixed gauges hold the initial value."""
    gauge = _gauge(args, M)
    if gauge == "fix-mu":
        return {"fix": {"mu": float(x0[0])}}
    if gauge == "fix-h":
        name = chart.reference[0]
        return {"fix": {name: float(x0[chart.param_names.index(name)])}}
    if gauge == "pin":
        g, H = chart(chart.representative(_ray_point(M)))
        return {"pin_norm": float(np.sum(g.inverse * h_squared(M.space, g, H).components))}
    return {}


def _ray_point(M):
    return ref.X_O.copy() if M.p == M.q else M.brf_params()


def _pair_diagnostics(S, g, H):
    ric = ricci(S, g, check=False)
    scal = float(np.sum(g.inverse * ric.components))
    tr = float(np.sum(g.inverse * h_squared(S, g, H).components))
    tt = torsion_test(S, g, H)
    return {
        "scal": scal,
        "quarter_trace_h2": 0.25 * tr,
        "norm_h_sq": inner(g, H, H),
        "norm_h_sq_normalized": inner(g, H, H, normalized=True),
        "dH_norm": tt.dH_norm,
        "sigma_norm": tt.sigma_norm,
        "parallel_defect": tt.parallel_defect,
    }


def cmd_brf(args) -> int:
    M = _require_mpq(args)
    chart = M.diagonal_chart() if M.p != M.q else M.p_eq_q_chart()
    rng = np.random.default_rng(args.seed)
    if args.init is not None:
        x = _floats(args.init, "init")
        if len(x) != chart.dim:
            raise UsageError(f"--init needs {chart.dim} values {chart.param_names}")
        initials = [np.array(x)] * max(1, args.multistart)
        if args.multistart > 1:
            initials = [initials[0]] + list(M.random_initials(args.multistart - 1, rng))
    else:
        initials = list(M.random_initials(max(1, args.multistart), rng))
    for x in initials:
        if not chart.domain_check(x):
            raise UsageError(f"initial point {list(x)} outside the chart domain")
    opts = dict(tol=args.tol, max_iter=args.max_iter, weighting=args.weighting)
    # solve's per-run options differ only in the gauge, so group by it
    results = []
    per_run = [_solve_options(args, chart, M, x) for x in initials]
    if all(o == per_run[0] for o in per_run):
        results = multistart(chart, initials, workers=_workers(args.workers), **per_run[0], **opts)
    else:
        for x, o in zip(initials, per_run):
            results.extend(multistart(chart, [x], **o, **opts))

    target = chart.representative(_ray_point(M))
    runs = []
    n_conv = n_ray = 0
    for x0, r in zip(initials, results):
        entry = {"initial": dict(zip(chart.param_names, x0.tolist()))}
        if isinstance(r, Exception):
            last = getattr(r, "last_params", None)
            if last is None and getattr(r, "report", None) is not None:
                last = r.report.params
            entry.update(converged=False, error=type(r).__name__, message=str(r))
            if last is not None and np.all(np.isfinite(last)):
                entry["last_params"] = dict(zip(chart.param_names, np.asarray(last).tolist()))
        else:
            n_conv += 1
            params = r.params
            rep = chart.representative(params)
            dist = float(np.abs(rep - target).max())
            on_ray = dist < args.ray_tol
            n_ray += on_ray
            g, H = chart(params)
            entry.update(r.to_json())
            entry.update(
                representative=dict(zip(chart.param_names, rep.tolist())),
                distance_to_ray=dist,
                on_ray=on_ray,
                metric=g.components,
                torsion=H.to_json(),
                diagnostics=_pair_diagnostics(M.space, g, H),
            )
        runs.append(entry)
    report = {
        "schema": SCHEMA,
        "command": "brf",
        "space": {"kind": "mpq", "p": M.p, "q": M.q},
        "chart": list(chart.param_names),
        "gauge": _gauge(args, M),
        "seed": args.seed,
        "ray_representative": dict(zip(chart.param_names, target.tolist())),
        "summary": {"runs": len(runs), "converged": n_conv, "on_ray": n_ray},
        "runs": runs,
    }
    _emit(to_json(report), args.out)
    if n_conv == 0:
        return EXIT_NUMERIC
    return EXIT_OK if n_ray == n_conv else EXIT_FAIL


# --------------------------------------------------------------- flow


def _flow_system(args, M):
    if args.field == "closed" and M.p == M.q:
        raise UsageError("the closed-form field exists only for p != q; use --field generic")
    field = args.field or ("closed" if M.p != M.q else "generic")
    return field, (MpqODE(M, args.lam) if field == "closed" else mpq_flow_system(M, args.lam))


def cmd_flow(args) -> int:
    M = _require_mpq(args)
    _positive("lambda", args.lam)
    _positive("tmax", args.tmax)
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    field, system = _flow_system(args, M)
    metric = _floats(args.init, "init")
    k = len(system.metric_names)
    if M.p == M.q and len(metric) == 3:
        metric += [0.0, 0.0]
    if len(metric) != k:
        raise UsageError(f"--init needs {k} values {system.metric_names}")
    b = _floats(args.b_init, "b-init") if args.b_init else [0.0] * len(system.b_names)
    if len(b) != len(system.b_names):
        raise UsageError(f"--b-init needs {len(system.b_names)} values")
    y0 = np.array(metric + b)
    if not system.in_domain(y0):
        raise UsageError(f"initial metric {metric} is not positive definite")
    traj = integrate(
        system, y0, args.tmax, samples=args.samples, rtol=args.rtol, atol=args.atol, stop_tol=args.stop_tol
    )
    names = list(system.metric_names) + (list(system.b_names) if M.p == M.q else [])
    cols = ["t"] + names + ["residual_norm", "scal", "normH2"]
    rows = []
    for s, d in zip(traj.states, traj.diagnostics):
        vals = list(s.metric_params) + (list(s.b_params) if M.p == M.q else [])
        rows.append([s.t] + vals + [d.residual_norm, d.scal, d.norm_h2])
    if args.format == "json":
        doc = {
            "schema": SCHEMA,
            "command": "flow",
            "space": {"kind": "mpq", "p": M.p, "q": M.q},
            "lambda": args.lam,
            "field": field,
            "converged": traj.converged,
            "message": traj.message,
            "columns": cols,
            "rows": rows,
        }
        if M.p != M.q:
            doc["fixed_point"] = fixed_point_mpq(M.p, M.q, args.lam).tolist()
        _emit(to_json(doc), args.out)
    else:
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for r in rows:
            buf.write(",".join(_fmt(float(v)) for v in r) + "\n")
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_stability(args) -> int:
    M = _require_mpq(args)
    _positive("lambda", args.lam)
    field, system = _flow_system(args, M)
    if args.point:
        point = _floats(args.point, "point")
        if M.p == M.q and len(point) == 3:
            point += [0.0, 0.0]
        point += [0.0] * (system.dim - len(point))
        if len(point) != system.dim:
            raise UsageError(f"--point needs {len(system.metric_names)} metric values")
    elif M.p != M.q:
        point = list(fixed_point_mpq(M.p, M.q, args.lam)) + [0.0] * (system.dim - 3)
    else:
        x = ref.X_O
        t2 = args.lam / 2.0  # H = lam (e123 + e145) sits on the ray at h1 = lam
        point = [x[0] ** 2 * t2, t2, t2, 0.0, 0.0] + [0.0] * (system.dim - 5)
    rep = jacobian_eigen(system, point)
    doc = {
        "schema": SCHEMA,
        "command": "stability",
        "space": {"kind": "mpq", "p": M.p, "q": M.q},
        "lambda": args.lam,
        "field": field,
        "variables": list(system.metric_names) + list(system.b_names),
    }
    doc.update(rep.to_json())
    ev = rep.eigenvalues
    doc["eigenvalues"] = ev.real.tolist() if np.all(ev.imag == 0) else doc["eigenvalues"]
    if M.p != M.q and not args.point:
        doc["closed_form_eigenvalues"] = np.sort(np.diag(mpq_jacobian_closed_form(M.p, M.q, args.lam))).tolist()
    _emit(to_json(doc), args.out)
    return EXIT_OK


# ----------------------------------------------------------- kobayashi


def _load_kobayashi(path):
    with open(path) as fh:
        doc = json.load(fh)
    try:
        g0 = Metric(np.array(doc["g0"], float))
        n = g0.n
        return KobayashiData(
            g0,
            np.array(doc["ric0"], float),
            AltForm.from_json(n, doc["alpha"]),
            AltForm.from_json(n, doc["beta"]),
            float(doc["lambda"]),
            float(doc["mu"]),
        )
    except (KeyError, TypeError) as exc:
        raise UsageError(f"bad Kobayashi data file: {exc}") from exc


def cmd_kobayashi(args) -> int:
    if args.data:
        data = _load_kobayashi(args.data)
    else:
        if args.lam is None or args.mu is None:
            raise UsageError("give --data FILE or both --lambda and --mu")
        data = synthetic_kobayashi_data(_positive("lambda", args.lam), _positive("mu", args.mu))
    doc = {"schema": SCHEMA, "command": "kobayashi", "lambda": data.lam, "mu": data.mu}
    try:
        res = kobayashi_check(data, tol=args.tol)
    except ConditionViolated as exc:
        doc.update(satisfied=False, violated=exc.condition, defect=exc.defect)
        _emit(to_json(doc), args.out)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc.update(satisfied=True, c=res.c, h=res.h, defects=res.defects)
    _emit(to_json(doc), args.out)
    return EXIT_OK


# ------------------------------------------------------------- catalog


def cmd_catalog(args) -> int:
    if args.action == "list":
        doc = {"schema": SCHEMA, "command": "catalog", "entries": dict(CATALOG)}
        _emit(to_json(doc), args.out)
        return EXIT_OK
    M = mpq(args.p, args.q)
    charts = []
    chart = M.diagonal_chart() if M.p != M.q else M.p_eq_q_chart()
    charts.append(
        {
            "params": list(chart.param_names),
            "log_params": list(chart.log_params),
            "reference": {"param": chart.reference[0], "value": chart.reference[1]},
            "brf_point": _ray_point(M).tolist(),
        }
    )
    S = M.space
    doc = {
        "schema": SCHEMA,
        "command": "catalog",
        "space": {"kind": "mpq", "p": M.p, "q": M.q},
        "algebra": M.algebra.to_json(),
        "killing": M.algebra.killing,
        "isotropy_indices": list(S.isotropy_indices),
        "m_indices": list(S.m_indices),
        "charts": charts,
    }
    _emit(to_json(doc), args.dump or args.out)
    return EXIT_OK


# -------------------------------------------------------------- parser


def _add_space(p, mpq_only=False):
    p.add_argument("--space", default="mpq", help="mpq" if mpq_only else "mpq | group:NAME | torus[:N]")
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    if not mpq_only:
        p.add_argument("--n", type=int, help="torus dimension")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grf-homog", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--config", help="JSON file of option values; explicit flags take precedence")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="reproduce closed-form tables and structural identities")
    _add_space(v)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("brf", help="solve the BRF equations on an M_{p,q} chart")
    _add_space(b, mpq_only=True)
    b.add_argument("--init", help="comma-separated chart parameters")
    b.add_argument("--multistart", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--gauge", choices=GAUGES, default="auto")
    b.add_argument("--weighting", choices=("auto", "relative", "absolute"), default="auto")
    b.add_argument("--tol", type=float, default=1e-12)
    b.add_argument("--max-iter", type=int, default=200)
    b.add_argument("--ray-tol", type=float, default=1e-6)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out")
    b.set_defaults(func=cmd_brf)

    f = sub.add_parser("flow", help="integrate the generalized Ricci flow on M_{p,q}")
    _add_space(f, mpq_only=True)
    f.add_argument("--lambda", dest="lam", type=float, default=1.0)
    f.add_argument("--init", required=False, default="1,1,1", help="M,A,B (p != q) or M,A,B,c,s (p = q)")
    f.add_argument("--b-init", help="initial 2-form potential coefficients (generic field)")
    f.add_argument("--field", choices=("closed", "generic"))
    f.add_argument("--tmax", type=float, default=200.0)
    f.add_argument("--samples", type=int, default=400)
    f.add_argument("--rtol", type=float, default=1e-10)
    f.add_argument("--atol", type=float, default=1e-12)
    f.add_argument("--stop-tol", type=float, default=1e-12)
    f.add_argument("--format", choices=("csv", "json"), default="csv")
    f.add_argument("--out")
    f.set_defaults(func=cmd_flow)

    s = sub.add_parser("stability", help="Jacobian and spectrum of the flow at a point")
    _add_space(s, mpq_only=True)
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.add_argument("--point", help="metric parameters; default is the fixed point")
    s.add_argument("--field", choices=("closed", "generic"))
    s.add_argument("--out")
    s.set_defaults(func=cmd_stability)

    k = sub.add_parser("kobayashi", help="check the circle-bundle conditions on pointwise data")
    k.add_argument("--data", help="JSON with g0, ric0, alpha, beta, lambda, mu")
    k.add_argument("--lambda", dest="lam", type=float)
    k.add_argument("--mu", type=float)
    k.add_argument("--tol", type=float, default=1e-10)
    k.add_argument("--out")
    k.set_defaults(func=cmd_kobayashi)

    c = sub.add_parser("catalog", help="list spaces or dump M_{p,q} data")
    c.add_argument("action", choices=("list", "mpq"))
    c.add_argument("--p", type=int, default=2)
    c.add_argument("--q", type=int, default=1)
    c.add_argument("--dump", help="output path for the mpq dump")
    c.add_argument("--out")
    c.set_defaults(func=cmd_catalog)
    return ap


def _apply_config(ap, argv):
    """Re-parse with values from --config as subcommand defaults."""
    pre, _ = ap.parse_known_args(argv)
    if not pre.config:
        return ap.parse_args(argv)
    try:
        with open(pre.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {pre.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    sub = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction))
    sp = sub.choices[pre.command]
    known = {a.dest for a in sp._actions} - {"help"}
    cfg = {k.replace("-", "_"): v for k, v in cfg.items() if k != "command"}
    if "lambda" in cfg:
        cfg["lam"] = cfg.pop("lambda")
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    for a in sp._actions:
        if a.dest in cfg and a.type is not None and cfg[a.dest] is not None:
            cfg[a.dest] = a.type(cfg[a.dest])
        if a.dest in cfg and a.choices is not None and cfg[a.dest] not in a.choices:
            raise UsageError(f"config {a.dest}={cfg[a.dest]!r} not in {list(a.choices)}")
    for a in sp._actions:
        if a.dest in cfg and a.required:
            a.required = False
    sp.set_defaults(**cfg)
    return ap.parse_args(argv)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = _apply_config(ap, argv)
    except UsageError as exc:
        print(f"grf-homog: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(), np.errstate(all="ignore"):
            warnings.simplefilter("ignore", RuntimeWarning)
            return args.func(args)
    except (UsageError, *USAGE_ERRORS) as exc:
        print(f"grf-homog: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"grf-homog: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except GeometryError as exc:
        print(f"grf-homog: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"grf-homog: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
