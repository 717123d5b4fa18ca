"""Dormand-Prince 5(4) integrator with PI step control and dense output."""

from __future__ import annotations

import dataclasses
from typing import Callable

import numpy as np

from .errors import DomainExit, GeometryError, StepUnderflow

# Butcher tableau
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B5 - B4

# dense output: y(t + th*h) = y + h * K^T (P @ [th, th^2, th^3, th^4])
P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
MIN_STEP = 1e-14
# PI exponents for an order-4 error estimate
ALPHA = 0.7 / 5
BETA = 0.4 / 5


@dataclasses.dataclass
class ODEResult:
    t: np.ndarray
    y: np.ndarray
    converged: bool
    n_steps: int
    n_rejected: int
    message: str


def _stages(f, t, y, h, k1):
    K = np.empty((7, y.size))
    K[0] = k1
    for s in range(1, 7):
        K[s] = f(t + C[s] * h, y + h * (np.asarray(A[s]) @ K[:s]))
    return K


def dense_eval(y, h, K, theta):
    th = np.array([theta, theta**2, theta**3, theta**4])
    return y + h * (K.T @ (P @ th))


def integrate(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t_max: float,
    t_eval=None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    stop_tol: float | None = 1e-12,
    domain: Callable[[np.ndarray], bool] | None = None,
    h0: float | None = None,
    max_steps: int = 1_000_000,
) -> ODEResult:
    """Integrate y' = f(t, y) from t = 0 towards ``t_max``.

    ``t_eval`` are output times (default: only the end point), filled by the
    continuous extension.  A step whose stages or endpoint leave ``domain``
    is retried at half the size.  With ``stop_tol`` the run stops once
    max|f| < stop_tol and the result is flagged converged; remaining output
    times then carry the final state.
    """
    y = np.array(y0, dtype=float)
    if domain is not None and not domain(y):
        raise DomainExit("initial state outside the domain", 0.0, y)
    t_eval = np.array([t_max] if t_eval is None else t_eval, dtype=float)
    if np.any(np.diff(t_eval) < 0) or (t_eval.size and (t_eval[0] < 0 or t_eval[-1] > t_max)):
        raise ValueError("t_eval must be increasing within [0, t_max]")
    out = np.empty((t_eval.size, y.size))
    n_out = 0
    while n_out < t_eval.size and t_eval[n_out] == 0.0:
        out[n_out] = y
        n_out += 1

    t = 0.0
    k1 = np.asarray(f(t, y), dtype=float)
    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0, d1 = np.linalg.norm(y / scale), np.linalg.norm(k1 / scale)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h = min(h0, t_max) if t_max > 0 else 0.0
    err_prev = 1e-4
    n_steps = n_rej = 0
    converged = False
    message = "reached t_max"

    def in_domain(v):
        return np.all(np.isfinite(v)) and (domain is None or domain(v))

    while t < t_max:
        if stop_tol is not None and np.abs(k1).max(initial=0.0) < stop_tol:
            converged = True
            message = "converged: |f| below stop_tol"
            break
        if n_steps + n_rej >= max_steps:
            message = f"step budget of {max_steps} exhausted"
            break
        h = min(h, t_max - t)
        if h < MIN_STEP:
            raise StepUnderflow(f"step size {h:.3e} below {MIN_STEP:g}", t, y)
        try:
            K = _stages(f, t, y, h, k1)
            ok = np.all(np.isfinite(K))
        except GeometryError:
            ok = False
        y_new = y + h * (B5 @ K) if ok else None
        if not ok or not in_domain(y_new):
            h *= 0.5
            n_rej += 1
            continue
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean((h * (E @ K) / scale) ** 2))
        if err <= 1.0:
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * err**-ALPHA * err_prev**BETA
                factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            t_new = t + h
            while n_out < t_eval.size and t_eval[n_out] <= t_new:
                out[n_out] = dense_eval(y, h, K, (t_eval[n_out] - t) / h)
                n_out += 1
            t, y, k1 = t_new, y_new, K[6]
            err_prev = max(err, 1e-4)
            h *= factor
            n_steps += 1
        else:
            h *= max(MIN_FACTOR, SAFETY * err**-ALPHA)
            n_rej += 1
    out[n_out:] = y
    return ODEResult(t_eval, out, converged, n_steps, n_rej, message)
