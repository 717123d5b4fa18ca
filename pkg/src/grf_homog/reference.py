"""Closed-form reference values on M_{p,q}, used as independent oracles.

Each function evaluates an explicit formula in the chart parameters; none
of them calls the generic curvature or exterior-calculus code.
"""

from __future__ import annotations

import math

import numpy as np

from .forms import AltForm

# x_o = (mu, a, b, c, h1) of the p = q = 1 BRF pair
X_O = np.array([2 * math.sqrt(2), 1.0, 1.0, 0.0, 2.0])

# differential of (p1, p2, p3, p4) at X_O
F_AT_X_O = np.array(
    [
        [128 * math.sqrt(2), 0, 0, 0, -128],
        [0, 256, 0, 0, -64],
        [0, 0, 256, 0, -64],
        [0, 0, 0, -192, 0],
    ],
    dtype=float,
)


def gamma(t) -> np.ndarray:
    """Curve of BRF pairs (t^2 g_o, t^2 H_o) through X_O."""
    return np.array([2 * math.sqrt(2) * t, t, t, 0.0, 2 * t * t])


def ricci_diagonal(p, q, mu, a, b) -> np.ndarray:
    """Ric of the diagonal metric (mu, a, b) on M_{p,q}, as a 5x5 matrix."""
    s2 = (p * p + q * q) ** 2
    a2, b2, mu2 = a * a, b * b, mu * mu
    r11 = mu2 * mu2 * (a2 * a2 * p * p + b2 * b2 * q * q) / (8 * a2 * a2 * b2 * b2 * s2)
    r22 = (4 * a2 * s2 - mu2 * q * q) / (8 * a2 * s2)
    r44 = (4 * b2 * s2 - mu2 * p * p) / (8 * b2 * s2)
    return np.diag([r11, r22, r22, r44, r44])


def h_squared_diagonal(p, q, mu, a, b) -> np.ndarray:
    """H^2 of H = q e^{123} + p e^{145} for the diagonal metric."""
    a2, b2, mu2 = a * a, b * b, mu * mu
    h11 = 2 * (a2 * a2 * p * p + b2 * b2 * q * q) / (a2 * a2 * b2 * b2)
    h22 = 2 * q * q / (a2 * mu2)
    h44 = 2 * p * p / (b2 * mu2)
    return np.diag([h11, h22, h22, h44, h44])


def star_diagonal(mu, a, b, h1, h2) -> AltForm:
    """*(h1 e^{123} + h2 e^{145}) for the diagonal metric."""
    a2, b2 = a * a, b * b
    return AltForm.from_terms(5, {(2, 3): a2 / (mu * b2) * h2, (4, 5): b2 / (mu * a2) * h1})


def ricci_p_eq_q(mu, a, b, c) -> np.ndarray:
    """Ric of the metric (mu, a, b, c, s = 0) on M_{1,1}."""
    a2, b2, c2, mu2 = a * a, b * b, c * c, mu * mu
    D = a2 * b2 - c2
    r11 = (2 * c2 * (64 * c2 - 64 * a2 * b2 - mu2 * mu2) + mu2 * mu2 * (a2 * a2 + b2 * b2)) / (32 * D * D)
    r22 = (64 * a2 * c2 + mu2 * (16 * a2 * b2 - b2 * mu2 - 16 * c2)) / (32 * mu2 * D)
    r44 = (64 * b2 * c2 + mu2 * (16 * a2 * b2 - a2 * mu2 - 16 * c2)) / (32 * mu2 * D)
    r24 = c * (64 * a2 * b2 - mu2 * mu2) / (32 * mu2 * D)
    R = np.diag([r11, r22, r22, r44, r44])
    R[1, 3] = R[3, 1] = R[2, 4] = R[4, 2] = r24
    return R


def h_squared_p_eq_q(mu, a, b, c, h1) -> np.ndarray:
    """H^2 of the harmonic form with parameter h1 for the metric (mu, a, b, c, 0)."""
    a2, b2, c2, mu2, k = a * a, b * b, c * c, mu * mu, h1 * h1
    D, P = a2 * b2 - c2, a2 * b2 + c2
    h11 = 2 * k * (a2 * a2 + b2 * b2 - 2 * c2) / (D * P)
    den = mu2 * D * P * P
    h22 = 2 * k * (a2 * c2 * (a2 * a2 + b2 * b2) - c2 * c2 * (2 * a2 + b2) + a2 * a2 * b2**3) / den
    h44 = 2 * k * (b2 * c2 * (a2 * a2 + b2 * b2) - c2 * c2 * (a2 + 2 * b2) + a2**3 * b2 * b2) / den
    h24 = 2 * c * k * (a2 * b2 * (a2 * a2 + a2 * b2 + b2 * b2 - 2 * c2) - c2 * c2) / den
    Hm = np.diag([h11, h22, h22, h44, h44])
    Hm[1, 3] = Hm[3, 1] = Hm[2, 4] = Hm[4, 2] = h24
    return Hm


def star_p_eq_q(mu, a, b, c, h1, h3, h4) -> AltForm:
    """*(h1 (e^{123} + e^{145}) + h3 (e^{125} - e^{134}) + h4 (e^{124} + e^{135})), s = 0."""
    a2, b2, c2 = a * a, b * b, c * c
    D = mu * (a2 * b2 - c2)
    w = (h3 * (a2 * b2 + c2) - c * h1 * (a2 + b2)) / D
    return AltForm.from_terms(
        5,
        {
            (2, 3): (h1 * (a2 * a2 + c2) - 2 * a2 * c * h3) / D,
            (4, 5): (h1 * (b2 * b2 + c2) - 2 * b2 * c * h3) / D,
            (2, 4): -h4 / mu,
            (3, 5): -h4 / mu,
            (2, 5): -w,
            (3, 4): w,
        },
    )


def d_star_p_eq_q(mu, a, b, c, h1, h3, h4) -> AltForm:
    a2, b2, c2 = a * a, b * b, c * c
    w = (h3 * (a2 * b2 + c2) - c * h1 * (a2 + b2)) / (mu * (a2 * b2 - c2))
    return AltForm.from_terms(
        5,
        {(1, 2, 5): 2 * h4 / mu, (1, 3, 4): -2 * h4 / mu, (1, 2, 4): -2 * w, (1, 3, 5): -2 * w},
    )
