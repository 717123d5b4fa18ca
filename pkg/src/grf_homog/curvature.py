"""Ricci tensors and curvature of invariant connections on G/K via Nomizu maps."""

from __future__ import annotations

import dataclasses

import numpy as np

from . import settings
from .errors import NonInvariantMetric, NotUnimodular
from .forms import AltForm, Bilinear, Metric, codifferential, h_squared
from .lie import ReductiveSpace, invariance_defect


def orthonormal_frame(g: Metric, order=None) -> np.ndarray:
    """Columns form a g-orthonormal basis of m.

    Built from the Cholesky factor of g after permuting the basis by
    ``order``; different orders give different frames of the same metric.
    """
    G = g.components
    if order is None:
        L = g.cholesky
        return np.linalg.inv(L).T
    order = list(order)
    L = np.linalg.cholesky(G[np.ix_(order, order)])
    F = np.zeros_like(G)
    F[order, :] = np.linalg.inv(L).T
    return F


def _check_preconditions(S: ReductiveSpace, g: Metric):
    if not S.algebra.is_unimodular():
        raise NotUnimodular("homogeneous Ricci formula requires a unimodular algebra")
    d = invariance_defect(S, g.components)
    if d >= settings.invariance_tol:
        raise NonInvariantMetric(f"metric is not isotropy invariant (defect {d:.3e})")


def ricci(S: ReductiveSpace, g: Metric, frame=None, *, check: bool = True) -> Bilinear:
    """Ricci tensor of an invariant metric, unimodular ambient algebra.

    Ric(X,X) = -1/2 sum_i |[X,E_i]_m|^2 - 1/2 B(X,X) + 1/2 sum_{i<j} g([E_i,E_j]_m, X)^2
    over a g-orthonormal frame E_i; off-diagonal entries by polarization,
    i.e. the symmetric matrix of this quadratic form.  The frame enters only
    through P = sum_i E_i E_i^T, which is g^{-1} for every orthonormal frame;
    an explicit ``frame`` is used as given.  ``check=False`` skips the
    unimodularity and invariance checks for callers whose charts guarantee
    them.
    """
    if check:
        _check_preconditions(S, g)
    G = g.components
    n = G.shape[0]
    if frame is None:
        P = g.inverse
    else:
        E = np.asarray(frame, float)
        P = E @ E.T
    Cm = S.bracket_m
    # CG[x, j, d] = g([e_x, e_j]_m, e_d)
    CG = Cm @ G
    # sum_i g([e_x, E_i], [e_y, E_i]) = sum CG[x, j, d] Cm[y, l, d] P[j, l]
    first = CG.reshape(n, -1) @ (P @ Cm).reshape(n, -1).T
    # sum_{i,j} g([E_i, E_j], e_x) g([E_i, E_j], e_y), both pairs raised by P
    W = CG.transpose(2, 0, 1)
    third = W.reshape(n, -1) @ (P @ W @ P).reshape(n, -1).T
    R = -0.5 * first - 0.5 * S.killing_m + 0.25 * third  # the i<j sum is half the full one
    return Bilinear(0.5 * (R + R.T))


def scalar(S: ReductiveSpace, g: Metric) -> float:
    return float(np.sum(g.inverse * ricci(S, g).components))


def bismut_ricci(S: ReductiveSpace, g: Metric, H: AltForm) -> Bilinear:
    """Ric - 1/4 H^2 - delta_g H; the 2-form delta_g H is the skew part."""
    sym = ricci(S, g).components - 0.25 * h_squared(S, g, H).components
    dH = codifferential(S, g, H).tensor
    return Bilinear(sym - dH)


@dataclasses.dataclass(frozen=True, eq=False)
class NomizuMap:
    """``components[i, j, k]``: e_k-coefficient of Lambda(e_i) e_j."""

    components: np.ndarray

    def apply(self, X, Y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", X, Y, self.components)

    def torsion(self, S: ReductiveSpace) -> np.ndarray:
        """T[i, j, k]: e_k-coefficient of Lambda(e_i)e_j - Lambda(e_j)e_i - [e_i, e_j]_m."""
        L = self.components
        return L - L.transpose(1, 0, 2) - S.bracket_m

    def metric_defect(self, g: Metric) -> float:
        """max |g(Lambda(X)Y, Z) + g(Y, Lambda(X)Z)| on basis vectors."""
        low = np.einsum("ijk,kz->ijz", self.components, g.components)
        return float(np.abs(low + low.transpose(0, 2, 1)).max(initial=0.0))


def levi_civita_nomizu(S: ReductiveSpace, g: Metric) -> NomizuMap:
    """Lambda(X)Y = 1/2 [X,Y]_m + U(X,Y), 2 g(U(X,Y),Z) = g([Z,X]_m,Y) + g(X,[Z,Y]_m)."""
    G, ginv, Cm = g.components, g.inverse, S.bracket_m
    # g([e_z, e_i]_m, e_j) = Cm[z, i, c] G[c, j]
    zij = np.einsum("zic,cj->zij", Cm, G)
    U_low = 0.5 * (zij + zij.transpose(0, 2, 1))  # [z, i, j]
    U = np.einsum("zij,zk->ijk", U_low, ginv)
    return NomizuMap(0.5 * Cm + U)


def bismut_nomizu(S: ReductiveSpace, g: Metric, H: AltForm) -> NomizuMap:
    """g(Lambda(X)Y, Z) = g(Lambda^g(X)Y, Z) + 1/2 H(X, Y, Z)."""
    LC = levi_civita_nomizu(S, g).components
    return NomizuMap(LC + 0.5 * np.einsum("ijz,zk->ijk", H.tensor, g.inverse))


@dataclasses.dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """``components[i, j, k, l]``: e_l-coefficient of R(e_i, e_j) e_k."""

    components: np.ndarray

    def ricci_contraction(self) -> np.ndarray:
        """Ric(Y, Z) = tr(X -> R(X, Y) Z)."""
        return np.einsum("ajka->jk", self.components)

    def max_abs(self) -> float:
        return float(np.abs(self.components).max(initial=0.0))


def curvature_tensor(S: ReductiveSpace, Lam: NomizuMap) -> CurvatureTensor:
    """R(X,Y) = [Lambda(X), Lambda(Y)] - Lambda([X,Y]_m) - ad([X,Y]_k)|_m."""
    # Lmat[i, l, k] = Lambda[i, k, l]: matrix of Lambda(e_i)
    Lmat = Lam.components.transpose(0, 2, 1)
    comm = np.einsum("ilm,jmk->ijlk", Lmat, Lmat)
    comm = comm - comm.transpose(1, 0, 2, 3)
    R = comm - np.einsum("ijc,clk->ijlk", S.bracket_m, Lmat)
    if S.isotropy_indices:
        R = R - np.einsum("ijz,zlk->ijlk", S.bracket_k, S.isotropy_action)
    # reorder to [i, j, k, l]
    return CurvatureTensor(R.transpose(0, 1, 3, 2))


def is_flat(R: CurvatureTensor, tol: float = 1e-10) -> tuple[bool, float]:
    m = R.max_abs()
    return m < tol, m
