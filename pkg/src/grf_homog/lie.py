"""Real Lie algebras by structure constants and reductive splittings g = k + m.

Conventions: ``C[i, j, k]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``.
Vectors are plain coefficient arrays over the stored basis.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import settings
from .errors import (
    AntisymmetryViolation,
    DimensionMismatch,
    JacobiViolation,
    NotReductive,
)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def jacobi_defect(C):
    """Largest |[[x,y],z] + [[y,z],x] + [[z,x],y]| component over basis triples.

    Returns ``(defect, (i, j, k))``.
    """
    C = np.asarray(C, dtype=float)
    # J[i,j,k,l] = sum_a C[i,j,a] C[a,k,l] + cyclic
    J = np.einsum("ija,akl->ijkl", C, C)
    J = J + J.transpose(1, 2, 0, 3) + J.transpose(2, 0, 1, 3)
    if J.size == 0:
        return 0.0, (0, 0, 0)
    flat = np.abs(J).max(axis=3)
    idx = np.unravel_index(np.argmax(flat), flat.shape)
    return float(flat[idx]), tuple(int(i) for i in idx)


@dataclasses.dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Finite-dimensional real Lie algebra.

    Construct through :func:`build_lie_algebra`, which validates the
    structure constants.
    """

    structure_constants: np.ndarray
    labels: tuple[str, ...]

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    @property
    def C(self) -> np.ndarray:
        return self.structure_constants

    def bracket(self, X, Y) -> np.ndarray:
        return bracket(self, X, Y)

    def ad(self, X) -> np.ndarray:
        """Matrix of ad(X); column j holds the coefficients of [X, e_j]."""
        X = _check_vector(self, X)
        return np.einsum("i,ijk->kj", X, self.C)

    @cached_property
    def killing(self) -> np.ndarray:
        return killing_form(self)

    def is_unimodular(self, tol=None) -> bool:
        tol = settings.validation_tol if tol is None else tol
        return bool(np.abs(np.einsum("ijj->i", self.C)).max(initial=0.0) < tol)

    def to_json(self) -> dict:
        return {"dim": self.dim, "C": self.C.tolist(), "labels": list(self.labels)}


def _check_vector(L, X):
    X = np.asarray(X, dtype=float)
    if X.shape != (L.dim,):
        raise DimensionMismatch(f"expected a vector of length {L.dim}, got shape {X.shape}")
    return X


def build_lie_algebra(structure_constants, labels: Sequence[str] | None = None, tol=None) -> LieAlgebra:
    C = np.asarray(structure_constants, dtype=float)
    if C.ndim != 3 or not (C.shape[0] == C.shape[1] == C.shape[2]):
        raise DimensionMismatch(f"structure constants must be n x n x n, got {C.shape}")
    n = C.shape[0]
    tol = settings.validation_tol if tol is None else tol
    asym = np.abs(C + C.transpose(1, 0, 2))
    if n and asym.max() >= tol:
        idx = tuple(int(i) for i in np.unravel_index(np.argmax(asym), asym.shape))
        raise AntisymmetryViolation(idx, float(asym[idx]))
    defect, triple = jacobi_defect(C)
    if defect >= tol:
        raise JacobiViolation(triple, defect)
    if labels is None:
        labels = tuple(f"e{i + 1}" for i in range(n))
    elif len(labels) != n:
        raise DimensionMismatch(f"{len(labels)} labels for a {n}-dimensional algebra")
    return LieAlgebra(_frozen(C), tuple(labels))


def lie_algebra_from_brackets(n, brackets: dict, labels=None) -> LieAlgebra:
    """Build from a dict ``{(i, j): {k: coeff}}`` of 0-based brackets [e_i, e_j]."""
    C = np.zeros((n, n, n))
    for (i, j), terms in brackets.items():
        for k, v in terms.items():
            C[i, j, k] = v
            C[j, i, k] = -v
    return build_lie_algebra(C, labels)


def bracket(L: LieAlgebra, X, Y) -> np.ndarray:
    X = _check_vector(L, X)
    Y = _check_vector(L, Y)
    return np.einsum("i,j,ijk->k", X, Y, L.C)


def killing_form(L: LieAlgebra) -> np.ndarray:
    """B(X, Y) = tr(ad X ad Y) as a matrix over the basis."""
    # ad(e_i)[l, j] = C[i, j, l]
    B = np.einsum("ijl,klj->ik", L.C, L.C)
    return 0.5 * (B + B.T)


def abelian(n: int) -> LieAlgebra:
    return build_lie_algebra(np.zeros((n, n, n)))


def direct_sum(L1: LieAlgebra, L2: LieAlgebra) -> LieAlgebra:
    n1, n2 = L1.dim, L2.dim
    C = np.zeros((n1 + n2,) * 3)
    C[:n1, :n1, :n1] = L1.C
    C[n1:, n1:, n1:] = L2.C
    labels = tuple(f"({l},0)" for l in L1.labels) + tuple(f"(0,{l})" for l in L2.labels)
    return build_lie_algebra(C, labels)


def change_basis(L: LieAlgebra, P, labels=None) -> LieAlgebra:
    """Structure constants in the basis whose a-th vector is column ``P[:, a]``."""
    P = np.asarray(P, dtype=float)
    if P.shape != (L.dim, L.dim):
        raise DimensionMismatch(f"basis matrix must be {L.dim} x {L.dim}")
    Pinv = np.linalg.inv(P)
    C = np.einsum("ia,jb,ijk,ck->abc", P, P, L.C, Pinv)
    # exact rational inputs pick up ~1e-16 noise through the inverse
    C[np.abs(C) < 1e-14] = 0.0
    return build_lie_algebra(C, labels)


def _parse_number(x):
    if isinstance(x, str):
        return float(Fraction(x.strip()))
    return float(x)


def lie_algebra_from_json(doc) -> LieAlgebra:
    """Load ``{"dim": n, "C": [...], "labels": [...]}``; entries may be "p/q" strings.

    ``doc`` is a dict, a JSON string, or a path to a JSON file.
    """
    if isinstance(doc, str):
        doc = json.loads(doc) if doc.lstrip().startswith("{") else json.load(open(doc))
    n = int(doc["dim"])
    C = np.vectorize(_parse_number, otypes=[float])(np.array(doc["C"], dtype=object))
    if C.shape != (n, n, n):
        raise DimensionMismatch(f"'C' has shape {C.shape}, expected {(n, n, n)}")
    return build_lie_algebra(C, doc.get("labels"))


@dataclasses.dataclass(frozen=True, eq=False)
class ReductiveSpace:
    """Reductive decomposition g = k + m over index subsets of the basis."""

    algebra: LieAlgebra
    isotropy_indices: tuple[int, ...]
    m_indices: tuple[int, ...]
    orientation: int = 1

    @property
    def n(self) -> int:
        """dim m."""
        return len(self.m_indices)

    @cached_property
    def bracket_m(self) -> np.ndarray:
        """Cm[i, j, c]: e_c-component of [e_i, e_j]_m, all indices over m."""
        m = list(self.m_indices)
        return _frozen(self.algebra.C[np.ix_(m, m, m)])

    @cached_property
    def bracket_k(self) -> np.ndarray:
        """Ck[i, j, z]: k-components of [e_i, e_j] for i, j in m."""
        m, k = list(self.m_indices), list(self.isotropy_indices)
        return _frozen(self.algebra.C[np.ix_(m, m, k)])

    @cached_property
    def isotropy_action(self) -> np.ndarray:
        """A[z, l, j]: e_l-component of [Z_z, e_j], the isotropy rep on m."""
        m, k = list(self.m_indices), list(self.isotropy_indices)
        return _frozen(self.algebra.C[np.ix_(k, m, m)].transpose(0, 2, 1))

    @cached_property
    def killing_m(self) -> np.ndarray:
        m = list(self.m_indices)
        return _frozen(self.algebra.killing[np.ix_(m, m)])

    def bracket_mm(self, X, Y) -> np.ndarray:
        """[X, Y]_m for X, Y given as coefficient vectors on m."""
        return np.einsum("i,j,ijk->k", X, Y, self.bracket_m)

    def embed(self, X) -> np.ndarray:
        v = np.zeros(self.algebra.dim)
        v[list(self.m_indices)] = X
        return v


def reductive_split(L: LieAlgebra, isotropy_indices, m_indices, orientation: int = 1, tol=None) -> ReductiveSpace:
    k = tuple(int(i) for i in isotropy_indices)
    m = tuple(int(i) for i in m_indices)
    if sorted(k + m) != list(range(L.dim)):
        raise DimensionMismatch("isotropy and m index sets must partition the basis")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    tol = settings.validation_tol if tol is None else tol
    C = L.C
    # [k, k] in k
    for a, b in itertools.product(k, k):
        for c in m:
            if abs(C[a, b, c]) >= tol:
                raise NotReductive((a, b), c, C[a, b, c])
    # [k, m] in m
    for a, b in itertools.product(k, m):
        for c in k:
            if abs(C[a, b, c]) >= tol:
                raise NotReductive((a, b), c, C[a, b, c])
    return ReductiveSpace(L, k, m, orientation)


def lie_group_space(L: LieAlgebra) -> ReductiveSpace:
    """Trivial isotropy: the whole algebra is m."""
    return reductive_split(L, (), range(L.dim))


def _as_tensor(T):
    if hasattr(T, "tensor"):
        return T.tensor
    if hasattr(T, "components"):
        return np.asarray(T.components, dtype=float)
    return np.asarray(T, dtype=float)


def invariance_defect(S: ReductiveSpace, T) -> float:
    """max over Z in k of |sum_i T(..., [Z, X_i]_m, ...)| on basis tuples."""
    T = _as_tensor(T)
    if T.ndim == 0 or not S.isotropy_indices:
        return 0.0
    worst = 0.0
    for A in S.isotropy_action:
        D = np.zeros_like(T)
        for ax in range(T.ndim):
            D += np.moveaxis(np.tensordot(T, A, axes=([ax], [0])), -1, ax)
        worst = max(worst, float(np.abs(D).max()))
    return worst


def isotropy_invariance_check(S: ReductiveSpace, T, tol=None) -> tuple[bool, float]:
    tol = settings.invariance_tol if tol is None else tol
    d = invariance_defect(S, T)
    return d < tol, d
