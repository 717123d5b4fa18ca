"""Symmetric and alternating invariant tensors on m.

Alternating k-forms are stored by their values on strictly increasing index
tuples, so ``e^{123}`` has the single coefficient 1 at (0, 1, 2) and
evaluates to 1 on (e_1, e_2, e_3).  Inner products on forms use the *full*
ordered contraction (no 1/k!): with this choice ``trace_g(H^2) = |H|^2`` and
H^2(e_2, e_2) = 2 q^2 / (a^2 mu^2) on M_{p,q}.  Pass
``normalized=True`` to :func:`inner` for the 1/k! convention under which d
and the Hodge codifferential are adjoint.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from functools import cached_property, lru_cache

import numpy as np
import scipy.linalg

from .errors import DegreeOverflow, DimensionMismatch, SingularMetric
from .lie import ReductiveSpace


@lru_cache(maxsize=None)
def combos(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def _combo_array(n: int, k: int) -> np.ndarray:
    a = np.array(combos(n, k), dtype=int).reshape(-1, k)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _combo_index(n: int, k: int) -> dict:
    return {c: i for i, c in enumerate(combos(n, k))}


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
            elif seq[i] == seq[j]:
                return 0
    return sign


@lru_cache(maxsize=None)
def _perms(k: int):
    return tuple((p, _perm_sign(p)) for p in itertools.permutations(range(k)))


@lru_cache(maxsize=None)
def levi_civita(n: int) -> np.ndarray:
    eps = np.zeros((n,) * n)
    for p, s in _perms(n):
        eps[p] = s
    eps.setflags(write=False)
    return eps


@dataclasses.dataclass(frozen=True, eq=False)
class Metric:
    components: np.ndarray

    def __post_init__(self):
        g = np.array(self.components, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionMismatch(f"metric must be square, got {g.shape}")
        scale = max(1.0, float(np.abs(g).max(initial=0.0)))
        if np.abs(g - g.T).max(initial=0.0) > 1e-14 * scale:
            raise SingularMetric("metric components are not symmetric")
        g = 0.5 * (g + g.T)
        try:
            L = np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise SingularMetric("metric is not positive definite") from None
        g.setflags(write=False)
        object.__setattr__(self, "components", g)
        object.__setattr__(self, "_chol", L)
        object.__setattr__(self, "_compounds", {})

    @property
    def n(self) -> int:
        return self.components.shape[0]

    @property
    def cholesky(self) -> np.ndarray:
        return self._chol

    @cached_property
    def inverse(self) -> np.ndarray:
        ginv = np.linalg.inv(self.components)
        return 0.5 * (ginv + ginv.T)

    @cached_property
    def sqrt_det(self) -> float:
        return float(np.prod(np.diag(self._chol)))

    def __call__(self, X, Y) -> float:
        return float(X @ self.components @ Y)

    def inverse_compound(self, k: int) -> np.ndarray:
        """Induced inverse metric on k-forms over increasing tuples (cached).

        For k > n/2 this uses Jacobi's identity
        det(g^{-1}[I, K]) = sgn(I) sgn(K) det(g[K', I']) / det g
        with complements I', K', so only minors of size n - k are formed.
        """
        C = self._compounds.get(k)
        if C is None:
            n = self.n
            if 2 * k > n:
                comp, sgn = _complement_pattern(n, k)
                D = compound(self.components, n - k)[np.ix_(comp, comp)].T
                C = np.outer(sgn, sgn) * D / self.sqrt_det**2
            else:
                C = compound(self.inverse, k)
            self._compounds[k] = C
        return C


@dataclasses.dataclass(frozen=True, eq=False)
class Bilinear:
    """General bilinear form on m, ``components[i, j] = T(e_i, e_j)``."""

    components: np.ndarray

    def __post_init__(self):
        T = np.array(self.components, dtype=float)
        T.setflags(write=False)
        object.__setattr__(self, "components", T)

    @property
    def sym(self) -> np.ndarray:
        return 0.5 * (self.components + self.components.T)

    @property
    def skew(self) -> np.ndarray:
        return 0.5 * (self.components - self.components.T)

    def __add__(self, other):
        return Bilinear(self.components + _components(other))

    def __sub__(self, other):
        return Bilinear(self.components - _components(other))

    def __mul__(self, c):
        return Bilinear(c * self.components)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.abs(self.components).max(initial=0.0))


def _components(T):
    return T.components if hasattr(T, "components") else np.asarray(T, dtype=float)


@dataclasses.dataclass(frozen=True, eq=False)
class AltForm:
    """Alternating k-form on an n-dimensional space, canonical storage."""

    n: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if c.size != math.comb(self.n, self.degree):
            raise DimensionMismatch(
                f"{c.size} coefficients for a {self.degree}-form in dimension {self.n}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, n, k):
        return cls(n, k, np.zeros(math.comb(n, k)))

    @classmethod
    def from_terms(cls, n, terms: dict, one_based: bool = True):
        """``AltForm.from_terms(5, {(1, 2, 3): q, (1, 4, 5): p})`` is q e^{123} + p e^{145}.

        Index tuples need not be increasing; they are sorted with the
        permutation sign.
        """
        k = None
        c = None
        for idx, v in terms.items():
            idx = tuple(int(i) - (1 if one_based else 0) for i in idx)
            if k is None:
                k = len(idx)
                c = np.zeros(math.comb(n, k))
            elif len(idx) != k:
                raise DimensionMismatch("mixed degrees in form terms")
            s = _perm_sign(idx)
            if s == 0:
                continue
            c[_combo_index(n, k)[tuple(sorted(idx))]] += s * v
        if k is None:
            raise ValueError("empty term dict; use AltForm.zero")
        return cls(n, k, c)

    @classmethod
    def from_tensor(cls, T, n=None):
        """Read the increasing-index components of an antisymmetric array.

        ``n`` is required for 0-forms, whose array carries no dimension.
        """
        T = np.asarray(T, dtype=float)
        k = T.ndim
        n = T.shape[0] if k else n
        if k == 0:
            return cls(n, 0, [float(T)])
        return cls(n, k, [T[c] for c in combos(n, k)])

    @cached_property
    def tensor(self) -> np.ndarray:
        """Full antisymmetric array of shape (n,)*k."""
        k = self.degree
        if k == 0:
            return np.array(self.coeffs[0])
        T = np.zeros((self.n,) * k)
        for c, v in zip(combos(self.n, k), self.coeffs):
            if v == 0.0:
                continue
            for p, s in _perms(k):
                T[tuple(c[i] for i in p)] = s * v
        T.setflags(write=False)
        return T

    def __call__(self, *vectors) -> float:
        T = self.tensor
        for X in vectors:
            T = np.tensordot(X, T, axes=([0], [0]))
        return float(T)

    def __getitem__(self, idx) -> float:
        """Component on a 1-based index tuple, e.g. ``H[1, 2, 3]``."""
        return float(self.tensor[tuple(i - 1 for i in idx)])

    def _check(self, other):
        if (self.n, self.degree) != (other.n, other.degree):
            raise DimensionMismatch("forms of different degree or dimension")

    def __add__(self, other):
        self._check(other)
        return AltForm(self.n, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return AltForm(self.n, self.degree, self.coeffs - other.coeffs)

    def __neg__(self):
        return AltForm(self.n, self.degree, -self.coeffs)

    def __mul__(self, c):
        return AltForm(self.n, self.degree, float(c) * self.coeffs)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max(initial=0.0))

    def terms(self, tol=0.0):
        """Nonzero (1-based increasing index tuple, value) pairs."""
        return [
            (tuple(i + 1 for i in c), float(v))
            for c, v in zip(combos(self.n, self.degree), self.coeffs)
            if abs(v) > tol
        ]

    def to_json(self) -> dict:
        return {"degree": self.degree, "terms": [{"idx": list(i), "val": v} for i, v in self.terms()]}

    @classmethod
    def from_json(cls, n, doc):
        if not doc["terms"]:
            return cls.zero(n, int(doc["degree"]))
        form = cls.from_terms(n, {tuple(t["idx"]): t["val"] for t in doc["terms"]})
        if form.degree != int(doc["degree"]):
            raise DimensionMismatch("declared degree does not match the index tuples")
        return form


# ---------------------------------------------------------------- algebra


def wedge(a: AltForm, b: AltForm) -> AltForm:
    if a.n != b.n:
        raise DimensionMismatch("wedge of forms on different spaces")
    n, k, l = a.n, a.degree, b.degree
    if k + l > n:
        raise DegreeOverflow(f"a {k + l}-form on an {n}-dimensional space is identically zero")
    out = np.zeros(math.comb(n, k + l))
    index = _combo_index(n, k + l)
    for I, x in zip(combos(n, k), a.coeffs):
        if x == 0.0:
            continue
        for J, y in zip(combos(n, l), b.coeffs):
            if y == 0.0 or set(I) & set(J):
                continue
            out[index[tuple(sorted(I + J))]] += _perm_sign(I + J) * x * y
    return AltForm(n, k + l, out)


def interior(X, a: AltForm) -> AltForm:
    """i_X a, contracting the first slot."""
    if a.degree == 0:
        raise DegreeOverflow("interior product of a 0-form")
    return AltForm.from_tensor(np.tensordot(np.asarray(X, float), a.tensor, axes=([0], [0])))


def _raise_all(T, ginv):
    for ax in range(T.ndim):
        T = np.moveaxis(np.tensordot(T, ginv, axes=([ax], [0])), -1, ax)
    return T


def inner(g: Metric, a: AltForm, b: AltForm, normalized: bool = False) -> float:
    """g-inner product, full ordered contraction; divided by k! if ``normalized``."""
    a._check(b)
    if a.degree == 0:
        return float(a.coeffs[0] * b.coeffs[0])
    val = float(np.sum(a.tensor * _raise_all(b.tensor, g.inverse)))
    return val / math.factorial(a.degree) if normalized else val


def form_norm_sq(S: ReductiveSpace | None, g: Metric, a: AltForm) -> float:
    return inner(g, a, a)


# ------------------------------------------------------- differential ops


def _koszul_tensor(Cm: np.ndarray, T: np.ndarray) -> np.ndarray:
    n, k = Cm.shape[0], T.ndim
    # base[x_i, x_j, rest...] = a([x_i, x_j]_m, rest...)
    base = np.tensordot(Cm, T, axes=([2], [0]))
    D = np.zeros((n,) * (k + 1))
    for i, j in itertools.combinations(range(k + 1), 2):
        D += (-1) ** (i + j) * np.moveaxis(base, [0, 1], [i, j])
    return D


_D_CACHE: dict = {}


def koszul_matrix(S: ReductiveSpace, k: int) -> np.ndarray:
    """Matrix of d from k-form to (k+1)-form coefficients (increasing tuples)."""
    key = (id(S), k)
    hit = _D_CACHE.get(key)
    if hit is not None and hit[0] is S:
        return hit[1]
    n = S.n
    cols = []
    for c in range(math.comb(n, k)):
        e = np.zeros(math.comb(n, k))
        e[c] = 1.0
        D = _koszul_tensor(S.bracket_m, AltForm(n, k, e).tensor)
        cols.append(AltForm.from_tensor(D, n=n).coeffs)
    mat = np.array(cols).T.reshape(math.comb(n, k + 1), -1)
    mat.setflags(write=False)
    # holding S keeps id(S) from being reused while the entry lives
    _D_CACHE[key] = (S, mat)
    return mat


def koszul_d(S: ReductiveSpace, a: AltForm) -> AltForm:
    """Differential of an invariant form from the projected bracket.

    d a(X_0, ..., X_k) = sum_{i<j} (-1)^{i+j} a([X_i, X_j]_m, X_0, ..^i..^j.., X_k)
    """
    n, k = a.n, a.degree
    if n != S.n:
        raise DimensionMismatch(f"form lives on dimension {n}, m has dimension {S.n}")
    if k >= n:
        raise DegreeOverflow(f"d of a {k}-form on an {n}-dimensional m")
    if k == 0:
        return AltForm.zero(n, 1)
    return AltForm(n, k + 1, koszul_matrix(S, k) @ a.coeffs)


@lru_cache(maxsize=None)
def _star_pattern(n: int, k: int):
    """For each increasing J of length n-k: position of its complement I among
    the k-tuples, and the sign of the permutation (I, J)."""
    pos = _combo_index(n, k)
    src, signs = [], []
    for J in combos(n, n - k):
        I = tuple(i for i in range(n) if i not in J)
        src.append(pos[I])
        signs.append(_perm_sign(I + J))
    return np.array(src, dtype=int), np.array(signs, dtype=float)


def compound(M: np.ndarray, k: int) -> np.ndarray:
    """k-th compound matrix: minors det M[I, K] over increasing I, K."""
    if k == 0:
        return np.ones((1, 1))
    if k == 1:
        return np.array(M, dtype=float)
    idx = _combo_array(M.shape[0], k)
    if k == 2:
        i, j = idx[:, 0], idx[:, 1]
        return M[np.ix_(i, i)] * M[np.ix_(j, j)] - M[np.ix_(i, j)] * M[np.ix_(j, i)]
    sub = M[idx[:, None, :, None], idx[None, :, None, :]]
    return np.linalg.det(sub)


@lru_cache(maxsize=None)
def _complement_pattern(n: int, k: int):
    """Position of the complement of each increasing k-tuple among the
    (n-k)-tuples, and (-1)^{sum of the tuple's 1-based indices}."""
    pos = _combo_index(n, n - k)
    comp, sgn = [], []
    for I in combos(n, k):
        rest = tuple(i for i in range(n) if i not in I)
        comp.append(pos[rest])
        sgn.append((-1) ** (sum(I) + k))
    return np.array(comp, dtype=int), np.array(sgn, dtype=float)


def hodge_star(S: ReductiveSpace | None, g: Metric, a: AltForm) -> AltForm:
    """Hodge star with volume form sqrt(det g) e^{1..n} in the stored orientation.

    (*a)_J = sqrt(det g) sgn(I, J) a^{I} with I the complement of J and a^I
    the fully raised component, i.e. the k-th compound of g^{-1} applied to a.
    """
    n, k = a.n, a.degree
    if g.n != n:
        raise DimensionMismatch("metric and form dimensions differ")
    orientation = S.orientation if S is not None else 1
    raised = g.inverse_compound(k) @ a.coeffs
    src, sgn = _star_pattern(n, k)
    return AltForm(n, n - k, orientation * g.sqrt_det * sgn * raised[src])


def codifferential(S: ReductiveSpace, g: Metric, a: AltForm) -> AltForm:
    """delta = (-1)^{n(k+1)+1} * d * on k-forms, k >= 1."""
    n, k = a.n, a.degree
    if k == 0:
        raise DegreeOverflow("codifferential is not defined on 0-forms")
    sign = (-1) ** (n * (k + 1) + 1)
    return sign * hodge_star(S, g, koszul_d(S, hodge_star(S, g, a)))


def is_harmonic(S: ReductiveSpace, g: Metric, a: AltForm, tol: float = 1e-10):
    """Returns ``(harmonic, |d a|, |delta a|)``."""
    da = 0.0 if a.degree >= a.n else math.sqrt(form_norm_sq(S, g, koszul_d(S, a)))
    dda = 0.0 if a.degree == 0 else math.sqrt(form_norm_sq(S, g, codifferential(S, g, a)))
    return (da < tol and dda < tol), da, dda


def h_squared(S: ReductiveSpace | None, g: Metric, H: AltForm) -> Bilinear:
    """H^2(X, Y) = g(i_X H, i_Y H), full contraction."""
    if H.degree != 3:
        raise DimensionMismatch("h_squared expects a 3-form")
    ginv = g.inverse
    T = H.tensor
    n = T.shape[0]
    up = ginv @ T @ ginv  # last two slots raised
    return Bilinear(T.reshape(n, -1) @ up.reshape(n, -1).T)


def fundamental_four_form(S: ReductiveSpace | None, g: Metric, H: AltForm) -> AltForm:
    """sigma_H = 1/2 sum_i i_{v_i}H ^ i_{v_i}H over a g-orthonormal frame."""
    n = H.n
    if n < 4:
        raise DegreeOverflow("no nonzero 4-forms below dimension 4")
    ginv = g.inverse
    contractions = [interior(np.eye(n)[a], H) for a in range(n)]
    out = AltForm.zero(n, 4)
    for a in range(n):
        for b in range(n):
            if ginv[a, b] != 0.0:
                out = out + (0.5 * ginv[a, b]) * wedge(contractions[a], contractions[b])
    return out


# ------------------------------------------------------- invariant bases


def _nullspace_basis(M, tol=1e-10):
    if M.shape[0] == 0:
        return np.eye(M.shape[1])
    N = scipy.linalg.null_space(M, rcond=tol)
    # reduced row echelon gives sparse, readable bases (e.g. e^{23}, e^{45})
    return _rref(N.T).T if N.shape[1] else N


def _rref(A, tol=1e-10):
    A = A.copy()
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(A[r:, c])))
        if abs(A[p, c]) < tol:
            continue
        A[[r, p]] = A[[p, r]]
        A[r] /= A[r, c]
        for i in range(rows):
            if i != r:
                A[i] -= A[i, c] * A[r]
        r += 1
    A[np.abs(A) < 1e-13] = 0.0
    return A[:r]


def invariant_forms(S: ReductiveSpace, k: int) -> list[AltForm]:
    """Basis of the isotropy-invariant k-forms on m."""
    n = S.n
    N = math.comb(n, k)
    cols = []
    for i in range(N):
        e = np.zeros(N)
        e[i] = 1.0
        cols.append(_lie_derivative_vector(S, AltForm(n, k, e).tensor))
    M = np.array(cols).T if cols else np.zeros((0, 0))
    basis = _nullspace_basis(M)
    return [AltForm(n, k, v) for v in basis.T]


def invariant_symmetric(S: ReductiveSpace) -> list[np.ndarray]:
    """Basis of the isotropy-invariant symmetric 2-tensors on m."""
    n = S.n
    units = []
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        E = np.zeros((n, n))
        E[i, j] = E[j, i] = 1.0
        units.append(E)
    M = np.array([_lie_derivative_vector(S, E) for E in units]).T
    basis = _nullspace_basis(M)
    return [sum(c * E for c, E in zip(v, units)) for v in basis.T]


def _lie_derivative_vector(S, T):
    if not S.isotropy_indices or T.ndim == 0:
        return np.zeros(0)
    out = []
    for A in S.isotropy_action:
        D = np.zeros_like(T)
        for ax in range(T.ndim):
            D += np.moveaxis(np.tensordot(T, A, axes=([ax], [0])), -1, ax)
        out.append(D.reshape(-1))
    return np.concatenate(out)
