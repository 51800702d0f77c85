"""
algebra/extensor.py
-------------------
Pointwise linear-operator layer.

    - Extensor11: (1,1)-extensor, a linear map on vectors stored as an n x n
      matrix in the fiducial basis (column j = t(e_j)).
    - ExtendedExtensor: the outermorphism t_ acting grade-wise on multivectors.
    - GeneralizedExtensor: T(X) = sum_i t(e_i) ^ (e_i _| X).
    - Extensor2to1: vector-elementary 2-extensors (lambda-type, (a, b) -> vector)
      and (1,2)-extensors (omega-type, a -> bivector) tabulated at a point.

Every vector-variable derivative construct (d_n ^ t(n), t(d_n) ^ (n _| X), ...)
is realized as a finite sum over the orthonormal fiducial basis, whose
reciprocal basis is itself. For (multi)linear arguments the sum is exact.
"""

from __future__ import annotations

import itertools
import logging
from functools import lru_cache
from typing import Sequence

import numpy as np

from .clifford import (
    Multivector,
    bivector_masks,
    check_dim,
    contract_left,
    left_operator,
    outer,
)
from .errors import DimensionMismatchError, GradeError, NonDegenerateViolation

logger = logging.getLogger("extgeo.extensor")

DEFAULT_DEGENERACY_THRESHOLD = 1e-10


# ============================================================
# =                      (1,1)-EXTENSOR                       =
# ============================================================

class Extensor11:
    """Immutable linear map on grade-1 multivectors."""

    __slots__ = ("dim", "matrix")

    def __init__(self, matrix: Sequence[Sequence[float]] | np.ndarray):
        arr = np.array(matrix, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"extensor matrix must be square, got shape {arr.shape}")
        dim = check_dim(arr.shape[0])
        arr.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "matrix", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Extensor11 is immutable")

    @classmethod
    def identity(cls, dim: int) -> "Extensor11":
        return cls(np.eye(check_dim(dim)))

    @classmethod
    def diag(cls, entries: Sequence[float]) -> "Extensor11":
        return cls(np.diag(np.asarray(entries, dtype=float)))

    @classmethod
    def zero(cls, dim: int) -> "Extensor11":
        return cls(np.zeros((check_dim(dim), check_dim(dim))))

    def __call__(self, v: Multivector | np.ndarray) -> Multivector | np.ndarray:
        if isinstance(v, Multivector):
            if v.dim != self.dim:
                raise DimensionMismatchError(self.dim, v.dim, "Extensor11.__call__")
            return Multivector.vector(self.matrix @ v.as_vector())
        return self.matrix @ np.asarray(v, dtype=float)

    def __matmul__(self, other: "Extensor11") -> "Extensor11":
        """Composition: (s @ t)(v) = s(t(v))."""
        self._same(other, "compose")
        return Extensor11(self.matrix @ other.matrix)

    def __add__(self, other: "Extensor11") -> "Extensor11":
        self._same(other, "add")
        return Extensor11(self.matrix + other.matrix)

    def __sub__(self, other: "Extensor11") -> "Extensor11":
        self._same(other, "sub")
        return Extensor11(self.matrix - other.matrix)

    def __neg__(self) -> "Extensor11":
        return Extensor11(-self.matrix)

    def __mul__(self, scalar: float) -> "Extensor11":
        return Extensor11(self.matrix * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Extensor11":
        return Extensor11(self.matrix / float(scalar))

    def __repr__(self) -> str:
        return f"Extensor11({self.matrix.tolist()!r})"

    def _same(self, other: "Extensor11", op: str) -> None:
        if not isinstance(other, Extensor11):
            raise TypeError(f"{op}: expected Extensor11, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionMismatchError(self.dim, other.dim, op)

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.T)) <= tol)

    def symmetric_part(self) -> "Extensor11":
        return Extensor11(0.5 * (self.matrix + self.matrix.T))

    def skew_part(self) -> "Extensor11":
        return Extensor11(0.5 * (self.matrix - self.matrix.T))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix)))


def adjoint(t: Extensor11) -> Extensor11:
    """Fiducial adjoint: matrix transpose in the orthonormal basis."""
    return Extensor11(t.matrix.T)


def det(t: Extensor11) -> float:
    return float(np.linalg.det(t.matrix))


def inverse(t: Extensor11, threshold: float = DEFAULT_DEGENERACY_THRESHOLD) -> Extensor11:
    """
    Inverse of a non-degenerate extensor.

    Raises:
        NonDegenerateViolation: if |det t| <= threshold.
    """
    d = det(t)
    if abs(d) <= threshold:
        raise NonDegenerateViolation(d, threshold, "inverse")
    return Extensor11(np.linalg.inv(t.matrix))


def metric_adjoint(
    t: Extensor11, g: Extensor11, threshold: float = DEFAULT_DEGENERACY_THRESHOLD
) -> Extensor11:
    """t^{dagger(g)} = g^-1 o t^dagger o g, so that t^(b) ._g c = b ._g t(c)."""
    t._same(g, "metric_adjoint")
    return inverse(g, threshold) @ adjoint(t) @ g


def metric_parts(
    t: Extensor11, g: Extensor11, threshold: float = DEFAULT_DEGENERACY_THRESHOLD
) -> tuple[Extensor11, Extensor11]:
    """g-symmetric and g-skew parts (t +/- t^{dagger(g)}) / 2."""
    ta = metric_adjoint(t, g, threshold)
    return (t + ta) * 0.5, (t - ta) * 0.5


# ============================================================
# =                 EXTENSION (OUTERMORPHISM)                 =
# ============================================================

@lru_cache(maxsize=None)
def _grade_combinations(dim: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Per grade k >= 1: (blade masks, factor index array of shape (C, k))."""
    out = []
    for k in range(1, dim + 1):
        combos = np.array(list(itertools.combinations(range(dim), k)), dtype=np.int64)
        masks = np.array([sum(1 << int(i) for i in row) for row in combos], dtype=np.int64)
        out.append((masks, combos))
    return tuple(out)


def extension_matrix(matrix: np.ndarray) -> np.ndarray:
    """
    2^n x 2^n matrix of the outermorphism of an n x n matrix.

    The (B, A) entry for blades of equal grade is the minor det(M[B, A]).
    """
    dim = matrix.shape[0]
    size = 1 << dim
    ext = np.zeros((size, size))
    ext[0, 0] = 1.0
    for masks, combos in _grade_combinations(dim):
        rows = combos[:, None, :, None]
        cols = combos[None, :, None, :]
        minors = np.linalg.det(matrix[rows, cols])
        ext[np.ix_(masks, masks)] = minors
    return ext


class ExtendedExtensor:
    """Extended t_ of a (1,1)-extensor: t_(1) = 1, t_(b1^...^bk) = t(b1)^...^t(bk)."""

    __slots__ = ("base", "matrix")

    def __init__(self, base: Extensor11, matrix: np.ndarray | None = None):
        mat = extension_matrix(base.matrix) if matrix is None else np.array(matrix, dtype=float)
        mat.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "matrix", mat)

    def __setattr__(self, name, value):
        raise AttributeError("ExtendedExtensor is immutable")

    @property
    def dim(self) -> int:
        return self.base.dim

    def __call__(self, x: Multivector) -> Multivector:
        if x.dim != self.dim:
            raise DimensionMismatchError(self.dim, x.dim, "ExtendedExtensor.__call__")
        return Multivector(x.dim, self.matrix @ x.coeffs)

    def __matmul__(self, other: "ExtendedExtensor") -> "ExtendedExtensor":
        return ExtendedExtensor(self.base @ other.base, self.matrix @ other.matrix)

    def transpose(self) -> "ExtendedExtensor":
        """Extended adjoint; equals extend(adjoint(base))."""
        return ExtendedExtensor(adjoint(self.base), self.matrix.T)


def extend(t: Extensor11) -> ExtendedExtensor:
    return ExtendedExtensor(t)


# ============================================================
# =                      GENERALIZATION                       =
# ============================================================

@lru_cache(maxsize=None)
def _wedge_and_contraction_operators(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacks W[k] = (Y -> e_k ^ Y) and C[i] = (Y -> e_i _| Y) as matrices."""
    wedge = np.stack([left_operator(outer, Multivector.basis_vector(dim, k)) for k in range(dim)])
    contract = np.stack(
        [left_operator(contract_left, Multivector.basis_vector(dim, i)) for i in range(dim)]
    )
    return wedge, contract


def generalization_matrix(matrix: np.ndarray) -> np.ndarray:
    """2^n x 2^n matrix of X -> sum_i t(e_i) ^ (e_i _| X)."""
    wedge, contract = _wedge_and_contraction_operators(matrix.shape[0])
    return np.einsum("ki,kab,ibc->ac", matrix, wedge, contract)


class GeneralizedExtensor:
    """Generalized T of t; grade preserving, T(v) = t(v), T(scalar) = 0."""

    __slots__ = ("base", "matrix")

    def __init__(self, base: Extensor11, matrix: np.ndarray | None = None):
        mat = generalization_matrix(base.matrix) if matrix is None else np.array(matrix, dtype=float)
        mat.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "matrix", mat)

    def __setattr__(self, name, value):
        raise AttributeError("GeneralizedExtensor is immutable")

    def __call__(self, x: Multivector) -> Multivector:
        if x.dim != self.base.dim:
            raise DimensionMismatchError(self.base.dim, x.dim, "GeneralizedExtensor.__call__")
        return Multivector(x.dim, self.matrix @ x.coeffs)

    def transpose(self) -> "GeneralizedExtensor":
        """Fiducial adjoint; equals generalize(adjoint(base))."""
        return GeneralizedExtensor(adjoint(self.base), self.matrix.T)


def generalize(t: Extensor11) -> GeneralizedExtensor:
    return GeneralizedExtensor(t)


# ============================================================
# =                          BIV                              =
# ============================================================

def biv(t: Extensor11) -> Multivector:
    """biv[t] = -sum_i e_i ^ t(e_i); zero for symmetric t."""
    m = t.matrix
    coeffs = np.zeros(1 << t.dim)
    for i in range(t.dim):
        for j in range(i + 1, t.dim):
            coeffs[(1 << i) | (1 << j)] = m[i, j] - m[j, i]
    return Multivector(t.dim, coeffs)


def biv_g(t: Extensor11, g: Extensor11, threshold: float = DEFAULT_DEGENERACY_THRESHOLD) -> Multivector:
    """biv_g[t] = biv[t o g^-1]."""
    return biv(t @ inverse(g, threshold))


# ============================================================
# =          VECTOR-ELEMENTARY 2-EXTENSOR / (1,2)-EXTENSOR    =
# ============================================================

class Extensor2to1:
    """
    Pointwise tabulation of two extensor shapes.

    kind="bilinear": coeffs[k, i, j] = k-th component of lambda(e_i, e_j).
    kind="bivector": coeffs[i, m]    = coefficient of omega(e_i) on the m-th
                                       bivector blade (bivector_masks order).
    """

    BILINEAR = "bilinear"
    BIVECTOR = "bivector"

    __slots__ = ("kind", "dim", "coeffs")

    def __init__(self, kind: str, coeffs: np.ndarray):
        arr = np.array(coeffs, dtype=float)
        if kind == self.BILINEAR:
            dim = check_dim(arr.shape[0])
            if arr.shape != (dim, dim, dim):
                raise ValueError(f"bilinear table must be (n, n, n), got {arr.shape}")
        elif kind == self.BIVECTOR:
            dim = check_dim(arr.shape[0])
            if arr.shape != (dim, dim * (dim - 1) // 2):
                raise ValueError(f"bivector table must be (n, n(n-1)/2), got {arr.shape}")
        else:
            raise ValueError(f"unknown Extensor2to1 kind {kind!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Extensor2to1 is immutable")

    def __call__(self, a: Multivector, b: Multivector | None = None) -> Multivector:
        av = a.as_vector()
        if self.kind == self.BILINEAR:
            if b is None:
                raise TypeError("bilinear extensor needs two vector arguments")
            return Multivector.vector(np.einsum("kij,i,j->k", self.coeffs, av, b.as_vector()))
        if b is not None:
            raise TypeError("bivector-valued extensor takes one vector argument")
        coeffs = np.zeros(1 << self.dim)
        coeffs[bivector_masks(self.dim)] = av @ self.coeffs
        return Multivector(self.dim, coeffs)

    def slot(self, a: Multivector) -> Extensor11:
        """lambda_a = lambda(a, .) as a (1,1)-extensor (bilinear kind only)."""
        if self.kind != self.BILINEAR:
            raise TypeError("slot() is defined for bilinear extensors only")
        return Extensor11(np.einsum("kij,i->kj", self.coeffs, a.as_vector()))

    @classmethod
    def from_bivectors(cls, values: Sequence[Multivector]) -> "Extensor2to1":
        """Build an omega-type table from omega(e_1), ..., omega(e_n)."""
        dim = len(values)
        masks = bivector_masks(dim)
        rows = []
        for v in values:
            if not v.is_grade(2, 1e-12):
                raise GradeError(f"omega values must be bivectors, got grades {sorted(v.grades(1e-12))}")
            rows.append(v.coeffs[masks])
        return cls(cls.BIVECTOR, np.array(rows))

    def to_list(self) -> list:
        return self.coeffs.tolist()
