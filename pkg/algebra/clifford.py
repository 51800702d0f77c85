"""
algebra/clifford.py
-------------------
Dense multivector algebra over an n-dimensional real space with an orthonormal
(euclidean) fiducial basis e1..en.

Storage:
    - A multivector holds 2^n real coefficients indexed by basis-blade bitmask:
      bit i set <=> e_{i+1} is a factor of the blade.
    - Canonical blade orientation is ascending index order. The sign of a
      product of two basis blades is the parity of the transpositions needed to
      bubble-sort the concatenated factors into ascending order (repeated
      factors square to +1).

Products provided here use the fiducial metric only; the g-dressed products
live in geometry/metric.py.

All values are immutable and all functions pure, so multivectors can be shared
across threads freely.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, GradeError

logger = logging.getLogger("extgeo.clifford")

MIN_DIM = 2
MAX_DIM = 8


# ============================================================
# =                    BASIS BLADE TABLES                     =
# ============================================================

@dataclass(frozen=True)
class BladeTables:
    """Per-dimension lookup tables shared by every product."""
    dim: int
    size: int
    grades: np.ndarray          # grade of each blade index
    target: np.ndarray          # A ^ B for every pair
    sign: np.ndarray            # reordering sign of e_A e_B
    outer_mask: np.ndarray      # A & B == 0
    left_mask: np.ndarray       # A subset of B
    right_mask: np.ndarray      # B subset of A
    reverse_sign: np.ndarray    # (-1)^{k(k-1)/2}


def _popcount(values: np.ndarray, dim: int) -> np.ndarray:
    counts = np.zeros_like(values)
    for bit in range(dim):
        counts += (values >> bit) & 1
    return counts


@lru_cache(maxsize=None)
def blade_tables(dim: int) -> BladeTables:
    """Build (once per dimension) the sign and mask tables for 2^dim blades."""
    check_dim(dim)
    size = 1 << dim
    idx = np.arange(size, dtype=np.int64)
    a = idx[:, None]
    b = idx[None, :]

    # swaps = sum over factors of A of the factors of B with a lower index
    swaps = np.zeros((size, size), dtype=np.int64)
    shifted = a >> 1
    for _ in range(dim):
        swaps += _popcount(shifted & b, dim)
        shifted = shifted >> 1
    sign = np.where(swaps % 2 == 0, 1.0, -1.0)

    grades = _popcount(idx, dim)
    reverse_sign = np.where(((grades * (grades - 1)) // 2) % 2 == 0, 1.0, -1.0)

    logger.debug("blade_tables: built tables for dim=%s (size=%s)", dim, size)
    return BladeTables(
        dim=dim,
        size=size,
        grades=grades,
        target=(a ^ b),
        sign=sign,
        outer_mask=((a & b) == 0).astype(float),
        left_mask=((a & ~b) == 0).astype(float),
        right_mask=((b & ~a) == 0).astype(float),
        reverse_sign=reverse_sign,
    )


def check_dim(dim: int) -> int:
    if not isinstance(dim, (int, np.integer)) or not (MIN_DIM <= dim <= MAX_DIM):
        raise ValueError(f"dimension must be an integer in [{MIN_DIM}, {MAX_DIM}], got {dim!r}")
    return int(dim)


def blade_name(mask: int) -> str:
    """'1' for the scalar blade, else 'e' followed by 1-based factor indices."""
    if mask == 0:
        return "1"
    return "e" + "".join(str(i + 1) for i in range(MAX_DIM) if mask >> i & 1)


def bivector_masks(dim: int) -> list[int]:
    """Bitmasks of e_ij (i < j) in lexicographic order."""
    return [(1 << i) | (1 << j) for i in range(dim) for j in range(i + 1, dim)]


# ============================================================
# =                      MULTIVECTOR                          =
# ============================================================

class Multivector:
    """Immutable dense element of the 2^n-dimensional exterior/Clifford algebra."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Iterable[float] | np.ndarray | None = None):
        dim = check_dim(dim)
        size = 1 << dim
        if coeffs is None:
            arr = np.zeros(size)
        else:
            arr = np.array(coeffs, dtype=float)
            if arr.shape != (size,):
                raise ValueError(f"expected {size} coefficients for dim={dim}, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    # ---- constructors ----
    @classmethod
    def zero(cls, dim: int) -> "Multivector":
        return cls(dim)

    @classmethod
    def scalar(cls, dim: int, value: float) -> "Multivector":
        coeffs = np.zeros(1 << check_dim(dim))
        coeffs[0] = value
        return cls(dim, coeffs)

    @classmethod
    def basis_vector(cls, dim: int, index: int) -> "Multivector":
        """e_{index+1}; indices are 0-based."""
        return cls.blade(dim, index)

    @classmethod
    def blade(cls, dim: int, *indices: int, coeff: float = 1.0) -> "Multivector":
        """Wedge of basis vectors in the given (0-based) order, sign included."""
        result = cls.scalar(dim, coeff)
        for i in indices:
            if not 0 <= i < dim:
                raise ValueError(f"basis index {i} out of range for dim={dim}")
            result = outer(result, _unit(dim, i))
        return result

    @classmethod
    def vector(cls, components: Sequence[float]) -> "Multivector":
        comps = np.asarray(components, dtype=float)
        dim = check_dim(len(comps))
        coeffs = np.zeros(1 << dim)
        coeffs[[1 << i for i in range(dim)]] = comps
        return cls(dim, coeffs)

    # ---- arithmetic ----
    def _same(self, other: "Multivector", op: str) -> None:
        if not isinstance(other, Multivector):
            raise TypeError(f"{op}: expected Multivector, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionMismatchError(self.dim, other.dim, op)

    def __add__(self, other: "Multivector") -> "Multivector":
        self._same(other, "add")
        return Multivector(self.dim, self.coeffs + other.coeffs)

    def __sub__(self, other: "Multivector") -> "Multivector":
        self._same(other, "sub")
        return Multivector(self.dim, self.coeffs - other.coeffs)

    def __neg__(self) -> "Multivector":
        return Multivector(self.dim, -self.coeffs)

    def __mul__(self, scalar: float) -> "Multivector":
        if isinstance(scalar, Multivector):
            raise TypeError("use clifford_product() for multivector products")
        return Multivector(self.dim, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Multivector":
        return Multivector(self.dim, self.coeffs / float(scalar))

    def __repr__(self) -> str:
        terms = [
            f"{c:+.6g}*{blade_name(m)}" for m, c in enumerate(self.coeffs) if c != 0.0
        ]
        return f"Multivector(dim={self.dim}, {' '.join(terms) or '0'})"

    # ---- grade handling ----
    def grade(self, k: int) -> "Multivector":
        tables = blade_tables(self.dim)
        return Multivector(self.dim, np.where(tables.grades == k, self.coeffs, 0.0))

    def grades(self, tol: float = 0.0) -> set[int]:
        tables = blade_tables(self.dim)
        return {int(g) for g in tables.grades[np.abs(self.coeffs) > tol]}

    def is_grade(self, k: int, tol: float = 0.0) -> bool:
        return self.grades(tol) <= {k}

    def scalar_part(self) -> float:
        return float(self.coeffs[0])

    def vector_part(self) -> np.ndarray:
        """Components of the grade-1 part as an array of length dim."""
        return np.array([self.coeffs[1 << i] for i in range(self.dim)])

    def as_vector(self, tol: float = 1e-12) -> np.ndarray:
        """Vector components; raises GradeError if other grades are present."""
        if not self.is_grade(1, tol):
            raise GradeError(f"expected a vector, got grades {sorted(self.grades(tol))}")
        return self.vector_part()

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def allclose(self, other: "Multivector", atol: float = 1e-12) -> bool:
        self._same(other, "allclose")
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))

    def to_dict(self, tol: float = 0.0) -> dict[str, float]:
        """{blade name: coefficient} for nonzero coefficients, in blade order."""
        return {
            blade_name(m): float(c) for m, c in enumerate(self.coeffs) if abs(c) > tol
        }


def _unit(dim: int, index: int) -> Multivector:
    coeffs = np.zeros(1 << dim)
    coeffs[1 << index] = 1.0
    return Multivector(dim, coeffs)


# ============================================================
# =                        PRODUCTS                           =
# ============================================================

def _bilinear(x: Multivector, y: Multivector, mask: np.ndarray | None, op: str) -> Multivector:
    if x.dim != y.dim:
        raise DimensionMismatchError(x.dim, y.dim, op)
    tables = blade_tables(x.dim)
    weights = np.outer(x.coeffs, y.coeffs) * tables.sign
    if mask is not None:
        weights = weights * mask
    coeffs = np.bincount(tables.target.ravel(), weights=weights.ravel(), minlength=tables.size)
    return Multivector(x.dim, coeffs)


def outer(x: Multivector, y: Multivector) -> Multivector:
    """Exterior product X ^ Y."""
    return _bilinear(x, y, blade_tables(x.dim).outer_mask, "outer")


def contract_left(x: Multivector, y: Multivector) -> Multivector:
    """Left contraction X _| Y; grade(Y) - grade(X) on homogeneous inputs."""
    return _bilinear(x, y, blade_tables(x.dim).left_mask, "contract_left")


def contract_right(x: Multivector, y: Multivector) -> Multivector:
    """Right contraction X |_ Y; grade(X) - grade(Y) on homogeneous inputs."""
    return _bilinear(x, y, blade_tables(x.dim).right_mask, "contract_right")


def clifford_product(x: Multivector, y: Multivector) -> Multivector:
    """Fiducial geometric product; for a vector b, bX = b _| X + b ^ X."""
    return _bilinear(x, y, None, "clifford_product")


def scalar_product(x: Multivector, y: Multivector) -> float:
    """X . Y: coefficient dot product (orthonormal blades are orthonormal)."""
    if x.dim != y.dim:
        raise DimensionMismatchError(x.dim, y.dim, "scalar_product")
    return float(np.dot(x.coeffs, y.coeffs))


def reverse(x: Multivector) -> Multivector:
    return Multivector(x.dim, x.coeffs * blade_tables(x.dim).reverse_sign)


def commutator(b: Multivector, x: Multivector) -> Multivector:
    """B x X = (BX - XB) / 2."""
    return (clifford_product(b, x) - clifford_product(x, b)) * 0.5


# ============================================================
# =              LINEAR-OPERATOR MATRIX HELPERS               =
# ============================================================

def left_operator(op, x: Multivector) -> np.ndarray:
    """Matrix of Y -> op(x, Y) acting on coefficient arrays."""
    size = 1 << x.dim
    cols = [op(x, Multivector(x.dim, np.eye(size)[k])).coeffs for k in range(size)]
    return np.column_stack(cols)


def apply_matrix(matrix: np.ndarray, x: Multivector) -> Multivector:
    return Multivector(x.dim, matrix @ x.coeffs)
