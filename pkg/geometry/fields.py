"""
geometry/fields.py
------------------
Smooth fields over an open coordinate domain U of R^n and the directional
derivative a . d0 along a vector field.

    - Field: deterministic map Point -> value, where value is a float, a
      Multivector (vectors included) or an Extensor11.
    - dir_deriv(a, F, p): central finite difference of F along a(p).
    - dir_deriv_extensor / dir_deriv_extended: operator-valued derivatives.
    - lie_bracket(a, b) = a . d0 b - b . d0 a.

Domain membership is the caller's responsibility: U is treated as R^n minus
the points where evaluation fails. Smoothness is assumed, never verified.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from algebra.clifford import Multivector, check_dim
from algebra.extensor import Extensor11, extension_matrix

from .errors import DomainError, GeometryError

logger = logging.getLogger("extgeo.fields")


# ============================================================
# =                 DIFFERENTIATION SETTINGS                  =
# ============================================================

# (offset in steps, weight); derivative = sum(weight * F(p + offset*h*a)) / h
STENCILS: dict[str, tuple[tuple[int, float], ...]] = {
    "central2": ((-1, -0.5), (1, 0.5)),
    "central4": ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)),
}


@dataclass(frozen=True)
class DiffConfig:
    """Finite-difference scheme and step for a . d0."""
    scheme: str = "central2"
    step: float = 1e-5

    def __post_init__(self):
        if self.scheme not in STENCILS:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {sorted(STENCILS)}")
        if not self.step > 0:
            raise ValueError(f"step must be > 0, got {self.step!r}")


DEFAULT_DIFF = DiffConfig()


def as_point(p: Sequence[float] | np.ndarray, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"point has {arr.shape[0]} coordinates, expected {dim}")
    return arr


def _is_finite(value: Any) -> bool:
    if isinstance(value, Multivector):
        return bool(np.all(np.isfinite(value.coeffs)))
    matrix = getattr(value, "matrix", None)
    if matrix is not None:
        return bool(np.all(np.isfinite(matrix)))
    return bool(np.all(np.isfinite(value)))


# ============================================================
# =                          FIELD                            =
# ============================================================

class Field:
    """
    Immutable function value over U. Evaluation is pure: two evaluations at
    the same point agree bit-for-bit.
    """

    __slots__ = ("fn", "dim", "name")

    def __init__(self, fn: Callable[[np.ndarray], Any], dim: int, name: str = "field"):
        object.__setattr__(self, "fn", fn)
        object.__setattr__(self, "dim", check_dim(dim))
        object.__setattr__(self, "name", name)

    def __setattr__(self, key, value):
        raise AttributeError("Field is immutable")

    def __repr__(self) -> str:
        return f"Field({self.name}, dim={self.dim})"

    def __call__(self, p) -> Any:
        point = as_point(p, self.dim)
        try:
            value = self.fn(point)
        except GeometryError:
            raise
        except (ArithmeticError, ValueError) as exc:
            raise DomainError(point, f"{self.name}: {exc}") from exc
        if not _is_finite(value):
            raise DomainError(point, f"{self.name}: non-finite value")
        return value

    # ---- constructors ----
    @classmethod
    def constant(cls, value: Any, dim: int, name: str = "const") -> "Field":
        return cls(lambda _p: value, dim, name)

    @classmethod
    def basis(cls, dim: int, index: int) -> "Field":
        """Constant field e_{index+1} (0-based index)."""
        return cls.constant(Multivector.basis_vector(dim, index), dim, f"e{index + 1}")

    @classmethod
    def vector(cls, fn: Callable[[np.ndarray], Sequence[float]], dim: int, name: str = "vector") -> "Field":
        """Vector field from a function returning n components."""
        return cls(lambda p: Multivector.vector(fn(p)), dim, name)

    @classmethod
    def scalar(cls, fn: Callable[[np.ndarray], float], dim: int, name: str = "scalar") -> "Field":
        return cls(lambda p: float(fn(p)), dim, name)

    # ---- pointwise arithmetic ----
    def __add__(self, other: "Field") -> "Field":
        return Field(lambda p: self(p) + other(p), self.dim, f"({self.name}+{other.name})")

    def __sub__(self, other: "Field") -> "Field":
        return Field(lambda p: self(p) - other(p), self.dim, f"({self.name}-{other.name})")

    def __neg__(self) -> "Field":
        return Field(lambda p: -self(p), self.dim, f"-{self.name}")

    def __mul__(self, scalar: float) -> "Field":
        return Field(lambda p: self(p) * scalar, self.dim, f"{scalar}*{self.name}")

    __rmul__ = __mul__

    def scaled_by(self, f: "Field") -> "Field":
        """Pointwise product f(p) * self(p) with a scalar field f."""
        return Field(lambda p: self(p) * float(f(p)), self.dim, f"{f.name}*{self.name}")

    def apply_extensor(self, t: "Field") -> "Field":
        """Pointwise composition p -> t(p)(self(p)) with an operator-valued field."""
        return Field(lambda p: t(p)(self(p)), self.dim, f"{t.name}({self.name})")

    def map(self, fn: Callable[[Any, np.ndarray], Any], name: str | None = None) -> "Field":
        """p -> fn(self(p), p)."""
        return Field(lambda p: fn(self(p), p), self.dim, name or f"map({self.name})")


# ============================================================
# =                  DIRECTIONAL DERIVATIVES                  =
# ============================================================

def direction_at(a: Field | Multivector | np.ndarray, p: np.ndarray) -> np.ndarray:
    """Components of a(p), accepting a field, a vector or a raw array."""
    if isinstance(a, Field):
        a = a(p)
    if isinstance(a, Multivector):
        return a.as_vector()
    return np.asarray(a, dtype=float)


def dir_deriv(a: Field, F: Field, p, cfg: DiffConfig = DEFAULT_DIFF) -> Any:
    """
    (a . d0 F)(p) = d/ds F(p + s a(p)) at s = 0, by central differences.

    Linear in a(p); zero for constant F.

    Raises:
        DomainError: if F cannot be evaluated at a stencil point.
    """
    point = as_point(p, F.dim)
    direction = direction_at(a, point)
    h = cfg.step
    acc = None
    for offset, weight in STENCILS[cfg.scheme]:
        term = F(point + (offset * h) * direction) * weight
        acc = term if acc is None else acc + term
    return acc / h


def dir_deriv_extensor(a: Field, g: Field, p, cfg: DiffConfig = DEFAULT_DIFF) -> Extensor11:
    """Operator-valued derivative (a . d0 g)(p) of a (1,1)-extensor field."""
    value = dir_deriv(a, g, p, cfg)
    if not isinstance(value, Extensor11):
        raise TypeError(f"dir_deriv_extensor expects an Extensor11 field, got {type(value).__name__}")
    return value


def dir_deriv_extended(a: Field, t: Field, p, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """2^n x 2^n matrix of (a . d0 t_)(p), the derivative of the extended field."""
    extended = Field(lambda q: extension_matrix(t(q).matrix), t.dim, f"ext({t.name})")
    return dir_deriv(a, extended, p, cfg)


def lie_bracket(a: Field, b: Field, cfg: DiffConfig = DEFAULT_DIFF) -> Field:
    """[a, b] = a . d0 b - b . d0 a."""
    if a.dim != b.dim:
        raise ValueError(f"lie_bracket: fields over different dimensions ({a.dim}, {b.dim})")
    return Field(
        lambda p: dir_deriv(a, b, p, cfg) - dir_deriv(b, a, p, cfg),
        a.dim,
        f"[{a.name},{b.name}]",
    )
