"""
geometry/metric.py
------------------
Metric structure (U, g): validation of the metric field, the g-metric
products, the g-Clifford product and the Christoffel operators.

Products at a point p (g_ = extended of g(p)):
    X ._g Y  = g_(X) . Y
    X _|g Y  = g_(X) _| Y
    X |_g Y  = X |_ g_(Y)
    g-Clifford: f X = fX,  b X = b _|g X + b ^ X,  X b = X |_g b + X ^ b,
                associative.

Christoffel operators are evaluated at a point; the field-level wrappers
return scalar Fields.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np

from algebra.clifford import (
    Multivector,
    blade_tables,
    contract_left,
    contract_right,
    left_operator,
    outer,
    scalar_product,
)
from algebra.extensor import (
    DEFAULT_DEGENERACY_THRESHOLD,
    ExtendedExtensor,
    Extensor11,
    det,
    extend,
    inverse,
)

from .errors import NonDegenerateViolation, SymmetryViolation
from .residuals import MIXED, IdentityResult, ResidualTracker
from .fields import DEFAULT_DIFF, DiffConfig, Field, as_point, dir_deriv, dir_deriv_extended, lie_bracket

logger = logging.getLogger("extgeo.metric")


# ============================================================
# =                   POINTWISE METRIC FRAME                  =
# ============================================================

@dataclass(frozen=True)
class MetricFrame:
    """g(p) with its inverse and extended maps; hosts every g-product at p."""
    g: Extensor11
    g_inv: Extensor11
    g_ext: ExtendedExtensor
    g_inv_ext: ExtendedExtensor
    det: float

    @property
    def dim(self) -> int:
        return self.g.dim

    def inverse(self) -> "MetricFrame":
        """Frame of g^-1, hosting the g^-1 products."""
        return MetricFrame(self.g_inv, self.g, self.g_inv_ext, self.g_ext, 1.0 / self.det)

    def scalar(self, x: Multivector, y: Multivector) -> float:
        return scalar_product(self.g_ext(x), y)

    def contract_left(self, x: Multivector, y: Multivector) -> Multivector:
        return contract_left(self.g_ext(x), y)

    def contract_right(self, x: Multivector, y: Multivector) -> Multivector:
        return contract_right(x, self.g_ext(y))

    @cached_property
    def clifford_table(self) -> np.ndarray:
        """
        M[A] = matrix of Y -> e_A (g-Clifford) Y, built by grade recursion:
        e_i ^ e_R = e_i Y - (e_i _|g e_R), with i the lowest factor of A.
        """
        dim = self.dim
        size = 1 << dim
        tables = blade_tables(dim)
        basis = [Multivector.basis_vector(dim, i) for i in range(dim)]
        vector_ops = [
            left_operator(lambda v, y: contract_left(self.g(v), y) + outer(v, y), e) for e in basis
        ]
        table = np.zeros((size, size, size))
        table[0] = np.eye(size)
        for mask in sorted(range(1, size), key=lambda m: (tables.grades[m], m)):
            low = (mask & -mask).bit_length() - 1
            rest = mask ^ (1 << low)
            lowered = self.contract_left(basis[low], Multivector(dim, np.eye(size)[rest]))
            acc = vector_ops[low] @ table[rest]
            for c in np.nonzero(lowered.coeffs)[0]:
                acc = acc - lowered.coeffs[c] * table[c]
            table[mask] = acc
        return table

    def clifford(self, x: Multivector, y: Multivector) -> Multivector:
        return Multivector(self.dim, np.einsum("a,abc,c->b", x.coeffs, self.clifford_table, y.coeffs))

    def commutator(self, b: Multivector, x: Multivector) -> Multivector:
        """B x_g X = (B X - X B) / 2 with the g-Clifford product."""
        return (self.clifford(b, x) - self.clifford(x, b)) * 0.5


def _build_frame(matrix: np.ndarray, threshold: float, symmetry_tol: float, point) -> MetricFrame:
    g = Extensor11(matrix)
    scale = max(1.0, g.max_abs())
    asym = float(np.max(np.abs(g.matrix - g.matrix.T)))
    if asym > symmetry_tol * scale:
        raise SymmetryViolation(point, asym)
    d = det(g)
    if abs(d) <= threshold:
        raise NonDegenerateViolation(d, threshold, f"metric at {tuple(float(x) for x in point)}")
    g_inv = inverse(g, threshold)
    return MetricFrame(g=g, g_inv=g_inv, g_ext=extend(g), g_inv_ext=extend(g_inv), det=d)


# ============================================================
# =                     METRIC STRUCTURE                      =
# ============================================================

class MetricStructure:
    """
    Validated metric field g on U.

    Pointwise frames (g, g^-1, extended maps) are computed on demand and kept in
    an LRU memo keyed by the exact point coordinates.
    """

    def __init__(
        self,
        g: Field,
        *,
        threshold: float = DEFAULT_DEGENERACY_THRESHOLD,
        symmetry_tol: float = 1e-10,
        diff: DiffConfig = DEFAULT_DIFF,
        probe_points: Sequence[Sequence[float]] | None = None,
        name: str = "g",
    ):
        self.g = g
        self.threshold = threshold
        self.symmetry_tol = symmetry_tol
        self.diff = diff
        self.name = name
        self.probe_points = tuple(
            tuple(float(x) for x in p) for p in (probe_points or [np.zeros(g.dim)])
        )
        self._frame_memo = lru_cache(maxsize=4096)(self._frame_uncached)
        self._gradient_memo = lru_cache(maxsize=1024)(self._gradient_uncached)
        logger.debug("MetricStructure(%s): dim=%s diff=%s", name, g.dim, diff)

    @property
    def dim(self) -> int:
        return self.g.dim

    def __repr__(self) -> str:
        return f"MetricStructure({self.name}, dim={self.dim})"

    @classmethod
    def constant(cls, matrix, **kwargs) -> "MetricStructure":
        t = matrix if isinstance(matrix, Extensor11) else Extensor11(matrix)
        kwargs.setdefault("name", "const")
        return cls(Field.constant(t, t.dim, "g"), **kwargs)

    # ---- pointwise data ----
    def _frame_uncached(self, key: tuple) -> MetricFrame:
        point = np.array(key)
        return _build_frame(self.g(point).matrix, self.threshold, self.symmetry_tol, point)

    def frame(self, p) -> MetricFrame:
        """
        Frame at p.

        Raises:
            SymmetryViolation, NonDegenerateViolation, DomainError
        """
        return self._frame_memo(tuple(as_point(p, self.dim).tolist()))

    def validate(self, points: Sequence[Sequence[float]] | None = None) -> None:
        for p in points if points is not None else self.probe_points:
            self.frame(p)

    def _gradient_uncached(self, key: tuple) -> tuple[Extensor11, ...]:
        point = np.array(key)
        return tuple(
            dir_deriv(Field.basis(self.dim, k), self.g, point, self.diff) for k in range(self.dim)
        )

    def gradient(self, p) -> tuple[Extensor11, ...]:
        """(e_k . d0 g)(p) for k = 1..n."""
        return self._gradient_memo(tuple(as_point(p, self.dim).tolist()))

    # ---- derived fields ----
    def inverse_field(self) -> Field:
        return Field(lambda q: self.frame(q).g_inv, self.dim, f"{self.name}^-1")

    def product_field(self, op: str, x: Field, y: Field, inverse_metric: bool = False) -> Field:
        """Field p -> X(p) *_g Y(p) for op in PRODUCTS (g^-1 products if requested)."""
        fn = PRODUCTS[op]

        def _eval(q):
            fr = self.frame(q)
            return fn(fr.inverse() if inverse_metric else fr, x(q), y(q))

        return Field(_eval, self.dim, f"({x.name}{op}{y.name})")


PRODUCTS: dict[str, Callable[[MetricFrame, Multivector, Multivector], object]] = {
    "wedge": lambda fr, x, y: outer(x, y),
    "scalar": lambda fr, x, y: fr.scalar(x, y),
    "contract_left": lambda fr, x, y: fr.contract_left(x, y),
    "contract_right": lambda fr, x, y: fr.contract_right(x, y),
    "clifford": lambda fr, x, y: fr.clifford(x, y),
}


def _value(x: Field | Multivector, p):
    return x(p) if isinstance(x, Field) else x


# ============================================================
# =                     METRIC PRODUCTS                       =
# ============================================================

def g_scalar(ms: MetricStructure, x: Field | Multivector, y: Field | Multivector, p) -> float:
    """(X ._g Y)(p) = g_(p)(X(p)) . Y(p)."""
    return ms.frame(p).scalar(_value(x, p), _value(y, p))


def g_contract_left(ms: MetricStructure, x, y, p) -> Multivector:
    return ms.frame(p).contract_left(_value(x, p), _value(y, p))


def g_contract_right(ms: MetricStructure, x, y, p) -> Multivector:
    return ms.frame(p).contract_right(_value(x, p), _value(y, p))


def g_clifford(ms: MetricStructure, x, y, p) -> Multivector:
    return ms.frame(p).clifford(_value(x, p), _value(y, p))


def g_commutator(ms: MetricStructure, b, x, p) -> Multivector:
    return ms.frame(p).commutator(_value(b, p), _value(x, p))


def product_rule_residual(ms: MetricStructure, a: Field, x: Field, y: Field, p) -> float:
    """
    |a.d0(X ._g Y) - (a.d0 X) ._g Y - X ._g (a.d0 Y) - (a.d0 g_)(X) . Y| at p.
    """
    cfg = ms.diff
    fr = ms.frame(p)
    lhs = dir_deriv(a, ms.product_field("scalar", x, y), p, cfg)
    dx = dir_deriv(a, x, p, cfg)
    dy = dir_deriv(a, y, p, cfg)
    dg_ext = dir_deriv_extended(a, ms.g, p, cfg)
    xp, yp = x(p), y(p)
    rhs = fr.scalar(dx, yp) + fr.scalar(xp, dy) + float(np.dot(dg_ext @ xp.coeffs, yp.coeffs))
    return abs(lhs - rhs)


# ============================================================
# =                  CHRISTOFFEL OPERATORS                    =
# ============================================================

def christoffel_first(ms: MetricStructure, a: Field, b: Field, c: Field, p) -> float:
    """
    [a,b,c] = 1/2 ( a.d0(b._g c) + b.d0(c._g a) - c.d0(a._g b)
                    + c._g[a,b] + b._g[c,a] - a._g[b,c] ), at p.
    """
    cfg = ms.diff
    fr = ms.frame(p)
    t1 = dir_deriv(a, ms.product_field("scalar", b, c), p, cfg)
    t2 = dir_deriv(b, ms.product_field("scalar", c, a), p, cfg)
    t3 = dir_deriv(c, ms.product_field("scalar", a, b), p, cfg)
    ab = lie_bracket(a, b, cfg)(p)
    ca = lie_bracket(c, a, cfg)(p)
    bc = lie_bracket(b, c, cfg)(p)
    return 0.5 * (
        t1 + t2 - t3 + fr.scalar(c(p), ab) + fr.scalar(b(p), ca) - fr.scalar(a(p), bc)
    )


def christoffel_second(ms: MetricStructure, a: Field, b: Field, c: Field, p) -> float:
    """{c; a,b} = [a, b, g^-1(c)]."""
    return christoffel_first(ms, a, b, c.apply_extensor(ms.inverse_field()), p)


def christoffel_first_field(ms: MetricStructure, a: Field, b: Field, c: Field) -> Field:
    return Field(lambda q: christoffel_first(ms, a, b, c, q), ms.dim, "[a,b,c]")


def christoffel_second_field(ms: MetricStructure, a: Field, b: Field, c: Field) -> Field:
    return Field(lambda q: christoffel_second(ms, a, b, c, q), ms.dim, "{c;a,b}")


@dataclass(frozen=True)
class ChristoffelSample:
    """Fields exercised by the Christoffel property suite."""
    a: Field
    a2: Field
    b: Field
    b2: Field
    c: Field
    c2: Field
    f: Field


def _christoffel_identities(ms: MetricStructure, s: ChristoffelSample) -> dict[str, Callable]:
    cfg = ms.diff

    def ch(x, y, z, p):
        return christoffel_first(ms, x, y, z, p)

    def d(x, y, z, p):
        # x . d0 (y ._g z)
        return dir_deriv(x, ms.product_field("scalar", y, z), p, cfg)

    def gb(z, x, y, p):
        # z ._g [x, y]
        return g_scalar(ms, z, lie_bracket(x, y, cfg)(p), p)

    a, a2, b, b2, c, c2, f = s.a, s.a2, s.b, s.b2, s.c, s.c2, s.f
    return {
        "CHO.3a": lambda p: ch(a + a2, b, c, p) - ch(a, b, c, p) - ch(a2, b, c, p),
        "CHO.3b": lambda p: ch(a.scaled_by(f), b, c, p) - f(p) * ch(a, b, c, p),
        "CHO.3c": lambda p: ch(a, b + b2, c, p) - ch(a, b, c, p) - ch(a, b2, c, p),
        "CHO.3d": lambda p: (
            ch(a, b.scaled_by(f), c, p)
            - f(p) * ch(a, b, c, p)
            - dir_deriv(a, f, p, cfg) * g_scalar(ms, b, c, p)
        ),
        "CHO.3e": lambda p: ch(a, b, c + c2, p) - ch(a, b, c, p) - ch(a, b, c2, p),
        "CHO.3f": lambda p: ch(a, b, c.scaled_by(f), p) - f(p) * ch(a, b, c, p),
        "CHO.4a": lambda p: (
            ch(a, b, c, p) + ch(b, a, c, p)
            - (d(a, b, c, p) + d(b, c, a, p) - d(c, a, b, p) + gb(b, c, a, p) - gb(a, b, c, p))
        ),
        "CHO.4b": lambda p: ch(a, b, c, p) - ch(b, a, c, p) - gb(c, a, b, p),
        "CHO.4c": lambda p: ch(a, b, c, p) + ch(a, c, b, p) - d(a, b, c, p),
        # verbatim right side; equals 2[a,b,c] - a.d0(b._g c) by CHO.4c
        "CHO.4d": lambda p: (
            ch(a, b, c, p) - ch(a, c, b, p)
            - (d(b, c, a, p) - d(c, a, b, p) + gb(c, a, b, p) + gb(b, c, a, p) - gb(a, b, c, p))
        ),
        "CHO.4e": lambda p: (
            ch(a, b, c, p) + ch(c, b, a, p) - (d(b, c, a, p) + gb(c, a, b, p) - gb(a, b, c, p))
        ),
        "CHO.4f": lambda p: (
            ch(a, b, c, p) - ch(c, b, a, p) - (d(a, b, c, p) - d(c, a, b, p) + gb(b, c, a, p))
        ),
    }


CHRISTOFFEL_IDENTITIES = (
    "CHO.3a", "CHO.3b", "CHO.3c", "CHO.3d", "CHO.3e", "CHO.3f",
    "CHO.4a", "CHO.4b", "CHO.4c", "CHO.4d", "CHO.4e", "CHO.4f",
)


def christoffel_property_suite(
    ms: MetricStructure,
    sample: ChristoffelSample,
    points: Sequence[Sequence[float]],
    tolerance: float = MIXED,
) -> list[IdentityResult]:
    """Evaluate the twelve linearity and sum/difference identities over the points."""
    identities = _christoffel_identities(ms, sample)
    tracker = ResidualTracker({name: tolerance for name in CHRISTOFFEL_IDENTITIES})
    for name in CHRISTOFFEL_IDENTITIES:
        tracker.run(name, points, lambda p, fn=identities[name]: abs(fn(p)))
    return tracker.results()
