"""
geometry/connection.py
----------------------
Connections on a metric structure and their covariant derivative pairs.

    - omega0 / levi_civita: the Levi-Civita gauge field and connection
        lambda_a(b) = 1/2 g^-1 o (a.d0 g)(b) + omega0(a) x_g b
    - gamma_from_omega / gauge_biv: the metric-compatible connection built from
      any bivector-valued gauge field, and its inverse extraction
        omega(a) = 1/2 biv_g[gamma_a]
    - dcdo: the a-DCDO pair
        D+_a X = a.d0 X + Gamma_a(X),  D-_a X = a.d0 X - Gamma_a^T(X)
      with Gamma_a the generalized of gamma_a.
    - cov_deriv_extensor, remarkable_residual, connection_of
    - levi_civita_report / compatibility_report: property suites.
    - load_connection_file: constant gauge field plus an optional symmetric
      defect, for auditing hand-made connections.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from algebra.clifford import Multivector, bivector_masks, blade_tables
from algebra.errors import GradeError
from algebra.extensor import (
    Extensor11,
    Extensor2to1,
    biv_g,
    generalization_matrix,
    metric_parts,
)

from .errors import GeometryError
from .fields import Field, as_point, dir_deriv, dir_deriv_extended, direction_at
from .metric import PRODUCTS, MetricStructure, christoffel_first, christoffel_second
from .residuals import ALGEBRAIC, MIXED, SINGLE_DERIVATIVE, IdentityResult, ResidualTracker, difference

logger = logging.getLogger("extgeo.connection")


# ============================================================
# =                     FIELD TYPES                           =
# ============================================================

class Provenance(str, Enum):
    LEVI_CIVITA = "levi_civita"
    FROM_OMEGA = "from_omega"
    CUSTOM = "custom"


class GaugeRotationField:
    """
    Bivector-valued linear field a -> omega(a).

    fn(a_components, p) returns a Multivector; values are checked to be grade 2.
    """

    def __init__(self, fn: Callable[[np.ndarray, np.ndarray], Multivector], dim: int, name: str = "omega"):
        self.fn = fn
        self.dim = dim
        self.name = name

    def __repr__(self) -> str:
        return f"GaugeRotationField({self.name}, dim={self.dim})"

    def __call__(self, a: Field | Multivector | np.ndarray, p) -> Multivector:
        point = as_point(p, self.dim)
        value = self.fn(direction_at(a, point), point)
        if not value.is_grade(2, 1e-12 * max(1.0, value.max_abs())):
            raise GradeError(f"{self.name}(a) must be a bivector, got grades {sorted(value.grades(1e-12))}")
        return value

    @classmethod
    def zero(cls, dim: int) -> "GaugeRotationField":
        return cls(lambda av, p: Multivector.zero(dim), dim, "0")

    @classmethod
    def constant(cls, table: Extensor2to1, name: str = "omega") -> "GaugeRotationField":
        """Constant field from an omega-type table (rows omega(e_i))."""
        if table.kind != Extensor2to1.BIVECTOR:
            raise GradeError("constant gauge field needs a bivector-kind table")
        return cls(lambda av, p: table(Multivector.vector(av)), table.dim, name)


class ConnectionField:
    """
    Connection a -> gamma_a, a (1,1)-extensor at each point, linear in a(p).

    fn(a_components, p) returns an Extensor11.
    """

    def __init__(
        self,
        fn: Callable[[np.ndarray, np.ndarray], Extensor11],
        ms: MetricStructure,
        provenance: Provenance = Provenance.CUSTOM,
        name: str = "gamma",
    ):
        self.fn = fn
        self.ms = ms
        self.provenance = provenance
        self.name = name

    @property
    def dim(self) -> int:
        return self.ms.dim

    def __repr__(self) -> str:
        return f"ConnectionField({self.name}, {self.provenance.value}, dim={self.dim})"

    def __call__(self, a: Field | Multivector | np.ndarray, p) -> Extensor11:
        point = as_point(p, self.dim)
        return self.fn(direction_at(a, point), point)

    def apply(self, a, b, p) -> Multivector:
        """gamma_a(b) at p, i.e. lambda(a, b)(p)."""
        point = as_point(p, self.dim)
        return self(a, point)(b(point) if isinstance(b, Field) else b)

    def with_defect(self, fn: Callable[[np.ndarray, np.ndarray], Extensor11], name: str | None = None) -> "ConnectionField":
        """gamma_a + fn(a, p); the result is tagged custom."""
        return ConnectionField(
            lambda av, p: self.fn(av, p) + fn(av, p), self.ms, Provenance.CUSTOM, name or f"{self.name}+defect"
        )


# ============================================================
# =                    LEVI-CIVITA PIECES                     =
# ============================================================

def _directional_gradient(ms: MetricStructure, av: np.ndarray, p: np.ndarray) -> Extensor11:
    """(a.d0 g)(p) assembled from the cached basis gradient, linear in a(p)."""
    grads = ms.gradient(p)
    acc = Extensor11.zero(ms.dim)
    for k, gk in enumerate(grads):
        if av[k] != 0.0:
            acc = acc + gk * float(av[k])
    return acc


def _omega0_value(ms: MetricStructure, av: np.ndarray, p: np.ndarray) -> Multivector:
    dim = ms.dim
    grads = ms.gradient(p)
    coeffs = np.zeros(1 << dim)
    for i in range(dim):
        for j in range(i + 1, dim):
            # a . ((e_i.d0 g)(e_j) - (e_j.d0 g)(e_i))
            coeffs[(1 << i) | (1 << j)] = float(av @ (grads[i].matrix[:, j] - grads[j].matrix[:, i]))
    return ms.frame(p).g_inv_ext(Multivector(dim, coeffs)) * -0.5


def omega0(ms: MetricStructure, a: Field | Multivector, p) -> Multivector:
    """
    omega0(a)(p) = -1/4 sum_{i,j} g_^-1(e_i ^ e_j) [a . ((e_i.d0 g)(e_j) - (e_j.d0 g)(e_i))].

    The double vector derivative is the exact basis sum (bilinear integrand).
    Zero for constant g.
    """
    point = as_point(p, ms.dim)
    return _omega0_value(ms, direction_at(a, point), point)


def omega0_field(ms: MetricStructure) -> GaugeRotationField:
    return GaugeRotationField(lambda av, p: _omega0_value(ms, av, p), ms.dim, "omega0")


def commutator_matrix(ms: MetricStructure, bivector: Multivector, p) -> np.ndarray:
    """n x n matrix of b -> B x_g b on vectors."""
    fr = ms.frame(p)
    cols = [
        fr.commutator(bivector, Multivector.basis_vector(ms.dim, j)).vector_part() for j in range(ms.dim)
    ]
    return np.column_stack(cols)


def _compatible_gamma(ms: MetricStructure, omega: GaugeRotationField) -> Callable:
    def gamma(av: np.ndarray, p: np.ndarray) -> Extensor11:
        fr = ms.frame(p)
        sym = fr.g_inv @ _directional_gradient(ms, av, p) * 0.5
        return sym + Extensor11(commutator_matrix(ms, omega(av, p), p))
    return gamma


def levi_civita(ms: MetricStructure) -> ConnectionField:
    """lambda_a(b) = 1/2 g^-1 o (a.d0 g)(b) + omega0(a) x_g b."""
    logger.debug("levi_civita: building connection over %r", ms)
    return ConnectionField(_compatible_gamma(ms, omega0_field(ms)), ms, Provenance.LEVI_CIVITA, "lambda")


def gamma_from_omega(ms: MetricStructure, omega: GaugeRotationField) -> ConnectionField:
    """
    gamma_a(b) = 1/2 g^-1 o (a.d0 g)(b) + omega(a) x_g b; g-compatible by construction.

    Raises:
        GradeError: when an omega value is not a bivector (at evaluation).
    """
    if omega.dim != ms.dim:
        raise GeometryError(f"gauge field dim {omega.dim} != metric dim {ms.dim}")
    return ConnectionField(_compatible_gamma(ms, omega), ms, Provenance.FROM_OMEGA, f"gamma[{omega.name}]")


def gauge_biv(ms: MetricStructure, conn: ConnectionField) -> GaugeRotationField:
    """omega(a) = 1/2 biv_g[gamma_a]."""

    def _omega(av: np.ndarray, p: np.ndarray) -> Multivector:
        return biv_g(conn.fn(av, p), ms.frame(p).g, ms.threshold) * 0.5

    return GaugeRotationField(_omega, ms.dim, f"biv[{conn.name}]")


def lambda_parts(ms: MetricStructure, conn: ConnectionField, a, p) -> tuple[Extensor11, Extensor11]:
    """g-symmetric and g-skew parts (gamma_{a+(g)}, gamma_{a-(g)}) at p."""
    point = as_point(p, ms.dim)
    return metric_parts(conn(a, point), ms.frame(point).g, ms.threshold)


def generalized_connection(conn: ConnectionField, a, p) -> np.ndarray:
    """2^n x 2^n matrix of Gamma_a(X) = sum_i gamma_a(e_i) ^ (e_i _| X)."""
    return generalization_matrix(conn(a, p).matrix)


def generalized_closed_form(ms: MetricStructure, omega: GaugeRotationField, a, p) -> np.ndarray:
    """Gamma_a(X) = 1/2 g_^-1 o (a.d0 g_)(X) + omega(a) x_g X, as a 2^n x 2^n matrix."""
    point = as_point(p, ms.dim)
    av = direction_at(a, point)
    fr = ms.frame(point)
    size = 1 << ms.dim
    d_ext = dir_deriv_extended(av, ms.g, point, ms.diff)
    bivector = omega(av, point)
    comm = np.column_stack(
        [fr.commutator(bivector, Multivector(ms.dim, np.eye(size)[m])).coeffs for m in range(size)]
    )
    return 0.5 * fr.g_inv_ext.matrix @ d_ext + comm


def connection_table(conn: ConnectionField, p) -> Extensor2to1:
    """lambda-type table: coeffs[k, i, j] = k-th component of gamma_{e_i}(e_j)."""
    dim = conn.dim
    point = as_point(p, dim)
    coeffs = np.stack([conn(np.eye(dim)[i], point).matrix for i in range(dim)], axis=1)
    return Extensor2to1(Extensor2to1.BILINEAR, coeffs)


def omega_table(omega: GaugeRotationField, p) -> Extensor2to1:
    dim = omega.dim
    point = as_point(p, dim)
    return Extensor2to1.from_bivectors([omega(np.eye(dim)[i], point) for i in range(dim)])


# ============================================================
# =                       DCDO PAIRS                          =
# ============================================================

def _is_multivector_value(value: Any) -> bool:
    return isinstance(value, Multivector)


class DcdoPair:
    """
    Covariant derivative pair (D+_a, D-_a) acting on multivector fields.

    Subclasses implement plus/minus at a point. On scalar-valued fields both
    reduce to a.d0 f.
    """

    ms: MetricStructure
    name: str = "pair"

    @property
    def dim(self) -> int:
        return self.ms.dim

    def plus(self, a, x: Field, p) -> Any:
        raise NotImplementedError

    def minus(self, a, x: Field, p) -> Any:
        raise NotImplementedError

    def plus_field(self, a, x: Field) -> Field:
        return Field(lambda q: self.plus(a, x, q), self.dim, f"D+[{x.name}]")

    def minus_field(self, a, x: Field) -> Field:
        return Field(lambda q: self.minus(a, x, q), self.dim, f"D-[{x.name}]")

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name}, dim={self.dim})"


class ConnectionDcdo(DcdoPair):
    """D+_a X = a.d0 X + Gamma_a(X),  D-_a X = a.d0 X - Gamma_a^T(X)."""

    def __init__(self, ms: MetricStructure, conn: ConnectionField):
        if conn.dim != ms.dim:
            raise GeometryError(f"connection dim {conn.dim} != metric dim {ms.dim}")
        self.ms = ms
        self.conn = conn
        self.name = conn.name

    def _apply(self, a, x: Field, p, sign: float) -> Any:
        point = as_point(p, self.dim)
        derivative = dir_deriv(a, x, point, self.ms.diff)
        if not _is_multivector_value(derivative):
            return derivative
        big = generalized_connection(self.conn, a, point)
        value = x(point)
        op = big if sign > 0 else big.T
        return derivative + Multivector(self.dim, op @ value.coeffs) * sign

    def plus(self, a, x: Field, p) -> Any:
        return self._apply(a, x, p, 1.0)

    def minus(self, a, x: Field, p) -> Any:
        return self._apply(a, x, p, -1.0)


def dcdo(ms: MetricStructure, conn: ConnectionField) -> ConnectionDcdo:
    return ConnectionDcdo(ms, conn)


def connection_of(pair: DcdoPair, a, p) -> Extensor11:
    """Connection extensor of any pair at p: column j = D+_a(e_j) on the constant field e_j."""
    dim = pair.dim
    point = as_point(p, dim)
    cols = [pair.plus(a, Field.basis(dim, j), point).vector_part() for j in range(dim)]
    return Extensor11(np.column_stack(cols))


def extracted_connection(pair: DcdoPair, ms: MetricStructure | None = None) -> ConnectionField:
    """ConnectionField read off the pair's plus operator."""
    target = ms or pair.ms
    return ConnectionField(
        lambda av, p: connection_of(pair, Multivector.vector(av), p), target, Provenance.CUSTOM, f"conn[{pair.name}]"
    )


# ============================================================
# =               COVARIANT DERIVATIVE OF EXTENSORS           =
# ============================================================

PLUS_PLUS = "plus_plus"
MINUS_MINUS = "minus_minus"


def cov_deriv_extensor(pair: DcdoPair, t: Field, a, b: Field, p, variant: str = PLUS_PLUS) -> Multivector:
    """
    plus_plus:   (D++_a t)(b) = D-_a (t(b)) - t(D+_a b)
    minus_minus: (D--_a t)(b) = D+_a (t(b)) - t(D-_a b)
    """
    point = as_point(p, pair.dim)
    tb = b.apply_extensor(t)
    if variant == PLUS_PLUS:
        outer_d, inner_d = pair.minus, pair.plus
    elif variant == MINUS_MINUS:
        outer_d, inner_d = pair.plus, pair.minus
    else:
        raise ValueError(f"unknown variant {variant!r}; expected {PLUS_PLUS} or {MINUS_MINUS}")
    first = outer_d(a, tb, point).vector_part()
    second = t(point).matrix @ inner_d(a, b, point).vector_part()
    return Multivector.vector(first - second)


def cov_deriv_extensor_matrix(pair: DcdoPair, t: Field, a, p, variant: str = PLUS_PLUS) -> Extensor11:
    """The extensor (D_a t)(p), tabulated on constant basis fields."""
    dim = pair.dim
    cols = [
        cov_deriv_extensor(pair, t, a, Field.basis(dim, j), p, variant).vector_part() for j in range(dim)
    ]
    return Extensor11(np.column_stack(cols))


def remarkable_residual(pair: DcdoPair, tau: Field, a, p) -> float:
    """max |(D++_a tau) o tau^-1 + tau o (D--_a tau^-1)| at p, for non-singular tau."""
    point = as_point(p, pair.dim)
    tau_inv = tau.map(lambda t, _q: Extensor11(np.linalg.inv(t.matrix)), f"{tau.name}^-1")
    pp = cov_deriv_extensor_matrix(pair, tau, a, point, PLUS_PLUS)
    mm = cov_deriv_extensor_matrix(pair, tau_inv, a, point, MINUS_MINUS)
    return (pp @ tau_inv(point) + tau(point) @ mm).max_abs()


# ============================================================
# =                     PROPERTY SUITES                       =
# ============================================================

@dataclass(frozen=True)
class ConnectionSample:
    """Fields exercised by the connection suites."""
    directions: Sequence[Field]
    vectors: Sequence[Field]
    multivectors: Sequence[Field] = ()
    taus: Sequence[Field] = ()
    constant_vectors: Sequence[Multivector] = field(default_factory=tuple)


LEVI_CIVITA_IDENTITIES = {
    "LCC.1": MIXED,
    "LCC.3a": SINGLE_DERIVATIVE,
    "LCC.3b": SINGLE_DERIVATIVE,
    "LCC.3c": SINGLE_DERIVATIVE,
    "LCC.3d": SINGLE_DERIVATIVE,
    "LCC.3f": SINGLE_DERIVATIVE,
    "LCC.3a3": MIXED,
    "LCC.4": SINGLE_DERIVATIVE,
}


def levi_civita_report(
    ms: MetricStructure, sample: ConnectionSample, points: Sequence[Sequence[float]]
) -> list[IdentityResult]:
    """
    Decomposition of the Christoffel operator, cyclic property, gauge recovery,
    symmetry, the g-symmetric/skew split, D+ against the second-kind operator
    and the generalized connection against its closed form.
    """
    conn = levi_civita(ms)
    pair = dcdo(ms, conn)
    omega = omega0_field(ms)
    recovered = gauge_biv(ms, conn)
    tracker = ResidualTracker(LEVI_CIVITA_IDENTITIES)
    consts = list(sample.constant_vectors) or [Multivector.basis_vector(ms.dim, i) for i in range(ms.dim)]
    vecs = list(sample.vectors)
    triples = list(zip(sample.directions, vecs, vecs[1:] + vecs[:1]))

    for raw in points:
        p = as_point(raw, ms.dim)
        fr = ms.frame(p)

        for a, b, c in triples:
            lhs = christoffel_first(ms, a, b, c, p)
            rhs = fr.scalar(dir_deriv(a, b, p, ms.diff) + conn.apply(a, b, p), c(p))
            tracker.record("LCC.1", abs(lhs - rhs), p)

            plus_b = pair.plus(a, b, p)
            tracker.record("LCC.3a3", abs(plus_b.vector_part() @ c(p).vector_part() - christoffel_second(ms, a, b, c, p)), p)

        for u, v, w in zip(consts, consts[1:] + consts[:1], consts[2:] + consts[:2]):
            cyc = (
                fr.scalar(fr.commutator(omega(u, p), v), w)
                + fr.scalar(fr.commutator(omega(v, p), w), u)
                + fr.scalar(fr.commutator(omega(w, p), u), v)
            )
            tracker.record("LCC.3a", abs(cyc), p)
            tracker.record("LCC.3c", (conn.apply(u, v, p) - conn.apply(v, u, p)).max_abs(), p)

        for u in consts:
            tracker.record("LCC.3b", (omega(u, p) - recovered(u, p)).max_abs(), p)
            sym, skew = lambda_parts(ms, conn, u, p)
            half = fr.g_inv @ _directional_gradient(ms, u.as_vector(), p) * 0.5
            tracker.record("LCC.3d", (sym - half).max_abs(), p)
            tracker.record("LCC.3f", float(np.max(np.abs(skew.matrix - commutator_matrix(ms, omega(u, p), p)))), p)
            big = generalized_connection(conn, u, p)
            closed = generalized_closed_form(ms, omega, u, p)
            tracker.record("LCC.4", float(np.max(np.abs(big - closed))), p)

    return tracker.results()


COMPATIBILITY_PRODUCTS = ("wedge", "scalar", "contract_left", "contract_right", "clifford")


def compatibility_identities() -> dict[str, float]:
    names = {
        "GS.1": MIXED,
        "MCD.1": MIXED,
        "MCD.1a": MIXED,
        "MCD.2": MIXED,
        "MCD.2a": MIXED,
        "MCD.3": MIXED,
        "MCD.4": MIXED,
        "MCD.4b": MIXED,
    }
    for op in COMPATIBILITY_PRODUCTS:
        names[f"MCD.5[{op}]"] = MIXED
        names[f"MCD.5a[{op}]"] = MIXED
    names["remarkable"] = MIXED
    return names


def _constant_blades(dim: int, max_grade: int = 2) -> list[Field]:
    grades = blade_tables(dim).grades
    size = 1 << dim
    return [
        Field.constant(Multivector(dim, np.eye(size)[m]), dim, f"E{m}")
        for m in range(size)
        if grades[m] <= max_grade
    ]


def gs1_residual(ms: MetricStructure, gamma: Extensor11, a, p) -> float:
    """|g o gamma_a + gamma_a^T o g - a.d0 g| at p."""
    point = as_point(p, ms.dim)
    g = ms.frame(point).g
    dg = _directional_gradient(ms, direction_at(a, point), point)
    return (g @ gamma + Extensor11(gamma.matrix.T) @ g - dg).max_abs()


def compatibility_report(
    ms: MetricStructure,
    conn: ConnectionField | DcdoPair,
    points: Sequence[Sequence[float]],
    sample: ConnectionSample,
) -> list[IdentityResult]:
    """
    Per-identity max residuals of the metric-compatibility theorems for a
    connection (or any DCDO pair) over the sample points. Torsionful and
    non-symmetric connections are accepted; GS.1 is the compatibility gate.
    """
    if isinstance(conn, DcdoPair):
        pair = conn
        gamma_at = lambda a, p: connection_of(pair, a, p)  # noqa: E731
    else:
        pair = dcdo(ms, conn)
        gamma_at = conn
    cfg = ms.diff
    dim = ms.dim
    g_field = Field(lambda q: ms.frame(q).g, dim, "g")
    g_inv_field = ms.inverse_field()
    g_ext = Field(lambda q: ms.frame(q).g_ext, dim, "g_")
    g_inv_ext = Field(lambda q: ms.frame(q).g_inv_ext, dim, "g_^-1")
    blades = _constant_blades(dim)
    mvs = list(sample.multivectors) or blades
    pairs_xy = list(zip(mvs, mvs[1:] + mvs[:1]))
    tracker = ResidualTracker(compatibility_identities())

    def ext_apply(ext_field: Field, x: Field) -> Field:
        return Field(lambda q: ext_field(q)(x(q)), dim, f"ext({x.name})")

    for raw in points:
        p = as_point(raw, dim)
        fr = ms.frame(p)
        for a in sample.directions:
            tracker.record("GS.1", gs1_residual(ms, gamma_at(a, p), a, p), p)

            for b in sample.vectors:
                tracker.record("MCD.1", cov_deriv_extensor(pair, g_field, a, b, p, PLUS_PLUS).max_abs(), p)
                tracker.record("MCD.1a", cov_deriv_extensor(pair, g_inv_field, a, b, p, MINUS_MINUS).max_abs(), p)

            for e in blades:
                tracker.record(
                    "MCD.2", difference(pair.minus(a, ext_apply(g_ext, e), p), fr.g_ext(pair.plus(a, e, p))), p
                )
                tracker.record(
                    "MCD.2a", difference(pair.plus(a, ext_apply(g_inv_ext, e), p), fr.g_inv_ext(pair.minus(a, e, p))), p
                )

            for x, y in pairs_xy:
                tracker.record(
                    "MCD.3", difference(pair.minus(a, ext_apply(g_ext, x), p), fr.g_ext(pair.plus(a, x, p))), p
                )
                xp, yp = x(p), y(p)
                dpx, dpy = pair.plus(a, x, p), pair.plus(a, y, p)
                dmx, dmy = pair.minus(a, x, p), pair.minus(a, y, p)
                lhs = dir_deriv(a, ms.product_field("scalar", x, y), p, cfg)
                tracker.record("MCD.4", abs(lhs - fr.scalar(dpx, yp) - fr.scalar(xp, dpy)), p)
                inv = fr.inverse()
                lhs_inv = dir_deriv(a, ms.product_field("scalar", x, y, inverse_metric=True), p, cfg)
                tracker.record("MCD.4b", abs(lhs_inv - inv.scalar(dmx, yp) - inv.scalar(xp, dmy)), p)

                for op in COMPATIBILITY_PRODUCTS:
                    prod = PRODUCTS[op]
                    d_plus = pair.plus(a, ms.product_field(op, x, y), p)
                    tracker.record(
                        f"MCD.5[{op}]", difference(d_plus, _add(prod(fr, dpx, yp), prod(fr, xp, dpy))), p
                    )
                    d_minus = pair.minus(a, ms.product_field(op, x, y, inverse_metric=True), p)
                    tracker.record(
                        f"MCD.5a[{op}]", difference(d_minus, _add(prod(inv, dmx, yp), prod(inv, xp, dmy))), p
                    )

            for tau in sample.taus:
                tracker.record("remarkable", remarkable_residual(pair, tau, a, p), p)

    return tracker.results()


def _add(x: Any, y: Any) -> Any:
    return x + y


def is_compatible(ms: MetricStructure, pair: DcdoPair, points: Sequence[Sequence[float]] | None = None) -> float:
    """Max GS.1 residual of a pair over the points (default: the probe points), basis directions."""
    worst = 0.0
    for raw in points if points is not None else ms.probe_points:
        p = as_point(raw, ms.dim)
        for i in range(ms.dim):
            e = Multivector.basis_vector(ms.dim, i)
            worst = max(worst, gs1_residual(ms, connection_of(pair, e, p), e, p))
    return worst


# ============================================================
# =                    CONNECTION FILES                       =
# ============================================================

class ConnectionFileError(GeometryError):
    """Raised when a connection file does not match the version-1 schema."""
    pass


def _symmetric_defect(ms: MetricStructure, spec: dict) -> Callable[[np.ndarray, np.ndarray], Extensor11]:
    dim = ms.dim
    magnitude_ = float(spec.get("magnitude", 0.0))
    direction = np.asarray(spec.get("direction", [1.0] + [0.0] * (dim - 1)), dtype=float)
    matrix = np.asarray(spec.get("matrix", np.eye(dim)), dtype=float)
    if direction.shape != (dim,) or matrix.shape != (dim, dim):
        raise ConnectionFileError(f"defect direction/matrix must have shapes ({dim},) and ({dim},{dim})")
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=ALGEBRAIC):
        raise ConnectionFileError("defect matrix must be symmetric")
    s = Extensor11(matrix)
    return lambda av, p: s * (magnitude_ * float(av @ direction))


def load_connection_file(path: str | Path, ms: MetricStructure) -> ConnectionField:
    """
    Version-1 connection file:
        {"version": 1, "omega": [[...n(n-1)/2 coeffs...] per e_i] | null,
         "defect": {"magnitude": m, "direction": [...], "matrix": [[...]]} | absent}

    Without "omega" the Levi-Civita gauge field is used.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConnectionFileError(f"cannot read connection file {path}: {exc}") from exc
    if not isinstance(data, dict) or data.get("version") != 1:
        raise ConnectionFileError("connection file must be an object with \"version\": 1")

    dim = ms.dim
    if data.get("omega") is None:
        base = levi_civita(ms)
    else:
        rows = np.asarray(data["omega"], dtype=float)
        if rows.shape != (dim, len(bivector_masks(dim))):
            raise ConnectionFileError(f"omega must be {dim} rows of {len(bivector_masks(dim))} bivector coefficients")
        base = gamma_from_omega(ms, GaugeRotationField.constant(Extensor2to1(Extensor2to1.BIVECTOR, rows)))

    if "defect" in data and data["defect"]:
        conn = base.with_defect(_symmetric_defect(ms, data["defect"]))
    else:
        conn = base
    logger.debug("load_connection_file: %s -> %r", path, conn)
    return conn
