"""
geometry/deformation.py
-----------------------
Gauge metric fields and the deformation of covariant derivative pairs.

    g = h^dagger o eta o h,   eta = diag(+1..+1, -1..-1)

    forward  (g-pair -> eta-pair):
        hD+_a X = h_( gD+_a h_^-1(X) ),   hD-_a X = h_*( gD-_a h_^dagger(X) )
    inverse  (eta-pair -> g-pair):
        D+_a X = h_^-1( etaD+_a h_(X) ),  D-_a X = h_^dagger( etaD-_a h_*(X) )

with h* = (h^-1)^dagger = (h^dagger)^-1. h is built pointwise from the
spectral decomposition of g(p); any other non-singular h with the same
reconstruction property can be supplied instead.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from algebra.clifford import Multivector
from algebra.extensor import ExtendedExtensor, Extensor11, det, extend, inverse

from .connection import (
    PLUS_PLUS,
    ConnectionSample,
    DcdoPair,
    cov_deriv_extensor,
    dcdo,
    extracted_connection,
    is_compatible,
)
from .eigen import DEFAULT_JACOBI_TOL, DEFAULT_MAX_SWEEPS, canonical_eigh
from .errors import CompatibilityError, NonDegenerateViolation, SignatureChangeError
from .fields import Field, as_point
from .metric import MetricStructure
from .residuals import ALGEBRAIC, MIXED, RECONSTRUCTION, IdentityResult, ResidualTracker, difference

logger = logging.getLogger("extgeo.deformation")


# ============================================================
# =                    ORTHOGONAL METRIC                      =
# ============================================================

@dataclass(frozen=True)
class OrthogonalMetric:
    """eta = diag(+1 x p, -1 x q)."""
    p: int
    q: int

    @property
    def dim(self) -> int:
        return self.p + self.q

    @property
    def signature(self) -> tuple[int, int]:
        return (self.p, self.q)

    @property
    def signs(self) -> np.ndarray:
        return np.array([1.0] * self.p + [-1.0] * self.q)

    @property
    def extensor(self) -> Extensor11:
        return Extensor11.diag(self.signs)

    def structure(self, ms: MetricStructure | None = None) -> MetricStructure:
        """Constant metric structure of eta, inheriting diff settings and probes from ms."""
        kwargs = {}
        if ms is not None:
            kwargs = dict(threshold=ms.threshold, diff=ms.diff, probe_points=ms.probe_points)
        return MetricStructure.constant(self.extensor, name=f"eta{self.signature}", **kwargs)


def _eigenvalues_checked(ms: MetricStructure, p, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    frame = ms.frame(p)
    w, q = canonical_eigh(frame.g.matrix, tol, max_sweeps)
    if np.any(np.abs(w) <= ms.threshold):
        raise NonDegenerateViolation(frame.det, ms.threshold, f"eigenvalue of g at {tuple(as_point(p))}")
    return w, q


def signature_of(
    ms: MetricStructure, p, tol: float = DEFAULT_JACOBI_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS
) -> tuple[int, int]:
    """Counts of positive and negative eigenvalues of g(p)."""
    w, _ = _eigenvalues_checked(ms, p, tol, max_sweeps)
    positive = int(np.sum(w > 0))
    return positive, len(w) - positive


def signature_over(
    ms: MetricStructure,
    points: Sequence[Sequence[float]] | None = None,
    tol: float = DEFAULT_JACOBI_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> OrthogonalMetric:
    """
    Common signature of g over the points (default: the probe points).

    Raises:
        SignatureChangeError: if two points disagree.
    """
    pts = list(points) if points is not None else list(ms.probe_points)
    found = {tuple(float(x) for x in p): signature_of(ms, p, tol, max_sweeps) for p in pts}
    distinct = set(found.values())
    if len(distinct) > 1:
        raise SignatureChangeError(found)
    p_count, q_count = distinct.pop()
    return OrthogonalMetric(p_count, q_count)


# ============================================================
# =                   GAUGE METRIC FIELD                      =
# ============================================================

@dataclass(frozen=True)
class GaugeFrame:
    """h(p) and its companions, plain and extended."""
    h: Extensor11
    h_inv: Extensor11
    h_dagger: Extensor11
    h_star: Extensor11
    h_ext: ExtendedExtensor
    h_inv_ext: ExtendedExtensor
    h_dagger_ext: ExtendedExtensor
    h_star_ext: ExtendedExtensor


class GaugeMetricField:
    """Non-singular h with g = h^dagger o eta o h."""

    def __init__(self, h: Field, eta: OrthogonalMetric, ms: MetricStructure):
        if h.dim != ms.dim or eta.dim != ms.dim:
            raise ValueError(f"gauge field, eta and metric dims differ ({h.dim}, {eta.dim}, {ms.dim})")
        self.h = h
        self.eta = eta
        self.ms = ms
        self._frame_memo = lru_cache(maxsize=4096)(self._frame_uncached)

    @property
    def dim(self) -> int:
        return self.ms.dim

    def __repr__(self) -> str:
        return f"GaugeMetricField({self.h.name}, eta={self.eta.signature})"

    def _frame_uncached(self, key: tuple) -> GaugeFrame:
        h = self.h(np.array(key))
        h_inv = inverse(h, self.ms.threshold)
        h_dagger = Extensor11(h.matrix.T)
        h_star = Extensor11(h_inv.matrix.T)
        return GaugeFrame(
            h=h, h_inv=h_inv, h_dagger=h_dagger, h_star=h_star,
            h_ext=extend(h), h_inv_ext=extend(h_inv), h_dagger_ext=extend(h_dagger), h_star_ext=extend(h_star),
        )

    def frame(self, p) -> GaugeFrame:
        return self._frame_memo(tuple(as_point(p, self.dim).tolist()))

    def __call__(self, p) -> Extensor11:
        return self.frame(p).h

    def map_field(self, x: Field, which: str) -> Field:
        """p -> (extended companion)(p)(X(p)), with which in {h, h_inv, h_dagger, h_star}."""
        attr = f"{which}_ext"

        def _eval(q):
            value = x(q)
            if isinstance(value, Multivector):
                return getattr(self.frame(q), attr)(value)
            return value

        return Field(_eval, self.dim, f"{which}({x.name})")


def gauge_field(
    ms: MetricStructure,
    points: Sequence[Sequence[float]] | None = None,
    tol: float = DEFAULT_JACOBI_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> tuple[GaugeMetricField, OrthogonalMetric]:
    """
    Spectral gauge: g(p) = Q D Q^T in canonical order, eta = sign(D),
    h(p) = |D|^(1/2) Q^T. The signature is fixed from the sampled points and
    re-checked at every evaluation.
    """
    eta = signature_over(ms, points, tol, max_sweeps)

    def _h(q: np.ndarray) -> Extensor11:
        w, vecs = _eigenvalues_checked(ms, q, tol, max_sweeps)
        positive = int(np.sum(w > 0))
        if positive != eta.p:
            raise SignatureChangeError({"sample": eta.signature, tuple(float(x) for x in q): (positive, len(w) - positive)})
        return Extensor11(np.diag(np.sqrt(np.abs(w))) @ vecs.T)

    logger.debug("gauge_field: signature %s over %r", eta.signature, ms)
    return GaugeMetricField(Field(_h, ms.dim, "h"), eta, ms), eta


def reconstruction_residual(gauge: GaugeMetricField, p) -> float:
    """max |h^dagger o eta o h - g| at p."""
    fr = gauge.frame(p)
    rebuilt = fr.h_dagger @ gauge.eta.extensor @ fr.h
    return (rebuilt - gauge.ms.frame(p).g).max_abs()


def extended_coherence_residual(gauge: GaugeMetricField, p) -> float:
    """max of |ext(h^-1) - ext(h)^-1| and |ext(h^dagger) - ext(h)^T|."""
    fr = gauge.frame(p)
    inv_gap = np.max(np.abs(fr.h_inv_ext.matrix - np.linalg.inv(fr.h_ext.matrix)))
    adj_gap = np.max(np.abs(fr.h_dagger_ext.matrix - fr.h_ext.matrix.T))
    return float(max(inv_gap, adj_gap))


# ============================================================
# =                     DEFORMED PAIRS                        =
# ============================================================

FORWARD = "forward"
INVERSE = "inverse"


def _apply_ext(ext: ExtendedExtensor, value: Any) -> Any:
    return ext(value) if isinstance(value, Multivector) else value


class DeformedDcdo(DcdoPair):
    """Pair obtained by composing a base pair with the extended gauge maps."""

    # (inner map on X, outer map on the result) for plus and minus
    _MAPS = {
        FORWARD: (("h_inv", "h"), ("h_dagger", "h_star")),
        INVERSE: (("h", "h_inv"), ("h_star", "h_dagger")),
    }

    def __init__(self, base: DcdoPair, gauge: GaugeMetricField, direction: str, ms: MetricStructure):
        if direction not in self._MAPS:
            raise ValueError(f"unknown deformation direction {direction!r}")
        self.base = base
        self.gauge = gauge
        self.direction = direction
        self.ms = ms
        self.name = f"{direction}[{base.name}]"

    def _apply(self, a, x: Field, p, maps: tuple[str, str], op) -> Any:
        inner, outer_map = maps
        point = as_point(p, self.dim)
        value = op(a, self.gauge.map_field(x, inner), point)
        return _apply_ext(getattr(self.gauge.frame(point), f"{outer_map}_ext"), value)

    def plus(self, a, x: Field, p) -> Any:
        return self._apply(a, x, p, self._MAPS[self.direction][0], self.base.plus)

    def minus(self, a, x: Field, p) -> Any:
        return self._apply(a, x, p, self._MAPS[self.direction][1], self.base.minus)


def _gate(pair: DcdoPair, ms: MetricStructure, tolerance: float) -> None:
    residual = is_compatible(ms, pair)
    if residual >= tolerance:
        raise CompatibilityError(residual, tolerance, ms.name)


def deform_dcdo(pair_g: DcdoPair, gauge: GaugeMetricField, tolerance: float = MIXED) -> DeformedDcdo:
    """
    h-deformation of a g-compatible pair into an eta-compatible pair.

    Raises:
        CompatibilityError: if pair_g fails the GS.1 gate at the probe points.
    """
    _gate(pair_g, gauge.ms, tolerance)
    eta_ms = gauge.eta.structure(gauge.ms)
    return DeformedDcdo(pair_g, gauge, FORWARD, eta_ms)


def deform_dcdo_inverse(pair_eta: DcdoPair, gauge: GaugeMetricField, tolerance: float = MIXED) -> DeformedDcdo:
    """h^-1-deformation of an eta-compatible pair into a g-compatible pair."""
    _gate(pair_eta, pair_eta.ms, tolerance)
    return DeformedDcdo(pair_eta, gauge, INVERSE, gauge.ms)


# ============================================================
# =                    THEOREM REPORT                         =
# ============================================================

DEFORMATION_IDENTITIES = {
    "MCD.6": RECONSTRUCTION,
    "extended-coherence": ALGEBRAIC,
    "eta-compatibility": MIXED,
    "MCD.7a": MIXED,
    "MCD.7b": MIXED,
    "round-trip[plus]": MIXED,
    "round-trip[minus]": MIXED,
}


def theorem_report(
    pair_g: DcdoPair,
    gauge: GaugeMetricField,
    points: Sequence[Sequence[float]],
    sample: ConnectionSample,
) -> list[IdentityResult]:
    """
    Reconstruction, extended-map coherence, eta-compatibility of the deformed
    pair, intertwining of both operators with the eta-pair built from the
    deformed pair's connection, and the forward-then-inverse round trip.
    """
    deformed = deform_dcdo(pair_g, gauge)
    eta_ms = deformed.ms
    eta_pair = dcdo(eta_ms, extracted_connection(deformed))
    back = deform_dcdo_inverse(deformed, gauge)
    eta_field = Field.constant(gauge.eta.extensor, gauge.dim, "eta")
    mvs = list(sample.multivectors) or list(sample.vectors)
    tracker = ResidualTracker(DEFORMATION_IDENTITIES)

    for raw in points:
        p = as_point(raw, gauge.dim)
        fr = gauge.frame(p)
        tracker.record("MCD.6", reconstruction_residual(gauge, p), p)
        tracker.record("extended-coherence", extended_coherence_residual(gauge, p), p)
        for a in sample.directions:
            for b in sample.vectors:
                tracker.record(
                    "eta-compatibility", cov_deriv_extensor(deformed, eta_field, a, b, p, PLUS_PLUS).max_abs(), p
                )
            for x in mvs:
                lhs_plus = _apply_ext(fr.h_ext, pair_g.plus(a, x, p))
                rhs_plus = eta_pair.plus(a, gauge.map_field(x, "h"), p)
                tracker.record("MCD.7a", difference(lhs_plus, rhs_plus), p)
                lhs_minus = _apply_ext(fr.h_star_ext, pair_g.minus(a, x, p))
                rhs_minus = eta_pair.minus(a, gauge.map_field(x, "h_star"), p)
                tracker.record("MCD.7b", difference(lhs_minus, rhs_minus), p)
                tracker.record("round-trip[plus]", difference(back.plus(a, x, p), pair_g.plus(a, x, p)), p)
                tracker.record("round-trip[minus]", difference(back.minus(a, x, p), pair_g.minus(a, x, p)), p)

    return tracker.results()


def deformation_summary(gauge: GaugeMetricField, p) -> dict:
    """Pointwise data for the deform command."""
    fr = gauge.frame(p)
    return {
        "signature": list(gauge.eta.signature),
        "eta": gauge.eta.extensor.matrix.tolist(),
        "h": fr.h.matrix.tolist(),
        "det_h": det(fr.h),
        "reconstruction_residual": reconstruction_residual(gauge, p),
        "extended_coherence_residual": extended_coherence_residual(gauge, p),
    }
