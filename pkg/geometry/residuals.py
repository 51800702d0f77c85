"""
geometry/residuals.py
---------------------
Tolerance ladder and the max-residual bookkeeping shared by every property
suite (Christoffel, Levi-Civita, compatibility, deformation).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from algebra.clifford import Multivector
from algebra.extensor import Extensor11

logger = logging.getLogger("extgeo.residuals")

# identities without differentiation
ALGEBRAIC = 1e-10
# one finite-difference level
SINGLE_DERIVATIVE = 1e-6
# derivative mixed with basis sums or composed operators
MIXED = 1e-5
# h^dagger o eta o h against g
RECONSTRUCTION = 1e-9


def magnitude(value: Any) -> float:
    """Max-abs size of a scalar, multivector, extensor or array."""
    if isinstance(value, Multivector):
        return value.max_abs()
    if isinstance(value, Extensor11):
        return value.max_abs()
    arr = np.asarray(value, dtype=float)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def difference(left: Any, right: Any) -> float:
    """magnitude(left - right), treating a float and a scalar multivector alike."""
    if isinstance(left, Multivector) and not isinstance(right, Multivector):
        right = Multivector.scalar(left.dim, float(right))
    elif isinstance(right, Multivector) and not isinstance(left, Multivector):
        left = Multivector.scalar(right.dim, float(left))
    return magnitude(left - right)


@dataclass(frozen=True)
class IdentityResult:
    identity: str
    max_residual: float
    tolerance: float
    worst_point: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tolerance)

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "worst_point": [float(x) for x in self.worst_point],
            "pass": self.passed,
        }


class ResidualTracker:
    """Accumulates max |residual| and its point for a fixed list of identities."""

    def __init__(self, tolerances: dict[str, float]):
        self.tolerances = dict(tolerances)
        self._worst: dict[str, tuple[float, tuple[float, ...]]] = {}

    def record(self, identity: str, residual: float, point: Sequence[float]) -> None:
        if identity not in self.tolerances:
            raise KeyError(f"unknown identity {identity!r}")
        r = float(residual)
        if not np.isfinite(r):
            r = float("inf")
        current = self._worst.get(identity)
        # ties keep the first point
        if current is None or r > current[0]:
            self._worst[identity] = (r, tuple(float(x) for x in point))

    def run(self, identity: str, points: Iterable[Sequence[float]], fn: Callable[[np.ndarray], float]) -> None:
        for p in points:
            self.record(identity, fn(np.asarray(p, dtype=float)), p)

    def results(self) -> list[IdentityResult]:
        out = []
        for name, tol in self.tolerances.items():
            worst, point = self._worst.get(name, (0.0, ()))
            result = IdentityResult(name, worst, tol, point)
            if not result.passed:
                logger.warning("identity %s failed: %.3e >= %.1e at %s", name, worst, tol, point)
            out.append(result)
        return out
