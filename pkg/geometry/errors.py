"""
geometry/errors.py
------------------
Named exceptions for the geometry layer (fields, metric structures,
connections and deformations).

NonDegenerateViolation comes from the algebra layer and is re-exported so
callers of geometry code need only one import.
"""

from algebra.errors import NonDegenerateViolation  # noqa: F401  (re-export)


# ==============================
# Custom Exception Classes
# ==============================

class GeometryError(Exception):
    """Base class for failures raised by the geometry layer."""
    pass


class DomainError(GeometryError):
    """
    Raised when a field cannot be evaluated at a point, including the
    stencil points of a finite-difference derivative.
    """

    def __init__(self, point, detail: str = ""):
        coords = ", ".join(f"{x:.6g}" for x in point)
        super().__init__(f"field evaluation failed at ({coords}){': ' + detail if detail else ''}")
        self.point = tuple(float(x) for x in point)
        self.detail = detail


class SignatureChangeError(GeometryError):
    """Raised when the metric signature differs between sampled points of U."""

    def __init__(self, signatures: dict):
        listed = ", ".join(f"{k}->{v}" for k, v in signatures.items())
        super().__init__(f"metric signature is not constant over the sample: {listed}")
        self.signatures = signatures


class CompatibilityError(GeometryError):
    """Raised when a DCDO pair fails its metric-compatibility gate."""

    def __init__(self, residual: float, tolerance: float, metric: str = "g"):
        super().__init__(
            f"pair is not {metric}-compatible: residual {residual:.3e} > tolerance {tolerance:.1e}"
        )
        self.residual = residual
        self.tolerance = tolerance


class SymmetryViolation(GeometryError):
    """Raised when a metric value g(p) is not symmetric within tolerance."""

    def __init__(self, point, asymmetry: float):
        coords = ", ".join(f"{x:.6g}" for x in point)
        super().__init__(f"metric is not symmetric at ({coords}): max |g - g^T| = {asymmetry:.3e}")
        self.point = tuple(float(x) for x in point)
        self.asymmetry = asymmetry
