"""
algebra/errors.py
-----------------
Named exceptions for the algebra layer (multivectors and extensors).

Keeps dimension, grade and degeneracy failures distinguishable from the
geometry and CLI layers so callers can map them to exit codes.
"""

# ==============================
# Custom Exception Classes
# ==============================

class AlgebraError(Exception):
    """Base class for every failure raised by the algebra layer."""
    pass


class DimensionMismatchError(AlgebraError):
    """
    Raised when two operands live in algebras of different dimension
    (e.g. a 2D multivector multiplied by a 3D one).
    """

    def __init__(self, left: int, right: int, op: str = "operation"):
        super().__init__(f"{op}: dimension mismatch ({left} != {right})")
        self.left = left
        self.right = right


class NonDegenerateViolation(AlgebraError):
    """
    Raised when an extensor is singular or too close to singular to invert.

    Carries |det| so reports can show how far below the threshold it fell.
    """

    def __init__(self, det: float, threshold: float, context: str = ""):
        where = f" ({context})" if context else ""
        super().__init__(
            f"non-degeneracy violated{where}: |det|={abs(det):.3e} <= {threshold:.1e}"
        )
        self.det = det
        self.threshold = threshold


class GradeError(AlgebraError):
    """Raised when a value has grades other than the ones an operation requires."""
    pass
