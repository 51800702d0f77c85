"""
app/errors.py
---------------
Input-layer exceptions and centralized error handlers for the extgeo CLI.

Purpose:
    - Name the failures of spec files and metric expressions
    - Map every library error to an exit code
        2  user input (schema, syntax, connection file, bad arguments)
        3  mathematical precondition (degeneracy, asymmetry, signature
           change, evaluation outside U, incompatible pair)
        4  anything unexpected
    - Log the full traceback through the audit logger (stderr); for input
      and precondition errors it is a DEBUG record
    - Print a masked JSON payload {"error", "message", "run_id"} on stdout
"""

# ============================================================
# =                         IMPORTS                           =
# ============================================================

import json
import logging
import sys

from algebra.errors import AlgebraError
from geometry.connection import ConnectionFileError
from geometry.errors import GeometryError
from observability.audit_logger import get_run_id, log_debug, log_error


# ============================================================
# =                           LOGGER                          =
# ============================================================

logger = logging.getLogger("extgeo.errors")

EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4


# ==============================
# Custom Exception Classes
# ==============================

class SpecSchemaError(Exception):
    """Raised when a MetricSpec file is not valid version-1 JSON for its kind."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ExprSyntaxError(SyntaxError):
    """
    Raised by the expression parser. Carries the character offset of the
    offending token and what the grammar expected there.
    """

    def __init__(self, message: str, offset: int, expected: str, source: str = ""):
        super().__init__(f"{message} at offset {offset} (expected {expected})")
        self.offset = offset
        self.expected = expected
        self.source = source


# ============================================================
# =                   REGISTER ERROR HANDLERS                =
# ============================================================

def _payload(kind: str, message: str) -> None:
    sys.stdout.write(json.dumps({"error": kind, "message": message, "run_id": get_run_id()}, sort_keys=True) + "\n")
    sys.stdout.flush()


def register_error_handlers(app):
    """
    Attach exception handlers to the command app.
    Ensures:
        - Exit codes are stable per error family
        - Tracebacks only reach the logs
    """

    # --------------------------------------------------------
    # 2 – Invalid input
    # --------------------------------------------------------
    @app.errorhandler(SpecSchemaError, ExprSyntaxError, ConnectionFileError, ValueError, OSError)
    def handle_input(err):
        log_error("invalid_input", exception_type=type(err).__name__, detail=str(err))
        log_debug("invalid_input_traceback", exc_info=err)
        _payload("invalid_input", str(err))
        return EXIT_INPUT

    # --------------------------------------------------------
    # 3 – Mathematical precondition failed
    # --------------------------------------------------------
    @app.errorhandler(AlgebraError, GeometryError)
    def handle_precondition(err):
        log_error("precondition_failed", exception_type=type(err).__name__, detail=str(err))
        log_debug("precondition_failed_traceback", exc_info=err)
        _payload("precondition_failed", str(err))
        return EXIT_PRECONDITION

    # --------------------------------------------------------
    # 4 – Unexpected
    # --------------------------------------------------------
    @app.errorhandler(Exception)
    def handle_internal(err):
        logger.exception("unhandled error run_id=%s: %s", get_run_id(), err)
        _payload("internal_error", "Unexpected failure; see the log for details.")
        return EXIT_INTERNAL
