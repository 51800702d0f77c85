"""
app.options.py
--------------
Static choices used by argument parsing and MetricSpec validation, plus the
tolerance ladder every report uses.

Quick test:
>>> from app.options import VALID_SUITES
"""

from geometry.fields import STENCILS
from geometry.residuals import ALGEBRAIC, MIXED, RECONSTRUCTION, SINGLE_DERIVATIVE  # noqa: F401

SPEC_VERSION = 1
REPORT_VERSION = 1

VALID_KINDS = ["identity", "constant_matrix", "diagonal_exprs", "full_exprs", "conformal_expr"]
VALID_SCHEMES = ["central2", "central4"]
VALID_SUITES = ["christoffel", "levi-civita", "compatibility", "deformation", "all"]

# Order in which "all" runs the suites
SUITE_ORDER = ["christoffel", "levi-civita", "compatibility", "deformation"]

# Default probe box when a spec omits "box"
DEFAULT_BOX = (-0.5, 0.5)

# Expression language
FUNCTIONS = ["exp", "log", "sin", "cos", "sqrt"]

# Validation block: every scheme offered on the CLI must have a stencil
for scheme in VALID_SCHEMES:
    if scheme not in STENCILS:
        raise ValueError(f"Scheme '{scheme}' has no finite-difference stencil")

for suite in SUITE_ORDER:
    if suite not in VALID_SUITES:
        raise ValueError(f"Suite '{suite}' is not in VALID_SUITES")
