"""
app.config.py
-------------
Centralized environment-driven configuration for the extgeo CLI.
Values are read once at import, after .env (if any) is loaded. CLI flags
override them per invocation.

Quick test:
>>> from app import config
>>> print(config.DIFF_STEP)
"""

import os

from dotenv import load_dotenv

load_dotenv()


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("1", "true", "yes")


# Numerical gates
DEGENERACY_THRESHOLD = float(os.getenv("EXTGEO_DEGENERACY_THRESHOLD", "1e-10"))
SYMMETRY_TOL = float(os.getenv("EXTGEO_SYMMETRY_TOL", "1e-10"))

# Finite differences
DIFF_SCHEME = os.getenv("EXTGEO_DIFF_SCHEME", "central2")
DIFF_STEP = float(os.getenv("EXTGEO_DIFF_STEP", "1e-5"))

# Sampling (seed accepts decimal or 0x-prefixed hex)
SEED = int(os.getenv("EXTGEO_SEED", "0xC11F"), 0)
PROBE_POINTS = int(os.getenv("EXTGEO_PROBE_POINTS", 16))
SAMPLE_POINTS = int(os.getenv("EXTGEO_SAMPLE_POINTS", 8))

# Spectral gauge
JACOBI_TOL = float(os.getenv("EXTGEO_JACOBI_TOL", "1e-12"))
JACOBI_MAX_SWEEPS = int(os.getenv("EXTGEO_JACOBI_MAX_SWEEPS", 64))

# Feature flags
PROGRESS = _flag("EXTGEO_PROGRESS", "true")

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("LOG_FILE", "")
