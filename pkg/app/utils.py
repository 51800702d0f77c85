"""
app.utils.py
------------
Helpers: seeded sampling of points and test fields, result merging,
deterministic report serialization.

Functions:
    - parse_point(text, dim): "0.5,0" -> array
    - sample_points(box, count, seed): reproducible points in a box
    - build_sample(dim, seed): smooth random fields for the property suites
    - merge_results(chunks): per-identity max over partial results
    - dumps_report(report): sorted-key JSON, identical bytes for identical input
    - build_report_hash(text): sha256 digest used by the acceptance script
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import sys
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from algebra.clifford import Multivector, blade_tables
from algebra.extensor import Extensor11
from geometry.connection import ConnectionSample
from geometry.fields import Field
from geometry.metric import ChristoffelSample
from geometry.residuals import IdentityResult

logger = logging.getLogger("extgeo.utils")


# ============================================================
# POINTS
# ============================================================
def parse_point(text: str | Sequence[float] | None, dim: int) -> np.ndarray:
    """Comma-separated coordinates; None means the origin."""
    if text is None:
        return np.zeros(dim)
    if isinstance(text, str):
        try:
            values = [float(x) for x in text.replace(" ", "").split(",") if x != ""]
        except ValueError as exc:
            raise ValueError(f"point {text!r} is not a comma-separated list of numbers") from exc
    else:
        values = [float(x) for x in text]
    if len(values) != dim:
        raise ValueError(f"point {text!r} has {len(values)} coordinates, expected {dim}")
    return np.array(values)


def sample_points(
    box_min: Sequence[float], box_max: Sequence[float], count: int, seed: int
) -> list[tuple[float, ...]]:
    """count uniform points in the box from a dedicated PRNG stream."""
    rng = np.random.default_rng(seed)
    lo = np.asarray(box_min, dtype=float)
    hi = np.asarray(box_max, dtype=float)
    pts = rng.uniform(lo, hi, size=(count, lo.shape[0]))
    return [tuple(float(x) for x in row) for row in pts]


# ============================================================
# SAMPLE FIELDS
# ============================================================
def _wave(rng: np.random.Generator, dim: int, offset_scale: float, amplitude: float):
    offset = float(rng.uniform(-offset_scale, offset_scale))
    amp = float(amplitude * rng.uniform(0.5, 1.0))
    freq = rng.uniform(-1.0, 1.0, size=dim)
    phase = float(rng.uniform(0.0, 2.0 * math.pi))
    return lambda p: offset + amp * math.sin(float(freq @ p) + phase)


def random_vector_field(rng: np.random.Generator, dim: int, name: str) -> Field:
    waves = [_wave(rng, dim, 1.0, 0.5) for _ in range(dim)]
    return Field.vector(lambda p: [w(p) for w in waves], dim, name)


def random_scalar_field(rng: np.random.Generator, dim: int, name: str = "f") -> Field:
    wave = _wave(rng, dim, 0.5, 0.5)
    return Field.scalar(lambda p: 1.0 + wave(p), dim, name)


def random_multivector_field(rng: np.random.Generator, dim: int, name: str, max_grade: int = 2) -> Field:
    grades = blade_tables(dim).grades
    masks = [m for m in range(1 << dim) if grades[m] <= max_grade]
    waves = {m: _wave(rng, dim, 1.0, 0.5) for m in masks}

    def _value(p):
        coeffs = np.zeros(1 << dim)
        for m, w in waves.items():
            coeffs[m] = w(p)
        return Multivector(dim, coeffs)

    return Field(_value, dim, name)


def random_tau_field(rng: np.random.Generator, dim: int, name: str = "tau") -> Field:
    """id + small smooth perturbation; row sums stay below 1 so tau is invertible."""
    waves = [[_wave(rng, dim, 0.0, 0.6 / dim) for _ in range(dim)] for _ in range(dim)]
    return Field(
        lambda p: Extensor11(np.eye(dim) + np.array([[w(p) for w in row] for row in waves])), dim, name
    )


@dataclass(frozen=True)
class SampleFields:
    christoffel: ChristoffelSample
    connection: ConnectionSample


def build_sample(dim: int, seed: int) -> SampleFields:
    """Smooth fields drawn from a PRNG stream independent of the point stream."""
    rng = np.random.default_rng([seed, 1])
    a, a2, b, b2, c, c2 = (random_vector_field(rng, dim, n) for n in ("a", "a2", "b", "b2", "c", "c2"))
    f = random_scalar_field(rng, dim)
    x = random_multivector_field(rng, dim, "X")
    y = random_multivector_field(rng, dim, "Y")
    tau = random_tau_field(rng, dim)
    consts = tuple(Multivector.vector(rng.normal(size=dim)) for _ in range(max(3, dim)))
    return SampleFields(
        christoffel=ChristoffelSample(a=a, a2=a2, b=b, b2=b2, c=c, c2=c2, f=f),
        connection=ConnectionSample(
            directions=(a, a2), vectors=(b, b2, c), multivectors=(x, y), taus=(tau,), constant_vectors=consts
        ),
    )


# ============================================================
# RESULTS
# ============================================================
def merge_results(chunks: Iterable[list[IdentityResult]]) -> list[IdentityResult]:
    """Per-identity max over chunks, first-seen order, first point kept on ties."""
    merged: dict[str, IdentityResult] = {}
    for chunk in chunks:
        for r in chunk:
            current = merged.get(r.identity)
            if current is None or not current.worst_point or r.max_residual > current.max_residual:
                merged[r.identity] = r
    return list(merged.values())


def dumps_report(report: dict) -> str:
    """Deterministic JSON: sorted keys, repr floats, no timestamps."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=True)


def build_report_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def emit(text: str, json_path: str | None = None) -> None:
    """Write the report to stdout and, if requested, the same bytes to a file."""
    sys.stdout.write(text + "\n")
    sys.stdout.flush()
    if json_path:
        with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
