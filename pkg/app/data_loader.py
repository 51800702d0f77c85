"""
app.data_loader.py
------------------
Load MetricSpec files (JSON, version 1) and build validated metric structures.

Schema:
    {"version": 1, "dim": n, "kind": <kind>, "name"?: str,
     "matrix"?:  [[...]]                       constant_matrix
     "entries"?: ["expr", ...]                 diagonal_exprs (n strings)
                 [["g11","g12",..], ["g22",..], ..]   full_exprs, upper triangle rows
     "phi"?:     "expr"                        conformal_expr, g = e^(2 phi) id
     "box"?:  {"min": [...], "max": [...]},
     "diff"?: {"scheme": "central2"|"central4", "step": h},
     "thresholds"?: {"degeneracy": t, "symmetry": s},
     "probe_points"?: [[...], ...]}

Probe points default to EXTGEO_PROBE_POINTS pseudo-random points in the box
drawn with the configured seed.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np

from algebra.clifford import MAX_DIM, MIN_DIM
from algebra.extensor import Extensor11
from geometry.fields import DiffConfig, Field
from geometry.metric import MetricStructure

from . import config
from .errors import ExprSyntaxError, SpecSchemaError
from .expr_parser import compile_expr, parse_expr
from .options import DEFAULT_BOX, SPEC_VERSION, VALID_KINDS, VALID_SCHEMES
from .utils import sample_points

logger = logging.getLogger("extgeo.data_loader")


# ============================================================
# SPEC MODEL
# ============================================================
@dataclass(frozen=True)
class MetricSpec:
    dim: int
    kind: str
    name: str = "metric"
    payload: dict = field(default_factory=dict)
    box_min: tuple[float, ...] = ()
    box_max: tuple[float, ...] = ()
    scheme: str = config.DIFF_SCHEME
    step: float = config.DIFF_STEP
    degeneracy: float = config.DEGENERACY_THRESHOLD
    symmetry: float = config.SYMMETRY_TOL
    probe_points: tuple[tuple[float, ...], ...] | None = None

    @property
    def diff(self) -> DiffConfig:
        return DiffConfig(self.scheme, self.step)

    def with_overrides(self, scheme: str | None = None, step: float | None = None) -> "MetricSpec":
        """CLI flags win over the file."""
        return replace(self, scheme=scheme or self.scheme, step=step if step is not None else self.step)


def _require(cond: bool, message: str, path: str | None) -> None:
    if not cond:
        raise SpecSchemaError(message, path)


def _number_list(value: Any, length: int, what: str, path: str | None) -> tuple[float, ...]:
    _require(isinstance(value, list) and len(value) == length, f"{what} must be a list of {length} numbers", path)
    try:
        out = tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise SpecSchemaError(f"{what} must contain numbers only", path)
    _require(all(math.isfinite(v) for v in out), f"{what} must be finite", path)
    return out


def parse_spec(data: Any, path: str | None = None) -> MetricSpec:
    """
    Validate a decoded JSON document against the version-1 schema.

    Raises:
        SpecSchemaError
    """
    _require(isinstance(data, dict), "spec must be a JSON object", path)
    _require(data.get("version") == SPEC_VERSION, f"\"version\" must be {SPEC_VERSION}", path)
    dim = data.get("dim")
    _require(
        isinstance(dim, int) and not isinstance(dim, bool) and MIN_DIM <= dim <= MAX_DIM,
        f"\"dim\" must be an integer in [{MIN_DIM}, {MAX_DIM}]", path,
    )
    kind = data.get("kind")
    _require(kind in VALID_KINDS, f"\"kind\" must be one of {VALID_KINDS}", path)

    payload: dict[str, Any] = {}
    if kind == "constant_matrix":
        matrix = data.get("matrix")
        _require(isinstance(matrix, list) and len(matrix) == dim, f"\"matrix\" must have {dim} rows", path)
        payload["matrix"] = tuple(_number_list(row, dim, "matrix row", path) for row in matrix)
    elif kind == "diagonal_exprs":
        entries = data.get("entries")
        _require(isinstance(entries, list) and len(entries) == dim, f"\"entries\" must list {dim} expressions", path)
        payload["entries"] = tuple(str(e) for e in entries)
    elif kind == "full_exprs":
        entries = data.get("entries")
        _require(isinstance(entries, list) and len(entries) == dim, f"\"entries\" must have {dim} upper-triangle rows", path)
        rows = []
        for i, row in enumerate(entries):
            _require(
                isinstance(row, list) and len(row) == dim - i,
                f"row {i + 1} of \"entries\" must hold {dim - i} expressions (g{i + 1}{i + 1}..g{i + 1}{dim})", path,
            )
            rows.append(tuple(str(e) for e in row))
        payload["entries"] = tuple(rows)
    elif kind == "conformal_expr":
        _require("phi" in data, "\"phi\" is required for conformal_expr", path)
        payload["phi"] = str(data["phi"])

    box = data.get("box", {})
    _require(isinstance(box, dict), "\"box\" must be an object", path)
    lo = _number_list(box.get("min", [DEFAULT_BOX[0]] * dim), dim, "box.min", path)
    hi = _number_list(box.get("max", [DEFAULT_BOX[1]] * dim), dim, "box.max", path)
    _require(all(a < b for a, b in zip(lo, hi)), "box.min must be below box.max", path)

    diff = data.get("diff", {})
    _require(isinstance(diff, dict), "\"diff\" must be an object", path)
    scheme = diff.get("scheme", config.DIFF_SCHEME)
    _require(scheme in VALID_SCHEMES, f"diff.scheme must be one of {VALID_SCHEMES}", path)
    step = diff.get("step", config.DIFF_STEP)
    _require(isinstance(step, (int, float)) and step > 0, "diff.step must be a positive number", path)

    thresholds = data.get("thresholds", {})
    _require(isinstance(thresholds, dict), "\"thresholds\" must be an object", path)

    probes = data.get("probe_points")
    if probes is not None:
        _require(isinstance(probes, list) and probes, "\"probe_points\" must be a non-empty list", path)
        probes = tuple(_number_list(p, dim, "probe point", path) for p in probes)

    return MetricSpec(
        dim=dim,
        kind=kind,
        name=str(data.get("name") or (Path(path).stem if path else kind)),
        payload=payload,
        box_min=lo,
        box_max=hi,
        scheme=scheme,
        step=float(step),
        degeneracy=float(thresholds.get("degeneracy", config.DEGENERACY_THRESHOLD)),
        symmetry=float(thresholds.get("symmetry", config.SYMMETRY_TOL)),
        probe_points=probes,
    )


def load_spec(path: str | Path) -> MetricSpec:
    text_path = str(path)
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SpecSchemaError("spec file not found", text_path)
    except json.JSONDecodeError as exc:
        raise SpecSchemaError(f"invalid JSON: {exc}", text_path)
    return parse_spec(data, text_path)


# ============================================================
# METRIC FIELD CONSTRUCTION
# ============================================================
def _compile(src: str, dim: int) -> Callable:
    try:
        return compile_expr(parse_expr(src, dim))
    except ExprSyntaxError as exc:
        exc.source = src
        raise


def metric_field(spec: MetricSpec) -> Field:
    """The metric as a Field of Extensor11; symmetric by construction for expression kinds."""
    dim = spec.dim
    if spec.kind == "identity":
        return Field.constant(Extensor11.identity(dim), dim, "id")
    if spec.kind == "constant_matrix":
        return Field.constant(Extensor11(np.array(spec.payload["matrix"])), dim, "G")
    if spec.kind == "diagonal_exprs":
        fns = [_compile(e, dim) for e in spec.payload["entries"]]
        return Field(lambda p: Extensor11.diag([f(p) for f in fns]), dim, "diag")
    if spec.kind == "full_exprs":
        cells = [
            (i, i + k, _compile(e, dim)) for i, row in enumerate(spec.payload["entries"]) for k, e in enumerate(row)
        ]

        def _full(p):
            m = np.zeros((dim, dim))
            for i, j, f in cells:
                m[i, j] = m[j, i] = f(p)
            return Extensor11(m)

        return Field(_full, dim, "full")
    phi = _compile(spec.payload["phi"], dim)
    return Field(lambda p: Extensor11.identity(dim) * math.exp(2.0 * phi(p)), dim, "conformal")


def probe_points(spec: MetricSpec, count: int = config.PROBE_POINTS, seed: int = config.SEED) -> list[tuple[float, ...]]:
    if spec.probe_points is not None:
        return list(spec.probe_points)
    return sample_points(spec.box_min, spec.box_max, count, seed)


def build_metric(spec: MetricSpec, seed: int = config.SEED) -> MetricStructure:
    """
    Construct and validate the metric structure at the probe points.

    Raises:
        SymmetryViolation, NonDegenerateViolation, DomainError
    """
    ms = MetricStructure(
        metric_field(spec),
        threshold=spec.degeneracy,
        symmetry_tol=spec.symmetry,
        diff=spec.diff,
        probe_points=probe_points(spec, seed=seed),
        name=spec.name,
    )
    ms.validate()
    logger.info("build_metric: %s kind=%s dim=%s validated at %s probe points", spec.name, spec.kind, spec.dim, len(ms.probe_points))
    return ms


def load_metric(spec_file: str | Path, seed: int = config.SEED) -> MetricStructure:
    return build_metric(load_spec(spec_file), seed)
