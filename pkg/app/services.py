"""
app/services.py
---------------
Command pipelines behind the CLI:
 → Load the MetricSpec and build the validated metric structure
 → Build connections / gauge fields / sample fields
 → Evaluate values or property suites
 → Return a JSON-ready report (and an exit code for check)

Each cmd_* function is pure with respect to its arguments: identical
inputs give identical reports.
"""

from __future__ import annotations

import logging
import sys
from typing import Sequence

import numpy as np
from tqdm import tqdm

from algebra.clifford import Multivector
from geometry.connection import (
    ConnectionField,
    compatibility_report,
    dcdo,
    gauge_biv,
    lambda_parts,
    levi_civita,
    levi_civita_report,
    load_connection_file,
    omega0,
)
from geometry.deformation import deformation_summary, gauge_field, theorem_report
from geometry.errors import CompatibilityError
from geometry.fields import Field
from geometry.metric import MetricStructure, christoffel_first, christoffel_property_suite, christoffel_second
from geometry.residuals import MIXED, IdentityResult
from observability.audit_logger import log_info, log_timing, log_warn, set_component

from . import config
from .data_loader import MetricSpec, build_metric, load_spec
from .expr_parser import compile_expr, evaluate, parse_expr, unparse, variables
from .options import REPORT_VERSION, SUITE_ORDER
from .utils import build_sample, merge_results, parse_point, sample_points

logger = logging.getLogger("extgeo.services")


# ============================================================
# =                     SHARED SETUP                          =
# ============================================================
def prepare(
    spec_path: str,
    scheme: str | None = None,
    step: float | None = None,
    seed: int = config.SEED,
) -> tuple[MetricSpec, MetricStructure]:
    spec = load_spec(spec_path).with_overrides(scheme, step)
    return spec, build_metric(spec, seed)


def resolve_connection(ms: MetricStructure, connection_file: str | None) -> ConnectionField:
    if connection_file:
        return load_connection_file(connection_file, ms)
    return levi_civita(ms)


def _vector_list(mv: Multivector) -> list[float]:
    return [float(x) for x in mv.vector_part()]


def _basis(dim: int, index: int) -> Field:
    if not 1 <= index <= dim:
        raise ValueError(f"basis index {index} out of range 1..{dim}")
    return Field.basis(dim, index - 1)


def parse_vector_field(src: str, dim: int, name: str) -> Field:
    """'expr1,expr2,...' with one component expression per coordinate."""
    parts = src.split(",")
    if len(parts) != dim:
        raise ValueError(f"vector field {src!r} needs {dim} comma-separated components")
    fns = [compile_expr(parse_expr(s, dim)) for s in parts]
    return Field.vector(lambda p: [f(p) for f in fns], dim, name)


def coordinate_christoffel(ms: MetricStructure, i: int, j: int, k: int, p) -> float:
    """Classical Gamma_{ij,k} = 1/2 (d_i g_jk + d_j g_ik - d_k g_ij), 0-based indices."""
    grads = ms.gradient(p)
    return 0.5 * (grads[i].matrix[j, k] + grads[j].matrix[i, k] - grads[k].matrix[i, j])


# ============================================================
# =                     CHRISTOFFEL                           =
# ============================================================
def cmd_christoffel(
    spec_path: str,
    point: str | None = None,
    triple: Sequence[int] | None = None,
    fields: str | None = None,
    oracle: bool = False,
    scheme: str | None = None,
    step: float | None = None,
    seed: int = config.SEED,
) -> dict:
    """[a,b,c] and {c;a,b} at a point for basis triples (1-based) or expression fields 'a|b|c'."""
    spec, ms = prepare(spec_path, scheme, step, seed)
    dim = ms.dim
    p = parse_point(point, dim)

    if fields:
        srcs = fields.split("|")
        if len(srcs) != 3:
            raise ValueError("--fields needs three vector fields separated by '|'")
        a, b, c = (parse_vector_field(s, dim, n) for s, n in zip(srcs, "abc"))
        entries = [{
            "fields": srcs,
            "first": christoffel_first(ms, a, b, c, p),
            "second": christoffel_second(ms, a, b, c, p),
        }]
    else:
        triples = [tuple(triple)] if triple else [(i, j, k) for i in range(1, dim + 1) for j in range(1, dim + 1) for k in range(1, dim + 1)]
        entries = []
        for i, j, k in triples:
            a, b, c = _basis(dim, i), _basis(dim, j), _basis(dim, k)
            entry = {
                "triple": [i, j, k],
                "first": christoffel_first(ms, a, b, c, p),
                "second": christoffel_second(ms, a, b, c, p),
            }
            if oracle:
                entry["oracle"] = coordinate_christoffel(ms, i - 1, j - 1, k - 1, p)
            entries.append(entry)

    return {"version": REPORT_VERSION, "spec": spec.name, "point": p.tolist(), "entries": entries}


# ============================================================
# =                     CONNECTION                            =
# ============================================================
def cmd_connection(
    spec_path: str,
    point: str | None = None,
    a_index: int = 1,
    b_index: int = 1,
    connection_file: str | None = None,
    scheme: str | None = None,
    step: float | None = None,
    seed: int = config.SEED,
) -> dict:
    """omega0(a), the connection gamma_a(b) and its g-symmetric/skew parts at a point."""
    spec, ms = prepare(spec_path, scheme, step, seed)
    dim = ms.dim
    p = parse_point(point, dim)
    a, b = _basis(dim, a_index), _basis(dim, b_index)
    conn = resolve_connection(ms, connection_file)
    sym, skew = lambda_parts(ms, conn, a, p)
    bp = b(p)
    return {
        "version": REPORT_VERSION,
        "spec": spec.name,
        "point": p.tolist(),
        "a": a_index,
        "b": b_index,
        "provenance": conn.provenance.value,
        "omega0": omega0(ms, a, p).to_dict(),
        "omega": gauge_biv(ms, conn)(a, p).to_dict(),
        "lambda": _vector_list(conn.apply(a, b, p)),
        "lambda_plus": _vector_list(sym(bp)),
        "lambda_minus": _vector_list(skew(bp)),
    }


# ============================================================
# =                       CHECK                               =
# ============================================================
def _progress(points: Sequence, label: str, enabled: bool):
    return tqdm(points, desc=label, file=sys.stderr, disable=not (enabled and sys.stderr.isatty()), leave=False)


def _per_point(fn, points, label: str, progress: bool) -> list[IdentityResult]:
    return merge_results(fn([p]) for p in _progress(points, label, progress))


def _deformation_suite(ms, conn, sample, points, progress) -> list[IdentityResult]:
    gauge, _eta = gauge_field(ms, ms.probe_points, config.JACOBI_TOL, config.JACOBI_MAX_SWEEPS)
    pair = dcdo(ms, conn)
    try:
        return _per_point(lambda pts: theorem_report(pair, gauge, pts, sample.connection), points, "deformation", progress)
    except CompatibilityError as exc:
        log_warn("deformation_gate_failed", residual=exc.residual)
        return [IdentityResult("compatibility-gate", exc.residual, exc.tolerance, ())]


@log_timing("check", component="check")
def cmd_check(
    spec_path: str,
    suite: str = "all",
    points: int = config.SAMPLE_POINTS,
    seed: int = config.SEED,
    connection_file: str | None = None,
    scheme: str | None = None,
    step: float | None = None,
    progress: bool = config.PROGRESS,
) -> tuple[dict, int]:
    """
    Run property suites over seeded sample points.

    Returns:
        (report, exit code): 0 iff every residual is under its tolerance, else 1.
    """
    spec, ms = prepare(spec_path, scheme, step, seed)
    suites = SUITE_ORDER if suite == "all" else [suite]
    pts = sample_points(spec.box_min, spec.box_max, points, seed)
    sample = build_sample(ms.dim, seed)
    conn = resolve_connection(ms, connection_file)

    entries = []
    for name in suites:
        set_component(name)
        if name == "christoffel":
            results = _per_point(lambda q: christoffel_property_suite(ms, sample.christoffel, q, MIXED), pts, name, progress)
        elif name == "levi-civita":
            results = _per_point(lambda q: levi_civita_report(ms, sample.connection, q), pts, name, progress)
        elif name == "compatibility":
            results = _per_point(lambda q: compatibility_report(ms, conn, q, sample.connection), pts, name, progress)
        else:
            results = _deformation_suite(ms, conn, sample, pts, progress)
        entries.extend({**r.to_dict(), "suite": name} for r in results)
        log_info("suite_done", suite=name, identities=len(results), failed=sum(not r.passed for r in results))

    failed = [e["identity"] for e in entries if not e["pass"]]
    if failed:
        log_warn("check_failed", identities=failed)
    report = {
        "version": REPORT_VERSION,
        "spec": spec.name,
        "seed": seed,
        "points": points,
        "suites": list(suites),
        "connection": conn.provenance.value,
        "entries": entries,
        "pass": not failed,
    }
    return report, (0 if not failed else 1)


# ============================================================
# =                       DEFORM                              =
# ============================================================
def cmd_deform(
    spec_path: str,
    point: str | None = None,
    seed: int = config.SEED,
    scheme: str | None = None,
    step: float | None = None,
) -> dict:
    """eta signature, h(p), reconstruction and intertwining residuals at a point."""
    spec, ms = prepare(spec_path, scheme, step, seed)
    p = parse_point(point, ms.dim)
    gauge, _eta = gauge_field(ms, ms.probe_points, config.JACOBI_TOL, config.JACOBI_MAX_SWEEPS)
    sample = build_sample(ms.dim, seed)
    results = theorem_report(dcdo(ms, levi_civita(ms)), gauge, [p], sample.connection)
    return {
        "version": REPORT_VERSION,
        "spec": spec.name,
        "point": p.tolist(),
        **deformation_summary(gauge, p),
        "entries": [r.to_dict() for r in results],
    }


# ============================================================
# =                       PARSE                               =
# ============================================================
def cmd_parse(src: str, point: str | None = None, dim: int | None = None) -> dict:
    """Parse, unparse and (if a point is given) evaluate an expression."""
    expr = parse_expr(src, dim)
    report = {
        "source": src,
        "unparsed": unparse(expr),
        "variables": [f"x{i}" for i in sorted(variables(expr))],
    }
    if point is not None:
        coords = np.array([float(x) for x in point.split(",")])
        report["point"] = coords.tolist()
        report["value"] = evaluate(expr, coords)
    return report
