"""Shared fixtures: metric structures used across the geometry and CLI tests."""

import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from algebra.clifford import Multivector
from algebra.extensor import Extensor11
from geometry.fields import DiffConfig, Field
from geometry.metric import MetricStructure

settings.register_profile("default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv("EXTGEO_HYPOTHESIS_PROFILE", "default"))

SPECS_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "specs")
CONNECTIONS_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "connections")

PROBES_2D = [(0.0, 0.0), (0.3, -0.2), (-0.4, 0.25)]
PROBES_3D = [(0.0, 0.0, 0.0), (0.2, -0.1, 0.3)]


def conformal_metric(dim: int = 2) -> MetricStructure:
    """g = exp(2 x1) id."""
    g = Field(lambda p: Extensor11.identity(dim) * math.exp(2.0 * p[0]), dim, "conformal")
    probes = PROBES_2D if dim == 2 else PROBES_3D
    return MetricStructure(g, probe_points=probes, name=f"conformal{dim}")


def diagonal_metric() -> MetricStructure:
    """g = diag(3 + x1^2, exp(x2)); the entries never cross on the unit box."""
    g = Field(lambda p: Extensor11.diag([3.0 + p[0] ** 2, math.exp(p[1])]), 2, "diag")
    return MetricStructure(g, probe_points=PROBES_2D, name="diagonal")


def indefinite_metric() -> MetricStructure:
    """Lorentzian 2D metric near diag(1, -4) with a non-vanishing off-diagonal."""

    def _g(p):
        off = 0.2 + 0.1 * math.sin(p[1])
        return Extensor11([[1.0 + 0.1 * p[0] ** 2, off], [off, -4.0 + 0.2 * p[0] * p[1]]])

    return MetricStructure(
        Field(_g, 2, "indef"), probe_points=PROBES_2D, diff=DiffConfig("central4", 1e-3), name="indefinite"
    )


@pytest.fixture
def conformal2():
    return conformal_metric(2)


@pytest.fixture
def conformal3():
    return conformal_metric(3)


@pytest.fixture
def diagonal():
    return diagonal_metric()


@pytest.fixture
def indefinite():
    return indefinite_metric()


@pytest.fixture
def euclidean2():
    return MetricStructure.constant(np.eye(2), probe_points=PROBES_2D, name="id2")


@pytest.fixture
def smooth_vectors():
    """Three smooth vector fields on R^2."""
    a = Field.vector(lambda p: [1.0 + 0.3 * math.sin(p[1]), 0.5 * p[0]], 2, "a")
    b = Field.vector(lambda p: [p[1] ** 2 - 0.2, 1.0 + 0.4 * math.cos(p[0])], 2, "b")
    c = Field.vector(lambda p: [0.7, 0.3 * p[0] * p[1] - 0.5], 2, "c")
    return a, b, c


def e(dim: int, *indices: int) -> Multivector:
    """Basis blade from 1-based indices."""
    return Multivector.blade(dim, *(i - 1 for i in indices))
