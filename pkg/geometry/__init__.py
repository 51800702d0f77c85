"""
geometry/__init__.py
Field-level package: smooth fields, metric structures, connections and
gauge deformations.
"""

from .connection import ConnectionDcdo, ConnectionField, DcdoPair, GaugeRotationField, Provenance
from .deformation import GaugeMetricField, OrthogonalMetric
from .fields import DiffConfig, Field
from .metric import MetricFrame, MetricStructure
