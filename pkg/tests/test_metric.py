"""Tests for the metric structure, g-products and Christoffel operators."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from algebra.clifford import Multivector, clifford_product, contract_left, contract_right
from algebra.extensor import Extensor11, extend
from app.utils import build_sample
from geometry.errors import NonDegenerateViolation, SymmetryViolation
from geometry.fields import Field, dir_deriv
from geometry.metric import (
    CHRISTOFFEL_IDENTITIES,
    MetricStructure,
    christoffel_first,
    christoffel_first_field,
    christoffel_property_suite,
    christoffel_second,
    g_clifford,
    g_commutator,
    g_contract_left,
    g_contract_right,
    g_scalar,
    product_rule_residual,
)
from conftest import PROBES_2D, conformal_metric, diagonal_metric, e, indefinite_metric
from oracles import christoffel_first_kind, christoffel_second_kind

coeff = st.floats(min_value=-1.5, max_value=1.5, allow_nan=False, allow_infinity=False)


def _matrix_of(ms):
    return lambda q: ms.g(q).matrix


@st.composite
def metric_and_multivectors(draw):
    """Random non-degenerate symmetric constant metric plus three multivectors."""
    n = draw(st.integers(min_value=2, max_value=3))
    a = np.array(draw(st.lists(st.lists(coeff, min_size=n, max_size=n), min_size=n, max_size=n)))
    signs = draw(st.lists(st.sampled_from([1.0, -1.0]), min_size=n, max_size=n))
    g = 0.2 * (a + a.T) + 2.0 * np.diag(signs)
    size = 1 << n
    mvs = [Multivector(n, draw(st.lists(coeff, min_size=size, max_size=size))) for _ in range(3)]
    return MetricStructure.constant(g), mvs


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


class TestValidation:
    def test_asymmetric_metric_rejected(self):
        ms = MetricStructure.constant([[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(SymmetryViolation) as info:
            ms.validate()
        assert info.value.asymmetry == pytest.approx(0.5)

    def test_singular_metric_rejected(self):
        ms = MetricStructure.constant([[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(NonDegenerateViolation):
            ms.validate()

    def test_degeneracy_found_at_a_probe_point(self):
        g = Field(lambda p: Extensor11.diag([1.0, p[0]]), 2, "g")
        ms = MetricStructure(g, probe_points=[(1.0, 0.0), (0.0, 0.0)])
        with pytest.raises(NonDegenerateViolation):
            ms.validate()

    def test_frames_are_memoized(self, conformal2):
        assert conformal2.frame([0.1, 0.2]) is conformal2.frame((0.1, 0.2))

    def test_inverse_frame(self, indefinite):
        fr = indefinite.frame([0.2, -0.3])
        assert np.allclose((fr.g @ fr.g_inv).matrix, np.eye(2), atol=1e-12)
        assert fr.inverse().g is fr.g_inv


# ---------------------------------------------------------------------------
# g-products
# ---------------------------------------------------------------------------


class TestProducts:
    def test_conformal_scalar_product_at_origin(self, conformal2):
        assert g_scalar(conformal2, e(2, 1), e(2, 1), [0.0, 0.0]) == pytest.approx(1.0)
        assert g_scalar(conformal2, e(2, 1), e(2, 1), [0.5, 0.0]) == pytest.approx(math.e)

    def test_contractions_use_extended_metric(self):
        g = Extensor11([[2.0, 0.5], [0.5, -1.0]])
        ms = MetricStructure.constant(g)
        x, y = e(2, 1), e(2, 1, 2)
        p = [0.0, 0.0]
        assert g_contract_left(ms, x, y, p).allclose(contract_left(extend(g)(x), y))
        assert g_contract_right(ms, y, x, p).allclose(contract_right(y, extend(g)(x)))

    def test_clifford_of_vectors(self):
        g = Extensor11([[2.0, 0.5], [0.5, -1.0]])
        ms = MetricStructure.constant(g)
        p = [0.0, 0.0]
        assert g_clifford(ms, e(2, 1), e(2, 1), p).to_dict() == {"1": pytest.approx(2.0)}
        sym = g_clifford(ms, e(2, 1), e(2, 2), p) + g_clifford(ms, e(2, 2), e(2, 1), p)
        assert sym.allclose(Multivector.scalar(2, 1.0), atol=1e-12)

    def test_identity_metric_recovers_fiducial_product(self, euclidean2):
        x = Multivector(2, [0.5, 1.0, -2.0, 0.3])
        y = Multivector(2, [1.0, 0.0, 0.7, -1.1])
        assert g_clifford(euclidean2, x, y, [0.0, 0.0]).allclose(clifford_product(x, y), atol=1e-12)

    @given(metric_and_multivectors())
    def test_clifford_associative(self, data):
        ms, (x, y, z) = data
        p = np.zeros(ms.dim)
        left = g_clifford(ms, g_clifford(ms, x, y, p), z, p)
        right = g_clifford(ms, x, g_clifford(ms, y, z, p), p)
        assert left.allclose(right, atol=1e-8)

    @given(metric_and_multivectors())
    def test_vector_clifford_splits(self, data):
        ms, (x, _y, _z) = data
        p = np.zeros(ms.dim)
        b = Multivector.vector(np.linspace(0.3, -0.6, ms.dim))
        expected = g_contract_left(ms, b, x, p) + clifford_product(b, x) - contract_left(b, x)
        # b X = b _|g X + b ^ X, and the fiducial product minus its contraction is b ^ X
        assert g_clifford(ms, b, x, p).allclose(expected, atol=1e-9)

    def test_commutator_with_bivector_preserves_grade(self, conformal3):
        p = [0.1, 0.0, -0.2]
        out = g_commutator(conformal3, e(3, 1, 2), e(3, 3) + e(3, 1), p)
        assert out.is_grade(1, 1e-12)

    def test_product_rule(self, diagonal, smooth_vectors):
        a, b, c = smooth_vectors
        for p in PROBES_2D:
            assert product_rule_residual(diagonal, a, b, c, p) < 1e-6


# ---------------------------------------------------------------------------
# Christoffel operators
# ---------------------------------------------------------------------------


class TestChristoffel:
    def test_conformal_values_at_origin(self, conformal2):
        basis = [Field.basis(2, i) for i in range(2)]
        p = [0.0, 0.0]
        assert christoffel_first(conformal2, basis[0], basis[0], basis[0], p) == pytest.approx(1.0, abs=1e-8)
        assert christoffel_first(conformal2, basis[1], basis[1], basis[0], p) == pytest.approx(-1.0, abs=1e-8)
        assert christoffel_first(conformal2, basis[0], basis[1], basis[1], p) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("builder", [diagonal_metric, indefinite_metric])
    def test_matches_coordinate_formula(self, builder):
        ms = builder()
        basis = [Field.basis(2, i) for i in range(2)]
        for p in PROBES_2D:
            first = christoffel_first_kind(_matrix_of(ms), p)
            second = christoffel_second_kind(_matrix_of(ms), p)
            for i, j, k in itertools.product(range(2), repeat=3):
                a, b, c = basis[i], basis[j], basis[k]
                assert christoffel_first(ms, a, b, c, p) == pytest.approx(first[i, j, k], abs=1e-6)
                assert christoffel_second(ms, a, b, c, p) == pytest.approx(second[k, i, j], abs=1e-6)

    def test_identity_metric_reduces_to_directional_derivative(self, euclidean2, smooth_vectors):
        a, b, c = smooth_vectors
        p = [0.2, -0.1]
        expected = dir_deriv(a, b, p).vector_part() @ c(p).vector_part()
        assert christoffel_first(euclidean2, a, b, c, p) == pytest.approx(expected, abs=1e-7)

    def test_field_wrapper(self, conformal2):
        basis = [Field.basis(2, i) for i in range(2)]
        field = christoffel_first_field(conformal2, basis[0], basis[0], basis[0])
        assert field([0.0, 0.0]) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("builder", [lambda: conformal_metric(2), lambda: conformal_metric(3), diagonal_metric])
    def test_property_suite_passes(self, builder):
        ms = builder()
        sample = build_sample(ms.dim, seed=7)
        results = christoffel_property_suite(ms, sample.christoffel, ms.probe_points)
        assert [r.identity for r in results] == list(CHRISTOFFEL_IDENTITIES)
        failed = [(r.identity, r.max_residual) for r in results if not r.passed]
        assert not failed

    def test_property_suite_detects_broken_operator(self, conformal2, monkeypatch):
        import geometry.metric as metric

        original = metric.christoffel_first
        monkeypatch.setattr(metric, "christoffel_first", lambda *args: original(*args) + 1e-3)
        sample = build_sample(2, seed=7)
        results = {r.identity: r for r in christoffel_property_suite(conformal2, sample.christoffel, [(0.0, 0.0)])}
        # additivity picks up the constant offset
        assert not results["CHO.3a"].passed
