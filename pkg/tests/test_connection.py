"""Tests for gauge fields, connections, DCDO pairs and the compatibility suites."""

import json
import math

import numpy as np
import pytest

from algebra.clifford import Multivector
from algebra.errors import GradeError
from algebra.extensor import Extensor11, Extensor2to1
from app.utils import build_sample
from geometry.connection import (
    COMPATIBILITY_PRODUCTS,
    MINUS_MINUS,
    ConnectionFileError,
    ConnectionSample,
    GaugeRotationField,
    Provenance,
    compatibility_identities,
    compatibility_report,
    connection_of,
    connection_table,
    cov_deriv_extensor,
    dcdo,
    gamma_from_omega,
    gauge_biv,
    generalized_closed_form,
    generalized_connection,
    is_compatible,
    lambda_parts,
    levi_civita,
    levi_civita_report,
    load_connection_file,
    omega0,
    omega0_field,
    omega_table,
    remarkable_residual,
)
from geometry.fields import Field, dir_deriv
from conftest import PROBES_2D, conformal_metric, diagonal_metric, e, indefinite_metric
from oracles import christoffel_second_kind


def _rotation_field() -> GaugeRotationField:
    return GaugeRotationField.constant(Extensor2to1(Extensor2to1.BIVECTOR, [[0.3], [-0.1]]))


def _with_defect(ms, magnitude=0.01):
    s = Extensor11.identity(ms.dim)
    return levi_civita(ms).with_defect(lambda av, p: s * (magnitude * float(av[0])))


def _failed(results):
    return sorted(r.identity for r in results if not r.passed)


# ---------------------------------------------------------------------------
# Levi-Civita gauge field and connection
# ---------------------------------------------------------------------------


class TestLeviCivita:
    def test_omega0_conformal_examples(self, conformal2):
        p = [0.0, 0.0]
        assert omega0(conformal2, e(2, 2), p).allclose(e(2, 1, 2) * -1.0, atol=1e-8)
        assert omega0(conformal2, e(2, 1), p).max_abs() < 1e-8

    def test_omega0_vanishes_for_constant_metric(self, euclidean2):
        assert omega0(euclidean2, e(2, 1), [0.3, 0.1]).max_abs() == 0.0

    def test_omega0_is_bivector_valued(self, conformal3):
        value = omega0_field(conformal3)(Multivector.vector([0.2, -1.0, 0.5]), [0.1, 0.2, -0.3])
        assert value.is_grade(2, 1e-12)

    def test_lambda_conformal_example(self, conformal2):
        conn = levi_civita(conformal2)
        assert conn.apply(e(2, 2), e(2, 2), [0.0, 0.0]).allclose(e(2, 1) * -1.0, atol=1e-8)
        assert conn.provenance is Provenance.LEVI_CIVITA

    @pytest.mark.parametrize("builder", [diagonal_metric, indefinite_metric])
    def test_matches_coordinate_christoffel_symbols(self, builder):
        ms = builder()
        conn = levi_civita(ms)
        for p in PROBES_2D:
            symbols = christoffel_second_kind(lambda q: ms.g(q).matrix, p)
            for i in range(2):
                gamma = conn(np.eye(2)[i], p).matrix
                # column j of gamma_{e_i} holds S[., i, j]
                assert np.allclose(gamma, symbols[:, i, :], atol=1e-6)

    def test_gauge_biv_recovers_omega0(self, conformal2):
        recovered = gauge_biv(conformal2, levi_civita(conformal2))
        for p in PROBES_2D:
            for a in (e(2, 1), e(2, 2)):
                assert recovered(a, p).allclose(omega0(conformal2, a, p), atol=1e-6)

    def test_lambda_split(self, indefinite):
        conn = levi_civita(indefinite)
        sym, skew = lambda_parts(indefinite, conn, e(2, 1), [0.1, 0.2])
        assert (sym + skew - conn(e(2, 1), [0.1, 0.2])).max_abs() < 1e-12

    def test_generalized_connection_closed_form(self, conformal3):
        conn = levi_civita(conformal3)
        omega = omega0_field(conformal3)
        a = Multivector.vector([0.4, -0.2, 1.0])
        p = [0.1, -0.2, 0.3]
        gap = generalized_connection(conn, a, p) - generalized_closed_form(conformal3, omega, a, p)
        assert np.max(np.abs(gap)) < 1e-6

    def test_tables(self, conformal2):
        p = [0.2, 0.1]
        table = connection_table(levi_civita(conformal2), p)
        a, b = Multivector.vector([0.3, 1.0]), Multivector.vector([-1.0, 0.5])
        assert table(a, b).allclose(levi_civita(conformal2).apply(a, b, p), atol=1e-12)
        om = omega_table(omega0_field(conformal2), p)
        assert om(a).allclose(omega0(conformal2, a, p), atol=1e-12)

    @pytest.mark.parametrize("builder", [lambda: conformal_metric(2), lambda: conformal_metric(3), diagonal_metric, indefinite_metric])
    def test_report_passes(self, builder):
        ms = builder()
        sample = build_sample(ms.dim, seed=11)
        results = levi_civita_report(ms, sample.connection, ms.probe_points)
        assert _failed(results) == []
        assert {r.identity for r in results} >= {"LCC.1", "LCC.3a3", "LCC.4"}


# ---------------------------------------------------------------------------
# Gauge fields and connections from omega
# ---------------------------------------------------------------------------


class TestGaugeFields:
    def test_grade_checked_at_evaluation(self):
        bad = GaugeRotationField(lambda av, p: Multivector.vector(av), 2, "bad")
        with pytest.raises(GradeError):
            bad(e(2, 1), [0.0, 0.0])

    def test_zero_field(self):
        assert GaugeRotationField.zero(3)(e(3, 1), [0.0, 0.0, 0.0]).max_abs() == 0.0

    def test_gamma_from_omega_round_trip(self, conformal2):
        omega = _rotation_field()
        conn = gamma_from_omega(conformal2, omega)
        recovered = gauge_biv(conformal2, conn)
        p = [0.1, -0.3]
        for a in (e(2, 1), e(2, 2), Multivector.vector([0.5, 0.5])):
            assert recovered(a, p).allclose(omega(a, p), atol=1e-9)
        assert conn.provenance is Provenance.FROM_OMEGA

    def test_gamma_from_omega_is_compatible(self, indefinite):
        pair = dcdo(indefinite, gamma_from_omega(indefinite, _rotation_field()))
        assert is_compatible(indefinite, pair) < 1e-6

    def test_defect_breaks_compatibility(self, conformal2):
        conn = _with_defect(conformal2)
        assert conn.provenance is Provenance.CUSTOM
        assert is_compatible(conformal2, dcdo(conformal2, conn)) > 1e-3


# ---------------------------------------------------------------------------
# DCDO pairs
# ---------------------------------------------------------------------------


class TestDcdo:
    def test_scalar_fields_reduce_to_directional_derivative(self, conformal2):
        pair = dcdo(conformal2, levi_civita(conformal2))
        f = Field.scalar(lambda p: math.sin(p[0]) + p[1] ** 2, 2, "f")
        a = Field.vector(lambda p: [1.0, p[0]], 2, "a")
        p = [0.2, 0.4]
        assert pair.plus(a, f, p) == pytest.approx(dir_deriv(a, f, p))
        assert pair.minus(a, f, p) == pytest.approx(dir_deriv(a, f, p))

    def test_plus_on_constant_basis_gives_connection(self, diagonal):
        conn = levi_civita(diagonal)
        pair = dcdo(diagonal, conn)
        a, p = Multivector.vector([0.7, -0.4]), [0.2, 0.1]
        assert np.allclose(connection_of(pair, a, p).matrix, conn(a, p).matrix, atol=1e-12)

    def test_minus_uses_transposed_connection(self, indefinite):
        conn = levi_civita(indefinite)
        pair = dcdo(indefinite, conn)
        a, p = e(2, 2), [0.1, 0.1]
        b = Field.basis(2, 0)
        expected = Multivector.vector(-conn(a, p).matrix.T @ np.array([1.0, 0.0]))
        assert pair.minus(a, b, p).allclose(expected, atol=1e-12)

    def test_plus_is_derivation_of_wedge(self, conformal3):
        from algebra.clifford import outer

        pair = dcdo(conformal3, levi_civita(conformal3))
        sample = build_sample(3, seed=3).connection
        a, (x, y) = sample.directions[0], sample.vectors[:2]
        wedge = Field(lambda q: outer(x(q), y(q)), 3, "x^y")
        p = [0.1, 0.2, -0.1]
        expected = outer(pair.plus(a, x, p), y(p)) + outer(x(p), pair.plus(a, y, p))
        assert pair.plus(a, wedge, p).allclose(expected, atol=1e-6)

    def test_unknown_variant(self, conformal2):
        pair = dcdo(conformal2, levi_civita(conformal2))
        g = Field(lambda q: conformal2.frame(q).g, 2, "g")
        with pytest.raises(ValueError, match="variant"):
            cov_deriv_extensor(pair, g, e(2, 1), Field.basis(2, 0), [0.0, 0.0], "plus_minus")

    def test_inverse_metric_parallel_for_minus_minus(self, diagonal):
        pair = dcdo(diagonal, levi_civita(diagonal))
        g_inv = diagonal.inverse_field()
        b = Field.vector(lambda q: [q[1], 1.0], 2, "b")
        value = cov_deriv_extensor(pair, g_inv, e(2, 1), b, [0.3, -0.2], MINUS_MINUS)
        assert value.max_abs() < 1e-6

    def test_remarkable_formula_holds_for_any_pair(self, conformal2):
        pair = dcdo(conformal2, _with_defect(conformal2, magnitude=0.3))
        tau = build_sample(2, seed=5).connection.taus[0]
        for p in PROBES_2D:
            assert remarkable_residual(pair, tau, e(2, 1), p) < 1e-6


# ---------------------------------------------------------------------------
# Compatibility suite
# ---------------------------------------------------------------------------


class TestCompatibilityReport:
    def test_identity_names(self):
        names = compatibility_identities()
        assert "GS.1" in names and "remarkable" in names
        for op in COMPATIBILITY_PRODUCTS:
            assert f"MCD.5[{op}]" in names and f"MCD.5a[{op}]" in names

    @pytest.mark.parametrize("builder", [lambda: conformal_metric(2), indefinite_metric])
    def test_levi_civita_passes(self, builder):
        ms = builder()
        sample = build_sample(ms.dim, seed=13)
        results = compatibility_report(ms, levi_civita(ms), ms.probe_points[:2], sample.connection)
        assert _failed(results) == []

    def test_torsionful_compatible_connection_passes(self, conformal2):
        sample = build_sample(2, seed=13)
        conn = gamma_from_omega(conformal2, _rotation_field())
        results = compatibility_report(conformal2, conn, [(0.1, -0.2)], sample.connection)
        assert _failed(results) == []

    def test_defect_flags_gs1_but_not_remarkable(self, conformal2):
        fields = build_sample(2, seed=13).connection
        sample = ConnectionSample(directions=[Field.basis(2, 0)], vectors=fields.vectors, taus=fields.taus)
        results = {r.identity: r for r in compatibility_report(conformal2, _with_defect(conformal2), PROBES_2D, sample)}
        assert not results["GS.1"].passed
        assert not results["MCD.1"].passed
        assert results["remarkable"].passed

    def test_accepts_a_pair(self, conformal2):
        sample = build_sample(2, seed=13)
        pair = dcdo(conformal2, levi_civita(conformal2))
        results = compatibility_report(conformal2, pair, [(0.0, 0.0)], sample.connection)
        assert _failed(results) == []


# ---------------------------------------------------------------------------
# Connection files
# ---------------------------------------------------------------------------


class TestConnectionFiles:
    def _write(self, tmp_path, payload):
        path = tmp_path / "conn.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    def test_null_omega_means_levi_civita(self, tmp_path, conformal2):
        conn = load_connection_file(self._write(tmp_path, {"version": 1, "omega": None}), conformal2)
        assert conn.provenance is Provenance.LEVI_CIVITA

    def test_constant_omega(self, tmp_path, conformal2):
        conn = load_connection_file(self._write(tmp_path, {"version": 1, "omega": [[0.3], [-0.1]]}), conformal2)
        assert conn.provenance is Provenance.FROM_OMEGA
        assert gauge_biv(conformal2, conn)(e(2, 1), [0.0, 0.0]).allclose(e(2, 1, 2) * 0.3, atol=1e-9)

    def test_defect(self, tmp_path, conformal2):
        payload = {"version": 1, "omega": None, "defect": {"magnitude": 0.01, "direction": [1, 0], "matrix": [[1, 0], [0, 1]]}}
        conn = load_connection_file(self._write(tmp_path, payload), conformal2)
        base = levi_civita(conformal2)
        gap = conn(e(2, 1), [0.0, 0.0]) - base(e(2, 1), [0.0, 0.0])
        assert np.allclose(gap.matrix, 0.01 * np.eye(2), atol=1e-12)
        assert conn.provenance is Provenance.CUSTOM

    @pytest.mark.parametrize(
        "payload, match",
        [
            ({"version": 2}, "version"),
            ({"version": 1, "omega": [[0.1, 0.2]]}, "omega"),
            ({"version": 1, "defect": {"magnitude": 1.0, "matrix": [[0, 1], [0, 0]]}}, "symmetric"),
            ({"version": 1, "defect": {"direction": [1, 0, 0]}}, "shapes"),
        ],
    )
    def test_schema_errors(self, tmp_path, conformal2, payload, match):
        with pytest.raises(ConnectionFileError, match=match):
            load_connection_file(self._write(tmp_path, payload), conformal2)

    def test_missing_file(self, tmp_path, conformal2):
        with pytest.raises(ConnectionFileError, match="cannot read"):
            load_connection_file(str(tmp_path / "absent.json"), conformal2)
