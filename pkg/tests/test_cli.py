"""End-to-end tests of the extgeo command line (reports on stdout, exit codes)."""

import json
import logging
import math
import os

import pytest

from app import create_app
from extgeo import main
from conftest import CONNECTIONS_DIR, SPECS_DIR

CONFORMAL = os.path.join(SPECS_DIR, "conformal.json")
MINKOWSKI = os.path.join(SPECS_DIR, "minkowski.json")
DEFECT = os.path.join(CONNECTIONS_DIR, "defect.json")


@pytest.fixture(autouse=True)
def fresh_log_handlers():
    # each run binds its stderr handler to the current capture stream
    yield
    logger = logging.getLogger("extgeo")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)


def run(capsys, *argv):
    code = create_app().run(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def _failed(report):
    return {e["identity"] for e in report["entries"] if not e["pass"]}


# ---------------------------------------------------------------------------
# christoffel / connection / deform / parse
# ---------------------------------------------------------------------------


class TestPointCommands:
    def test_christoffel_with_oracle(self, capsys):
        code, report = run(capsys, "christoffel", "--spec", CONFORMAL, "--triple", "1,1,1", "--oracle")
        assert code == 0
        (entry,) = report["entries"]
        assert entry["triple"] == [1, 1, 1]
        assert entry["first"] == pytest.approx(1.0, abs=1e-8)
        assert entry["oracle"] == pytest.approx(1.0, abs=1e-8)

    def test_christoffel_all_triples(self, capsys):
        code, report = run(capsys, "christoffel", "--spec", CONFORMAL, "--oracle")
        assert code == 0
        assert len(report["entries"]) == 8
        by_triple = {tuple(e["triple"]): e for e in report["entries"]}
        assert by_triple[(2, 2, 1)]["first"] == pytest.approx(-1.0, abs=1e-8)
        for entry in report["entries"]:
            assert entry["first"] == pytest.approx(entry["oracle"], abs=1e-6)

    def test_christoffel_expression_fields(self, capsys):
        code, report = run(capsys, "christoffel", "--spec", CONFORMAL, "--fields", "1,0|0,1|0,1")
        assert code == 0
        assert report["entries"][0]["first"] == pytest.approx(1.0, abs=1e-8)

    def test_negative_point_needs_equals_form(self, capsys):
        code, report = run(capsys, "christoffel", "--spec", CONFORMAL, "--point=-0.5,0", "--triple", "1,1,1")
        assert code == 0
        assert report["point"] == [-0.5, 0.0]
        assert report["entries"][0]["first"] == pytest.approx(math.exp(-1.0), abs=1e-7)

    def test_connection(self, capsys):
        code, report = run(capsys, "connection", "--spec", CONFORMAL, "--a", "2", "--b", "2")
        assert code == 0
        assert report["provenance"] == "levi_civita"
        assert report["omega0"]["e12"] == pytest.approx(-1.0, abs=1e-8)
        assert report["lambda"] == pytest.approx([-1.0, 0.0], abs=1e-8)
        assert report["lambda_plus"] == pytest.approx([0.0, 0.0], abs=1e-8)

    def test_connection_from_file(self, capsys):
        rotation = os.path.join(CONNECTIONS_DIR, "rotation.json")
        code, report = run(capsys, "connection", "--spec", MINKOWSKI, "--connection-file", rotation)
        assert code == 0
        assert report["provenance"] == "from_omega"
        assert report["omega"]["e12"] == pytest.approx(0.3, abs=1e-12)
        assert report["omega0"] == {}

    def test_deform(self, capsys):
        code, report = run(capsys, "deform", "--spec", MINKOWSKI)
        assert code == 0
        assert report["signature"] == [1, 1]
        assert report["h"] == [[1.0, 0.0], [0.0, 1.0]]
        assert all(e["pass"] for e in report["entries"])

    def test_parse(self, capsys):
        code, report = run(capsys, "parse", "2*-x1", "--point=0.5,0")
        assert code == 0
        assert report["unparsed"] == "(2.0 * (-x1))"
        assert report["variables"] == ["x1"]
        assert report["value"] == pytest.approx(-1.0)

    def test_json_copy(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code = main(["parse", "exp(x1)", "--json", str(target)])
        out = capsys.readouterr().out
        assert code == 0
        assert target.read_text(encoding="utf-8") == out


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


class TestCheck:
    def test_single_suite_passes(self, capsys):
        code, report = run(capsys, "check", "--spec", CONFORMAL, "--suite", "christoffel", "--points", "2", "--no-progress")
        assert code == 0
        assert report["pass"] is True
        assert report["suites"] == ["christoffel"]
        assert {e["suite"] for e in report["entries"]} == {"christoffel"}

    @pytest.mark.slow
    def test_all_suites_pass(self, capsys):
        code, report = run(capsys, "check", "--spec", CONFORMAL, "--points", "1", "--no-progress")
        assert code == 0, _failed(report)
        assert report["suites"] == ["christoffel", "levi-civita", "compatibility", "deformation"]
        assert report["connection"] == "levi_civita"

    def test_defect_connection_fails(self, capsys):
        code, report = run(
            capsys, "check", "--spec", CONFORMAL, "--suite", "compatibility", "--points", "2",
            "--connection-file", DEFECT, "--no-progress",
        )
        assert code == 1
        assert report["pass"] is False
        assert report["connection"] == "custom"
        failed = _failed(report)
        assert "GS.1" in failed
        assert "remarkable" not in failed

    def test_defect_blocks_deformation(self, capsys):
        code, report = run(
            capsys, "check", "--spec", CONFORMAL, "--suite", "deformation", "--points", "1",
            "--connection-file", DEFECT, "--no-progress",
        )
        assert code == 1
        assert _failed(report) == {"compatibility-gate"}

    def test_reports_are_deterministic(self, capsys):
        argv = ["check", "--spec", CONFORMAL, "--suite", "levi-civita", "--points", "2", "--seed", "0x2A", "--no-progress"]
        create_app().run(argv)
        first = capsys.readouterr().out
        create_app().run(argv)
        second = capsys.readouterr().out
        assert first == second
        assert json.loads(first)["seed"] == 42


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------


class TestExitCodes:
    def _write(self, tmp_path, payload):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    def test_schema_error_is_input_error(self, capsys, tmp_path):
        spec = self._write(tmp_path, {"version": 1, "dim": 2, "kind": "nope"})
        code, payload = run(capsys, "deform", "--spec", spec)
        assert code == 2
        assert payload["error"] == "invalid_input"
        assert "kind" in payload["message"]

    def test_syntax_error_is_input_error(self, capsys, tmp_path):
        spec = self._write(tmp_path, {"version": 1, "dim": 2, "kind": "conformal_expr", "phi": "x1 +"})
        code, payload = run(capsys, "connection", "--spec", spec)
        assert code == 2
        assert "offset 4" in payload["message"]

    def test_missing_connection_file_is_input_error(self, capsys, tmp_path):
        code, payload = run(capsys, "connection", "--spec", CONFORMAL, "--connection-file", str(tmp_path / "none.json"))
        assert code == 2
        assert payload["error"] == "invalid_input"

    @pytest.mark.parametrize(
        "matrix",
        [[[1.0, 0.5], [0.0, 1.0]], [[1.0, 1.0], [1.0, 1.0]]],
        ids=["asymmetric", "singular"],
    )
    def test_bad_metric_is_precondition_error(self, capsys, tmp_path, matrix):
        spec = self._write(tmp_path, {"version": 1, "dim": 2, "kind": "constant_matrix", "matrix": matrix})
        code, payload = run(capsys, "christoffel", "--spec", spec)
        assert code == 3
        assert payload["error"] == "precondition_failed"

    def test_signature_change_is_precondition_error(self, capsys, tmp_path):
        spec = self._write(
            tmp_path,
            {"version": 1, "dim": 2, "kind": "diagonal_exprs", "entries": ["1", "x1"],
             "probe_points": [[0.5, 0.0], [-0.5, 0.0]]},
        )
        code, payload = run(capsys, "deform", "--spec", spec, "--point=0.5,0")
        assert code == 3
        assert "signature" in payload["message"]

    def test_bad_point_is_input_error(self, capsys):
        code, payload = run(capsys, "christoffel", "--spec", CONFORMAL, "--point", "1,2,3")
        assert code == 2
        assert "expected 2" in payload["message"]

    def test_zero_points_rejected(self, capsys):
        code, _payload = run(capsys, "check", "--spec", CONFORMAL, "--points", "0")
        assert code == 2

    def test_argparse_errors_exit_2(self, capsys):
        with pytest.raises(SystemExit) as info:
            create_app().run(["check", "--spec", CONFORMAL, "--suite", "unknown"])
        assert info.value.code == 2

    def test_run_id_in_error_payload(self, capsys):
        code, payload = run(capsys, "parse", "1 +")
        assert code == 2
        assert payload["run_id"]

    @pytest.mark.parametrize("src, offset", [("x1 +", 4), ("2*", 2), ("(", 1), ("exp(", 4)])
    def test_truncated_expression_is_input_error(self, capsys, src, offset):
        code, payload = run(capsys, "parse", src)
        assert code == 2
        assert payload["error"] == "invalid_input"
        assert f"offset {offset}" in payload["message"]

    def test_debug_log_carries_traceback(self, capsys):
        code = create_app().run(["--log-level", "DEBUG", "parse", "x1 +"])
        captured = capsys.readouterr()
        assert code == 2
        records = [json.loads(line) for line in captured.err.splitlines() if line.startswith("{")]
        traced = [r for r in records if r["event"] == "invalid_input_traceback"]
        assert len(traced) == 1
        assert "ExprSyntaxError" in traced[0]["error"]
        assert "Traceback" in traced[0]["error"]
        assert "Traceback" not in captured.out
