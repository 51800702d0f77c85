"""
scripts/run_acceptance.py
-------------------------
Purpose:
    Run every property suite on the shipped metric specs, twice per spec,
    and confirm that
        - each Levi-Civita run passes (exit code 0)
        - the defect connection is flagged (exit code 1, GS.1 failing)
        - the two reports of a spec are byte-identical (same sha256)

Usage:
    python scripts/run_acceptance.py [--points N] [--seed S]

Exit code 0 when all expectations hold, 1 otherwise.
"""

# ===========================================
# Imports
# ===========================================
import argparse
import os
import sys

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import config
from app.services import cmd_check
from app.utils import build_report_hash, dumps_report
from observability.audit_logger import build_logger, set_run_id

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SPECS_DIR = os.path.join(ROOT, "data", "specs")
DEFECT = os.path.join(ROOT, "data", "connections", "defect.json")

# (spec file, connection file, expected exit code)
CASES = [
    ("conformal.json", None, 0),
    ("conformal3.json", None, 0),
    ("diagonal.json", None, 0),
    ("indefinite.json", None, 0),
    ("minkowski.json", None, 0),
    ("identity.json", None, 0),
    ("conformal.json", DEFECT, 1),
]


# ===========================================
# One case
# ===========================================
def run_case(spec_name, connection_file, expected, points, seed):
    spec_path = os.path.join(SPECS_DIR, spec_name)
    label = spec_name + (" + defect" if connection_file else "")
    print(f"[ACCEPT] {label}: running all suites on {points} points (seed {seed:#x})...")

    hashes = []
    codes = []
    report = None
    for _ in range(2):
        report, code = cmd_check(spec_path, "all", points, seed, connection_file, progress=False)
        hashes.append(build_report_hash(dumps_report(report)))
        codes.append(code)

    ok = True
    if hashes[0] != hashes[1]:
        print(f"[ACCEPT]   reports differ between runs: {hashes[0][:12]} vs {hashes[1][:12]}")
        ok = False
    if codes[0] != expected:
        failed = [e["identity"] for e in report["entries"] if not e["pass"]]
        print(f"[ACCEPT]   exit code {codes[0]}, expected {expected}; failing: {failed}")
        ok = False
    if connection_file:
        failed = {e["identity"] for e in report["entries"] if not e["pass"]}
        if "GS.1" not in failed:
            print("[ACCEPT]   defect connection was not flagged by GS.1")
            ok = False

    print(f"[ACCEPT]   {'OK' if ok else 'FAILED'} sha256={hashes[0][:16]}")
    return ok


# ===========================================
# Main
# ===========================================
def main():
    parser = argparse.ArgumentParser(description="extgeo acceptance run over the shipped specs")
    parser.add_argument("--points", type=int, default=config.SAMPLE_POINTS)
    parser.add_argument("--seed", type=lambda s: int(s, 0), default=config.SEED)
    args = parser.parse_args()

    build_logger(log_level="WARNING")
    set_run_id()

    results = [run_case(spec, conn, expected, args.points, args.seed) for spec, conn, expected in CASES]
    passed = sum(results)
    print(f"[ACCEPT] {passed}/{len(results)} cases passed")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
