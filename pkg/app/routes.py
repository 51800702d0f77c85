"""
app/routes.py
---------------
Sub-command layer for extgeo.
Thin transport layer → parses flags, delegates to services, emits reports.

    extgeo christoffel|connection|check|deform --spec <file>
           [--point x1,x2,...] [--suite NAME] [--points N] [--seed S]
           [--step H] [--scheme central2|central4] [--oracle] [--json out.json]
    extgeo parse "<expr>" [--point ...] [--dim n]
"""
# ============================================================
# =                         IMPORTS                           =
# ============================================================

import argparse
import logging

from . import config, services
from .options import VALID_SCHEMES, VALID_SUITES
from .utils import dumps_report, emit


# ============================================================
# =                         LOGGER                            =
# ============================================================

logger = logging.getLogger("extgeo.routes")


def _seed(text: str) -> int:
    """Decimal or 0x-prefixed seed."""
    return int(text, 0)


def _triple(text: str) -> list[int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("triple must be three comma-separated indices, e.g. 1,2,1")
    return [int(x) for x in parts]


def _common(p: argparse.ArgumentParser, point: bool = True) -> None:
    p.add_argument("--spec", required=True, help="MetricSpec JSON file")
    if point:
        p.add_argument("--point", default=None, help="comma-separated coordinates (default: origin)")
    p.add_argument("--seed", type=_seed, default=config.SEED, help="probe/sample seed")
    p.add_argument("--step", type=float, default=None, help="finite-difference step")
    p.add_argument("--scheme", choices=VALID_SCHEMES, default=None, help="finite-difference scheme")
    p.add_argument("--json", dest="json_path", default=None, help="also write the report to this file")


def _connection_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--connection-file", "--omega-file", dest="connection_file", default=None,
                   help="version-1 connection file (constant omega, optional defect)")


# ============================================================
# =                  ROUTE REGISTRATION ENTRY                 =
# ============================================================

def register_routes(app):

    # --------------------------------------------------------
    # CHRISTOFFEL
    # --------------------------------------------------------
    p = app.command("christoffel", "Christoffel operators of the first and second kind at a point")
    _common(p)
    p.add_argument("--triple", type=_triple, default=None, help="1-based basis indices a,b,c (default: all)")
    p.add_argument("--fields", default=None, help="three vector fields 'a1,a2|b1,b2|c1,c2' as expressions")
    p.add_argument("--oracle", action="store_true", help="add the classical coordinate symbol")

    def christoffel(args):
        report = services.cmd_christoffel(
            args.spec, args.point, args.triple, args.fields, args.oracle, args.scheme, args.step, args.seed
        )
        emit(dumps_report(report), args.json_path)
        return 0

    p.set_defaults(handler=christoffel)

    # --------------------------------------------------------
    # CONNECTION
    # --------------------------------------------------------
    p = app.command("connection", "Gauge field omega0(a) and connection lambda(a, b) at a point")
    _common(p)
    p.add_argument("--a", dest="a_index", type=int, default=1, help="1-based basis index of a")
    p.add_argument("--b", dest="b_index", type=int, default=1, help="1-based basis index of b")
    _connection_flag(p)

    def connection(args):
        report = services.cmd_connection(
            args.spec, args.point, args.a_index, args.b_index, args.connection_file, args.scheme, args.step, args.seed
        )
        emit(dumps_report(report), args.json_path)
        return 0

    p.set_defaults(handler=connection)

    # --------------------------------------------------------
    # CHECK
    # --------------------------------------------------------
    p = app.command("check", "Run property suites; exit 0 iff every residual is under tolerance")
    _common(p, point=False)
    p.add_argument("--suite", choices=VALID_SUITES, default="all")
    p.add_argument("--points", type=int, default=config.SAMPLE_POINTS, help="number of sample points")
    p.add_argument("--no-progress", action="store_true", help="disable the stderr progress bar")
    _connection_flag(p)

    def check(args):
        if args.points < 1:
            raise ValueError("--points must be >= 1")
        report, code = services.cmd_check(
            args.spec, args.suite, args.points, args.seed, args.connection_file, args.scheme, args.step,
            progress=config.PROGRESS and not args.no_progress,
        )
        emit(dumps_report(report), args.json_path)
        return code

    p.set_defaults(handler=check)

    # --------------------------------------------------------
    # DEFORM
    # --------------------------------------------------------
    p = app.command("deform", "Gauge metric field h, eta signature and deformation residuals at a point")
    _common(p)

    def deform(args):
        report = services.cmd_deform(args.spec, args.point, args.seed, args.scheme, args.step)
        emit(dumps_report(report), args.json_path)
        return 0

    p.set_defaults(handler=deform)

    # --------------------------------------------------------
    # PARSE
    # --------------------------------------------------------
    p = app.command("parse", "Parse, unparse and evaluate a metric-component expression")
    p.add_argument("expr")
    p.add_argument("--point", default=None)
    p.add_argument("--dim", type=int, default=None, help="reject coordinates above x<dim>")
    p.add_argument("--json", dest="json_path", default=None)

    def parse(args):
        emit(dumps_report(services.cmd_parse(args.expr, args.point, args.dim)), args.json_path)
        return 0

    p.set_defaults(handler=parse)
