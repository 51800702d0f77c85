"""
app.__init__.py
---------------
Command application factory for extgeo.
Builds the app, registers sub-commands, attaches the run-id context and
loads error handlers.

No business logic here.
"""

# ============================================================
# =                      IMPORTS                             =
# ============================================================

import argparse
import logging
from typing import Callable, Sequence

from observability.audit_logger import build_logger, log_info, set_component, set_run_id

from . import config
from .errors import register_error_handlers
from .routes import register_routes


# ============================================================
# =                     COMMAND APP                           =
# ============================================================

class CommandApp:
    """
    argparse front end with decorator-style registration: routes add
    sub-commands, errors add exception handlers mapping to exit codes.
    """

    def __init__(self, prog: str = "extgeo"):
        self.parser = argparse.ArgumentParser(
            prog=prog,
            description="Metric extensor fields, Christoffel operators, Levi-Civita and "
                        "metric-compatible covariant derivatives, gauge deformations.",
        )
        self.parser.add_argument("--log-level", default=None, help="override LOG_LEVEL")
        self.subparsers = self.parser.add_subparsers(dest="command", required=True)
        self._handlers: dict[type, Callable[[BaseException], int]] = {}

    def command(self, name: str, help: str) -> argparse.ArgumentParser:
        return self.subparsers.add_parser(name, help=help, description=help)

    def errorhandler(self, *exc_types: type):
        """Decorator registering fn(exc) -> exit code for the given exception types."""
        def _register(fn):
            for exc_type in exc_types:
                self._handlers[exc_type] = fn
            return fn
        return _register

    def handle_error(self, err: BaseException) -> int:
        for klass in type(err).__mro__:
            if klass in self._handlers:
                return self._handlers[klass](err)
        raise err

    def run(self, argv: Sequence[str] | None = None) -> int:
        args = self.parser.parse_args(argv)
        build_logger(log_level=args.log_level or config.LOG_LEVEL, log_file=config.LOG_FILE)
        set_run_id()
        set_component("cli")
        log_info("command_received", command=args.command)
        try:
            return int(args.handler(args))
        except Exception as err:
            return self.handle_error(err)


# ============================================================
# =                     APP FACTORY                           =
# ============================================================

def create_app() -> CommandApp:
    """Build and configure the command app instance."""
    logger = logging.getLogger("extgeo.app")
    app = CommandApp()

    # ----------------------------------------
    # Register Sub-commands
    # ----------------------------------------
    register_routes(app)

    # ----------------------------------------
    # Error Handlers
    # ----------------------------------------
    register_error_handlers(app)

    logger.debug("create_app: command app ready")
    return app
