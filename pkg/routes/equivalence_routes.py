# =====================================================
# routes/equivalence_routes.py - Exchange comparison report
# =====================================================

import logging
import sys

from models.run_config import RunConfig
from routes import add_param_flags, collect_flags
from utils.config_file import resolve_run_config
from utils.equivalence import Verdict, nonequivalence_report, single_photon_control, verdict
from utils.errors import EXIT_OK
from utils.settings import get_settings

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser(
        "equivalence", help="dual-photon exchange report with the single-photon control",
    )
    add_param_flags(parser)
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    config = resolve_run_config("equivalence", collect_flags(args), args.config,
                                get_settings().jobs)
    return cmd_equivalence(config)


def cmd_equivalence(config: RunConfig) -> int:
    """
    Print dual.*, control.* and control_pinned.* key=value lines, then
    verdict=. The verdict compares the dual report with the control at the
    given (nu, omega); the pinned nu = omega row is informational.
    """
    dual = nonequivalence_report(config.params)
    control = single_photon_control(config.params)
    pinned = single_photon_control(config.params, pinned=True)
    outcome = verdict(dual, control)

    lines = dual.to_lines("dual") + control.to_lines("control") + pinned.to_lines("control_pinned")
    for line in lines:
        print(line)
    print(f"verdict={outcome.value}")

    if outcome == Verdict.NONEQUIVALENT:
        print(f"✅ exchange broken: dual {dual.rel_difference:.3e} vs control "
              f"{control.rel_difference:.3e}", file=sys.stderr)
    else:
        print(f"⚠️  verdict {outcome.value}", file=sys.stderr)
    return EXIT_OK
