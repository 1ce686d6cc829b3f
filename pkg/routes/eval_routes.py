# =====================================================
# routes/eval_routes.py - Single evaluation
# =====================================================

import logging
import math
import sys
from typing import List

from models.results import ProbabilityResult
from models.run_config import RunConfig
from routes import add_case_flags, add_param_flags, collect_flags
from utils.closedform import evaluate
from utils.config_file import resolve_run_config
from utils.csv_writer import format_number
from utils.errors import EXIT_OK
from utils.settings import get_settings

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser("eval", help="evaluate one excitation probability")
    add_param_flags(parser)
    add_case_flags(parser)
    parser.add_argument("--preset", default=None, help="take parameters from fig1, fig2 or fig3")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    flags = collect_flags(args, "case", "method", "modes", "preset")
    config = resolve_run_config("eval", flags, args.config, get_settings().jobs)
    return cmd_eval(config)


# =====================================================
# HELPER FUNCTIONS
# =====================================================

def format_record(result: ProbabilityResult) -> List[str]:
    """key=value lines; angles only when defined."""
    lines = [
        f"method={result.method.value}",
        f"value={format_number(result.value)}",
        f"log10_value={format_number(result.log10_value)}",
    ]
    for name, angle in result.angles.model_dump().items():
        if angle is not None:
            lines.append(f"{name}={format_number(angle)}")
    lines.append(f"planck_factor={format_number(result.planck_factor)}")
    if result.modes != 1:
        lines.append(f"modes={result.modes}")
    if result.display_value is not None:
        lines.append(f"display_value={format_number(result.display_value)}")
        lines.append(f"display_rel_difference={format_number(result.display_rel_difference)}")
    for key in sorted(result.diagnostics):
        lines.append(f"{key}={format_number(result.diagnostics[key])}")
    lines.append(f"warnings={';'.join(result.warnings)}")
    return lines


def cmd_eval(config: RunConfig) -> int:
    """Evaluate config.case by config.method and print one record."""
    result = evaluate(config.params, config.case, config.method, config.modes)
    for line in format_record(result):
        print(line)

    if result.warnings:
        print(f"⚠️  {config.case.value}/{config.method.value}: {', '.join(result.warnings)}",
              file=sys.stderr)
    elif math.isfinite(result.log10_value):
        print(f"✅ {config.case.value}/{config.method.value}: P = {result.value:.6e}",
              file=sys.stderr)
    return EXIT_OK
