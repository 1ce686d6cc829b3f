# =====================================================
# routes/sweep_routes.py - Parameter sweeps to CSV
# =====================================================

import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List

from models.run_config import RunConfig
from routes import add_case_flags, add_param_flags, collect_flags
from utils.closedform import evaluate
from utils.config_file import resolve_run_config
from utils.csv_writer import SweepRow, open_output, write_sweep_csv
from utils.errors import EXIT_OK, AccelRadError, InputError
from utils.settings import get_settings

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser("sweep", help="evaluate over a parameter grid and write CSV")
    add_param_flags(parser)
    add_case_flags(parser)
    parser.add_argument("--preset", default=None, help="fig1, fig2 or fig3")
    parser.add_argument("--variable", default=None, help="omega, nu, z0 or a")
    parser.add_argument("--from", dest="from", type=float, default=None)
    parser.add_argument("--to", type=float, default=None)
    parser.add_argument("--points", type=int, default=None)
    parser.add_argument("--scale", choices=["linear", "log"], default=None)
    parser.add_argument("--output", default=None, help="CSV path, '-' for stdout")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    flags = collect_flags(args, "case", "method", "modes", "preset",
                          "variable", "from", "to", "points", "scale", "output")
    config = resolve_run_config("sweep", flags, args.config, get_settings().jobs)
    return cmd_sweep(config)


# =====================================================
# HELPER FUNCTIONS
# =====================================================

def evaluate_point(config: RunConfig, index: int, value: float) -> SweepRow:
    """One grid point; AccelRadError becomes a row warning."""
    sweep = config.sweep
    variable = sweep.variable.value
    try:
        params = config.params.replace(**{variable: value})
        result = evaluate(params, sweep.case, sweep.method, config.modes)
        return SweepRow(index=index, variable=variable, value=value, result=result)
    except AccelRadError as exc:
        logger.warning(f"sweep point {index} ({variable}={value:.6g}): {exc.message}")
        return SweepRow(index=index, variable=variable, value=value,
                        warnings=[f"{type(exc).__name__}: {exc.message}"],
                        exit_code=exc.exit_code)


def run_sweep(config: RunConfig) -> List[SweepRow]:
    """All grid points, evaluated by at most config.jobs workers, in index order."""
    if config.sweep is None:
        raise InputError("sweep configuration is missing")
    grid = config.sweep.grid()

    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        futures = [pool.submit(evaluate_point, config, i, v) for i, v in enumerate(grid)]
        rows = [future.result() for future in futures]
    return sorted(rows, key=lambda row: row.index)


def cmd_sweep(config: RunConfig) -> int:
    """Write one CSV row per grid point. Exit 0 unless every point failed."""
    rows = run_sweep(config)
    failed = [row for row in rows if row.result is None]

    with open_output(config.output_path) as stream:
        count = write_sweep_csv(rows, stream)

    target = "stdout" if config.output_path == "-" else config.output_path
    if failed and len(failed) == len(rows):
        print(f"❌ all {count} points failed ({target})", file=sys.stderr)
        return failed[0].exit_code
    if failed:
        print(f"⚠️  {len(failed)} of {count} points failed ({target})", file=sys.stderr)
    else:
        print(f"✅ {count} points written to {target}", file=sys.stderr)
    return EXIT_OK
