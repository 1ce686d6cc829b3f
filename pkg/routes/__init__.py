# =====================================================
# routes - one command handler per module
# =====================================================

import argparse
from typing import Dict, Optional

from models.run_config import Case, EvalMethod

PARAM_FLAGS = (
    ("--a", "a", "acceleration (m/s^2)"),
    ("--nu", "nu", "photon angular frequency (rad/s)"),
    ("--omega", "omega", "transition angular frequency (rad/s)"),
    ("--z0", "z0", "mirror or atom position (m)"),
    ("--g", "g", "effective coupling (rad/s)"),
    ("--c", "c", "speed of light (m/s)"),
)


def add_param_flags(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("physical parameters")
    for flag, dest, text in PARAM_FLAGS:
        group.add_argument(flag, dest=dest, type=float, default=None, help=text)


def add_case_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--case", choices=[c.value for c in Case], default=None)
    parser.add_argument("--method", choices=[m.value for m in EvalMethod], default=None)
    parser.add_argument("--modes", type=int, default=None,
                        help="number of identical cavity modes summed")


def collect_flags(args: argparse.Namespace, *names: str) -> Dict[str, Optional[object]]:
    """Flag values keyed the way run files spell them; unset flags stay None."""
    keys = [dest for _, dest, _ in PARAM_FLAGS] + list(names)
    flags = {key: getattr(args, key, None) for key in keys}
    if getattr(args, "jobs", None) is not None:
        flags["jobs"] = args.jobs
    return flags
