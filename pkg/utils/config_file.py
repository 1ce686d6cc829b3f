# =====================================================
# utils/config_file.py - Flat key = value run files and config resolution
# =====================================================
"""
Run files are plain text:

    # fig2 with a stronger coupling
    preset = fig2
    g = 2e7
    output = fig2.csv

Blank lines and '#' comments are ignored; keys prefixed with ``tol.`` set
verification tolerance overrides. Precedence when building a RunConfig:
built-in defaults < preset < run file < command-line flags.
"""

import logging
from pathlib import Path
from typing import Dict, Mapping, Optional

from models.params import SPEED_OF_LIGHT
from models.run_config import PRESETS, RunConfig, SweepSpec
from utils.errors import InputError

logger = logging.getLogger(__name__)

PARAM_KEYS = ("a", "nu", "omega", "z0", "g", "c")
SWEEP_KEYS = ("variable", "from", "to", "points", "scale")
RUN_KEYS = ("case", "method", "output", "jobs", "modes", "preset")
ALLOWED_KEYS = set(PARAM_KEYS) | set(SWEEP_KEYS) | set(RUN_KEYS)

DEFAULT_PARAMS = dict(a=1.0e15, nu=1.0e4, omega=1.0e9, z0=0.01, g=1.0e7, c=SPEED_OF_LIGHT)


def parse_config_file(path: str) -> Dict[str, str]:
    """
    Read a run file into a key -> raw string mapping.

    Raises:
        InputError: unreadable file, malformed line or unknown key
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc.strerror}", path=path)

    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{number}: expected 'key = value'", path=path, line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in ALLOWED_KEYS and not key.startswith("tol."):
            raise InputError(f"{path}:{number}: unknown key '{key}'", path=path, key=key)
        values[key] = value
    logger.debug(f"config file {path}: {sorted(values)}")
    return values


def _to_float(key: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InputError(f"{key} must be a number, got '{value}'", key=key, value=value)


def _to_int(key: str, value) -> int:
    try:
        return int(float(value))
    except (TypeError, ValueError):
        raise InputError(f"{key} must be an integer, got '{value}'", key=key, value=value)


def resolve_run_config(
    command: str,
    flags: Mapping[str, object],
    config_path: Optional[str] = None,
    default_jobs: int = 1,
) -> RunConfig:
    """
    Merge defaults, preset, run file and flags into a RunConfig.

    Args:
        command: eval, sweep, verify or equivalence
        flags: command-line values, None where a flag was not given
        config_path: optional run file
        default_jobs: worker bound when neither file nor flags set one

    Raises:
        InputError: unknown preset, missing sweep axis, malformed values
    """
    file_values = parse_config_file(config_path) if config_path else {}
    given = {k: v for k, v in flags.items() if v is not None}

    merged: Dict[str, object] = dict(DEFAULT_PARAMS)
    merged.update(jobs=default_jobs, modes=1, case="atom", method="exact", output="-")

    preset_name = given.get("preset") or file_values.get("preset")
    if preset_name:
        if preset_name not in PRESETS:
            raise InputError(f"unknown preset '{preset_name}' (choose from {', '.join(PRESETS)})",
                             preset=preset_name)
        preset = PRESETS[preset_name]
        merged.update(preset["params"])
        merged.update(preset["sweep"])

    merged.update(file_values)
    merged.update(given)

    params = {key: _to_float(key, merged[key]) for key in PARAM_KEYS}
    tolerances = {key[4:]: _to_float(key, value) for key, value in merged.items()
                  if key.startswith("tol.")}

    sweep = None
    if command == "sweep":
        missing = [key for key in ("variable", "from", "to") if key not in merged]
        if missing:
            raise InputError(f"sweep needs {', '.join(missing)} (or --preset)", missing=missing)
        sweep = SweepSpec(**{
            "variable": merged["variable"],
            "from": _to_float("from", merged["from"]),
            "to": _to_float("to", merged["to"]),
            "points": _to_int("points", merged.get("points", 400)),
            "scale": merged.get("scale", "log"),
            "case": merged["case"],
            "method": merged["method"],
        })

    return RunConfig(
        params=params,
        sweep=sweep,
        case=merged["case"],
        method=merged["method"],
        output_path=str(merged["output"]),
        tolerances=tolerances,
        jobs=_to_int("jobs", merged["jobs"]),
        modes=_to_int("modes", merged["modes"]),
    )
