# =====================================================
# models/run_config.py - Command configuration models
# =====================================================

from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, validator

from models.params import REFERENCE_SPEED_OF_LIGHT, PhysicalParams

# =====================================================
# Enums
# =====================================================

class Case(str, Enum):
    ATOM = "atom"
    MIRROR = "mirror"
    ATOM_SWAPPED = "atom-swapped"
    MIRROR_SWAPPED = "mirror-swapped"


class EvalMethod(str, Enum):
    EXACT = "exact"
    TAYLOR = "taylor"
    SMALL_BETA = "small-beta"
    ORACLE = "oracle"


class Scale(str, Enum):
    LINEAR = "linear"
    LOG = "log"


class SweepVariable(str, Enum):
    OMEGA = "omega"
    NU = "nu"
    Z0 = "z0"
    A = "a"


class Suite(str, Enum):
    SPECIAL = "special"
    INTEGRALS = "integrals"
    FIGURES = "figures"
    EQUIVALENCE = "equivalence"
    ALL = "all"


# =====================================================
# Sweep and run configuration
# =====================================================

class SweepSpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    variable: SweepVariable
    from_: float = Field(..., alias="from")
    to: float
    points: int = Field(400, ge=2)
    scale: Scale = Field(Scale.LOG, validate_default=True)
    case: Case = Case.ATOM
    method: EvalMethod = EvalMethod.EXACT

    @validator('to')
    def to_validator(cls, v, values):
        start = values.get('from_')
        if start is not None and not start < v:
            raise ValueError('sweep needs from < to')
        return v

    @validator('scale', always=True)
    def scale_validator(cls, v, values):
        start = values.get('from_')
        if v == Scale.LOG and start is not None and start <= 0:
            raise ValueError('log scale requires from > 0')
        return v

    def grid(self) -> List[float]:
        if self.scale == Scale.LOG:
            return [float(x) for x in np.geomspace(self.from_, self.to, self.points)]
        return [float(x) for x in np.linspace(self.from_, self.to, self.points)]


class RunConfig(BaseModel):
    params: PhysicalParams
    sweep: Optional[SweepSpec] = None
    case: Case = Case.ATOM
    method: EvalMethod = EvalMethod.EXACT
    output_path: str = "-"
    tolerances: Dict[str, float] = Field(default_factory=dict)
    jobs: int = Field(1, ge=1)
    modes: int = Field(1, ge=1)


# =====================================================
# Presets
# =====================================================

PRESET_PARAMS = dict(a=1.0e15, nu=1.0e4, omega=1.0e9, z0=0.01, g=1.0e7, c=REFERENCE_SPEED_OF_LIGHT)

PRESETS: Dict[str, dict] = {
    # atom case: nu fixed, transition frequency swept
    "fig1": dict(
        params=dict(PRESET_PARAMS, nu=1.0e4),
        sweep=dict(variable="omega", **{"from": 1.0e3}, to=1.0e7, points=400,
                   scale="log", case="atom", method="exact"),
    ),
    # mirror case, exact form
    "fig2": dict(
        params=dict(PRESET_PARAMS, omega=1.0e9),
        sweep=dict(variable="nu", **{"from": 1.0e3}, to=1.0e7, points=400,
                   scale="log", case="mirror", method="exact"),
    ),
    # mirror case, small nu c/a form
    "fig3": dict(
        params=dict(PRESET_PARAMS, omega=1.0e9),
        sweep=dict(variable="nu", **{"from": 1.0e3}, to=1.0e7, points=400,
                   scale="log", case="mirror", method="small-beta"),
    ),
}
