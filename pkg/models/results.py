# =====================================================
# models/results.py - Result and report models
# =====================================================

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class Method(str, Enum):
    ATOM_CLOSED = "atom_closed"
    MIRROR_EXACT = "mirror_exact"
    MIRROR_TAYLOR = "mirror_taylor"
    MIRROR_SMALL_BETA = "mirror_small_beta"
    ATOM_SWAPPED = "atom_swapped"
    MIRROR_SWAPPED = "mirror_swapped"
    ORACLE = "oracle"
    SINGLE_ATOM = "single_atom"
    SINGLE_MIRROR = "single_mirror"


class ComplexValue(BaseModel):
    re: float
    im: float

    @classmethod
    def of(cls, z: complex) -> "ComplexValue":
        z = complex(z)
        return cls(re=z.real, im=z.imag)

    def __complex__(self):
        return complex(self.re, self.im)

    @property
    def modulus(self) -> float:
        return math.hypot(self.re, self.im)

    @property
    def argument(self) -> float:
        return math.atan2(self.im, self.re)


class PhaseAngles(BaseModel):
    theta: Optional[float] = None
    theta_prime: Optional[float] = None
    theta_bar: Optional[float] = None
    theta_dprime: Optional[float] = None

    def primary(self) -> Optional[float]:
        for value in (self.theta, self.theta_prime, self.theta_bar, self.theta_dprime):
            if value is not None:
                return value
        return None


class BfValue(BaseModel):
    value: ComplexValue
    zeta: float
    modulus: float = Field(..., ge=0)


class ProbabilityResult(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    value: float = Field(..., ge=0)
    log10_value: float
    method: Method
    angles: PhaseAngles = Field(default_factory=PhaseAngles)
    planck_factor: float
    warnings: List[str] = Field(default_factory=list)
    # displayed-form value and its relative difference to the assembly
    display_value: Optional[float] = None
    display_rel_difference: Optional[float] = None
    modes: int = 1
    diagnostics: Dict[str, float] = Field(default_factory=dict)


class QuadratureReport(BaseModel):
    value: ComplexValue
    abs_error_estimate: float = Field(..., ge=0)
    evaluations: int
    method: str
    epsilon_trace: List[Tuple[float, ComplexValue]] = Field(default_factory=list)


class AmplitudeBreakdown(BaseModel):
    """Partial amplitudes in seconds."""

    i1: ComplexValue
    i2: ComplexValue
    i3: ComplexValue
    total: ComplexValue
    epsilon_trace: List[Tuple[float, ComplexValue]] = Field(default_factory=list)
    residual: float = 0.0

    @classmethod
    def build(cls, i1: complex, i2: complex, i3: complex, trace=None, residual: float = 0.0):
        return cls(
            i1=ComplexValue.of(i1),
            i2=ComplexValue.of(i2),
            i3=ComplexValue.of(i3),
            total=ComplexValue.of(complex(i1) + complex(i2) + complex(i3)),
            epsilon_trace=trace or [],
            residual=residual,
        )


class EquivalenceReport(BaseModel):
    """
    Exchange comparison at one configuration. For the single-photon control
    (labels "control" and "control_pinned") p_atom_swapped is the atom side,
    p_mirror_exact_swapped the exchanged mirror side and p_mirror_swapped its
    closed form.
    """

    p_atom_swapped: Optional[ProbabilityResult] = None
    p_mirror_swapped: Optional[ProbabilityResult] = None
    p_mirror_exact_swapped: Optional[ProbabilityResult] = None
    rel_difference: Optional[float] = Field(None, ge=0, le=1)
    angle_match: bool = False
    planck_match: bool = False
    # single-photon control: (omega/nu)^2 divided out of the exchanged side
    frequency_ratio: Optional[float] = None
    omega: Optional[float] = None
    label: str = "dual"
    error: Optional[str] = None

    def to_lines(self, prefix: str) -> List[str]:
        """key=value lines for the CLI."""
        def value(result):
            return "" if result is None else repr(result.value)

        lines = [
            f"{prefix}.omega={self.omega!r}",
            f"{prefix}.p_atom={value(self.p_atom_swapped)}",
            f"{prefix}.p_mirror={value(self.p_mirror_exact_swapped)}",
            f"{prefix}.p_mirror_display={value(self.p_mirror_swapped)}",
            f"{prefix}.rel_difference={'' if self.rel_difference is None else repr(self.rel_difference)}",
            f"{prefix}.angle_match={str(self.angle_match).lower()}",
            f"{prefix}.planck_match={str(self.planck_match).lower()}",
        ]
        if self.frequency_ratio is not None:
            lines.append(f"{prefix}.frequency_ratio={self.frequency_ratio!r}")
        if self.error:
            lines.append(f"{prefix}.error={self.error}")
        return lines
