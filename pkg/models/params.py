# =====================================================
# models/params.py - Physical inputs and dimensionless groups
# =====================================================
"""
Units policy: SI throughout. ``nu`` and ``omega`` are ANGULAR frequencies in
rad/s, since every phase in the amplitudes is written as e^{i nu t} or
e^{i omega tau}. Figure presets quote values like "nu ~ 1e4 Hz"; those
numerals are consumed as rad/s.
"""

import math

from pydantic import BaseModel, ConfigDict, Field

from utils.errors import NonPositiveInput, WedgeViolation

SPEED_OF_LIGHT = 299_792_458.0
REFERENCE_SPEED_OF_LIGHT = 3.0e8


class PhysicalParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: float = Field(..., description="acceleration (m/s^2)")
    nu: float = Field(..., description="photon angular frequency (rad/s)")
    omega: float = Field(..., description="atomic transition angular frequency (rad/s)")
    z0: float = Field(..., description="fixed position of mirror or atom (m)")
    g: float = Field(..., description="effective atom-field coupling g*sqrt(N) (rad/s)")
    c: float = Field(SPEED_OF_LIGHT, description="speed of light (m/s)")

    @property
    def horizon_distance(self) -> float:
        """c^2/a, the distance from the Rindler horizon to the worldline."""
        return self.c * self.c / self.a

    def replace(self, **changes) -> "PhysicalParams":
        return self.model_copy(update=changes)


class DimensionlessGroups(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float   # omega c / a
    beta: float    # nu c / a
    phi_z: float   # nu z0 / c
    psi_z: float   # omega z0 / c


def validate(raw: PhysicalParams) -> PhysicalParams:
    """
    Check the physical invariants of a configuration.

    Args:
        raw: parameters as supplied by the caller

    Returns:
        PhysicalParams: the same object, unchanged, when every invariant holds

    Raises:
        NonPositiveInput: a, nu, omega or c not strictly positive, g or z0 negative,
            or any value not finite
        WedgeViolation: z0 >= c^2/a (outside the right Rindler wedge)
    """
    for name in ("a", "nu", "omega", "c", "g", "z0"):
        value = getattr(raw, name)
        if not math.isfinite(value):
            raise NonPositiveInput(f"{name} must be finite, got {value}", field=name, value=value)

    for name in ("a", "nu", "omega", "c"):
        value = getattr(raw, name)
        if value <= 0:
            raise NonPositiveInput(f"{name} must be > 0, got {value}", field=name, value=value)

    for name in ("g", "z0"):
        value = getattr(raw, name)
        if value < 0:
            raise NonPositiveInput(f"{name} must be >= 0, got {value}", field=name, value=value)

    limit = raw.horizon_distance
    if raw.z0 >= limit:
        raise WedgeViolation(
            f"z0 = {raw.z0} m lies outside the wedge (c^2/a = {limit:.6g} m)",
            field="z0", value=raw.z0, limit=limit,
        )
    return raw


def reduce(p: PhysicalParams) -> DimensionlessGroups:
    """alpha = omega c/a, beta = nu c/a, phi_z = nu z0/c, psi_z = omega z0/c."""
    return DimensionlessGroups(
        alpha=p.omega * p.c / p.a,
        beta=p.nu * p.c / p.a,
        phi_z=p.nu * p.z0 / p.c,
        psi_z=p.omega * p.z0 / p.c,
    )


def reference_params(**overrides) -> PhysicalParams:
    """Phenomenology parameter set: a = 1e15, z0 = 0.01, g = 1e7, c = 3e8."""
    values = dict(a=1.0e15, nu=1.0e4, omega=1.0e9, z0=0.01, g=1.0e7, c=REFERENCE_SPEED_OF_LIGHT)
    values.update(overrides)
    return PhysicalParams(**values)
