# =====================================================
# utils/equivalence.py - Frequency-exchange comparison
# =====================================================
"""
Exchange test between the two configurations.

Dual photon: both probabilities at nu = omega/2 (twice the photon frequency
traded for the transition frequency). Single photon control: one mode
factor on each side, compared after nu <-> omega with the (omega/nu)^2
frequency factor divided out; the nu = omega point, where the two closed
forms coincide term by term, is reported alongside as a pinned row.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from functools import partial
from typing import Callable, List, Optional, Sequence

from models.params import PhysicalParams, reduce, validate
from models.results import EquivalenceReport, Method, PhaseAngles, ProbabilityResult
from utils.closedform import (
    p_exc_atom_swapped,
    p_exc_mirror_exact_swapped,
    p_exc_mirror_swapped,
    theta_bar,
    theta_dprime,
)
from utils.errors import AccelRadError
from utils.oracle import p_single_atom_oracle, p_single_mirror_oracle
from utils.settings import get_settings
from utils.special import ln_gamma_complex, log_gamma_imag_modulus

logger = logging.getLogger(__name__)

ANGLE_TOLERANCE = 1e-12
PLANCK_TOLERANCE = 1e-12
CONTROL_TARGET = 1e-3
VERDICT_FACTOR = 10.0


class Verdict(str, Enum):
    NONEQUIVALENT = "NONEQUIVALENT"
    EQUIVALENT = "EQUIVALENT"
    INCONCLUSIVE = "INCONCLUSIVE"


def rel_difference(first: float, second: float) -> float:
    """|P - P'| / max(P, P'), 0 when both vanish."""
    top = max(first, second)
    if top == 0:
        return 0.0
    return min(1.0, abs(first - second) / top)


def _close(x: float, y: float, tol: float) -> bool:
    if x == y:
        return True
    return abs(x - y) <= tol * max(abs(x), abs(y))


def _shared_prefactor(result: ProbabilityResult, weight: float) -> float:
    return weight * result.planck_factor


# =====================================================
# Dual photon
# =====================================================

def nonequivalence_report(p: PhysicalParams) -> EquivalenceReport:
    """
    Atom and mirror probabilities at nu = omega/2 (nu of p is ignored).

    rel_difference compares the two amplitude assemblies; the Taylor display
    of the mirror side is carried as p_mirror_swapped.
    """
    validate(p)
    gr = reduce(p)
    atom = p_exc_atom_swapped(p)
    mirror_display = p_exc_mirror_swapped(p)
    mirror = p_exc_mirror_exact_swapped(p)

    angle_match = _close(theta_bar(gr), theta_dprime(gr), ANGLE_TOLERANCE)
    # 8 pi alpha/omega^2 and 16 pi beta/omega^2 at beta = alpha/2
    beta = 0.5 * gr.alpha
    atom_prefactor = _shared_prefactor(atom, 8.0 * math.pi * gr.alpha)
    mirror_prefactor = _shared_prefactor(mirror, 16.0 * math.pi * beta)
    planck_match = _close(atom_prefactor, mirror_prefactor, PLANCK_TOLERANCE)

    rel = rel_difference(atom.value, mirror.value)
    logger.info(f"dual omega={p.omega:.6g}: P={atom.value:.6e} P'={mirror.value:.6e} rel={rel:.4f}")
    return EquivalenceReport(
        p_atom_swapped=atom,
        p_mirror_swapped=mirror_display,
        p_mirror_exact_swapped=mirror,
        rel_difference=rel,
        angle_match=angle_match,
        planck_match=planck_match,
        omega=p.omega,
        label="dual",
    )


# =====================================================
# Single photon control
# =====================================================

def _single_phase(position: float, rate: float, log_arg: float) -> float:
    """position + rate ln(log_arg) - arg Gamma(i rate)."""
    return position + rate * math.log(log_arg) - ln_gamma_complex(complex(0.0, rate)).imag


def p_single_atom(p: PhysicalParams) -> ProbabilityResult:
    """
    Closed form of the single-photon atom probability:

        (8 pi g^2 alpha / omega^2) sin^2(phi_z + alpha ln beta - arg Gamma(i alpha)) / (e^{2 pi alpha} - 1)
    """
    validate(p)
    gr = reduce(p)
    angle = _single_phase(gr.phi_z, gr.alpha, gr.beta)
    return _single_result(p.g, gr.alpha, p.omega, angle, Method.SINGLE_ATOM)


def p_single_mirror(p: PhysicalParams) -> ProbabilityResult:
    """
    Closed form of the single-photon mirror probability:

        (8 pi g^2 beta / omega^2) sin^2(psi_z + beta ln alpha - arg Gamma(i beta)) / (e^{2 pi beta} - 1)
    """
    validate(p)
    gr = reduce(p)
    angle = _single_phase(gr.psi_z, gr.beta, gr.alpha)
    return _single_result(p.g, gr.beta, p.omega, angle, Method.SINGLE_MIRROR)


def _single_result(g: float, rate: float, omega: float, angle: float, method: Method) -> ProbabilityResult:
    # 4 (rate/omega)^2 e^{-pi rate} |Gamma(i rate)|^2 sin^2(angle), in logs
    x = 2.0 * math.pi * rate
    log_planck = -(x + math.log(-math.expm1(-x)))
    sine = abs(math.sin(angle))
    planck = math.exp(log_planck) if log_planck > -700.0 else 0.0
    if g == 0 or sine == 0:
        return ProbabilityResult(value=0.0, log10_value=-math.inf, method=method,
                                 angles=PhaseAngles(theta=angle), planck_factor=planck)
    log_p = (2.0 * math.log(2.0 * g * rate / omega) - math.pi * rate
             + 2.0 * log_gamma_imag_modulus(rate) + 2.0 * math.log(sine))
    value = math.exp(log_p) if log_p > -700.0 else 0.0
    return ProbabilityResult(value=value, log10_value=log_p / math.log(10.0), method=method,
                             angles=PhaseAngles(theta=angle), planck_factor=planck)


def single_photon_control(p: PhysicalParams, pinned: bool = False) -> EquivalenceReport:
    """
    Single-photon exchange control.

    The atom side is evaluated at the given (nu, omega), the mirror side at
    the exchanged pair (nu, omega) -> (omega, nu); both by the quadrature
    oracle, with the mirror closed form attached. Each probability carries
    1/omega^2 of its own transition frequency, so the exchanged mirror value
    is (omega/nu)^2 = frequency_ratio times the atom value; rel_difference
    compares the two with that factor divided out.

    With pinned=True both sides are evaluated at nu = omega (label
    "control_pinned"), where frequency_ratio is 1.
    """
    validate(p)
    atom_params = p.replace(nu=p.omega) if pinned else p
    mirror_params = atom_params.replace(nu=atom_params.omega, omega=atom_params.nu)
    ratio = (atom_params.omega / atom_params.nu) ** 2
    label = "control_pinned" if pinned else "control"

    atom = p_single_atom_oracle(atom_params)
    mirror = p_single_mirror_oracle(mirror_params)
    mirror_closed = p_single_mirror(mirror_params)

    atom_gr, mirror_gr = reduce(atom_params), reduce(mirror_params)
    angle_match = _close(
        _single_phase(atom_gr.phi_z, atom_gr.alpha, atom_gr.beta),
        _single_phase(mirror_gr.psi_z, mirror_gr.beta, mirror_gr.alpha),
        ANGLE_TOLERANCE,
    )
    planck_match = _close(atom.planck_factor, mirror.planck_factor, PLANCK_TOLERANCE)

    rel = rel_difference(atom.value, mirror.value / ratio)
    if rel >= CONTROL_TARGET:
        logger.warning(f"{label} at nu={atom_params.nu:.6g} omega={atom_params.omega:.6g}: "
                       f"rel_difference {rel:.3e} >= {CONTROL_TARGET} "
                       f"(angle_match={angle_match}, planck_match={planck_match})")
    return EquivalenceReport(
        p_atom_swapped=atom,
        p_mirror_swapped=mirror_closed,
        p_mirror_exact_swapped=mirror,
        rel_difference=rel,
        angle_match=angle_match,
        planck_match=planck_match,
        frequency_ratio=ratio,
        omega=p.omega,
        label=label,
    )


# =====================================================
# Sweeps and verdict
# =====================================================

def _sweep(builder: Callable[[PhysicalParams], EquivalenceReport], label: str,
           p: PhysicalParams, omega_grid: Sequence[float],
           jobs: Optional[int] = None) -> List[EquivalenceReport]:
    if not omega_grid:
        raise AccelRadError("omega grid is empty")
    jobs = jobs or get_settings().jobs

    def one(omega: float) -> EquivalenceReport:
        try:
            return builder(p.replace(omega=float(omega)))
        except AccelRadError as exc:
            logger.warning(f"{label} omega={omega:.6g}: {exc.message}")
            return EquivalenceReport(omega=float(omega), label=label, error=exc.message)

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, omega_grid))


def sweep_nonequivalence(p: PhysicalParams, omega_grid: Sequence[float],
                         jobs: Optional[int] = None) -> List[EquivalenceReport]:
    """One dual report per omega, in grid order; failing points carry `error`."""
    return _sweep(nonequivalence_report, "dual", p, omega_grid, jobs)


def control_sweep(p: PhysicalParams, omega_grid: Sequence[float],
                  jobs: Optional[int] = None, pinned: bool = False) -> List[EquivalenceReport]:
    """One single-photon control report per omega, in grid order."""
    label = "control_pinned" if pinned else "control"
    return _sweep(partial(single_photon_control, pinned=pinned), label, p, omega_grid, jobs)


def verdict(dual: EquivalenceReport, control: EquivalenceReport) -> Verdict:
    """
    NONEQUIVALENT iff the dual rel_difference exceeds 10x the control's.
    Degenerate inputs (failed points, both dual probabilities zero) are
    INCONCLUSIVE.
    """
    if dual.rel_difference is None or control.rel_difference is None:
        return Verdict.INCONCLUSIVE
    if dual.p_atom_swapped.value == 0 and dual.p_mirror_exact_swapped.value == 0:
        return Verdict.INCONCLUSIVE
    if dual.rel_difference > VERDICT_FACTOR * control.rel_difference:
        return Verdict.NONEQUIVALENT
    return Verdict.EQUIVALENT


def grid_verdict(duals: Sequence[EquivalenceReport],
                 controls: Sequence[EquivalenceReport]) -> Verdict:
    """Common verdict over a grid; mixed outcomes are INCONCLUSIVE."""
    outcomes = {verdict(d, c) for d, c in zip(duals, controls)}
    if len(outcomes) == 1:
        return outcomes.pop()
    return Verdict.INCONCLUSIVE
