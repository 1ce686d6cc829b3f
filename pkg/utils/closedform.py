# =====================================================
# utils/closedform.py - Closed-form excitation probabilities
# =====================================================
"""
Closed-form excitation probabilities for the accelerated atom (static mirror)
and the accelerated mirror (static atom), plus the nu = omega/2 exchanged
versions.

Every authoritative value is assembled as g^2 |sum of partial amplitudes|^2
in log space. The fully expanded displayed forms (secant expansions) are
kept as separate functions and attached to results as diagnostics.
"""

import logging
import math
from typing import List, Optional

from models.params import DimensionlessGroups, PhysicalParams, reduce, validate
from models.results import (
    AmplitudeBreakdown,
    BfValue,
    ComplexValue,
    Method,
    PhaseAngles,
    ProbabilityResult,
)
from utils.errors import InputError
from utils.special import (
    bessel_k_imag_order_scaled,
    hyp2f3,
    ln_gamma_complex,
    ln_sinh,
    log_gamma_imag_modulus,
)

logger = logging.getLogger(__name__)

# warning tags carried on ProbabilityResult.warnings
WARN_UNDERFLOW = "underflow"
WARN_LOG_SPACE = "log_space"
WARN_PHASE_PRECISION = "phase_precision"
WARN_TAYLOR_REGIME = "taylor_regime"
WARN_SMALL_BETA_REGIME = "small_beta_regime"
WARN_DISPLAY_MISMATCH = "display_mismatch"
WARN_NEGATIVE_BRACKET = "negative_bracket"

LOG_SPACE_EXPONENT = 200.0
PHASE_PRECISION_LIMIT = 1e8
DISPLAY_TOLERANCE = 1e-8
# exp() of anything below this is not a normal double
_LOG_TINY = math.log(2.2250738585072014e-308)
_LN10 = math.log(10.0)


# =====================================================
# Helpers
# =====================================================

def _arg_gamma_imag(y: float) -> float:
    return ln_gamma_complex(complex(0.0, y)).imag


def _log_planck(x: float) -> float:
    """ln(1/(e^x - 1)) for x > 0."""
    return -(x + math.log(-math.expm1(-x)))


def _planck(x: float) -> float:
    log_value = _log_planck(x)
    return math.exp(log_value) if log_value > _LOG_TINY else 0.0


def _log_abs(z) -> float:
    magnitude = abs(z)
    return math.log(magnitude) if magnitude > 0 else -math.inf


def _finish(
    log_amplitude: float,
    g: float,
    method: Method,
    angles: PhaseAngles,
    planck: float,
    warnings: List[str],
    diagnostics: Optional[dict] = None,
) -> ProbabilityResult:
    """Turn ln|sum of amplitudes| (without the coupling) into a ProbabilityResult."""
    diagnostics = diagnostics or {}
    if g == 0 or log_amplitude == -math.inf:
        return ProbabilityResult(
            value=0.0, log10_value=-math.inf, method=method, angles=angles,
            planck_factor=planck, warnings=warnings, diagnostics=diagnostics,
        )

    log_p = 2.0 * (math.log(g) + log_amplitude)
    if log_p < _LOG_TINY:
        logger.warning(f"{method.value}: probability underflows (log10 P = {log_p / _LN10:.3f})")
        warnings.append(WARN_UNDERFLOW)
        value = 0.0
    else:
        value = math.exp(log_p)
    return ProbabilityResult(
        value=value, log10_value=log_p / _LN10, method=method, angles=angles,
        planck_factor=planck, warnings=warnings, diagnostics=diagnostics,
    )


def _attach_display(result: ProbabilityResult, display: Optional[float]) -> ProbabilityResult:
    if display is None or not math.isfinite(display) or result.value == 0.0:
        return result
    rel = abs(display - result.value) / result.value
    result.display_value = display
    result.display_rel_difference = rel
    if rel > DISPLAY_TOLERANCE:
        logger.warning(f"{result.method.value}: displayed form differs from the amplitude "
                       f"assembly by {rel:.3e} relative")
        result.warnings.append(WARN_DISPLAY_MISMATCH)
    return result


def swap_groups(gr: DimensionlessGroups) -> DimensionlessGroups:
    """Groups at nu = omega/2: beta = alpha/2, phi_z = psi_z/2."""
    return DimensionlessGroups(alpha=gr.alpha, beta=0.5 * gr.alpha,
                               phi_z=0.5 * gr.psi_z, psi_z=gr.psi_z)


def _swapped(p: PhysicalParams) -> PhysicalParams:
    return p.replace(nu=0.5 * p.omega)


# =====================================================
# Phase angles and B_f
# =====================================================

def theta_atom(gr: DimensionlessGroups) -> float:
    """theta = 2 phi_z - alpha ln(1/(2 beta)) - arg Gamma(i alpha)."""
    return 2.0 * gr.phi_z - gr.alpha * math.log(1.0 / (2.0 * gr.beta)) - _arg_gamma_imag(gr.alpha)


def theta_mirror(gr: DimensionlessGroups) -> float:
    """theta' = psi_z + 2 beta ln(alpha) - arg Gamma(2 i beta)."""
    return gr.psi_z + 2.0 * gr.beta * math.log(gr.alpha) - _arg_gamma_imag(2.0 * gr.beta)


def theta_bar(gr: DimensionlessGroups) -> float:
    """Atom phase at nu = omega/2."""
    return theta_atom(swap_groups(gr))


def theta_dprime(gr: DimensionlessGroups) -> float:
    """Mirror phase at nu = omega/2; the same expression as theta_bar."""
    return theta_mirror(swap_groups(gr))


def b_f(gr: DimensionlessGroups) -> BfValue:
    """
    B_f = 2F3(a1, a2; 1/2, 1, 3/2; -psi_z^2)
          + i psi_z (1 + i beta) 2F3(a2, a3; 3/2, 3/2, 2; -psi_z^2)

    with a1 = 1/2 + i beta/2, a2 = 1 + i beta/2, a3 = 3/2 + i beta/2.
    """
    half = 0.5j * gr.beta
    a1, a2, a3 = 0.5 + half, 1.0 + half, 1.5 + half
    z = -gr.psi_z * gr.psi_z
    first = hyp2f3(a1, a2, 0.5, 1.0, 1.5, z)
    second = hyp2f3(a2, a3, 1.5, 1.5, 2.0, z)
    value = first + 1j * gr.psi_z * (1.0 + 1j * gr.beta) * second
    return BfValue(value=ComplexValue.of(value), zeta=math.atan2(value.imag, value.real),
                   modulus=abs(value))


def _phase_warnings(log_term: float, name: str) -> List[str]:
    if abs(log_term) > PHASE_PRECISION_LIMIT:
        logger.warning(f"{name}: logarithmic phase term {log_term:.3e} loses precision")
        return [WARN_PHASE_PRECISION]
    return []


# =====================================================
# Accelerated atom, static mirror
# =====================================================

def _atom_log_amplitude(gr: DimensionlessGroups, c: float, a: float):
    """
    ln|I1 + I2 + I3| where
      I1 + I2 = (2c/a) e^{-pi alpha/2} |Gamma(i alpha)| cos(theta)
      I3      = -(4c/a) e^{-pi alpha/2} K_{i alpha}(2 beta)
    K is taken as |Gamma(i alpha)| * mantissa so nothing underflows.
    """
    theta = theta_atom(gr)
    log_scale, mantissa = bessel_k_imag_order_scaled(gr.alpha, 2.0 * gr.beta)
    bracket = math.cos(theta) - 2.0 * mantissa
    log_amplitude = (math.log(2.0 * c / a) - 0.5 * math.pi * gr.alpha + log_scale
                     + _log_abs(bracket))
    return log_amplitude, theta


def p_exc_atom_display(p: PhysicalParams) -> Optional[float]:
    """
    Displayed secant expansion

        (8 pi g^2 alpha / omega^2) cos^2(theta) / (e^{2 pi alpha} - 1)
        * (1 - 4 sec(theta) K/|Gamma| + (4 alpha/pi) sec^2(theta) K^2 sinh(pi alpha))

    evaluated literally. Returns None where sinh(pi alpha) overflows.
    """
    gr = reduce(p)
    if math.pi * gr.alpha > 700.0:
        return None
    theta = theta_atom(gr)
    modulus = math.exp(log_gamma_imag_modulus(gr.alpha))
    log_scale, mantissa = bessel_k_imag_order_scaled(gr.alpha, 2.0 * gr.beta)
    k = math.exp(log_scale) * mantissa
    sec = 1.0 / math.cos(theta)
    prefactor = 8.0 * math.pi * p.g ** 2 * gr.alpha / p.omega ** 2 * _planck(2.0 * math.pi * gr.alpha)
    bracket = (1.0 - 4.0 * sec * k / modulus
               + 4.0 * gr.alpha / math.pi * sec * sec * k * k * math.sinh(math.pi * gr.alpha))
    return prefactor * math.cos(theta) ** 2 * bracket


def p_exc_atom(p: PhysicalParams) -> ProbabilityResult:
    """
    Excitation probability of the accelerated atom next to a static mirror.

    Args:
        p: physical parameters

    Returns:
        ProbabilityResult: method atom_closed, angles.theta set, planck factor
            1/(e^{2 pi alpha} - 1)
    """
    validate(p)
    gr = reduce(p)
    warnings = _phase_warnings(gr.alpha * math.log(1.0 / (2.0 * gr.beta)), "theta")
    if math.pi * gr.alpha > LOG_SPACE_EXPONENT:
        logger.debug(f"atom: alpha = {gr.alpha:.6g}, using log-space assembly")
        warnings.append(WARN_LOG_SPACE)

    log_amplitude, theta = _atom_log_amplitude(gr, p.c, p.a)
    result = _finish(
        log_amplitude, p.g, Method.ATOM_CLOSED, PhaseAngles(theta=theta),
        _planck(2.0 * math.pi * gr.alpha), warnings,
    )
    if WARN_LOG_SPACE not in warnings:
        result = _attach_display(result, p_exc_atom_display(p))
    return result


def amplitudes_atom(p: PhysicalParams) -> AmplitudeBreakdown:
    """Closed-form I1, I2, I3 (seconds); I2 = conj(I1)."""
    validate(p)
    gr = reduce(p)
    log_gamma = ln_gamma_complex(complex(0.0, gr.alpha))
    # (c/a) (1/(2 beta))^{i alpha} e^{-2 i phi_z} e^{-pi alpha/2} Gamma(i alpha)
    exponent = (log_gamma - 0.5 * math.pi * gr.alpha
                + 1j * (gr.alpha * math.log(1.0 / (2.0 * gr.beta)) - 2.0 * gr.phi_z))
    i1 = (p.c / p.a) * complex(math.exp(exponent.real) * math.cos(exponent.imag),
                                 math.exp(exponent.real) * math.sin(exponent.imag))
    log_scale, mantissa = bessel_k_imag_order_scaled(gr.alpha, 2.0 * gr.beta)
    i3 = -(4.0 * p.c / p.a) * math.exp(-0.5 * math.pi * gr.alpha + log_scale) * mantissa
    return AmplitudeBreakdown.build(i1, i1.conjugate(), complex(i3))


def p_exc_atom_swapped(p: PhysicalParams) -> ProbabilityResult:
    """Atom probability at nu = omega/2 (nu of p is ignored)."""
    result = p_exc_atom(_swapped(p))
    result.method = Method.ATOM_SWAPPED
    result.angles = PhaseAngles(theta_bar=result.angles.theta)
    return result


# =====================================================
# Accelerated mirror, static atom
# =====================================================

def _mirror_logs(gr: DimensionlessGroups):
    """(L1, L3): ln(e^{-pi beta}|Gamma(2 i beta)|) and ln(1/sinh(pi beta))."""
    return (-math.pi * gr.beta + log_gamma_imag_modulus(2.0 * gr.beta),
            -ln_sinh(math.pi * gr.beta))


def _mirror_exact_log_amplitude(gr: DimensionlessGroups, omega: float):
    """
    ln|I'1 + I'2 + I'3| with
      I'1 + I'2 = -(4 beta/omega) e^{-pi beta} |Gamma(2 i beta)| cos(theta')
      I'3       = -(4 pi beta psi_z / omega) e^{-i psi_z} B_f / sinh(pi beta)
    """
    theta = theta_mirror(gr)
    bf = b_f(gr)
    l1, l3 = _mirror_logs(gr)
    top = max(l1, l3)
    phase = complex(math.cos(gr.psi_z), -math.sin(gr.psi_z))
    bracket = (math.exp(l1 - top) * math.cos(theta)
               + math.pi * gr.psi_z * math.exp(l3 - top) * phase * complex(bf.value))
    log_amplitude = math.log(4.0 * gr.beta / omega) + top + _log_abs(bracket)
    return log_amplitude, theta, bf


def _chi_diagnostics(gr: DimensionlessGroups, bf: BfValue) -> dict:
    x = 2.0 * math.pi * gr.beta
    ln_chi = 0.5 * (math.log(x) + ln_sinh(x))
    return {
        "chi": math.exp(ln_chi) if ln_chi < 700.0 else math.inf,
        "ln_chi": ln_chi,
        "bf_modulus": bf.modulus,
        "zeta": bf.zeta,
    }


def p_exc_mirror_display(p: PhysicalParams) -> Optional[float]:
    """
    Displayed chi / B_f bracket form of the exact mirror probability

        (16 pi g^2 beta / omega^2) cos^2(theta') / (e^{4 pi beta} - 1)
        * [1 + 4 |B_f| chi psi_z sec(theta') cos(zeta - psi_z) / (1 - e^{-2 pi beta})
             + 4 |B_f|^2 chi^2 psi_z^2 sec^2(theta') / (1 - e^{-2 pi beta})^2]

    Returns None where chi overflows.
    """
    gr = reduce(p)
    if 2.0 * math.pi * gr.beta > 700.0:
        return None
    theta = theta_mirror(gr)
    bf = b_f(gr)
    x = 2.0 * math.pi * gr.beta
    chi = math.sqrt(x * math.sinh(x))
    sec = 1.0 / math.cos(theta)
    denom = -math.expm1(-x)
    prefactor = 16.0 * math.pi * p.g ** 2 * gr.beta / p.omega ** 2 * _planck(4.0 * math.pi * gr.beta)
    bracket = (1.0
               + 4.0 * bf.modulus * chi * gr.psi_z * sec * math.cos(bf.zeta - gr.psi_z) / denom
               + 4.0 * bf.modulus ** 2 * chi ** 2 * gr.psi_z ** 2 * sec ** 2 / denom ** 2)
    return prefactor * math.cos(theta) ** 2 * bracket


def p_exc_mirror_exact(p: PhysicalParams) -> ProbabilityResult:
    """
    Exact excitation probability of a static atom in front of an accelerated
    mirror, I'3 carried by the 2F3 combination B_f.

    Diagnostics: chi = sqrt(2 pi beta sinh(2 pi beta)), |B_f|, zeta.
    """
    validate(p)
    gr = reduce(p)
    warnings = _phase_warnings(2.0 * gr.beta * math.log(gr.alpha), "theta'")
    if 4.0 * math.pi * gr.beta > LOG_SPACE_EXPONENT:
        logger.debug(f"mirror: beta = {gr.beta:.6g}, using log-space assembly")
        warnings.append(WARN_LOG_SPACE)

    log_amplitude, theta, bf = _mirror_exact_log_amplitude(gr, p.omega)
    result = _finish(
        log_amplitude, p.g, Method.MIRROR_EXACT, PhaseAngles(theta_prime=theta),
        _planck(4.0 * math.pi * gr.beta), warnings, _chi_diagnostics(gr, bf),
    )
    if WARN_LOG_SPACE not in warnings:
        result = _attach_display(result, p_exc_mirror_display(p))
    return result


def amplitudes_mirror(p: PhysicalParams) -> AmplitudeBreakdown:
    """Closed-form I'1, I'2, I'3 (seconds); I'1 = conj(I'2)."""
    validate(p)
    gr = reduce(p)
    log_gamma = ln_gamma_complex(complex(0.0, 2.0 * gr.beta))
    # -(2 beta/omega) e^{-i psi_z} alpha^{-2 i beta} e^{-pi beta} Gamma(2 i beta)
    exponent = (log_gamma - math.pi * gr.beta
                - 1j * (gr.psi_z + 2.0 * gr.beta * math.log(gr.alpha)))
    magnitude = 2.0 * gr.beta / p.omega * math.exp(exponent.real)
    i2 = -magnitude * complex(math.cos(exponent.imag), math.sin(exponent.imag))
    bf = complex(b_f(gr).value)
    phase = complex(math.cos(gr.psi_z), -math.sin(gr.psi_z))
    i3 = (-(4.0 * math.pi * gr.beta * gr.psi_z / p.omega)
          * math.exp(-ln_sinh(math.pi * gr.beta)) * phase * bf)
    return AmplitudeBreakdown.build(i2.conjugate(), i2, i3)


def i3_mirror_taylor(gr: DimensionlessGroups) -> complex:
    """
    omega * I'3 with (1 - x/L)^{-i beta} and e^{ix} expanded to linear order:

        -4 psi_z e^{-i psi_z} (1/(1 + i beta) + i (2 psi_z + beta)/(2 + i beta))
    """
    phase = complex(math.cos(gr.psi_z), -math.sin(gr.psi_z))
    bracket = 1.0 / (1.0 + 1j * gr.beta) + 1j * (2.0 * gr.psi_z + gr.beta) / (2.0 + 1j * gr.beta)
    return -4.0 * gr.psi_z * phase * bracket


def _mirror_taylor_log_amplitude(gr: DimensionlessGroups, omega: float):
    """
    Literal Taylor display with cos(theta') multiplied through:

        (16 pi beta/omega^2)/(e^{4 pi beta} - 1)
        * [(cos theta' + A (cos psi - beta sin psi))^2 + (A (beta cos psi + sin psi))^2]

    A = (psi/beta) e^{pi beta} / ((1 + beta^2) |Gamma(-2 i beta)|).
    Only the leading 1/(1 + i beta) term of i3_mirror_taylor enters here.
    """
    theta = theta_mirror(gr)
    log_prefactor = (math.log(16.0 * math.pi * gr.beta) - 2.0 * math.log(omega)
                     + _log_planck(4.0 * math.pi * gr.beta))
    cos_psi, sin_psi = math.cos(gr.psi_z), math.sin(gr.psi_z)
    if gr.psi_z > 0:
        log_a = (math.log(gr.psi_z / gr.beta) + math.pi * gr.beta - math.log1p(gr.beta ** 2)
                 - log_gamma_imag_modulus(2.0 * gr.beta))
    else:
        log_a = -math.inf
    shift = max(0.0, log_a)
    a_scaled = math.exp(log_a - shift)
    real = math.cos(theta) * math.exp(-shift) + a_scaled * (cos_psi - gr.beta * sin_psi)
    imag = a_scaled * (gr.beta * cos_psi + sin_psi)
    log_bracket = 2.0 * shift + _log_abs(complex(real, imag)) * 2.0
    return 0.5 * (log_prefactor + log_bracket), theta


def p_exc_mirror_taylor(p: PhysicalParams) -> ProbabilityResult:
    """Mirror probability with I'3 replaced by its linear Taylor expansion."""
    validate(p)
    gr = reduce(p)
    warnings = _phase_warnings(2.0 * gr.beta * math.log(gr.alpha), "theta'")
    if 2.0 * gr.psi_z >= 1.0:
        logger.warning(f"mirror taylor: 2 psi_z = {2.0 * gr.psi_z:.4g} >= 1, expansion not valid")
        warnings.append(WARN_TAYLOR_REGIME)

    log_amplitude, theta = _mirror_taylor_log_amplitude(gr, p.omega)
    return _finish(
        log_amplitude, p.g, Method.MIRROR_TAYLOR, PhaseAngles(theta_prime=theta),
        _planck(4.0 * math.pi * gr.beta), warnings,
    )


def p_exc_mirror_small_beta(p: PhysicalParams) -> ProbabilityResult:
    """
    Small beta form

        (4 g^2 / omega^2) [cos^2 theta' + 2 Y cos theta'
                           + Y^2 {1 + 2 pi beta (1 + 1/pi) sin psi + sin^2 psi}]

    with Y = (psi/beta)/|Gamma(-2 i beta)| (the secants multiplied through).
    """
    validate(p)
    gr = reduce(p)
    warnings = _phase_warnings(2.0 * gr.beta * math.log(gr.alpha), "theta'")
    if gr.beta > 0.1:
        logger.warning(f"mirror small-beta: beta = {gr.beta:.4g} > 0.1")
        warnings.append(WARN_SMALL_BETA_REGIME)

    theta = theta_mirror(gr)
    cos_theta = math.cos(theta)
    sin_psi = math.sin(gr.psi_z)
    y = gr.psi_z / gr.beta * math.exp(-log_gamma_imag_modulus(2.0 * gr.beta))
    curly = 1.0 + 2.0 * math.pi * gr.beta * (1.0 + 1.0 / math.pi) * sin_psi + sin_psi ** 2
    bracket = cos_theta ** 2 + 2.0 * y * cos_theta + y * y * curly
    if bracket < 0:
        warnings.append(WARN_NEGATIVE_BRACKET)
        bracket = 0.0

    log_amplitude = math.log(2.0 / p.omega) + 0.5 * _log_abs(bracket)
    return _finish(
        log_amplitude, p.g, Method.MIRROR_SMALL_BETA, PhaseAngles(theta_prime=theta),
        1.0, warnings,
    )


def p_exc_mirror_swapped(p: PhysicalParams) -> ProbabilityResult:
    """
    Taylor mirror probability at nu = omega/2. Both secants use theta''
    (at nu = omega/2 theta' and theta'' are the same expression).
    """
    result = p_exc_mirror_taylor(_swapped(p))
    result.method = Method.MIRROR_SWAPPED
    result.angles = PhaseAngles(theta_dprime=result.angles.theta_prime)
    return result


def p_exc_mirror_exact_swapped(p: PhysicalParams) -> ProbabilityResult:
    """Exact mirror probability at nu = omega/2."""
    result = p_exc_mirror_exact(_swapped(p))
    result.angles = PhaseAngles(theta_dprime=result.angles.theta_prime)
    return result


# =====================================================
# Multimode enhancement and dispatch
# =====================================================

def multimode_enhancement(result: ProbabilityResult, modes: int = 100) -> ProbabilityResult:
    """Probability summed over `modes` identical cavity modes."""
    if modes < 1:
        raise InputError(f"modes must be >= 1, got {modes}", modes=modes)
    if modes == 1:
        return result
    return result.model_copy(update={
        "value": result.value * modes,
        "log10_value": result.log10_value + math.log10(modes),
        "modes": result.modes * modes,
        "display_value": None if result.display_value is None else result.display_value * modes,
    })


def evaluate(p: PhysicalParams, case: str = "atom", method: str = "exact",
             modes: int = 1) -> ProbabilityResult:
    """
    Dispatch one evaluation.

    Args:
        p: physical parameters
        case: atom, mirror, atom-swapped or mirror-swapped
        method: exact, taylor, small-beta or oracle
        modes: number of identical cavity modes summed

    Raises:
        InputError: the method is not defined for the case
    """
    from utils import oracle

    case = getattr(case, "value", case)
    method = getattr(method, "value", method)
    table = {
        ("atom", "exact"): p_exc_atom,
        ("atom", "oracle"): oracle.p_exc_atom_oracle,
        ("mirror", "exact"): p_exc_mirror_exact,
        ("mirror", "taylor"): p_exc_mirror_taylor,
        ("mirror", "small-beta"): p_exc_mirror_small_beta,
        ("mirror", "oracle"): oracle.p_exc_mirror_oracle,
        ("atom-swapped", "exact"): p_exc_atom_swapped,
        ("atom-swapped", "oracle"): lambda q: oracle.p_exc_atom_oracle(_swapped(q)),
        ("mirror-swapped", "exact"): p_exc_mirror_exact_swapped,
        ("mirror-swapped", "taylor"): p_exc_mirror_swapped,
        ("mirror-swapped", "oracle"): lambda q: oracle.p_exc_mirror_oracle(_swapped(q)),
    }
    handler = table.get((case, method))
    if handler is None:
        raise InputError(f"method '{method}' is not available for case '{case}'",
                         case=case, method=method)
    return multimode_enhancement(handler(p), modes)
