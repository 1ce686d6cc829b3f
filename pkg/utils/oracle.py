# =====================================================
# utils/oracle.py - Quadrature oracle for the amplitude integrals
# =====================================================
"""
Independent evaluation of every amplitude integral from its definition.

Improper integrals are damped (e^{-eps x} for the gamma type,
e^{-eps(x + 1/x)} for the Bessel type), integrated for each eps of a
ladder and extrapolated to eps -> 0. While the last ladder point still
moves the extrapolated limit, the smallest eps is halved and the ladder
grows (ACCELRAD_EPS_EXTENSIONS times at most, within the evaluation
budget). The Bessel type is integrated in u = ln x, where the damped
integrand is bounded by 1. Nothing here uses the closed forms
of utils.closedform except the phase angles reported on results.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.params import PhysicalParams, reduce, validate
from models.results import (
    AmplitudeBreakdown,
    ComplexValue,
    Method,
    PhaseAngles,
    ProbabilityResult,
    QuadratureReport,
)
from utils.errors import DomainError, NoConvergence
from utils.quadrature import (
    extrapolate_to_zero,
    gauss_legendre_panels,
    phase_adapted_edges,
    tanh_sinh,
)
from utils.settings import get_settings

logger = logging.getLogger(__name__)

GAMMA_TYPE = "gamma_type"
BESSEL_TYPE = "bessel_type"

# e^{-38} ~ 3e-17: truncation point of the damped range
_TRUNCATION = 38.0
_RESIDUAL_LIMIT = 1e-3
_PANEL_PHASE = 2.0 * math.pi
_PANEL_NODES = 10
# Bessel type in u = ln x: 3 pi of phase per panel, 16 nodes (32 for the error estimate)
_BESSEL_PANEL_PHASE = 3.0 * math.pi
_BESSEL_PANEL_NODES = 16
# the extrapolated limit counts as settled once the last eps moves it by less than this
_SETTLED = 1e-9


# =====================================================
# Trajectory and modes
# =====================================================

def trajectory(tau: float, a: float, c: float) -> Tuple[float, float]:
    """t = (c/a) sinh(a tau/c), z = (c^2/a) cosh(a tau/c)."""
    rapidity = a * tau / c
    if abs(rapidity) > 700.0:
        raise DomainError(f"a*tau/c = {rapidity:.4g} overflows the hyperbolic functions",
                          tau=tau)
    return c / a * math.sinh(rapidity), c * c / a * math.cosh(rapidity)


def mode_standing_wave(nu: float, t: float, z: float, z0: float, c: float) -> complex:
    """e^{-i nu t - i k (z - z0)} - e^{-i nu t + i k (z - z0)}, k = nu/c."""
    k = nu / c
    return complex(np.exp(-1j * nu * t - 1j * k * (z - z0)) - np.exp(-1j * nu * t + 1j * k * (z - z0)))


def _heaviside_phase(sign: float, beta: float, arg: float, a: float, c: float) -> complex:
    if arg < 0:
        return 0j
    if arg == 0:
        # Theta(0) = 1/2, phase at the light-cone edge taken as 1
        return 0.5 + 0j
    return complex(np.exp(sign * 1j * beta * math.log(a / (c * c) * arg)))


def mode_rindler_in_minkowski(nu: float, t: float, z: float, a: float, c: float) -> complex:
    """
    Static-mirror Rindler mode written in Minkowski coordinates:

        e^{+i beta ln[(a/c^2)(z - ct)]} Theta(z - ct) - e^{-i beta ln[(a/c^2)(z + ct)]} Theta(z + ct)

    with beta = nu c/a and Theta(0) = 1/2.
    """
    beta = nu * c / a
    return (_heaviside_phase(+1.0, beta, z - c * t, a, c)
            - _heaviside_phase(-1.0, beta, z + c * t, a, c))


# =====================================================
# Damped improper integrals
# =====================================================

def _truncation_point(eps: float) -> float:
    return (_TRUNCATION + math.log(1.0 / eps)) / eps


def _check_budget(edges: np.ndarray, nodes: int, max_evals: int, eps: float):
    evaluations = 3 * nodes * (edges.size - 1)
    if evaluations > max_evals:
        raise NoConvergence(
            f"eps = {eps:.3e} needs {evaluations} evaluations on its first pass "
            f"(budget {max_evals})",
            eps=eps, evaluations=evaluations,
        )


def _gamma_type_at(eps: float, s_im: float, shift: int, sign: int, max_evals: int):
    """
    integral_0^inf e^{i sign x} x^{i s + shift - 1} e^{-eps x} dx.

    On [0, 1] the integrand minus e^{-eps x} x^{w-1} is integrated
    numerically and the subtracted part is added as its series
    sum_k (-eps)^k / (k! (w + k)).
    """
    w = complex(shift, s_im)
    rate = complex(-eps, sign)

    def near(x):
        return np.exp(-eps * x) * np.expm1(1j * sign * x) * np.exp((w - 1.0) * np.log(x))

    def far(x):
        return np.exp(rate * x + (w - 1.0) * np.log(x))

    series = 0j
    term = 1.0
    for k in range(200):
        if k:
            term *= -eps / k
        piece = term / (w + k)
        series += piece
        if abs(piece) < 1e-18 * abs(series):
            break

    v_near, e_near, n_near = tanh_sinh(near, 0.0, 1.0, tol=1e-12, abs_tol=1e-15)
    upper = _truncation_point(eps)
    edges = phase_adapted_edges(1.0, upper, 1.0, abs(s_im), _PANEL_PHASE)
    _check_budget(edges, _PANEL_NODES, max_evals, eps)
    v_far, e_far, n_far = gauss_legendre_panels(far, edges, n=_PANEL_NODES, tol=1e-11,
                                                max_evals=max_evals)
    tail = upper ** (shift - 1) * math.exp(-eps * upper) / eps
    return series + v_near + v_far, e_near + e_far + tail, n_near + n_far


def _sinh_phase_edges(stop: float, linear_rate: float, sinh_rate: float,
                      max_phase: float) -> np.ndarray:
    """
    Edges on [0, stop] at equal steps max_phase of the phase
    linear_rate * u + sinh_rate * sinh(u) (both rates > 0), merged with
    unit-width edges.
    """
    total = linear_rate * stop + sinh_rate * math.sinh(stop)
    count = max(1, int(math.ceil(total / max_phase)))
    target = np.linspace(0.0, total, count + 1)
    # both starting guesses lie right of the root; Newton on a convex
    # increasing phase then converges monotonically
    u = np.minimum(np.arcsinh(target / sinh_rate), target / linear_rate)
    for _ in range(100):
        step = ((linear_rate * u + sinh_rate * np.sinh(u) - target)
                / (linear_rate + sinh_rate * np.cosh(u)))
        u = u - step
        if np.max(np.abs(step)) <= 1e-13 * (1.0 + stop):
            break
    u[0], u[-1] = 0.0, stop
    unit = np.linspace(0.0, stop, int(math.ceil(stop)) + 1)
    edges = np.unique(np.concatenate([u, unit]))
    return edges[(edges >= 0.0) & (edges <= stop)]


def _bessel_type_at(eps: float, s_im: float, q: float, max_evals: int):
    """
    integral_0^inf x^{i s - 1} e^{i q (x - 1/x)} e^{-eps (x + 1/x)} dx, taken
    in u = ln x as

        integral e^{i s u + 2 i q sinh u - 2 eps cosh u} du

    over |u| <= arcosh(T/(2 eps)). The integrand is bounded by 1, so the
    panel tolerance is uniform along the range.
    """
    def integrand(u):
        return np.exp(1j * s_im * u + 2j * q * np.sinh(u) - 2.0 * eps * np.cosh(u))

    stop = math.acosh(max(1.0, 0.5 * _TRUNCATION / eps))
    half = _sinh_phase_edges(stop, abs(s_im), 2.0 * q, _BESSEL_PANEL_PHASE)
    edges = np.concatenate([-half[::-1], half[1:]])
    _check_budget(edges, _BESSEL_PANEL_NODES, max_evals, eps)
    value, err, evals = gauss_legendre_panels(integrand, edges, n=_BESSEL_PANEL_NODES,
                                              tol=1e-11, max_evals=max_evals)
    # both tails of e^{-2 eps cosh u} beyond stop
    tail = math.exp(-_TRUNCATION) / (eps * math.sinh(stop))
    return value, err + tail, evals


def damping_scale(kind: str, s_im: float, q: Optional[float] = None) -> float:
    """Natural eps unit: 1/max(1,|s|) (gamma), min(1,q)/max(1,|s|) (Bessel)."""
    scale = 1.0 / max(1.0, abs(s_im))
    if kind == BESSEL_TYPE:
        scale *= min(1.0, q)
    return scale


def improper_phase_integral(
    s_im: float,
    kind: str,
    q: Optional[float] = None,
    eps_ladder: Optional[Sequence[float]] = None,
    shift: int = 0,
    phase_sign: int = 1,
) -> QuadratureReport:
    """
    Regularised value of

        gamma_type:  integral_0^inf e^{i phase_sign x} x^{i s_im + shift - 1} dx
        bessel_type: integral_0^inf x^{i s_im - 1} e^{i q (x - 1/x)} dx

    Args:
        s_im: imaginary part of the power (non-zero)
        kind: GAMMA_TYPE or BESSEL_TYPE
        q: Bessel-type phase scale (> 0)
        eps_ladder: dampers in units of the integrand's natural scale;
            defaults to the ACCELRAD_EPS_LADDER setting
        shift: 0 or 1 (gamma type only)
        phase_sign: +1 or -1 (gamma type only)

    Returns:
        QuadratureReport: extrapolated value, residual + quadrature error,
            evaluation count and the (eps, value) trace (the base ladder plus any
            halvings of its smallest eps)

    Raises:
        DomainError: s_im = 0, q <= 0 or an unknown kind
        NoConvergence: residual above 1e-3 |value| or residuals not decreasing
    """
    if s_im == 0:
        raise DomainError("improper phase integral needs s_im != 0", s_im=s_im)
    if kind == BESSEL_TYPE and (q is None or q <= 0):
        raise DomainError(f"bessel_type integral needs q > 0, got {q}", q=q)
    if kind not in (GAMMA_TYPE, BESSEL_TYPE):
        raise DomainError(f"unknown integral kind '{kind}'", kind=kind)

    settings = get_settings()
    ladder = list(eps_ladder) if eps_ladder is not None else settings.ladder()
    scale = damping_scale(kind, s_im, q)
    eps_values = [e * scale for e in ladder]

    def damped(eps: float):
        if kind == GAMMA_TYPE:
            return _gamma_type_at(eps, s_im, shift, phase_sign, settings.quad_max_evals)
        return _bessel_type_at(eps, s_im, q, settings.quad_max_evals)

    values: List[complex] = []
    quad_err = 0.0
    evaluations = 0
    for eps in eps_values:
        value, err, evals = damped(eps)
        values.append(complex(value))
        quad_err = max(quad_err, err)
        evaluations += evals
    limit, residual, residuals = extrapolate_to_zero(eps_values, values)

    # halve the smallest eps while the last point still moves the limit
    extensions = 0
    while (math.isfinite(residual) and residual > _SETTLED * abs(limit)
           and extensions < settings.eps_extensions):
        eps = 0.5 * min(eps_values)
        try:
            value, err, evals = damped(eps)
        except NoConvergence as exc:
            logger.debug(f"{kind} s={s_im:.6g}: ladder stops above eps={eps:.3e}: {exc.message}")
            break
        eps_values.append(eps)
        values.append(complex(value))
        quad_err = max(quad_err, err)
        evaluations += evals
        extensions += 1
        limit, residual, residuals = extrapolate_to_zero(eps_values, values)

    magnitude = abs(limit)
    logger.debug(f"{kind} s={s_im:.6g} q={q}: residuals {['%.2e' % r for r in residuals]}")

    if residual > _RESIDUAL_LIMIT * magnitude:
        raise NoConvergence(
            f"{kind} extrapolation residual {residual:.3e} exceeds 1e-3 |value| ({magnitude:.3e})",
            s_im=s_im, q=q, residual=residual,
        )
    floor = 1e-9 * magnitude + 10.0 * quad_err
    for previous, current in zip(residuals[:-1], residuals[1:]):
        if current > 2.0 * previous + floor:
            raise NoConvergence(
                f"{kind} extrapolation residuals not decreasing: {residuals}",
                s_im=s_im, q=q, residuals=residuals,
            )

    return QuadratureReport(
        value=ComplexValue.of(limit),
        abs_error_estimate=residual + quad_err,
        evaluations=evaluations,
        method=kind,
        epsilon_trace=[(e, ComplexValue.of(v)) for e, v in zip(eps_values, values)],
    )


def contour_rotated_gamma(s_im: float, shift: int = 0, phase_sign: int = 1) -> QuadratureReport:
    """
    Gamma-type integral on the rotated ray x = e^{i phase_sign pi/2} u:

        e^{i phase_sign pi w/2} integral_0^inf e^{-u} u^{w-1} du,  w = i s_im + shift
    """
    if s_im == 0:
        raise DomainError("contour rotation needs s_im != 0", s_im=s_im)
    w = complex(shift, s_im)

    def near(u):
        return np.expm1(-u) * np.exp((w - 1.0) * np.log(u))

    def far(u):
        return np.exp(-u + (w - 1.0) * np.log(u))

    v_near, e_near, n_near = tanh_sinh(near, 0.0, 1.0, tol=1e-13, abs_tol=1e-16)
    edges = phase_adapted_edges(1.0, 60.0, 1.0, abs(s_im), 0.5 * math.pi)
    v_far, e_far, n_far = gauss_legendre_panels(far, edges, n=_PANEL_NODES, tol=1e-13)
    integral = 1.0 / w + v_near + v_far
    rotation = np.exp(1j * phase_sign * 0.5 * math.pi * w)
    return QuadratureReport(
        value=ComplexValue.of(rotation * integral),
        abs_error_estimate=abs(rotation) * (e_near + e_far),
        evaluations=n_near + n_far,
        method="contour_rotated",
    )


def finite_log_phase_integral(beta: float, psi_z: float) -> QuadratureReport:
    """
    omega * I'3 = -2 e^{-i psi_z} L^{-i beta} integral_0^L e^{ix} x^{i beta} (1 - x/L)^{-i beta} dx,
    L = 2 psi_z, evaluated as -2 e^{-i psi_z} L integral_0^1 e^{iLu} (u/(1-u))^{i beta} du
    by tanh-sinh on the two halves (the right half in v = 1 - u).
    """
    if psi_z <= 0:
        raise DomainError(f"finite log-phase integral needs psi_z > 0, got {psi_z}", psi_z=psi_z)
    length = 2.0 * psi_z

    def left(u):
        return np.exp(1j * length * u + 1j * beta * (np.log(u) - np.log1p(-u)))

    def right(v):
        return np.exp(1j * length * (1.0 - v) + 1j * beta * (np.log1p(-v) - np.log(v)))

    v_left, e_left, n_left = tanh_sinh(left, 0.0, 0.5, tol=1e-13, abs_tol=1e-15)
    v_right, e_right, n_right = tanh_sinh(right, 0.0, 0.5, tol=1e-13, abs_tol=1e-15)
    prefactor = -2.0 * length * complex(math.cos(psi_z), -math.sin(psi_z))
    return QuadratureReport(
        value=ComplexValue.of(prefactor * (v_left + v_right)),
        abs_error_estimate=abs(prefactor) * (e_left + e_right),
        evaluations=n_left + n_right,
        method="tanh_sinh",
    )


# =====================================================
# Amplitudes and probabilities
# =====================================================

def _phasor(phase: float) -> complex:
    return complex(math.cos(phase), math.sin(phase))


def _probability(total: complex, g: float, method: Method, angles: PhaseAngles,
                 planck: float, residual: float) -> ProbabilityResult:
    value = g * g * abs(total) ** 2
    log10_value = math.log10(value) if value > 0 else -math.inf
    return ProbabilityResult(
        value=value, log10_value=log10_value, method=method, angles=angles,
        planck_factor=planck, diagnostics={"residual": residual},
    )


def _planck(x: float) -> float:
    return 1.0 / math.expm1(x) if x < 700.0 else 0.0


def amplitudes_atom_oracle(p: PhysicalParams,
                           eps_ladder: Optional[Sequence[float]] = None) -> AmplitudeBreakdown:
    """
    I1 = (c/a) (1/(2 beta))^{i alpha} e^{-2 i phi_z} integral e^{ix} x^{i alpha - 1}
    I2 = (c/a) (1/(2 beta))^{-i alpha} e^{2 i phi_z} integral e^{-ix} x^{-i alpha - 1}
    I3 = -2 (c/a) integral x^{i alpha - 1} e^{i beta (x - 1/x)}
    """
    validate(p)
    gr = reduce(p)
    scale = p.c / p.a
    first = improper_phase_integral(gr.alpha, GAMMA_TYPE, eps_ladder=eps_ladder, phase_sign=1)
    second = improper_phase_integral(-gr.alpha, GAMMA_TYPE, eps_ladder=eps_ladder, phase_sign=-1)
    cross = improper_phase_integral(gr.alpha, BESSEL_TYPE, q=gr.beta, eps_ladder=eps_ladder)

    phase = _phasor(gr.alpha * math.log(1.0 / (2.0 * gr.beta)) - 2.0 * gr.phi_z)
    i1 = scale * phase * complex(first.value)
    i2 = scale * phase.conjugate() * complex(second.value)
    i3 = -2.0 * scale * complex(cross.value)
    residual = scale * (first.abs_error_estimate + second.abs_error_estimate
                        + 2.0 * cross.abs_error_estimate)
    trace = first.epsilon_trace + second.epsilon_trace + cross.epsilon_trace
    return AmplitudeBreakdown.build(i1, i2, i3, trace, residual)


def amplitudes_mirror_oracle(p: PhysicalParams,
                             eps_ladder: Optional[Sequence[float]] = None) -> AmplitudeBreakdown:
    """
    omega I'1 = e^{i psi_z} alpha^{2 i beta} integral e^{-ix} x^{-2 i beta}
    omega I'2 = e^{-i psi_z} alpha^{-2 i beta} integral e^{ix} x^{2 i beta}
    omega I'3 = finite_log_phase_integral(beta, psi_z)
    """
    validate(p)
    gr = reduce(p)
    s = 2.0 * gr.beta
    plus = improper_phase_integral(s, GAMMA_TYPE, eps_ladder=eps_ladder, shift=1, phase_sign=1)
    minus = improper_phase_integral(-s, GAMMA_TYPE, eps_ladder=eps_ladder, shift=1, phase_sign=-1)

    phase = _phasor(-gr.psi_z - s * math.log(gr.alpha))
    i2 = phase * complex(plus.value) / p.omega
    i1 = phase.conjugate() * complex(minus.value) / p.omega
    residual = (plus.abs_error_estimate + minus.abs_error_estimate) / p.omega
    if gr.psi_z > 0:
        finite = finite_log_phase_integral(gr.beta, gr.psi_z)
        i3 = complex(finite.value) / p.omega
        residual += finite.abs_error_estimate / p.omega
    else:
        i3 = 0j
    return AmplitudeBreakdown.build(i1, i2, i3, plus.epsilon_trace + minus.epsilon_trace, residual)


def p_exc_atom_oracle(p: PhysicalParams) -> ProbabilityResult:
    """g^2 |I1 + I2 + I3|^2 from quadrature."""
    from utils.closedform import theta_atom

    amplitudes = amplitudes_atom_oracle(p)
    gr = reduce(p)
    return _probability(complex(amplitudes.total), p.g, Method.ORACLE,
                        PhaseAngles(theta=theta_atom(gr)),
                        _planck(2.0 * math.pi * gr.alpha), amplitudes.residual)


def p_exc_mirror_oracle(p: PhysicalParams) -> ProbabilityResult:
    """g^2 |I'1 + I'2 + I'3|^2 from quadrature."""
    from utils.closedform import theta_mirror

    amplitudes = amplitudes_mirror_oracle(p)
    gr = reduce(p)
    return _probability(complex(amplitudes.total), p.g, Method.ORACLE,
                        PhaseAngles(theta_prime=theta_mirror(gr)),
                        _planck(4.0 * math.pi * gr.beta), amplitudes.residual)


# =====================================================
# Single-photon amplitudes (equivalence control)
# =====================================================

def p_single_atom_oracle(p: PhysicalParams) -> ProbabilityResult:
    """
    One standing-wave factor along the accelerated worldline:

        (c/a) e^{-i phi_z} beta^{-i alpha} integral e^{ix} x^{i alpha - 1}
      - (c/a) e^{i phi_z} beta^{i alpha} integral e^{-ix} x^{-i alpha - 1}
    """
    validate(p)
    gr = reduce(p)
    scale = p.c / p.a
    first = improper_phase_integral(gr.alpha, GAMMA_TYPE, phase_sign=1)
    second = improper_phase_integral(-gr.alpha, GAMMA_TYPE, phase_sign=-1)
    phase = _phasor(-gr.phi_z - gr.alpha * math.log(gr.beta))
    total = scale * (phase * complex(first.value) - phase.conjugate() * complex(second.value))
    residual = scale * (first.abs_error_estimate + second.abs_error_estimate)
    return _probability(total, p.g, Method.ORACLE, PhaseAngles(),
                        _planck(2.0 * math.pi * gr.alpha), residual)


def p_single_mirror_oracle(p: PhysicalParams) -> ProbabilityResult:
    """
    One Rindler mode factor at the static atom:

        -(1/omega) e^{-i psi_z} alpha^{-i beta} integral e^{ix} x^{i beta}
        +(1/omega) e^{i psi_z} alpha^{i beta} integral e^{-ix} x^{-i beta}
    """
    validate(p)
    gr = reduce(p)
    plus = improper_phase_integral(gr.beta, GAMMA_TYPE, shift=1, phase_sign=1)
    minus = improper_phase_integral(-gr.beta, GAMMA_TYPE, shift=1, phase_sign=-1)
    phase = _phasor(-gr.psi_z - gr.beta * math.log(gr.alpha))
    total = (phase.conjugate() * complex(minus.value) - phase * complex(plus.value)) / p.omega
    residual = (plus.abs_error_estimate + minus.abs_error_estimate) / p.omega
    return _probability(total, p.g, Method.ORACLE, PhaseAngles(),
                        _planck(2.0 * math.pi * gr.beta), residual)
