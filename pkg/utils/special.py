# =====================================================
# utils/special.py - Special-function kernel
# =====================================================
"""
Complex log-gamma, gamma on the imaginary axis, modified Bessel function of
imaginary order and the 2F3 series.

Complex arguments may be Python/numpy complex numbers or ComplexValue
models; complex results are returned as Python/numpy complex.
"""

import logging
import math
from typing import Tuple, Union

import mpmath
import numpy as np

from models.results import ComplexValue
from utils.errors import DomainError, NoConvergence, ParameterPole, PoleError
from utils.quadrature import gauss_legendre_panels, tanh_sinh
from utils.settings import get_settings

logger = logging.getLogger(__name__)

ComplexLike = Union[complex, float, ComplexValue]

_LN_PI = math.log(math.pi)
_LN_2 = math.log(2.0)
_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Lanczos approximation, g = 7
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
# arguments are shifted up to this real part before the Lanczos sum is used
_LANCZOS_SHIFT = 8.0

# cosh-integral truncation: e^{-x cosh t} < 1e-18 beyond t_max
_K_CUTOFF = -math.log(1e-18)
# above this order the quadrature loses K_(i mu)(x) to cancellation
SERIES_MIN_ORDER = 10.0
# 0F1 terms stay below e^{x^2/(4 mu)} <= e^4 for x^2 <= 16 mu
SERIES_MAX_RATIO = 16.0
# working precision of the mpmath fallback; besselk raises it internally on cancellation
_MP_DPS = 30


def _as_complex(z: ComplexLike):
    if isinstance(z, ComplexValue):
        return complex(z)
    return z


# =====================================================
# Gamma function
# =====================================================

def _lanczos(z: np.ndarray) -> np.ndarray:
    z = z - 1.0
    x = np.full(z.shape, _LANCZOS_COEF[0], dtype=complex)
    for k in range(1, len(_LANCZOS_COEF)):
        x = x + _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _LN_SQRT_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def _ln_gamma_right(z: np.ndarray) -> np.ndarray:
    """log-gamma for Re z >= 0.5, continuous across the half-plane."""
    acc = np.zeros(z.shape, dtype=complex)
    w = z.copy()
    for _ in range(int(_LANCZOS_SHIFT) + 1):
        low = w.real < _LANCZOS_SHIFT
        if not low.any():
            break
        acc = acc + np.where(low, np.log(np.where(low, w, 1.0)), 0.0)
        w = np.where(low, w + 1.0, w)
    return _lanczos(w) - acc


def _ln_sin_pi(w: np.ndarray) -> np.ndarray:
    """log sin(pi w) for Im w >= 0, written so it stays finite for large Im w."""
    return -1j * np.pi * w + np.log1p(-np.exp(2j * np.pi * w)) - _LN_2 + 0.5j * np.pi


def ln_gamma_complex(z):
    """
    Log-gamma of a complex argument.

    Lanczos sum (g = 7, 9 coefficients rather than a 15-term table: after
    shifting the argument to Re z >= 8 with the recurrence the 9-term sum
    is already at double precision) for Re z >= 1/2, reflection formula
    below 1/2. The
    imaginary part is continuous in each half-plane and agrees with the
    principal value near the positive real axis; conj symmetry
    ln_gamma(conj z) = conj ln_gamma(z) holds exactly.

    Args:
        z: complex scalar, ComplexValue or numpy array of complex

    Returns:
        complex or ndarray: log Gamma(z)

    Raises:
        PoleError: z is a non-positive integer
    """
    z = _as_complex(z)
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    scalar = np.ndim(z) == 0

    poles = (arr.imag == 0) & (arr.real <= 0) & (arr.real == np.round(arr.real))
    if poles.any():
        raise PoleError(f"Gamma has a pole at {arr[poles][0].real:g}", value=arr[poles][0].real)

    lower = arr.imag < 0
    w = np.where(lower, np.conj(arr), arr)
    out = np.empty(w.shape, dtype=complex)

    right = w.real >= 0.5
    if right.any():
        out[right] = _ln_gamma_right(w[right])
    left = ~right
    if left.any():
        wl = w[left]
        out[left] = _LN_PI - _ln_sin_pi(wl) - np.conj(_ln_gamma_right(np.conj(1.0 - wl)))

    out = np.where(lower, np.conj(out), out)
    if scalar:
        return complex(out[0])
    return out


def ln_sinh(x: float) -> float:
    """log sinh(x) for x > 0 without overflow."""
    if x <= 0:
        raise DomainError(f"ln_sinh needs x > 0, got {x}", value=x)
    if x > 20.0:
        return x - _LN_2 + math.log1p(-math.exp(-2.0 * x))
    return math.log(math.sinh(x))


def log_gamma_imag_modulus(y: float) -> float:
    """ln|Gamma(iy)| = (ln pi - ln|y| - ln sinh(pi|y|)) / 2."""
    if y == 0:
        raise DomainError("Gamma(iy) is singular at y = 0", value=y)
    y = abs(y)
    return 0.5 * (_LN_PI - math.log(y) - ln_sinh(math.pi * y))


def gamma_imag_axis(y: float) -> Tuple[float, float]:
    """
    Modulus and argument of Gamma(iy).

    The modulus comes from |Gamma(iy)|^2 = pi / (y sinh(pi y)) evaluated in
    log space (so it only reaches 0.0 below the smallest double), the
    argument from the imaginary part of ln_gamma_complex(iy).

    Raises:
        DomainError: y = 0
    """
    log_modulus = log_gamma_imag_modulus(y)
    argument = ln_gamma_complex(complex(0.0, y)).imag
    return math.exp(log_modulus), argument


# =====================================================
# Modified Bessel function of imaginary order
# =====================================================

def _k_integrand(mu: float, x: float):
    def integrand(t):
        return np.exp(-x * np.cosh(t)) * np.cos(mu * t)
    return integrand


def _k_panels(mu: float, x: float) -> np.ndarray:
    t_max = math.acosh(_K_CUTOFF / x + 1.0)
    width = math.pi / (4.0 * mu) if mu > 20.0 else t_max
    count = max(1, int(math.ceil(t_max / width)))
    return np.linspace(0.0, t_max, count + 1)


def bessel_k_imag_order(mu: float, x: float) -> float:
    """
    K_{i mu}(x) = integral_0^inf exp(-x cosh t) cos(mu t) dt.

    Tanh-sinh quadrature on [0, t_max], t_max = arcosh(-ln(1e-18)/x + 1);
    for mu > 20 the range is cut into panels of width pi/(4 mu).

    Raises:
        DomainError: x <= 0
    """
    if x <= 0:
        raise DomainError(f"K_(i mu)(x) needs x > 0, got {x}", value=x)
    mu = abs(mu)
    integrand = _k_integrand(mu, x)
    edges = _k_panels(mu, x)

    total = 0.0
    # the integrand peaks at e^{-x}
    floor = 1e-15 * math.exp(-x)
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, _, _ = tanh_sinh(integrand, lo, hi, tol=1e-14, abs_tol=floor)
        total += float(np.real(value))
    return total


def bessel_k_imag_order_gl(mu: float, x: float) -> float:
    """Same integral by Gauss-Legendre panels (twice the tanh-sinh panel count)."""
    if x <= 0:
        raise DomainError(f"K_(i mu)(x) needs x > 0, got {x}", value=x)
    mu = abs(mu)
    edges = _k_panels(mu, x)
    edges = np.linspace(edges[0], edges[-1], 2 * (len(edges) - 1) + 1)
    value, _, _ = gauss_legendre_panels(
        _k_integrand(mu, x), edges, n=10, tol=1e-14, abs_tol=1e-16, max_evals=2_000_000,
    )
    return float(np.real(value))


def bessel_k_imag_order_scaled(mu: float, x: float) -> Tuple[float, float]:
    """
    K_{i mu}(x) as (log_scale, mantissa) with K = exp(log_scale) * mantissa.

    log_scale = ln|Gamma(i mu)|. Three regimes:

    - mu <= 10: the cosh-integral quadrature, rescaled;
    - mu > 10, x^2 <= 16 mu: Re[e^{i(arg Gamma(i mu) - mu ln(x/2))} 0F1(;1 - i mu; x^2/4)];
    - mu > 10 otherwise: mpmath.besselk, whose hypergeometric combination
      raises its working precision until the e^{-pi mu/2}-sized result
      survives the cancellation between I_{-i mu} and I_{i mu}.
    """
    if x <= 0:
        raise DomainError(f"K_(i mu)(x) needs x > 0, got {x}", value=x)
    mu = abs(mu)
    if mu == 0:
        return 0.0, bessel_k_imag_order(0.0, x)

    log_scale = log_gamma_imag_modulus(mu)
    if mu > SERIES_MIN_ORDER and x * x <= SERIES_MAX_RATIO * mu:
        argument = ln_gamma_complex(complex(0.0, mu)).imag
        series = hyp0f1(complex(1.0, -mu), 0.25 * x * x)
        phase = argument - mu * math.log(0.5 * x)
        mantissa = (complex(math.cos(phase), math.sin(phase)) * series).real
        return log_scale, mantissa

    if mu > SERIES_MIN_ORDER:
        logger.debug(f"K_(i{mu:g})({x:g}): mpmath besselk")
        with mpmath.workdps(_MP_DPS):
            k = mpmath.re(mpmath.besselk(mpmath.mpc(0, mu), x))
            return log_scale, float(k / mpmath.exp(log_scale))

    k = bessel_k_imag_order(mu, x)
    if k == 0.0:
        return log_scale, 0.0
    return log_scale, math.copysign(math.exp(math.log(abs(k)) - log_scale), k)


# =====================================================
# Hypergeometric series
# =====================================================

def _check_lower(b: float):
    if b <= 0 and float(b).is_integer():
        raise ParameterPole(f"lower parameter {b:g} is a non-positive integer", value=b)


def _series(upper, lower, z: float, max_terms: int = None) -> complex:
    """sum_n prod (a)_n / prod (b)_n z^n / n!, multiplicative term recursion."""
    if max_terms is None:
        max_terms = get_settings().max_hyp_terms
    for b in lower:
        _check_lower(b)
    upper = [complex(_as_complex(a)) for a in upper]

    term = complex(1.0)
    total = complex(1.0)
    quiet = 0
    for n in range(max_terms):
        numerator = z
        for a in upper:
            numerator *= a + n
        denominator = float(n + 1)
        for b in lower:
            denominator *= b + n
        term *= numerator / denominator
        total += term
        if abs(term) <= 1e-16 * abs(total):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    raise NoConvergence(f"hypergeometric series not converged after {max_terms} terms",
                        terms=max_terms, z=z)


def hyp2f3(a1: ComplexLike, a2: ComplexLike, b1: float, b2: float, b3: float, z: float) -> complex:
    """
    2F3(a1, a2; b1, b2, b3; z) for real lower parameters and real z.

    Truncated once the running term stays below 1e-16 of the running sum
    for 3 consecutive terms.

    Raises:
        ParameterPole: a lower parameter is 0, -1, -2, ...
        NoConvergence: max_hyp_terms exhausted
    """
    return _series((a1, a2), (b1, b2, b3), z)


def hyp1f2(a1: ComplexLike, b1: float, b2: float, z: float) -> complex:
    return _series((a1,), (b1, b2), z)


def hyp0f1(b: ComplexLike, z: float) -> complex:
    """0F1(;b;z); b may be complex (used by the scaled Bessel series)."""
    b = complex(_as_complex(b))
    if b.imag == 0:
        _check_lower(b.real)
    term = complex(1.0)
    total = complex(1.0)
    quiet = 0
    max_terms = get_settings().max_hyp_terms
    for n in range(max_terms):
        term *= z / ((b + n) * (n + 1))
        total += term
        if abs(term) <= 1e-16 * abs(total):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    raise NoConvergence(f"0F1 series not converged after {max_terms} terms", z=z)
