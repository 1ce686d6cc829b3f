# =====================================================
# utils/quadrature.py - Quadrature and extrapolation primitives
# =====================================================
"""
Vectorised integrators shared by the special-function kernel and the
oracle module.

Functions
---------
tanh_sinh(f, a, b)                    -> (value, error, evaluations)
gauss_legendre_panels(f, edges)       -> (value, error, evaluations)
extrapolate_to_zero(eps, values)      -> (limit, residual, residual_trace)

Integrands take a numpy array of abscissae and return an array of the same
shape (real or complex).
"""

import logging
import math
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from utils.errors import NoConvergence

logger = logging.getLogger(__name__)

_HALF_PI = 0.5 * math.pi
# at |t| = 4.5 the node sits ~1e-61 from the endpoint, so x^(-1/2)-type
# endpoint singularities lose nothing to truncation
_T_MAX = 4.5

Integrand = Callable[[np.ndarray], np.ndarray]


# =====================================================
# Tanh-sinh (double exponential)
# =====================================================

def _tanh_sinh_nodes(t: np.ndarray, a: float, b: float):
    """Mirrored nodes for t >= 0 on [a, b]; returns (x, w) with endpoint-safe spacing."""
    half = 0.5 * (b - a)
    s = _HALF_PI * np.sinh(t)
    cosh_s = np.cosh(s)
    # 1 - tanh(s), computed without cancellation
    delta = np.exp(-s) / cosh_s
    w = _HALF_PI * np.cosh(t) / (cosh_s * cosh_s) * half

    centre = t == 0.0
    x_left = a + half * delta
    x_right = b - half * delta

    keep_left = (x_left > a) & (x_left < b)
    keep_right = (x_right > a) & (x_right < b) & ~centre
    x = np.concatenate([x_left[keep_left], x_right[keep_right]])
    weights = np.concatenate([w[keep_left], w[keep_right]])
    return x, weights


def tanh_sinh(
    f: Integrand,
    a: float,
    b: float,
    *,
    tol: float = 1e-13,
    abs_tol: float = 0.0,
    max_level: int = 12,
    min_level: int = 3,
) -> Tuple[complex, float, int]:
    """
    Adaptive tanh-sinh quadrature of f over the finite interval [a, b].

    The step in the auxiliary variable is halved until two successive
    estimates agree to max(tol*|value|, abs_tol). Integrable endpoint
    singularities are fine as long as f is finite strictly inside (a, b):
    nodes that round onto an endpoint are dropped.

    Args:
        f: vectorised integrand
        a, b: finite limits
        tol: relative tolerance
        abs_tol: absolute tolerance floor
        max_level: maximum number of step halvings
        min_level: levels always computed before testing convergence

    Returns:
        tuple: (value, error estimate, number of integrand evaluations)

    Raises:
        NoConvergence: tolerance not met after max_level halvings
    """
    if a == b:
        return 0.0, 0.0, 0
    if a > b:
        value, err, evals = tanh_sinh(f, b, a, tol=tol, abs_tol=abs_tol,
                                      max_level=max_level, min_level=min_level)
        return -value, err, evals

    h = 1.0
    t = np.arange(0.0, _T_MAX + 0.5 * h, h)
    x, w = _tanh_sinh_nodes(t, a, b)
    running = np.sum(w * f(x))
    evals = x.size
    estimate = h * running
    err = math.inf

    for level in range(1, max_level + 1):
        h *= 0.5
        t = np.arange(h, _T_MAX + 0.5 * h, 2.0 * h)
        x, w = _tanh_sinh_nodes(t, a, b)
        running = running + np.sum(w * f(x))
        evals += x.size
        new_estimate = h * running
        err = abs(new_estimate - estimate)
        estimate = new_estimate
        if level >= min_level and err <= max(tol * abs(estimate), abs_tol):
            return estimate, err, evals

    raise NoConvergence(
        f"tanh-sinh did not converge on [{a}, {b}] (error estimate {err:.3e})",
        interval=(a, b), error=err,
    )


# =====================================================
# Gauss-Legendre panels
# =====================================================

@lru_cache(maxsize=16)
def _legendre(n: int):
    nodes, weights = roots_legendre(n)
    return np.asarray(nodes), np.asarray(weights)


def _panel_sums(f: Integrand, lo: np.ndarray, hi: np.ndarray, n: int):
    nodes, weights = _legendre(n)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * nodes[None, :]
    values = f(x)
    q = half * (values @ weights)
    l1 = half * (np.abs(values) @ weights)
    return q, l1


def gauss_legendre_panels(
    f: Integrand,
    edges: Sequence[float],
    *,
    n: int = 8,
    tol: float = 1e-12,
    abs_tol: float = 0.0,
    max_evals: int = 200_000,
    adaptive: bool = True,
) -> Tuple[complex, float, int]:
    """
    Composite Gauss-Legendre rule on the given panels.

    Each panel is integrated with n and 2n nodes; the difference is the
    panel's error estimate. Panels whose estimate exceeds their share of
    tol * (L1 norm of f) are bisected and retried.

    Returns:
        tuple: (value, error estimate, number of integrand evaluations)

    Raises:
        NoConvergence: the evaluation budget ran out with panels still failing
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    span = float(edges[-1] - edges[0])
    if span == 0.0:
        return 0.0, 0.0, 0

    total = 0.0
    err_total = 0.0
    evals = 0
    scale = None

    while lo.size:
        coarse, _ = _panel_sums(f, lo, hi, n)
        fine, l1 = _panel_sums(f, lo, hi, 2 * n)
        evals += 3 * n * lo.size
        if scale is None:
            scale = max(float(np.sum(l1)), np.finfo(float).tiny)

        err = np.abs(fine - coarse)
        if not adaptive:
            return np.sum(fine), float(np.sum(err)), evals

        allowed = np.maximum(tol * scale, abs_tol) * (hi - lo) / span
        good = err <= allowed
        total = total + np.sum(fine[good])
        err_total += float(np.sum(err[good]))

        bad_lo, bad_hi = lo[~good], hi[~good]
        if bad_lo.size and evals + 6 * n * bad_lo.size > max_evals:
            raise NoConvergence(
                f"panel quadrature exceeded {max_evals} evaluations "
                f"({bad_lo.size} panels unresolved)",
                evaluations=evals,
            )
        mid = 0.5 * (bad_lo + bad_hi)
        lo = np.concatenate([bad_lo, mid])
        hi = np.concatenate([mid, bad_hi])
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]

    return total, err_total, evals


def phase_adapted_edges(start: float, stop: float, linear_rate: float,
                        log_rate: float, max_phase: float = 0.5 * math.pi) -> np.ndarray:
    """
    Panel edges on [start, stop] (start > 0) for an integrand whose phase is
    linear_rate * x + log_rate * ln x; every panel advances each phase
    component by at most max_phase.
    """
    pieces = [np.array([start, stop])]
    if linear_rate > 0:
        count = int(math.ceil((stop - start) * linear_rate / max_phase))
        pieces.append(np.linspace(start, stop, count + 1))
    if log_rate > 0:
        ratio = math.exp(max_phase / log_rate)
        count = int(math.ceil(math.log(stop / start) / math.log(ratio)))
        pieces.append(np.geomspace(start, stop, count + 1))
    edges = np.unique(np.concatenate(pieces))
    return edges[(edges >= start) & (edges <= stop)]


# =====================================================
# Extrapolation to zero regulator
# =====================================================

def polynomial_limit(eps: Sequence[float], values: Sequence[complex]) -> complex:
    """Value at eps = 0 of the interpolating polynomial through (eps, values)."""
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=complex)
    # normalise the abscissae to keep the Vandermonde system well conditioned
    t = eps / np.max(np.abs(eps))
    matrix = np.vander(t, len(t), increasing=True)
    coefficients = np.linalg.solve(matrix, values)
    return coefficients[0]


def extrapolate_to_zero(eps: Sequence[float], values: Sequence[complex]
                        ) -> Tuple[complex, float, List[float]]:
    """
    Richardson-style extrapolation eps -> 0 with polynomial order len(eps) - 1.

    Estimates are built from the largest eps downwards (2 points, 3 points,
    ...). The residual is the change produced by the last point added.

    Returns:
        tuple: (limit, residual, residual after each added point)
    """
    order = np.argsort(eps)[::-1]
    eps = np.asarray(eps, dtype=float)[order]
    values = np.asarray(values, dtype=complex)[order]

    estimates = [polynomial_limit(eps[:k], values[:k]) for k in range(2, len(eps) + 1)]
    residuals = [abs(estimates[k] - estimates[k - 1]) for k in range(1, len(estimates))]
    residual = residuals[-1] if residuals else math.inf
    return estimates[-1], residual, residuals
