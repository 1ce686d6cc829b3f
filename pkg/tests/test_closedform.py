import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from models.params import reference_params, reduce
from models.results import Method
from utils.closedform import (
    WARN_LOG_SPACE,
    WARN_SMALL_BETA_REGIME,
    WARN_TAYLOR_REGIME,
    WARN_UNDERFLOW,
    amplitudes_atom,
    amplitudes_mirror,
    b_f,
    evaluate,
    i3_mirror_taylor,
    multimode_enhancement,
    p_exc_atom,
    p_exc_atom_display,
    p_exc_atom_swapped,
    p_exc_mirror_exact,
    p_exc_mirror_exact_swapped,
    p_exc_mirror_small_beta,
    p_exc_mirror_swapped,
    p_exc_mirror_taylor,
    theta_atom,
    theta_bar,
    theta_dprime,
    theta_mirror,
)
from utils.errors import InputError, WedgeViolation
from utils.oracle import finite_log_phase_integral
from utils.special import ln_gamma_complex


# =====================================================
# Accelerated atom
# =====================================================

def test_atom_positive_at_reference_point(atom_params):
    result = p_exc_atom(atom_params)
    assert result.value > 0
    assert result.method == Method.ATOM_CLOSED
    assert_allclose(result.log10_value, math.log10(result.value), rtol=1e-12)
    assert result.angles.theta is not None


def test_atom_zero_coupling(atom_params):
    result = p_exc_atom(atom_params.replace(g=0.0))
    assert result.value == 0.0
    assert result.log10_value == -math.inf


def test_atom_planck_factor(atom_params):
    alpha = reduce(atom_params).alpha
    result = p_exc_atom(atom_params)
    assert_allclose(result.planck_factor, 1.0 / math.expm1(2.0 * math.pi * alpha), rtol=1e-13)


def test_atom_theta():
    gr = reduce(reference_params(omega=3.0e6))
    expected = (2.0 * gr.phi_z - gr.alpha * math.log(1.0 / (2.0 * gr.beta))
                - float(mpmath.arg(mpmath.gamma(mpmath.mpc(0, gr.alpha)))))
    # equal modulo 2 pi
    assert_allclose(math.cos(theta_atom(gr)), math.cos(expected), atol=1e-12)
    assert_allclose(math.sin(theta_atom(gr)), math.sin(expected), atol=1e-12)


def test_atom_amplitudes_assemble_probability(atom_params):
    amplitudes = amplitudes_atom(atom_params)
    assert complex(amplitudes.i2) == complex(amplitudes.i1).conjugate()
    total = complex(amplitudes.total)
    assert_allclose(atom_params.g ** 2 * abs(total) ** 2, p_exc_atom(atom_params).value,
                    rtol=1e-10)


def test_atom_cosine_term_formula(atom_params):
    gr = reduce(atom_params)
    amplitudes = amplitudes_atom(atom_params)
    modulus = abs(complex(mpmath.gamma(mpmath.mpc(0, gr.alpha))))
    expected = (2.0 * atom_params.c / atom_params.a * math.exp(-0.5 * math.pi * gr.alpha)
                * modulus * math.cos(theta_atom(gr)))
    assert_allclose((complex(amplitudes.i1) + complex(amplitudes.i2)).real, expected, rtol=1e-11)


def test_atom_bessel_term_formula(atom_params):
    gr = reduce(atom_params)
    k = float(mpmath.re(mpmath.besselk(mpmath.mpc(0, gr.alpha), 2.0 * gr.beta)))
    expected = -4.0 * atom_params.c / atom_params.a * math.exp(-0.5 * math.pi * gr.alpha) * k
    assert_allclose(complex(amplitudes_atom(atom_params).i3).real, expected, rtol=1e-9)


@pytest.mark.parametrize("omega", np.geomspace(1.0e3, 1.0e7, 9))
def test_atom_display_matches_assembly(omega):
    p = reference_params(omega=float(omega))
    result = p_exc_atom(p)
    if abs(math.cos(result.angles.theta)) < 0.1:
        pytest.skip("secant display is ill-conditioned near cos(theta) = 0")
    assert_allclose(p_exc_atom_display(p), result.value, rtol=1e-10)
    assert result.display_rel_difference < 1e-10


def test_atom_periodic_in_position():
    rng = np.random.default_rng(3)
    # beta = 4: a full period pi c/nu fits inside the wedge
    base = reference_params(omega=1.0e6, nu=4.0e15 / 3.0e8)
    period = math.pi * base.c / base.nu
    for z0 in rng.uniform(0.001, 10.0, 20):
        first = p_exc_atom(base.replace(z0=float(z0))).value
        second = p_exc_atom(base.replace(z0=float(z0) + period)).value
        assert_allclose(first, second, rtol=1e-10)


def test_atom_log_space_path():
    # alpha = 100: e^{-pi alpha} amplitudes handled in logs
    p = reference_params(omega=100.0 / 3.0e-7)
    result = p_exc_atom(p)
    assert WARN_LOG_SPACE in result.warnings
    assert math.isfinite(result.log10_value)
    assert result.log10_value < -100.0
    assert result.display_value is None


def test_atom_underflow_keeps_finite_log():
    p = reference_params(omega=400.0 / 3.0e-7)
    result = p_exc_atom(p)
    assert result.value == 0.0
    assert WARN_UNDERFLOW in result.warnings
    assert math.isfinite(result.log10_value)


def test_atom_wedge_violation():
    with pytest.raises(WedgeViolation):
        p_exc_atom(reference_params(z0=1.0, a=1.0e18))


# =====================================================
# Accelerated mirror
# =====================================================

def test_b_f_at_zero_position():
    gr = reduce(reference_params(z0=0.0))
    bf = b_f(gr)
    assert complex(bf.value) == 1.0
    assert bf.zeta == 0.0


@pytest.mark.parametrize("beta,psi", [(0.03, 0.0333), (0.5, 0.2), (2.0, 0.8)])
def test_b_f_is_confluent_hypergeometric(beta, psi):
    # the two 2F3 pieces are the even and odd parts of 1F1(1 + i beta; 2; 2 i psi)
    gr = reduce(reference_params()).model_copy(update=dict(beta=beta, psi_z=psi))
    expected = complex(mpmath.hyp1f1(1 + 1j * beta, 2, 2j * psi))
    assert_allclose(complex(b_f(gr).value), expected, rtol=1e-12)


@pytest.mark.parametrize("beta,psi", [(0.03, 0.0333), (0.5, 0.2), (2.0, 0.8)])
def test_mirror_i3_matches_finite_integral(beta, psi):
    p = reference_params()
    p = p.replace(nu=beta * p.a / p.c, omega=1.0e9)
    p = p.replace(z0=psi * p.c / p.omega)
    closed = complex(amplitudes_mirror(p).i3) * p.omega
    quadrature = complex(finite_log_phase_integral(beta, psi).value)
    assert_allclose(closed, quadrature, rtol=1e-9)


def test_mirror_amplitudes_assemble_probability(mirror_params):
    amplitudes = amplitudes_mirror(mirror_params)
    assert complex(amplitudes.i1) == complex(amplitudes.i2).conjugate()
    total = complex(amplitudes.total)
    assert_allclose(mirror_params.g ** 2 * abs(total) ** 2,
                    p_exc_mirror_exact(mirror_params).value, rtol=1e-10)


def test_mirror_planck_and_diagnostics(mirror_params):
    beta = reduce(mirror_params).beta
    result = p_exc_mirror_exact(mirror_params)
    assert_allclose(result.planck_factor, 1.0 / math.expm1(4.0 * math.pi * beta), rtol=1e-13)
    x = 2.0 * math.pi * beta
    assert_allclose(result.diagnostics["chi"], math.sqrt(x * math.sinh(x)), rtol=1e-13)
    assert result.diagnostics["bf_modulus"] > 0


def test_mirror_theta_prime():
    gr = reduce(reference_params(nu=3.0e5))
    expected = (gr.psi_z + 2.0 * gr.beta * math.log(gr.alpha)
                - ln_gamma_complex(complex(0.0, 2.0 * gr.beta)).imag)
    assert theta_mirror(gr) == expected


@pytest.mark.parametrize("nu", [3.3e4, 1.0e5, 3.3e5, 1.0e6])
def test_mirror_display_matches_assembly(nu):
    p = reference_params(nu=nu)
    result = p_exc_mirror_exact(p)
    if abs(math.cos(result.angles.theta_prime)) < 0.1:
        pytest.skip("secant display is ill-conditioned near cos(theta') = 0")
    assert result.display_rel_difference < 1e-8


def test_mirror_zero_position_drops_finite_term():
    p = reference_params(z0=0.0)
    amplitudes = amplitudes_mirror(p)
    assert complex(amplitudes.i3) == 0


def test_mirror_fig2_magnitude():
    # a = 1e15, omega = 1e9, z0 = 0.01, g = 1e7: probabilities of order 1e-4
    values = [p_exc_mirror_exact(reference_params(nu=float(nu))).value
              for nu in np.geomspace(1.0e3, 1.0e7, 60)]
    assert 1e-5 <= max(values) <= 1e-3


# =====================================================
# Mirror approximations
# =====================================================

@pytest.mark.parametrize("beta", np.geomspace(0.01, 0.1, 6))
def test_taylor_close_to_exact_for_small_beta(beta):
    p = reference_params()
    p = p.replace(nu=float(beta) * p.a / p.c)
    taylor = p_exc_mirror_taylor(p).value
    exact = p_exc_mirror_exact(p).value
    assert abs(taylor - exact) <= 0.05 * exact


def test_taylor_truncated_integral_leading_term():
    gr = reduce(reference_params(nu=1.0e5))
    leading = -4.0 * gr.psi_z * complex(math.cos(gr.psi_z), -math.sin(gr.psi_z)) / (1 + 1j * gr.beta)
    # the O(psi) correction is small next to the leading term
    assert abs(i3_mirror_taylor(gr) - leading) < 0.1 * abs(leading)


def test_taylor_regime_warning():
    p = reference_params(z0=0.2)
    assert WARN_TAYLOR_REGIME in p_exc_mirror_taylor(p).warnings


def test_small_beta_close_to_exact():
    p = reference_params()
    p = p.replace(nu=1e-3 * p.a / p.c)
    small = p_exc_mirror_small_beta(p)
    exact = p_exc_mirror_exact(p)
    assert WARN_SMALL_BETA_REGIME not in small.warnings
    assert small.planck_factor == 1.0
    assert_allclose(small.value, exact.value, rtol=0.1)


def test_small_beta_regime_warning():
    p = reference_params(nu=1.0e6)
    assert WARN_SMALL_BETA_REGIME in p_exc_mirror_small_beta(p).warnings


# =====================================================
# Frequency-exchanged forms
# =====================================================

def test_swapped_atom_is_atom_at_half_frequency():
    p = reference_params(omega=2.0e6)
    swapped = p_exc_atom_swapped(p)
    direct = p_exc_atom(p.replace(nu=1.0e6))
    assert swapped.value == direct.value
    assert swapped.method == Method.ATOM_SWAPPED
    assert swapped.angles.theta_bar == direct.angles.theta
    assert swapped.angles.theta is None


def test_swapped_mirror_forms():
    p = reference_params(omega=2.0e6)
    half = p.replace(nu=1.0e6)
    assert p_exc_mirror_exact_swapped(p).value == p_exc_mirror_exact(half).value
    display = p_exc_mirror_swapped(p)
    assert display.method == Method.MIRROR_SWAPPED
    assert display.value == p_exc_mirror_taylor(half).value
    assert display.angles.theta_dprime is not None


def test_swapped_angles_coincide():
    gr = reduce(reference_params(omega=5.0e6))
    assert_allclose(theta_bar(gr), theta_dprime(gr), rtol=1e-12)


# =====================================================
# Dispatch and multimode
# =====================================================

def test_multimode_enhancement(atom_params):
    single = p_exc_atom(atom_params)
    many = multimode_enhancement(single, 100)
    assert_allclose(many.value, 100 * single.value, rtol=1e-15)
    assert_allclose(many.log10_value, single.log10_value + 2.0, rtol=1e-14)
    assert many.modes == 100
    assert single.modes == 1
    with pytest.raises(InputError):
        multimode_enhancement(single, 0)


@pytest.mark.parametrize("case,method,expected", [
    ("atom", "exact", Method.ATOM_CLOSED),
    ("mirror", "exact", Method.MIRROR_EXACT),
    ("mirror", "taylor", Method.MIRROR_TAYLOR),
    ("mirror", "small-beta", Method.MIRROR_SMALL_BETA),
    ("atom-swapped", "exact", Method.ATOM_SWAPPED),
    ("mirror-swapped", "taylor", Method.MIRROR_SWAPPED),
])
def test_evaluate_dispatch(atom_params, case, method, expected):
    assert evaluate(atom_params, case, method).method == expected


@pytest.mark.parametrize("case,method", [("atom", "taylor"), ("atom", "small-beta"),
                                         ("mirror", "bogus")])
def test_evaluate_rejects_unsupported(atom_params, case, method):
    with pytest.raises(InputError):
        evaluate(atom_params, case, method)


# =====================================================
# Coupling scaling and the secant at cos(theta) = 0
# =====================================================

def test_probability_scales_with_coupling_squared(atom_params, mirror_params):
    for p, closed in ((atom_params, p_exc_atom), (mirror_params, p_exc_mirror_exact)):
        assert_allclose(closed(p.replace(g=2.0 * p.g)).value, 4.0 * closed(p).value, rtol=1e-12)


def test_atom_secant_is_removable(make_params):
    alpha, beta = 1.0, 4.0
    arg_gamma = ln_gamma_complex(complex(0.0, alpha)).imag
    # 2 phi_z = pi/2 + alpha ln(1/(2 beta)) + arg Gamma(i alpha) (mod pi)
    phi = (0.5 * (0.5 * math.pi + alpha * math.log(1.0 / (2.0 * beta)) + arg_gamma)) % (0.5 * math.pi)
    p = make_params(alpha=alpha, beta=beta, phi_z=phi)
    result = p_exc_atom(p)
    assert abs(math.cos(result.angles.theta)) < 1e-9
    assert result.value > 0 and math.isfinite(result.value)
    assert math.isfinite(p_exc_atom_display(p))
    assert result.display_rel_difference < 1e-8


def test_mirror_secant_is_removable(make_params):
    alpha, beta = 4.0, 0.5
    arg_gamma = ln_gamma_complex(complex(0.0, 2.0 * beta)).imag
    psi = (0.5 * math.pi - 2.0 * beta * math.log(alpha) + arg_gamma) % math.pi
    p = make_params(alpha=alpha, beta=beta, psi_z=psi)
    result = p_exc_mirror_exact(p)
    assert abs(math.cos(result.angles.theta_prime)) < 1e-9
    assert result.value > 0 and math.isfinite(result.value)
    assert math.isfinite(result.display_value)
    assert result.display_rel_difference < 1e-8
