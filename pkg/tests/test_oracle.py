import math

import mpmath
import pytest
from numpy.testing import assert_allclose

from models.params import reference_params
from models.results import Method
from utils.closedform import amplitudes_atom, p_exc_atom, p_exc_mirror_exact
from utils.equivalence import p_single_atom, p_single_mirror
from utils.errors import DomainError, NoConvergence
from utils.oracle import (
    BESSEL_TYPE,
    GAMMA_TYPE,
    amplitudes_atom_oracle,
    contour_rotated_gamma,
    damping_scale,
    finite_log_phase_integral,
    improper_phase_integral,
    mode_rindler_in_minkowski,
    mode_standing_wave,
    p_exc_atom_oracle,
    p_exc_mirror_oracle,
    p_single_atom_oracle,
    p_single_mirror_oracle,
    trajectory,
)
from utils.settings import get_settings
from utils.special import bessel_k_imag_order

mpmath.mp.dps = 30


def gamma_type_exact(s, shift=0, phase_sign=1):
    """integral_0^inf e^{i sign x} x^{w-1} dx = Gamma(w) e^{i sign pi w/2}, w = shift + i s."""
    w = mpmath.mpc(shift, s)
    return complex(mpmath.gamma(w) * mpmath.exp(1j * phase_sign * mpmath.pi * w / 2))


# =====================================================
# Trajectory and modes
# =====================================================

def test_trajectory_hyperbola():
    a, c = 1.0e15, 3.0e8
    t, z = trajectory(2.0e-7, a, c)
    assert_allclose(z * z - c * c * t * t, (c * c / a) ** 2, rtol=1e-12)
    assert trajectory(0.0, a, c) == (0.0, c * c / a)


def test_trajectory_overflow():
    with pytest.raises(DomainError):
        trajectory(1.0, 1.0e15, 3.0e8)


def test_standing_wave_vanishes_at_mirror():
    assert mode_standing_wave(1.0e4, 0.3, 0.01, 0.01, 3.0e8) == 0


def test_rindler_mode_light_cone():
    a, c = 1.0e15, 3.0e8
    # z < -c|t|: both steps vanish
    assert mode_rindler_in_minkowski(1.0e5, 0.0, -1.0, a, c) == 0
    # on z = ct the first step is 1/2 with unit phase
    t = 1.0e-9
    edge = mode_rindler_in_minkowski(1.0e5, t, c * t, a, c)
    beta = 1.0e5 * c / a
    phase = -beta * math.log(a / (c * c) * (c * t + c * t))
    expected = 0.5 - complex(math.cos(phase), math.sin(phase))
    assert_allclose(edge, expected, rtol=1e-12)


# =====================================================
# Improper integrals
# =====================================================

@pytest.mark.slow
@pytest.mark.parametrize("s,shift,sign", [(0.5, 0, 1), (2.0, 0, -1), (1.0, 1, 1), (-0.6, 1, -1)])
def test_gamma_type_integral(s, shift, sign):
    report = improper_phase_integral(s, GAMMA_TYPE, shift=shift, phase_sign=sign)
    assert_allclose(complex(report.value), gamma_type_exact(s, shift, sign), rtol=1e-5)
    assert len(report.epsilon_trace) >= 5
    assert report.method == GAMMA_TYPE


@pytest.mark.parametrize("s,shift,sign", [(0.5, 0, 1), (3.0, 1, -1)])
def test_contour_rotated_gamma(s, shift, sign):
    report = contour_rotated_gamma(s, shift, sign)
    assert_allclose(complex(report.value), gamma_type_exact(s, shift, sign), rtol=1e-10)


@pytest.mark.slow
@pytest.mark.parametrize("s,q", [(0.5, 0.2), (1.0, 1.0)])
def test_bessel_type_integral(s, q):
    report = improper_phase_integral(s, BESSEL_TYPE, q=q)
    expected = 2.0 * math.exp(-0.5 * math.pi * s) * bessel_k_imag_order(s, 2.0 * q)
    assert_allclose(complex(report.value), expected, rtol=1e-5, atol=1e-9)


def test_damping_scale():
    assert damping_scale(GAMMA_TYPE, 0.5) == 1.0
    assert damping_scale(GAMMA_TYPE, -4.0) == 0.25
    assert damping_scale(BESSEL_TYPE, 4.0, q=0.5) == 0.125


@pytest.mark.parametrize("kwargs", [
    dict(s_im=0.0, kind=GAMMA_TYPE),
    dict(s_im=1.0, kind=BESSEL_TYPE, q=0.0),
    dict(s_im=1.0, kind=BESSEL_TYPE),
    dict(s_im=1.0, kind="airy"),
])
def test_improper_integral_domain(kwargs):
    with pytest.raises(DomainError):
        improper_phase_integral(**kwargs)


def test_two_point_ladder_cannot_certify():
    with pytest.raises(NoConvergence):
        improper_phase_integral(0.5, GAMMA_TYPE, eps_ladder=[0.4, 0.2])


@pytest.mark.slow
def test_ladder_extensions_follow_settings(monkeypatch):
    monkeypatch.setenv("ACCELRAD_EPS_EXTENSIONS", "0")
    fixed = improper_phase_integral(1.0, GAMMA_TYPE, shift=1)
    assert len(fixed.epsilon_trace) == 5

    monkeypatch.setenv("ACCELRAD_EPS_EXTENSIONS", "3")
    get_settings.cache_clear()
    extended = improper_phase_integral(1.0, GAMMA_TYPE, shift=1)
    smallest = min(eps for eps, _ in fixed.epsilon_trace)
    assert 5 <= len(extended.epsilon_trace) <= 8
    assert all(eps < smallest for eps, _ in extended.epsilon_trace[5:])
    assert_allclose(complex(extended.value), gamma_type_exact(1.0, 1, 1), rtol=1e-5)


@pytest.mark.parametrize("beta,psi", [(0.03, 0.0333), (0.7, 0.3), (2.0, 1.0)])
def test_finite_log_phase_integral(beta, psi):
    report = finite_log_phase_integral(beta, psi)
    expected = complex(-4.0 * psi * mpmath.pi * beta / mpmath.sinh(mpmath.pi * beta)
                       * mpmath.exp(-1j * psi) * mpmath.hyp1f1(1 + 1j * beta, 2, 2j * psi))
    assert_allclose(complex(report.value), expected, rtol=1e-9)


def test_finite_log_phase_integral_domain():
    with pytest.raises(DomainError):
        finite_log_phase_integral(0.5, 0.0)


# =====================================================
# Probabilities
# =====================================================

@pytest.mark.slow
def test_atom_oracle_amplitudes(make_params):
    p = make_params(alpha=0.5, beta=0.2, phi_z=0.1)
    closed = amplitudes_atom(p)
    oracle = amplitudes_atom_oracle(p)
    for name in ("i1", "i2", "i3"):
        assert_allclose(complex(getattr(oracle, name)), complex(getattr(closed, name)),
                        rtol=1e-5)
    assert oracle.epsilon_trace


@pytest.mark.slow
@pytest.mark.parametrize("alpha,beta,phi", [(0.5, 0.2, 0.1), (2.0, 1.0, 0.3), (1.0, 0.05, 0.01)])
def test_atom_oracle_matches_closed_form(make_params, alpha, beta, phi):
    p = make_params(alpha=alpha, beta=beta, phi_z=phi)
    oracle = p_exc_atom_oracle(p)
    assert oracle.method == Method.ORACLE
    assert_allclose(oracle.value, p_exc_atom(p).value, rtol=1e-4)
    assert oracle.diagnostics["residual"] >= 0


@pytest.mark.slow
@pytest.mark.parametrize("two_beta,alpha,psi", [(0.5, 1.0, 0.1), (2.0, 0.2, 0.01), (1.0, 5.0, 0.3)])
def test_mirror_oracle_matches_closed_form(make_params, two_beta, alpha, psi):
    p = make_params(alpha=alpha, beta=0.5 * two_beta, psi_z=psi)
    assert_allclose(p_exc_mirror_oracle(p).value, p_exc_mirror_exact(p).value, rtol=1e-4)


@pytest.mark.slow
def test_single_photon_oracles_match_closed_forms():
    p = reference_params(omega=3.0e5, nu=6.0e5)
    assert_allclose(p_single_atom_oracle(p).value, p_single_atom(p).value, rtol=1e-4)
    assert_allclose(p_single_mirror_oracle(p).value, p_single_mirror(p).value, rtol=1e-4)


@pytest.mark.slow
def test_atom_oracle_at_reference_point(atom_params):
    # alpha = 0.03, beta = 0.003: long Bessel-type range at the smallest dampers
    oracle = p_exc_atom_oracle(atom_params)
    assert_allclose(oracle.value, p_exc_atom(atom_params).value, rtol=1e-4)
    assert_allclose(oracle.value, 1137.47, rtol=1e-4)
