import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from models.params import reference_params
from models.results import EquivalenceReport, Method, ProbabilityResult
from utils.equivalence import (
    CONTROL_TARGET,
    Verdict,
    control_sweep,
    grid_verdict,
    nonequivalence_report,
    p_single_atom,
    p_single_mirror,
    rel_difference,
    single_photon_control,
    sweep_nonequivalence,
    verdict,
)
from utils.errors import AccelRadError

OMEGA_GRID = list(np.geomspace(1.0e5, 1.0e7, 10))


def probability(value):
    log10_value = math.log10(value) if value > 0 else -math.inf
    return ProbabilityResult(value=value, log10_value=log10_value, method=Method.ATOM_CLOSED,
                             planck_factor=1.0)


def report(p_atom, p_mirror, rel, label="dual"):
    return EquivalenceReport(p_atom_swapped=probability(p_atom),
                             p_mirror_exact_swapped=probability(p_mirror),
                             rel_difference=rel, label=label)


# =====================================================
# rel_difference and verdicts
# =====================================================

def test_rel_difference():
    assert rel_difference(0.0, 0.0) == 0.0
    assert rel_difference(1.0, 0.5) == 0.5
    assert rel_difference(0.5, 1.0) == rel_difference(1.0, 0.5)
    assert rel_difference(0.0, 3.0) == 1.0


@pytest.mark.parametrize("dual_rel,control_rel,expected", [
    (0.5, 0.01, Verdict.NONEQUIVALENT),
    (0.05, 0.01, Verdict.EQUIVALENT),
    (0.2, 0.0, Verdict.NONEQUIVALENT),
])
def test_verdict(dual_rel, control_rel, expected):
    assert verdict(report(1.0, 0.5, dual_rel), report(1.0, 1.0, control_rel, "control")) == expected


def test_verdict_degenerate_inputs():
    control = report(1.0, 1.0, 1e-4, "control")
    assert verdict(report(0.0, 0.0, 0.0), control) == Verdict.INCONCLUSIVE
    failed = EquivalenceReport(omega=1.0e5, error="NoConvergence")
    assert verdict(failed, control) == Verdict.INCONCLUSIVE


def test_grid_verdict_mixed_is_inconclusive():
    control = report(1.0, 1.0, 1e-4, "control")
    broken = report(1.0, 0.5, 0.5)
    held = report(1.0, 1.0, 1e-5)
    assert grid_verdict([broken, broken], [control, control]) == Verdict.NONEQUIVALENT
    assert grid_verdict([broken, held], [control, control]) == Verdict.INCONCLUSIVE


# =====================================================
# Dual photon
# =====================================================

def test_nonequivalence_report_shares_angle_and_planck():
    result = nonequivalence_report(reference_params(omega=1.0e5))
    assert result.label == "dual"
    assert result.angle_match
    assert result.planck_match
    assert 0.0 <= result.rel_difference <= 1.0
    assert result.p_atom_swapped.method == Method.ATOM_SWAPPED
    assert result.p_mirror_swapped.method == Method.MIRROR_SWAPPED


def test_nonequivalence_report_ignores_photon_frequency():
    first = nonequivalence_report(reference_params(omega=1.0e6, nu=1.0e4))
    second = nonequivalence_report(reference_params(omega=1.0e6, nu=3.0e5))
    assert first.rel_difference == second.rel_difference


def test_nonequivalence_zero_coupling():
    result = nonequivalence_report(reference_params(omega=1.0e5, g=0.0))
    assert result.p_atom_swapped.value == 0.0
    assert result.p_mirror_exact_swapped.value == 0.0
    assert result.rel_difference == 0.0


@pytest.mark.slow
def test_dual_photon_exchange_broken_on_grid():
    reports = sweep_nonequivalence(reference_params(), OMEGA_GRID, jobs=4)
    assert all(r.error is None for r in reports)
    assert min(r.rel_difference for r in reports) > 0.01


def test_sweep_keeps_grid_order_and_attaches_errors():
    grid = [1.0e6, -1.0, 1.0e5]
    reports = sweep_nonequivalence(reference_params(), grid, jobs=3)
    assert [r.omega for r in reports] == grid
    assert reports[1].error is not None
    assert reports[1].rel_difference is None
    assert reports[0].error is None and reports[2].error is None


def test_sweep_rejects_empty_grid():
    with pytest.raises(AccelRadError):
        sweep_nonequivalence(reference_params(), [])


# =====================================================
# Single photon
# =====================================================

def test_single_photon_forms_coincide_at_equal_frequencies():
    p = reference_params(omega=3.0e5, nu=3.0e5)
    atom, mirror = p_single_atom(p), p_single_mirror(p)
    assert_allclose(atom.value, mirror.value, rtol=1e-14)
    assert_allclose(atom.angles.theta, mirror.angles.theta, rtol=1e-14)


def test_single_photon_exchange_scales_with_frequency_ratio():
    p = reference_params(omega=3.0e5, nu=5.0e4)
    exchanged = p.replace(nu=p.omega, omega=p.nu)
    ratio = (p.omega / p.nu) ** 2
    assert_allclose(p_single_mirror(exchanged).value, ratio * p_single_atom(p).value, rtol=1e-12)


def test_single_photon_zero_coupling():
    assert p_single_atom(reference_params(omega=3.0e5, g=0.0)).value == 0.0


@pytest.mark.slow
def test_single_photon_control_holds():
    result = single_photon_control(reference_params(omega=3.0e5, nu=5.0e4))
    assert result.label == "control"
    assert result.angle_match
    assert result.planck_match
    assert_allclose(result.frequency_ratio, 36.0, rtol=1e-14)
    assert result.rel_difference < CONTROL_TARGET
    # the exchanged mirror side carries 1/nu^2 instead of 1/omega^2
    ratio = result.p_mirror_exact_swapped.value / result.p_atom_swapped.value
    assert_allclose(ratio, 36.0, rtol=2.0 * CONTROL_TARGET)


@pytest.mark.slow
def test_single_photon_control_pinned_row():
    p = reference_params(omega=3.0e5, nu=5.0e4)
    result = single_photon_control(p, pinned=True)
    assert result.label == "control_pinned"
    assert result.frequency_ratio == 1.0
    assert result.rel_difference < CONTROL_TARGET
    assert_allclose(result.p_atom_swapped.value, p_single_atom(p.replace(nu=p.omega)).value,
                    rtol=1e-4)


@pytest.mark.slow
def test_control_sweep_holds_on_grid():
    reports = control_sweep(reference_params(), OMEGA_GRID[:4], jobs=4)
    assert all(r.rel_difference < CONTROL_TARGET for r in reports)
