import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eth_gamma.errors import DegenerateSpectrum, EmptySpectrum, EnergyOutOfRange, NonFiniteInput
from eth_gamma.thermo import (beta_eff, energy_variance, entropy_at_energy, mean_energy,
                              partition_stats, thermo_curve)

TWO_LEVEL_S = math.log(4 / 3) + math.log(3) / 4


def test_infinite_temperature():
    e = np.array([-1.0, 0.3, 0.5, 2.0])
    log_z, energy, s = partition_stats(e, 0.0)
    assert log_z == pytest.approx(math.log(4))
    assert energy == pytest.approx(e.mean())
    assert s == pytest.approx(math.log(4))


def test_two_level_analytic():
    log_z, energy, s = partition_stats([0.0, 1.0], math.log(3))
    assert energy == pytest.approx(0.25, abs=1e-15)
    assert s == pytest.approx(TWO_LEVEL_S, abs=1e-14)
    assert s == pytest.approx(0.56234, abs=1e-5)


def test_ground_state_limit():
    e = np.array([0.0, 1.0, 2.0, 5.0])
    _, energy, s = partition_stats(e, 40 / 5)
    assert abs(energy - 0.0) < 1e-2  # gap 1, beta 8: e^-8 weight
    _, energy, s = partition_stats([0.0, 1.0], 40.0)
    assert energy < 1e-10 and s < 1e-10 * 40


def test_extreme_beta_is_stable():
    e = np.linspace(-50, 50, 11)
    for b in (-1e3, 1e3):
        log_z, energy, s = partition_stats(e, b)
        assert np.isfinite([log_z, energy, s]).all()
    assert partition_stats(e, 1e3)[1] == pytest.approx(-50)
    assert partition_stats(e, -1e3)[1] == pytest.approx(50)


def test_errors():
    with pytest.raises(EmptySpectrum):
        partition_stats([], 1.0)
    with pytest.raises(NonFiniteInput):
        partition_stats([0.0, np.inf], 1.0)
    with pytest.raises(EnergyOutOfRange):
        beta_eff([0.0, 1.0, 2.0], 0.0)
    with pytest.raises(EnergyOutOfRange):
        beta_eff([0.0, 1.0, 2.0], 2.5)
    with pytest.raises(DegenerateSpectrum):
        beta_eff([1.0, 1.0], 1.0)


def test_beta_eff_examples():
    e = np.array([-1.0, -0.2, 0.4, 0.9])
    assert beta_eff(e, e.mean()) == pytest.approx(0.0, abs=1e-11)
    assert beta_eff([0.0, 1.0], 0.25) == pytest.approx(math.log(3), abs=1e-11)


def test_entropy_at_energy_two_level_and_mirror():
    b, s = entropy_at_energy([0.0, 1.0], 0.25)
    assert s == pytest.approx(TWO_LEVEL_S, abs=1e-9)
    bm, sm = entropy_at_energy([0.0, 1.0], 0.75)
    assert bm == pytest.approx(-b, abs=1e-10)
    assert sm == pytest.approx(s, abs=1e-10)


def _spectrum(seed, d=60):
    return np.sort(np.random.default_rng(seed).normal(size=d))


@pytest.mark.parametrize("seed", [0, 1])
def test_beta_eff_accuracy(seed):
    e = _spectrum(seed)
    span = e[-1] - e[0]
    for target in np.linspace(e[0] + 0.02 * span, e[-1] - 0.02 * span, 15):
        b = beta_eff(e, target)
        assert abs(mean_energy(e, b) - target) <= 1e-9 * span


def test_energy_decreasing_in_beta():
    e = _spectrum(3)
    betas = np.linspace(-4, 4, 20)
    h = 1e-5
    for b in betas:
        fd = (mean_energy(e, b + h) - mean_energy(e, b - h)) / (2 * h)
        assert fd == pytest.approx(-energy_variance(e, b), rel=1e-5)
        assert fd < 0
    curve = thermo_curve(e, betas)
    assert np.all(np.diff(curve.energy) < 0)
    assert np.all(curve.entropy >= 0)


def test_entropy_derivative_is_beta():
    e = _spectrum(4, 200)
    span = e[-1] - e[0]
    h = 1e-3 * span
    for target in np.linspace(e[0] + 0.2 * span, e[-1] - 0.2 * span, 24):
        b, _ = entropy_at_energy(e, target)
        fd = (entropy_at_energy(e, target + h)[1] - entropy_at_energy(e, target - h)[1]) / (2 * h)
        assert fd == pytest.approx(b, rel=1e-3)


@settings(max_examples=30, deadline=None)
@given(st.floats(-20, 20), st.floats(-3, 3))
def test_shift_covariance(c, beta):
    e = _spectrum(5, 30)
    _, e0, s0 = partition_stats(e, beta)
    _, e1, s1 = partition_stats(e + c, beta)
    assert e1 == pytest.approx(e0 + c, abs=1e-9)
    assert s1 == pytest.approx(s0, abs=1e-9)


def test_thermo_curve_entropy_at_zero():
    e = _spectrum(6, 50)
    curve = thermo_curve(e, [0.0])
    assert curve.entropy[0] == pytest.approx(math.log(50))
