import math

import numpy as np
import pytest

from irs_practical.circuit import reference_sweep
from irs_practical.errors import InsufficientSamplesError, PhaseDomainError
from irs_practical.phase_model import (
    IDEAL_MODEL,
    PRACTICAL_MODEL,
    PhaseShiftModel,
    amplitude,
    fit,
    reflection_value,
)


def test_reference_amplitude_at_zero():
    # (1 - 0.2) * ((sin(-0.43 pi) + 1) / 2) ** 1.6 + 0.2, evaluated by hand
    base = (math.sin(-0.43 * math.pi) + 1) / 2
    assert amplitude(PRACTICAL_MODEL, 0.0) == pytest.approx(0.8 * base**1.6 + 0.2, rel=1e-14)
    assert amplitude(PRACTICAL_MODEL, 0.0) == pytest.approx(0.2007, abs=5e-5)


@pytest.mark.parametrize("theta", [-math.pi, -1.0, 0.0, 2.0, 3.1])
def test_k_zero_is_unit_amplitude(theta):
    assert amplitude(PhaseShiftModel(0.3, 1.0, 0.0), theta) == 1.0
    assert amplitude(IDEAL_MODEL, theta) == 1.0


def test_extremes_of_the_sine():
    m = PhaseShiftModel(0.3, 0.25 * math.pi, 2.0)
    assert amplitude(m, m.phi - math.pi / 2) == pytest.approx(0.3, abs=1e-12)
    assert amplitude(m, m.phi + math.pi / 2) == pytest.approx(1.0, abs=1e-12)


def test_amplitude_bounds(rng):
    th = rng.uniform(-math.pi, math.pi, 10_000)
    for m in (PRACTICAL_MODEL, PhaseShiftModel(0.0, 2.0, 4.5), PhaseShiftModel(1.0, 0.0, 1.0)):
        a = amplitude(m, th)
        assert np.all(a >= m.beta_min - 1e-15) and np.all(a <= 1 + 1e-15)


def test_domain_convention():
    assert amplitude(PRACTICAL_MODEL, math.pi) == amplitude(PRACTICAL_MODEL, -math.pi)
    for bad in (math.pi + 1e-9, -math.pi - 1e-9, 4.0, float("nan")):
        with pytest.raises(PhaseDomainError):
            amplitude(PRACTICAL_MODEL, bad)


def test_reflection_value():
    assert reflection_value(IDEAL_MODEL, 0.0) == 1 + 0j
    v = reflection_value(PRACTICAL_MODEL, 1.3)
    assert abs(v) == pytest.approx(amplitude(PRACTICAL_MODEL, 1.3), rel=1e-14)
    assert np.angle(v) == pytest.approx(1.3, abs=1e-14)
    # +pi is stored as -pi
    assert np.angle(reflection_value(PRACTICAL_MODEL, math.pi)) == pytest.approx(-math.pi)


def test_near_unity_at_minus_pi():
    base = (math.sin(-math.pi - 0.43 * math.pi) + 1) / 2
    expected = 0.8 * base**1.6 + 0.2
    assert abs(reflection_value(PRACTICAL_MODEL, -math.pi)) == pytest.approx(expected, rel=1e-14)
    assert expected > 0.98


@pytest.mark.parametrize("kwargs", [dict(beta_min=-0.1), dict(beta_min=1.1), dict(phi=-1.0), dict(k=-0.5)])
def test_model_validated(kwargs):
    with pytest.raises(ValueError):
        PhaseShiftModel(**kwargs)


def test_fit_round_trip():
    th = np.linspace(-math.pi, math.pi, 400, endpoint=False)
    res = fit(zip(th, amplitude(PRACTICAL_MODEL, th)))
    assert res.model.beta_min == pytest.approx(0.2, abs=0.02)
    assert res.model.phi == pytest.approx(0.43 * math.pi, abs=0.02)
    assert res.model.k == pytest.approx(1.6, abs=0.02)
    assert res.rmse < 1e-6


def test_fit_other_model():
    true = PhaseShiftModel(0.5, 0.2 * math.pi, 3.0)
    th = np.linspace(-math.pi, math.pi, 300, endpoint=False)
    res = fit(zip(th, true.beta(th)))
    assert res.model.beta_min == pytest.approx(0.5, abs=0.02)
    assert res.model.phi == pytest.approx(0.2 * math.pi, abs=0.02)
    assert res.model.k == pytest.approx(3.0, abs=0.02)


def test_fit_constant_unit_amplitude():
    th = np.linspace(-math.pi, math.pi, 50, endpoint=False)
    res = fit((t, 1.0) for t in th)
    assert res.model.k == 0.0 or res.model.beta_min == 1.0
    assert res.rmse == pytest.approx(0.0, abs=1e-12)


def test_fit_circuit_sweep():
    rows = reference_sweep(n_points=2001)
    res = fit((r.phase, r.amplitude) for r in rows)
    assert res.rmse <= 0.05


def test_fit_noisy_data_reports_rmse(rng):
    th = rng.uniform(-math.pi, math.pi, 500)
    a = PRACTICAL_MODEL.beta(th) + rng.normal(0, 0.05, th.size)
    res = fit(zip(th, a))
    assert res.rmse == pytest.approx(0.05, rel=0.15)


def test_fit_needs_enough_samples():
    with pytest.raises(InsufficientSamplesError):
        fit([(0.0, 1.0)] * 5)
    with pytest.raises(InsufficientSamplesError):
        fit((t, 1.0) for t in np.linspace(0, 1, 50))
