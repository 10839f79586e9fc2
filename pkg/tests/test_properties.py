import math

import numpy as np
from hypothesis import example, given, settings
from hypothesis import strategies as st

from irs_practical.angles import wrap_phase
from irs_practical.beamform import (
    AOConfig,
    ElementSolver,
    ao_optimize,
    discrete_levels,
    element_objective,
    solve_element_1d,
    solve_element_discrete,
    solve_element_quadratic,
    trust_region,
)
from irs_practical.channel import ChannelSet
from irs_practical.circuit import REFERENCE_CIRCUIT, ElementState, reflection_coefficient
from irs_practical.phase_model import PhaseShiftModel
from irs_practical.search import golden_section_max

angles = st.floats(-1e3, 1e3, allow_nan=False)
models = st.builds(
    PhaseShiftModel,
    beta_min=st.floats(0.0, 1.0),
    phi=st.floats(0.0, math.pi),
    k=st.floats(0.0, 5.0),
)
phis = st.builds(complex, st.floats(-10, 10), st.floats(-10, 10)).filter(lambda z: abs(z) > 1e-6)
psis = st.floats(0.0, 10.0)


@given(angles)
def test_wrap_phase_half_open_and_congruent(x):
    w = wrap_phase(x)
    assert -math.pi <= w < math.pi
    assert abs(math.remainder(w - x, 2 * math.pi)) < 1e-9
    assert wrap_phase(w) == w


@given(st.floats(-math.pi, math.pi, exclude_max=True))
def test_wrap_phase_keeps_in_range_values(x):
    assert wrap_phase(x) == x


@given(models, st.floats(-math.pi, math.pi))
def test_amplitude_in_range(model, theta):
    b = float(model.beta(theta))
    assert model.beta_min - 1e-12 <= b <= 1 + 1e-12


@given(st.floats(1e-13, 5e-12), st.floats(0.0, 100.0))
def test_passive_element_never_amplifies(C, R):
    try:
        v = reflection_coefficient(REFERENCE_CIRCUIT, ElementState(C=C, R=R))
    except ValueError:
        return
    assert abs(v) <= 1 + 1e-9


@given(st.floats(-5, 5), st.floats(0.1, 5))
def test_golden_section_finds_parabola_peak(center, half_width):
    x, fx = golden_section_max(lambda t: -(t - center) ** 2, center - half_width, center + 0.7 * half_width)
    assert abs(x - center) < 1e-6 * max(1.0, half_width)


@given(psis, phis, models)
@example(0.0, 1 - 1e-237j, PhaseShiftModel(0.0, 1.0, 1.0))  # arg just below zero
def test_quadratic_solver_in_region_and_beats_samples(psi, phi, model):
    a = float(np.angle(phi))
    lo, hi = trust_region(a)
    th = solve_element_quadratic(psi, phi, model)
    offset = (th - lo) % (2 * math.pi)
    assert offset <= hi - lo + 1e-9 or offset >= 2 * math.pi - 1e-9
    c = math.pi if a >= 0 else -math.pi
    samples = [element_objective(x, psi, phi, model) for x in (a, (a + c) / 2, c)]
    assert element_objective(th, psi, phi, model) >= max(samples) - 1e-12 * (1 + abs(max(samples)))


@settings(max_examples=50)
@given(psis, phis, models)
def test_one_d_dominates_quadratic(psi, phi, model):
    f = lambda x: element_objective(x, psi, phi, model)
    fq = f(solve_element_quadratic(psi, phi, model))
    f1 = f(solve_element_1d(psi, phi, model))
    assert f1 >= fq - 1e-9 * (1 + abs(fq))


@given(psis, phis, models, st.integers(1, 4))
def test_discrete_solver_picks_best_level(psi, phi, model, bits):
    th = solve_element_discrete(psi, phi, model, bits)
    vals = element_objective(discrete_levels(bits), psi, phi, model)
    assert th in discrete_levels(bits)
    assert element_objective(th, psi, phi, model) >= vals.max() - 1e-12 * (1 + abs(vals.max()))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 8), models,
       st.sampled_from(list(ElementSolver)))
def test_ao_never_decreases(seed, M, N, model, solver):
    rng = np.random.default_rng(seed)

    def cn(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    ch = ChannelSet(h_d=cn(M), h_r=cn(N), G=cn(N, M))
    res = ao_optimize(ch, model, AOConfig(element_solver=solver), check_monotone=True)
    assert np.all(np.diff(res.trace) >= -1e-9 * np.abs(res.trace[:-1]))
