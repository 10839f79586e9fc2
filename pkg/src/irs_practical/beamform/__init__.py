"""Joint transmit / reflect beamforming under a phase-dependent amplitude model."""

from .algebra import (
    QuadraticTerms,
    ReflectionState,
    achievable_rate,
    composite_matrix,
    effective_channel,
    mrt_beamformer,
    mrt_rate,
    no_irs_rate,
    objective,
    quadratic_terms,
)
from .ao import AOConfig, AOResult, ElementSolver, ao_batch, ao_optimize, ideal_upper_bound
from .schemes import ChannelBatch, SchemeRunner, dbm_to_watts, evaluate_mismatched
from .subproblem import (
    discrete_levels,
    element_objective,
    element_phi,
    solve_element_1d,
    solve_element_discrete,
    solve_element_quadratic,
    trust_region,
)
