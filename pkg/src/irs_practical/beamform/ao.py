"""Element-wise alternating optimization of the IRS phase shifts.

The kernel works on a batch of independent problems (one per trial) so a
Monte Carlo run costs a handful of numpy calls per element rather than a
Python loop per trial.  Each problem keeps its own convergence state; a
problem that has converged is frozen and no longer touched, so results do
not depend on what else happens to be in the batch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import partial
from typing import Callable, Sequence

import numpy as np

from ..angles import wrap_phase
from ..channel import ChannelSet
from ..phase_model import IDEAL_MODEL, PhaseShiftModel
from .algebra import ReflectionState, quadratic_terms
from .subproblem import (
    element_objective,
    solve_element_1d,
    solve_element_discrete,
    solve_element_ideal,
    solve_element_quadratic,
)


class ElementSolver(str, enum.Enum):
    QUADRATIC_FIT = "quadratic_fit"
    ONE_D_SEARCH = "one_d_search"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class AOConfig:
    tol: float = 1e-6
    max_outer_iters: int = 100
    element_solver: ElementSolver = ElementSolver.QUADRATIC_FIT
    grid_points: int = 1000
    discrete_bits: int = 2
    full_circle: bool = False

    def __post_init__(self):
        object.__setattr__(self, "element_solver", ElementSolver(self.element_solver))
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be at least 1")
        if self.grid_points < 3:
            raise ValueError("grid_points must be at least 3")
        if self.discrete_bits < 1:
            raise ValueError("discrete_bits must be at least 1")


@dataclass
class AOResult:
    state: ReflectionState
    trace: np.ndarray
    converged: bool

    @property
    def sweeps(self) -> int:
        return len(self.trace) - 1

    @property
    def objective(self) -> float:
        return float(self.trace[-1])


@dataclass
class BatchAOResult:
    """Per-problem phases, objective traces and convergence flags."""

    thetas: np.ndarray          # (T, N)
    traces: list[np.ndarray]
    converged: np.ndarray       # (T,) bool

    @property
    def objective(self) -> np.ndarray:
        return np.array([t[-1] for t in self.traces])


# (psi_nn, phi_n) -> theta, vectorized over the batch
Updater = Callable[[np.ndarray, np.ndarray], np.ndarray]


def element_updater(model: PhaseShiftModel, cfg: AOConfig) -> Updater:
    solver = cfg.element_solver
    if solver is ElementSolver.QUADRATIC_FIT:
        return partial(solve_element_quadratic, model=model)
    if solver is ElementSolver.ONE_D_SEARCH:
        return partial(solve_element_1d, model=model, grid_points=cfg.grid_points,
                       full_circle=cfg.full_circle)
    return partial(solve_element_discrete, model=model, bits=cfg.discrete_bits)


def batch_objective(psi, h_hat, direct_gain, v):
    """``v^H psi v + 2 Re(v^H h_hat) + ||h_d||^2`` for each problem in the batch."""
    quad = np.einsum("tn,tnm,tm->t", np.conj(v), psi, v).real
    lin = np.einsum("tn,tn->t", np.conj(v), h_hat).real
    return quad + 2.0 * lin + direct_gain


def ao_batch(
    psi: np.ndarray,
    h_hat: np.ndarray,
    direct_gain: np.ndarray,
    model: PhaseShiftModel,
    update: Updater,
    init_thetas: np.ndarray,
    tol: float = 1e-6,
    max_outer_iters: int = 100,
    guard: bool = True,
    check_monotone: bool = False,
) -> BatchAOResult:
    """Run the AO sweep loop on ``T`` problems at once.

    ``psi`` is (T, N, N), ``h_hat`` (T, N), ``direct_gain`` (T,) and
    ``init_thetas`` (T, N).  With ``guard`` set, an element keeps its current
    phase unless the solver's proposal scores at least as well, which makes
    every update weakly improving.
    """
    psi = np.asarray(psi, dtype=complex)
    h_hat = np.asarray(h_hat, dtype=complex)
    direct_gain = np.asarray(direct_gain, dtype=float)
    thetas = wrap_phase(np.array(init_thetas, dtype=float, ndmin=2))
    T, N = thetas.shape
    v = model.beta(thetas) * np.exp(1j * thetas)
    diag = np.real(np.einsum("tnn->tn", psi))

    obj = batch_objective(psi, h_hat, direct_gain, v)
    traces = [[float(x)] for x in obj]
    converged = np.zeros(T, dtype=bool)
    active = np.arange(T)

    for _ in range(max_outer_iters):
        if active.size == 0:
            break
        ps, hh, vv, th = psi[active], h_hat[active], v[active], thetas[active]
        dg = diag[active]
        if check_monotone:
            before = batch_objective(ps, hh, direct_gain[active], vv)
        for n in range(N):
            row = ps[:, n, :]
            coupling = np.einsum("tm,tm->t", row, vv) - row[:, n] * vv[:, n]
            phi_n = 2.0 * (coupling + hh[:, n])
            cand = np.asarray(update(dg[:, n], phi_n), dtype=float).reshape(-1)
            if guard:
                f_new = element_objective(cand, dg[:, n], phi_n, model)
                f_old = element_objective(th[:, n], dg[:, n], phi_n, model)
                cand = np.where(f_new >= f_old, cand, th[:, n])
            th[:, n] = cand
            vv[:, n] = model.beta(cand) * np.exp(1j * cand)
            if check_monotone:
                after = batch_objective(ps, hh, direct_gain[active], vv)
                slack = 1e-9 * np.abs(before)
                if np.any(after < before - slack):
                    raise AssertionError("element update decreased the objective")
                before = after
        thetas[active] = th
        v[active] = vv
        new_obj = batch_objective(ps, hh, direct_gain[active], vv)
        old_obj = obj[active]
        obj[active] = new_obj
        for t, val in zip(active, new_obj):
            traces[t].append(float(val))
        done = (new_obj - old_obj) <= tol * np.abs(old_obj)
        converged[active[done]] = True
        active = active[~done]

    return BatchAOResult(thetas=thetas, traces=[np.array(t) for t in traces], converged=converged)


def _single(ch: ChannelSet):
    qt = quadratic_terms(ch)
    gain = float(np.vdot(ch.h_d, ch.h_d).real)
    return qt.psi[None], qt.h_hat[None], np.array([gain])


def ao_optimize(
    ch: ChannelSet,
    model: PhaseShiftModel,
    cfg: AOConfig = AOConfig(),
    init_thetas: Sequence[float] | None = None,
    check_monotone: bool = False,
) -> AOResult:
    """Optimize the IRS phases for one channel realization.

    Returns the final reflection state together with the objective trace
    (initial value followed by one entry per sweep).  ``converged`` is False
    when ``max_outer_iters`` ran out first; the state is still the last
    (and best) iterate.
    """
    if init_thetas is None:
        init_thetas = np.full(ch.N, -np.pi)
    psi, h_hat, gain = _single(ch)
    res = ao_batch(psi, h_hat, gain, model, element_updater(model, cfg),
                   np.asarray(init_thetas, dtype=float)[None],
                   cfg.tol, cfg.max_outer_iters, check_monotone=check_monotone)
    return AOResult(ReflectionState(res.thetas[0], model), res.traces[0], bool(res.converged[0]))


def ideal_updater(psi_nn, phi_n):
    return solve_element_ideal(phi_n)


def ideal_upper_bound(
    ch: ChannelSet,
    cfg: AOConfig = AOConfig(),
    init_thetas: Sequence[float] | None = None,
) -> AOResult:
    """Unit-amplitude AO where each element aligns with its coupling term.

    The returned state carries the ideal (unit-amplitude) model.
    """
    if init_thetas is None:
        init_thetas = np.full(ch.N, -np.pi)
    psi, h_hat, gain = _single(ch)
    res = ao_batch(psi, h_hat, gain, IDEAL_MODEL, ideal_updater,
                   np.asarray(init_thetas, dtype=float)[None], cfg.tol, cfg.max_outer_iters)
    return AOResult(ReflectionState(res.thetas[0], IDEAL_MODEL), res.traces[0], bool(res.converged[0]))
