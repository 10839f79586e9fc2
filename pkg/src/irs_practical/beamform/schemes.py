"""The compared beamforming schemes, evaluated on batches of realizations.

Scheme names used in result tables:

``upper_bound``
    Unit-amplitude AO (each element phase-aligned); rate computed with unit
    amplitudes.  An element-wise AO stand-in for the SDR-based bound, so it
    is labelled "ideal-AO upper bound" in human-facing output.
``practical_quadratic`` / ``practical_1d``
    AO under the practical amplitude model with the quadratic-fit or
    grid-search element solver.
``ideal_mismatched``
    Phases from the unit-amplitude design, rate evaluated with the practical
    amplitudes.
``no_irs``
    MRT on the direct channel only.
``practical_discrete_b<b>`` / ``ideal_discrete_b<b>``
    Discrete ``b``-bit phases designed under the practical or unit-amplitude
    model; both are evaluated with the practical amplitudes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..channel import ChannelSet
from ..phase_model import IDEAL_MODEL, PhaseShiftModel
from .algebra import composite_matrix, mrt_rate, ReflectionState
from .ao import AOConfig, ElementSolver, ao_batch, batch_objective, element_updater, ideal_updater

CONTINUOUS_SCHEMES = ("upper_bound", "practical_1d", "practical_quadratic", "ideal_mismatched", "no_irs")

SCHEME_LABELS = {
    "upper_bound": "1) ideal-AO upper bound",
    "practical_quadratic": "2) practical model, quadratic fit",
    "practical_1d": "3) practical model, 1D search",
    "ideal_mismatched": "4) ideal design, practical evaluation",
    "no_irs": "5) without IRS",
}

_DISCRETE = re.compile(r"^(practical|ideal)_discrete_b(\d+)$")


def is_valid_scheme(name: str) -> bool:
    return name in SCHEME_LABELS or _DISCRETE.match(name) is not None


def scheme_label(name: str) -> str:
    m = _DISCRETE.match(name)
    if m:
        return f"{m.group(1)} design, b={m.group(2)}"
    return SCHEME_LABELS[name]


def evaluate_mismatched(thetas, model: PhaseShiftModel, ch: ChannelSet, P_T: float, sigma2: float) -> float:
    """Rate of phases designed for unit amplitude when the surface follows ``model``."""
    return mrt_rate(ReflectionState(thetas, model), ch, P_T, sigma2)


@dataclass(frozen=True)
class ChannelBatch:
    """A stack of ``T`` realizations with the quadratic-form terms precomputed."""

    psi: np.ndarray         # (T, N, N)
    h_hat: np.ndarray       # (T, N)
    direct_gain: np.ndarray  # (T,)

    @classmethod
    def from_channels(cls, channels: list[ChannelSet]) -> "ChannelBatch":
        phi = np.stack([composite_matrix(ch) for ch in channels])
        h_d = np.stack([ch.h_d for ch in channels])
        psi = phi @ np.conj(np.swapaxes(phi, 1, 2))
        psi = 0.5 * (psi + np.conj(np.swapaxes(psi, 1, 2)))
        h_hat = np.einsum("tnm,tm->tn", phi, h_d)
        gain = np.einsum("tm,tm->t", np.conj(h_d), h_d).real
        return cls(psi, h_hat, gain)

    @property
    def T(self) -> int:
        return self.psi.shape[0]

    @property
    def N(self) -> int:
        return self.psi.shape[1]


def _rate(power_gain, P_T, sigma2):
    return np.log2(1.0 + P_T * power_gain / sigma2)


class SchemeRunner:
    """Evaluates schemes on one batch, sharing the unit-amplitude design."""

    def __init__(self, batch: ChannelBatch, model: PhaseShiftModel, init_thetas: np.ndarray,
                 P_T: float, sigma2: float, ao: AOConfig = AOConfig()):
        self.batch = batch
        self.model = model
        self.init = init_thetas
        self.P_T = P_T
        self.sigma2 = sigma2
        self.ao = ao
        self._ideal: dict[int | None, np.ndarray] = {}

    def _run(self, model, update):
        b = self.batch
        return ao_batch(b.psi, b.h_hat, b.direct_gain, model, update, self.init,
                        self.ao.tol, self.ao.max_outer_iters)

    def _practical_gain(self, thetas):
        b = self.batch
        v = self.model.beta(thetas) * np.exp(1j * thetas)
        return batch_objective(b.psi, b.h_hat, b.direct_gain, v)

    def _ideal_design(self, bits):
        if bits not in self._ideal:
            if bits is None:
                update = ideal_updater
            else:
                cfg = AOConfig(element_solver=ElementSolver.DISCRETE, discrete_bits=bits)
                update = element_updater(IDEAL_MODEL, cfg)
            self._ideal[bits] = self._run(IDEAL_MODEL, update)
        return self._ideal[bits]

    def rates(self, scheme: str) -> np.ndarray:
        b = self.batch
        if scheme == "no_irs":
            return _rate(b.direct_gain, self.P_T, self.sigma2)
        if scheme == "upper_bound":
            return _rate(self._ideal_design(None).objective, self.P_T, self.sigma2)
        if scheme == "ideal_mismatched":
            return _rate(self._practical_gain(self._ideal_design(None).thetas), self.P_T, self.sigma2)
        if scheme in ("practical_quadratic", "practical_1d"):
            solver = (ElementSolver.QUADRATIC_FIT if scheme == "practical_quadratic"
                      else ElementSolver.ONE_D_SEARCH)
            cfg = AOConfig(self.ao.tol, self.ao.max_outer_iters, solver,
                           self.ao.grid_points, full_circle=self.ao.full_circle)
            res = self._run(self.model, element_updater(self.model, cfg))
            return _rate(res.objective, self.P_T, self.sigma2)
        m = _DISCRETE.match(scheme)
        if m is None:
            raise ValueError(f"unknown scheme {scheme!r}")
        bits = int(m.group(2))
        if m.group(1) == "ideal":
            thetas = self._ideal_design(bits).thetas
        else:
            cfg = AOConfig(element_solver=ElementSolver.DISCRETE, discrete_bits=bits)
            thetas = self._run(self.model, element_updater(self.model, cfg)).thetas
        return _rate(self._practical_gain(thetas), self.P_T, self.sigma2)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


__all__ = [
    "CONTINUOUS_SCHEMES",
    "ChannelBatch",
    "SchemeRunner",
    "dbm_to_watts",
    "evaluate_mismatched",
    "is_valid_scheme",
    "scheme_label",
]
