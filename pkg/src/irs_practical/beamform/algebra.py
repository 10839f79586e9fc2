"""Channel algebra: composite channel, MRT, rate, and quadratic-form terms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..angles import wrap_phase
from ..channel import ChannelSet
from ..errors import ZeroChannelError
from ..phase_model import PhaseShiftModel


@dataclass(frozen=True)
class ReflectionState:
    """IRS phase shifts and the reflection vector they induce under ``model``."""

    thetas: np.ndarray
    model: PhaseShiftModel
    v: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        thetas = wrap_phase(np.atleast_1d(np.asarray(self.thetas, dtype=float)))
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "v", self.model.beta(thetas) * np.exp(1j * thetas))

    @property
    def N(self) -> int:
        return self.thetas.shape[0]


def _vector(v) -> np.ndarray:
    if isinstance(v, ReflectionState):
        return v.v
    return np.asarray(v, dtype=complex)


def composite_matrix(ch: ChannelSet) -> np.ndarray:
    """Cascaded AP-IRS-user channel ``diag(h_r^H) G`` (N x M)."""
    return np.conj(ch.h_r)[:, None] * ch.G


def effective_channel(v, phi: np.ndarray, h_d: np.ndarray) -> np.ndarray:
    """Row vector ``v^H Phi + h_d^H`` stored as a 1-D array of length M."""
    return np.conj(_vector(v)) @ phi + np.conj(h_d)


def objective(v, ch: ChannelSet) -> float:
    """Received-power objective ``||v^H Phi + h_d^H||^2`` (unit transmit power)."""
    g = effective_channel(v, composite_matrix(ch), ch.h_d)
    return float(np.vdot(g, g).real)


def mrt_beamformer(v, phi: np.ndarray, h_d: np.ndarray, P_T: float) -> np.ndarray:
    """Maximum-ratio transmit beam with ``||w||^2 = P_T``."""
    g = effective_channel(v, phi, h_d)
    norm = np.linalg.norm(g)
    if norm == 0.0:
        raise ZeroChannelError("effective channel is zero; MRT undefined")
    return math.sqrt(P_T) * np.conj(g) / norm


def achievable_rate(v, w: np.ndarray, ch: ChannelSet, sigma2: float) -> float:
    """Spectral efficiency (bps/Hz) for reflection ``v`` and beam ``w``."""
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    g = effective_channel(v, composite_matrix(ch), ch.h_d)
    gain = abs(g @ w) ** 2
    return math.log2(1.0 + gain / sigma2)


def mrt_rate(v, ch: ChannelSet, P_T: float, sigma2: float) -> float:
    """Rate achieved by ``v`` with its MRT beam."""
    w = mrt_beamformer(v, composite_matrix(ch), ch.h_d, P_T)
    return achievable_rate(v, w, ch, sigma2)


def no_irs_rate(ch: ChannelSet, P_T: float, sigma2: float) -> float:
    """Rate with the IRS absent and the AP beam matched to ``h_d``."""
    gain = float(np.vdot(ch.h_d, ch.h_d).real)
    if gain == 0.0:
        raise ZeroChannelError("direct channel is zero")
    return math.log2(1.0 + P_T * gain / sigma2)


@dataclass(frozen=True)
class QuadraticTerms:
    """``psi = Phi Phi^H`` and ``h_hat = Phi h_d`` for the per-element subproblem."""

    psi: np.ndarray
    h_hat: np.ndarray


def quadratic_terms(ch: ChannelSet) -> QuadraticTerms:
    phi = composite_matrix(ch)
    psi = phi @ phi.conj().T
    psi = 0.5 * (psi + psi.conj().T)
    return QuadraticTerms(psi=psi, h_hat=phi @ ch.h_d)
