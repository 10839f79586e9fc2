"""Analytical amplitude-versus-phase model of a reflecting element.

The amplitude follows a raised, sharpened sinusoid of the phase shift:

    beta(theta) = (1 - beta_min) * ((sin(theta - phi) + 1) / 2) ** k + beta_min

so the amplitude bottoms out at ``beta_min`` for ``theta = phi - pi/2`` and
reaches unity at ``theta = phi + pi/2``.  ``k = 0`` recovers the ideal
unit-amplitude reflector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .angles import wrap_phase
from .errors import InsufficientSamplesError, PhaseDomainError
from .search import golden_section_max


@dataclass(frozen=True)
class PhaseShiftModel:
    beta_min: float = 0.2
    phi: float = 0.43 * math.pi
    k: float = 1.6

    def __post_init__(self):
        if not 0.0 <= self.beta_min <= 1.0:
            raise ValueError("beta_min must lie in [0, 1]")
        if not self.phi >= 0.0:
            raise ValueError("phi must be non-negative")
        if not self.k >= 0.0:
            raise ValueError("k must be non-negative")

    @property
    def is_ideal(self) -> bool:
        return self.k == 0.0 or self.beta_min == 1.0

    def beta(self, theta):
        """Amplitude without domain checks (internal fast path)."""
        return _beta(theta, self.beta_min, self.phi, self.k)


#: Unit-amplitude reflector.
IDEAL_MODEL = PhaseShiftModel(beta_min=1.0, phi=0.0, k=0.0)

#: Practical model used throughout the simulations.
PRACTICAL_MODEL = PhaseShiftModel(beta_min=0.2, phi=0.43 * math.pi, k=1.6)


def _beta(theta, beta_min, phi, k):
    base = np.clip((np.sin(theta - phi) + 1.0) / 2.0, 0.0, 1.0)
    return (1.0 - beta_min) * base**k + beta_min


def _check_domain(theta):
    """Normalize +pi to -pi and reject anything else outside [-pi, pi)."""
    arr = np.asarray(theta, dtype=float)
    arr = np.where(arr == np.pi, -np.pi, arr)
    if np.any(~((arr >= -np.pi) & (arr < np.pi))):
        raise PhaseDomainError("phase shift must lie in [-pi, pi)")
    return arr


def amplitude(model: PhaseShiftModel, theta):
    """Reflection amplitude for phase shift(s) ``theta`` in [-pi, pi)."""
    arr = _check_domain(theta)
    out = model.beta(arr)
    return float(out) if out.ndim == 0 else out


def reflection_value(model: PhaseShiftModel, theta):
    """Complex reflection coefficient ``beta(theta) * exp(j theta)``."""
    arr = _check_domain(theta)
    out = model.beta(arr) * np.exp(1j * arr)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FitResult:
    model: PhaseShiftModel
    rmse: float


# coarse grid: beta_min, phi, k
BETA_GRID = np.linspace(0.0, 1.0, 101)
PHI_GRID = np.linspace(0.0, math.pi, 101)
K_GRID = np.linspace(0.0, 5.0, 101)
BOUNDS = ((0.0, 1.0), (0.0, math.pi), (0.0, 5.0))
STEPS = (0.01, 0.01 * math.pi, 0.05)
MIN_SAMPLES = 10


def _sse(params, theta, beta):
    resid = _beta(theta, *params) - beta
    return float(np.dot(resid, resid))


def _grid_search(theta, beta):
    best = (math.inf, None)
    for phi in PHI_GRID:
        base = np.clip((np.sin(theta - phi) + 1.0) / 2.0, 0.0, 1.0)
        u = base[None, :] ** K_GRID[:, None]            # (k, samples)
        r0 = u - beta[None, :]
        w = 1.0 - u
        # residual is linear in beta_min: r0 + b * w
        a = np.einsum("ij,ij->i", r0, r0)
        b = np.einsum("ij,ij->i", r0, w)
        c = np.einsum("ij,ij->i", w, w)
        sse = a[:, None] + 2 * b[:, None] * BETA_GRID[None, :] + c[:, None] * BETA_GRID[None, :] ** 2
        ik, ib = np.unravel_index(np.argmin(sse), sse.shape)
        if sse[ik, ib] < best[0] - 1e-15:
            best = (sse[ik, ib], (BETA_GRID[ib], phi, K_GRID[ik]))
    return list(best[1])


def fit(samples: Iterable[tuple[float, float]], rounds: int = 3) -> FitResult:
    """Least-squares fit of the model to ``(theta, amplitude)`` samples.

    An exhaustive coarse grid seeds a coordinate-wise golden-section
    refinement (``rounds`` passes, one grid step either side of the current
    value).  Poor fits are reported through ``rmse`` rather than raised.
    """
    pts = np.asarray(list(samples), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < MIN_SAMPLES:
        raise InsufficientSamplesError(f"need at least {MIN_SAMPLES} samples")
    theta = wrap_phase(pts[:, 0])
    beta = pts[:, 1]
    if np.ptp(theta) < math.pi:
        raise InsufficientSamplesError("samples must span at least pi of phase")

    params = _grid_search(theta, beta)
    current = _sse(params, theta, beta)
    for _ in range(rounds):
        for i, ((lo_b, hi_b), step) in enumerate(zip(BOUNDS, STEPS)):
            lo = max(lo_b, params[i] - step)
            hi = min(hi_b, params[i] + step)

            def neg_sse(x, i=i):
                trial = list(params)
                trial[i] = float(x)
                return -_sse(trial, theta, beta)

            x, val = golden_section_max(np.vectorize(neg_sse), lo, hi, iters=40)
            if -val < current:
                params[i] = x
                current = -val

    model = PhaseShiftModel(*(float(p) for p in params))
    return FitResult(model, math.sqrt(current / len(beta)))
