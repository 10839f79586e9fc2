"""Equivalent-circuit model of a single reflecting element.

The element is a parallel resonator: the bottom-layer inductance ``L1`` in
parallel with a series branch of the top-layer inductance ``L2``, the tunable
capacitance ``C`` and the loss resistance ``R``.  Its reflection coefficient
against free space follows from the usual impedance-mismatch formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .angles import wrap_phase
from .errors import DegenerateResonanceError

#: Smallest admissible magnitude (ohms) of the parallel-impedance denominator.
DEGENERACY_EPS = 1e-9

FREE_SPACE_IMPEDANCE = 377.0


@dataclass(frozen=True)
class CircuitParams:
    """Fixed physical constants of a reflecting element."""

    L1: float
    L2: float
    Z0: float = FREE_SPACE_IMPEDANCE
    omega: float = 2 * math.pi * 2.4e9

    def __post_init__(self):
        for name in ("L1", "L2", "Z0", "omega"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def from_frequency(cls, L1: float, L2: float, Z0: float, freq_hz: float) -> "CircuitParams":
        return cls(L1=L1, L2=L2, Z0=Z0, omega=2 * math.pi * freq_hz)


@dataclass(frozen=True)
class ElementState:
    """Tunable capacitance (F) and loss resistance (ohm) of one element."""

    C: float
    R: float = 0.0

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be strictly positive")
        if not self.R >= 0:
            raise ValueError("R must be non-negative")


class SweepRow(NamedTuple):
    C: float
    R: float
    amplitude: float
    phase: float


#: Parameters of the reference sweep (varactor element at 2.4 GHz).
REFERENCE_CIRCUIT = CircuitParams(L1=2.5e-9, L2=0.7e-9, Z0=377.0, omega=2 * math.pi * 2.4e9)
REFERENCE_C_RANGE = (0.47e-12, 2.35e-12)
REFERENCE_R = 2.5


def _impedance(params: CircuitParams, C, R):
    jw = 1j * params.omega
    top = jw * params.L2 + 1.0 / (jw * C) + R
    bottom = jw * params.L1
    denom = bottom + top
    if np.any(np.abs(denom) < DEGENERACY_EPS):
        raise DegenerateResonanceError(
            "parallel resonance denominator below %g ohm" % DEGENERACY_EPS
        )
    return bottom * top / denom


def element_impedance(params: CircuitParams, state: ElementState) -> complex:
    """Impedance (ohm) of the element in the given tuning state."""
    return complex(_impedance(params, state.C, state.R))


def reflection_coefficient(params: CircuitParams, state: ElementState) -> complex:
    """Complex reflection coefficient ``(Z - Z0) / (Z + Z0)``."""
    z = element_impedance(params, state)
    return (z - params.Z0) / (z + params.Z0)


def sweep_reflection(
    params: CircuitParams,
    c_min: float,
    c_max: float,
    n_points: int,
    r_values: Sequence[float],
) -> list[SweepRow]:
    """Sweep C linearly over ``[c_min, c_max]`` for each resistance.

    Rows are ordered by resistance first, then capacitance.  Phases are
    principal values in [-pi, pi).
    """
    if not c_min < c_max:
        raise ValueError("c_min must be smaller than c_max")
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    if not c_min > 0:
        raise ValueError("capacitances must be strictly positive")
    caps = np.linspace(c_min, c_max, n_points)
    rows: list[SweepRow] = []
    for r in r_values:
        if r < 0:
            raise ValueError("resistances must be non-negative")
        z = _impedance(params, caps, float(r))
        v = (z - params.Z0) / (z + params.Z0)
        amp = np.abs(v)
        phase = wrap_phase(np.angle(v))
        rows.extend(
            SweepRow(float(c), float(r), float(a), float(p))
            for c, a, p in zip(caps, amp, phase)
        )
    return rows


def reference_sweep(n_points: int = 2001, r_values: Sequence[float] = (REFERENCE_R,)) -> list[SweepRow]:
    """Reference sweep: C from 0.47 pF to 2.35 pF at 2.4 GHz."""
    return sweep_reflection(REFERENCE_CIRCUIT, *REFERENCE_C_RANGE, n_points, r_values)
