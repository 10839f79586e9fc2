"""Rayleigh-faded channel realizations for the AP / IRS / user geometry.

The AP and IRS sit ``ap_irs_distance`` apart on one horizontal line; the
user moves on a parallel line ``vertical_offset`` metres away, at horizontal
distance ``d`` from the AP.

Random streams use numpy's PCG64 bit generator seeded through
``SeedSequence(seed, spawn_key=(trial, purpose))``, so any trial can be
regenerated on its own, in any order, on any platform.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .errors import SubReferenceDistanceError

# spawn-key tags separating independent streams of one trial
CHANNEL_STREAM = 0
INIT_STREAM = 1


@dataclass(frozen=True)
class Geometry:
    d: float
    ap_irs_distance: float = 500.0
    vertical_offset: float = 2.0

    def __post_init__(self):
        if not (self.d >= 0 and self.ap_irs_distance > 0 and self.vertical_offset > 0):
            raise ValueError("geometry lengths must be positive")


@dataclass(frozen=True)
class PathLossConfig:
    ref_loss_db: float = 40.0
    exp_ap_irs: float = 2.2
    exp_irs_user: float = 2.8
    exp_ap_user: float = 3.8

    def __post_init__(self):
        if not self.ref_loss_db > 0:
            raise ValueError("ref_loss_db must be positive")
        if min(self.exp_ap_irs, self.exp_irs_user, self.exp_ap_user) < 2:
            raise ValueError("path-loss exponents must be at least 2")


@dataclass(frozen=True)
class ChannelSet:
    """Baseband channels: ``h_d`` (AP-user, M), ``h_r`` (IRS-user, N), ``G`` (AP-IRS, N x M)."""

    h_d: np.ndarray
    h_r: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        n, m = self.G.shape
        if self.h_d.shape != (m,) or self.h_r.shape != (n,):
            raise ValueError("channel dimensions are inconsistent")
        if not all(np.all(np.isfinite(a)) for a in (self.h_d, self.h_r, self.G)):
            raise ValueError("channel entries must be finite")

    @property
    def M(self) -> int:
        return self.G.shape[1]

    @property
    def N(self) -> int:
        return self.G.shape[0]


def link_distances(geom: Geometry) -> tuple[float, float, float]:
    """Return ``(d_ap_user, d_irs_user, d_ap_irs)`` in metres."""
    v = geom.vertical_offset
    d_ap_user = math.hypot(geom.d, v)
    d_irs_user = math.hypot(geom.ap_irs_distance - geom.d, v)
    return d_ap_user, d_irs_user, geom.ap_irs_distance


def path_loss_linear(distance: float, exponent: float, cfg: PathLossConfig = PathLossConfig()) -> float:
    """Linear power gain of a link: reference loss at 1 m times ``distance**-exponent``."""
    if distance < 1.0:
        raise SubReferenceDistanceError(f"distance {distance} m is below the 1 m reference")
    return 10.0 ** (-cfg.ref_loss_db / 10.0) * distance ** (-exponent)


def trial_rng(seed: int, trial: int, stream: int = CHANNEL_STREAM) -> np.random.Generator:
    """Independent generator for one (trial, stream) pair of a seeded run."""
    ss = np.random.SeedSequence(seed, spawn_key=(trial, stream))
    return np.random.Generator(np.random.PCG64(ss))


def _cn(rng: np.random.Generator, shape, power: float) -> np.ndarray:
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z * math.sqrt(power / 2.0)


def sample_channels(
    rng: np.random.Generator,
    geom: Geometry,
    cfg: PathLossConfig,
    M: int,
    N: int,
) -> ChannelSet:
    """Draw one Rayleigh realization; each entry is CN(0, path loss of its link).

    Draw order is fixed (G, then h_r, then h_d), so one generator state maps
    to exactly one realization.
    """
    if M < 1 or N < 1:
        raise ValueError("M and N must be positive")
    d_ap_user, d_irs_user, d_ap_irs = link_distances(geom)
    G = _cn(rng, (N, M), path_loss_linear(d_ap_irs, cfg.exp_ap_irs, cfg))
    h_r = _cn(rng, (N,), path_loss_linear(d_irs_user, cfg.exp_irs_user, cfg))
    h_d = _cn(rng, (M,), path_loss_linear(d_ap_user, cfg.exp_ap_user, cfg))
    return ChannelSet(h_d=h_d, h_r=h_r, G=G)


def dump_channels(ch: ChannelSet, fh: TextIO, trial: int | None = None) -> None:
    """Write a realization as CSV rows ``link,row,col,re,im`` (plus ``trial`` if given)."""
    writer = csv.writer(fh, lineterminator="\n")
    prefix = [] if trial is None else [trial]
    for name, arr in (("h_d", ch.h_d), ("h_r", ch.h_r), ("G", ch.G)):
        arr2 = arr.reshape(arr.shape[0], -1)
        for (r, c), val in np.ndenumerate(arr2):
            writer.writerow(prefix + [name, r, c, repr(float(val.real)), repr(float(val.imag))])
