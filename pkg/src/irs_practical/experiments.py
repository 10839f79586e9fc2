"""Monte Carlo harness comparing the beamforming schemes.

Each trial draws one channel realization that every scheme sees (paired
comparison).  Trial ``t`` always uses the stream ``(seed, t)``, for every
sweep point, so neighbouring sweep points also share their small-scale
fading.  Trials are processed in fixed-size chunks; chunks may run on
worker threads, and results are gathered in trial order, so the output does
not depend on the thread count.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .angles import wrap_phase
from .beamform.ao import AOConfig
from .beamform.schemes import (
    CONTINUOUS_SCHEMES,
    ChannelBatch,
    SchemeRunner,
    dbm_to_watts,
    is_valid_scheme,
    scheme_label,
)
from .channel import INIT_STREAM, Geometry, PathLossConfig, sample_channels, trial_rng
from .phase_model import PRACTICAL_MODEL, PhaseShiftModel

log = logging.getLogger(__name__)

CHUNK = 250
CSV_HEADER = ("sweep_var", "sweep_value", "scheme", "mean_rate_bpshz", "stderr", "trials", "seed")
SWEEP_KINDS = ("d", "N", "b")


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo study.

    ``sweep`` is ``"d"`` (values are AP-user distances), ``"N"`` (values are
    element counts, at distance ``d``) or ``"b"`` (values are distances and
    each entry of ``bits`` adds a practical- and an ideal-design discrete
    scheme).
    """

    M: int = 2
    N: int = 40
    d: float = 498.0
    P_T_dbm: float = 36.0
    sigma2_dbm: float = -94.0
    trials: int = 1000
    model: PhaseShiftModel = PRACTICAL_MODEL
    seed: int = 7
    schemes: tuple[str, ...] = CONTINUOUS_SCHEMES
    sweep: str = "d"
    values: tuple[float, ...] = (498.0,)
    bits: tuple[int, ...] = ()
    ap_irs_distance: float = 500.0
    vertical_offset: float = 2.0
    path_loss: PathLossConfig = field(default_factory=PathLossConfig)
    ao: AOConfig = field(default_factory=AOConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.sweep not in SWEEP_KINDS:
            raise ValueError(f"sweep must be one of {SWEEP_KINDS}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        for s in self.all_schemes:
            if not is_valid_scheme(s):
                raise ValueError(f"unknown scheme {s!r}")

    @property
    def P_T(self) -> float:
        return dbm_to_watts(self.P_T_dbm)

    @property
    def sigma2(self) -> float:
        return dbm_to_watts(self.sigma2_dbm)

    @property
    def sweep_var(self) -> str:
        return "N" if self.sweep == "N" else "d"

    @property
    def all_schemes(self) -> tuple[str, ...]:
        extra = []
        if self.sweep == "b":
            for b in self.bits:
                extra += [f"practical_discrete_b{b}", f"ideal_discrete_b{b}"]
        return tuple(self.schemes) + tuple(s for s in extra if s not in self.schemes)

    def point(self, value) -> tuple[int, float]:
        """``(N, d)`` at one sweep value."""
        if self.sweep == "N":
            return int(value), self.d
        return self.N, float(value)


FIG4_DISTANCES = (400.0, 425.0, 450.0, 470.0, 485.0, 495.0, 498.0)

PRESETS = {
    "fig4": dict(sweep="d", values=FIG4_DISTANCES, N=40),
    "fig5": dict(sweep="N", values=(10, 20, 30, 40, 50, 60, 70, 80), d=498.0),
    "fig6": dict(
        sweep="b",
        values=FIG4_DISTANCES,
        N=40,
        bits=(1, 2, 3),
        schemes=("practical_quadratic", "ideal_mismatched"),
    ),
}


def preset(name: str, **overrides) -> ExperimentConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return ExperimentConfig(**{**PRESETS[name], **overrides})


def init_phases(rng: np.random.Generator, N: int) -> np.ndarray:
    """Each phase drawn from {+pi, -pi}; both are stored as -pi."""
    return wrap_phase(rng.choice([math.pi, -math.pi], size=N))


@dataclass(frozen=True)
class ResultRow:
    sweep_var: str
    sweep_value: float
    scheme: str
    mean_rate: float
    stderr: float
    trials: int
    seed: int


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[ResultRow]
    # (sweep value, scheme) -> per-trial rates, in trial order
    rates: dict[tuple[float, str], np.ndarray]

    def mean(self, value, scheme) -> float:
        return float(np.mean(self.rates[(value, scheme)]))


def _run_chunk(cfg: ExperimentConfig, N: int, d: float, trials: range) -> dict[str, np.ndarray]:
    geom = Geometry(d=d, ap_irs_distance=cfg.ap_irs_distance, vertical_offset=cfg.vertical_offset)
    channels = [sample_channels(trial_rng(cfg.seed, t), geom, cfg.path_loss, cfg.M, N) for t in trials]
    init = np.stack([init_phases(trial_rng(cfg.seed, t, INIT_STREAM), N) for t in trials])
    runner = SchemeRunner(ChannelBatch.from_channels(channels), cfg.model, init,
                          cfg.P_T, cfg.sigma2, cfg.ao)
    return {s: runner.rates(s) for s in cfg.all_schemes}


def _summarize(rates: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(rates))
    if len(rates) < 2:
        return mean, math.nan
    return mean, float(np.std(rates, ddof=1) / math.sqrt(len(rates)))


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    """Run every scheme at every sweep point and aggregate mean rate and standard error."""
    threads = threads or os.cpu_count() or 1
    chunks = [range(s, min(s + CHUNK, cfg.trials)) for s in range(0, cfg.trials, CHUNK)]
    rows: list[ResultRow] = []
    rates: dict[tuple[float, str], np.ndarray] = {}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for value in cfg.values:
            N, d = cfg.point(value)
            log.info("sweep %s=%s (N=%d, d=%g)", cfg.sweep_var, value, N, d)
            parts = list(pool.map(lambda ch: _run_chunk(cfg, N, d, ch), chunks))
            for scheme in cfg.all_schemes:
                r = np.concatenate([p[scheme] for p in parts])
                rates[(value, scheme)] = r
                mean, se = _summarize(r)
                rows.append(ResultRow(cfg.sweep_var, value, scheme, mean, se, cfg.trials, cfg.seed))
    return ExperimentResult(cfg, rows, rates)


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def write_csv(rows: Iterable[ResultRow], fh: TextIO) -> None:
    """CSV with round-trip float precision."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.sweep_var, _fmt(r.sweep_value), r.scheme, _fmt(r.mean_rate),
                         _fmt(r.stderr), r.trials, r.seed])


def plot_result(result: ExperimentResult, path: str) -> None:
    """One curve per scheme; format follows the file extension (e.g. ``.svg``)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cfg = result.config
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for scheme in cfg.all_schemes:
        ys = [result.mean(v, scheme) for v in cfg.values]
        ax.plot(cfg.values, ys, marker="o", label=scheme_label(scheme))
    ax.set_xlabel("AP-user horizontal distance d (m)" if cfg.sweep_var == "d" else "number of elements N")
    ax.set_ylabel("achievable rate (bps/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "PRESETS",
    "ResultRow",
    "init_phases",
    "preset",
    "run_experiment",
    "write_csv",
]
