"""Command-line entry point: ``irs-sim <subcommand> [options]``.

Subcommands: ``circuit-sweep``, ``fit-model``, ``optimize``, ``experiment``.

Every option can also come from a ``--config`` file of ``key=value`` lines
(``#`` starts a comment; keys are option names with ``-`` or ``_``).  Flags
given on the command line override the file.  Whenever output goes to a file
(``--output``), a manifest ``<output>.manifest`` is written next to it in the
same ``key=value`` format; passing it back via ``--config`` replays the run.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import __version__
from .beamform import (
    AOConfig,
    ElementSolver,
    ReflectionState,
    ao_optimize,
    ideal_upper_bound,
    mrt_rate,
    no_irs_rate,
)
from .beamform.schemes import dbm_to_watts, evaluate_mismatched
from .channel import INIT_STREAM, Geometry, PathLossConfig, dump_channels, sample_channels, trial_rng
from .circuit import CircuitParams, sweep_reflection
from .errors import IRSError
from .experiments import PRESETS, ExperimentConfig, init_phases, plot_result, run_experiment, write_csv
from .phase_model import PhaseShiftModel, fit

log = logging.getLogger("irs_practical")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_FILESYSTEM = 4
EXIT_COMPUTE = 5


class ConfigError(Exception):
    pass


# value parsing / formatting ------------------------------------------------

def parse_float(text: str) -> float:
    """Float that also accepts multiples of pi, e.g. ``0.43pi``."""
    s = text.strip().lower()
    if s.endswith("pi"):
        head = s[:-2].rstrip("*").strip()
        scale = {"": 1.0, "+": 1.0, "-": -1.0}.get(head)
        return (float(head) if scale is None else scale) * math.pi
    return float(s)


def parse_bool(text: str) -> bool:
    s = text.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _list_of(conv):
    def parse(text: str):
        return tuple(conv(p) for p in text.split(",") if p.strip())
    return parse


def fmt_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ",".join(fmt_value(x) for x in v)
    return "" if v is None else str(v)


@dataclass(frozen=True)
class Opt:
    name: str
    conv: Callable[[str], Any]
    default: Any
    help: str


def _o(name, conv, default, help):
    return Opt(name, conv, default, help)


COMMON = [
    _o("output", str, None, "write results here instead of stdout (also writes a manifest)"),
]

MODEL_OPTS = [
    _o("beta_min", parse_float, 0.2, "minimum reflection amplitude"),
    _o("phi", parse_float, 0.43 * math.pi, "amplitude-curve phase offset (rad; '0.43pi' accepted)"),
    _o("k", parse_float, 1.6, "amplitude-curve steepness"),
]

AO_OPTS = [
    _o("tol", parse_float, 1e-6, "relative objective change that stops the AO loop"),
    _o("max_iters", int, 100, "maximum AO sweeps"),
    _o("grid_points", int, 1000, "grid size of the 1D search"),
    _o("full_circle", parse_bool, False, "1D search over [-pi, pi) instead of the trust region"),
]

LINK_OPTS = [
    _o("M", int, 2, "AP antennas"),
    _o("N", int, 40, "IRS elements"),
    _o("d", parse_float, 498.0, "AP-user horizontal distance (m)"),
    _o("P_T_dbm", parse_float, 36.0, "transmit power (dBm)"),
    _o("sigma2_dbm", parse_float, -94.0, "noise power (dBm)"),
    _o("seed", int, 7, "random seed"),
]

OPTIONS: dict[str, list[Opt]] = {
    "circuit-sweep": COMMON + [
        _o("L1", parse_float, 2.5e-9, "bottom-layer inductance (H)"),
        _o("L2", parse_float, 0.7e-9, "top-layer inductance (H)"),
        _o("Z0", parse_float, 377.0, "free-space impedance (ohm)"),
        _o("freq", parse_float, 2.4e9, "frequency (Hz)"),
        _o("c_min", parse_float, 0.47e-12, "smallest capacitance (F)"),
        _o("c_max", parse_float, 2.35e-12, "largest capacitance (F)"),
        _o("r_values", _list_of(parse_float), (2.5,), "comma-separated resistances (ohm)"),
        _o("points", int, 1001, "capacitance samples per resistance"),
    ],
    "fit-model": COMMON + [
        _o("input", str, None, "circuit-sweep CSV to fit"),
        _o("r_ohms", parse_float, None, "only fit rows with this resistance"),
    ],
    "optimize": COMMON + LINK_OPTS + MODEL_OPTS + AO_OPTS + [
        _o("scheme", str, "practical", "practical | upper_bound | ideal_mismatched | no_irs"),
        _o("solver", str, "quadratic_fit", "quadratic_fit | one_d_search | discrete"),
        _o("bits", int, 2, "phase resolution for the discrete solver"),
        _o("trial", int, 0, "trial index selecting the channel realization"),
        _o("dump_channels", str, None, "write the channel realization as CSV"),
    ],
    "experiment": COMMON + [
        _o("preset", str, "fig4", "fig4 | fig5 | fig6"),
        _o("sweep", str, None, "d | N | b (default from preset)"),
        _o("values", _list_of(parse_float), None, "sweep values (default from preset)"),
        _o("schemes", _list_of(str), None, "schemes to run (default from preset)"),
        _o("bits", _list_of(int), None, "discrete resolutions for a b sweep"),
        _o("trials", int, 1000, "channel realizations per sweep point"),
        _o("threads", int, None, "worker threads (default: CPU count)"),
        _o("plot", str, None, "also render the curves to this file (e.g. .svg)"),
        _o("dump_channels", str, None, "write every realization as CSV"),
    ] + LINK_OPTS + MODEL_OPTS + AO_OPTS,
}

META_KEYS = {"subcommand", "version"}


def read_config(path: str, subcommand: str) -> dict[str, Any]:
    opts = {o.name: o for o in OPTIONS[subcommand]}
    lower = {k.lower(): k for k in opts}
    out: dict[str, Any] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (p.strip() for p in line.split("=", 1))
            key = key.replace("-", "_")
            if key in META_KEYS:
                if key == "subcommand" and value != subcommand:
                    raise ConfigError(f"{path}: manifest is for {value!r}, not {subcommand!r}")
                continue
            name = key if key in opts else lower.get(key.lower())
            if name is None:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if value == "":
                out[name] = None
                continue
            try:
                out[name] = opts[name].conv(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return out


def write_manifest(path: str, subcommand: str, settings: dict[str, Any]) -> None:
    lines = [f"# irs-sim run manifest; replay with: irs-sim {subcommand} --config {path}",
             f"subcommand={subcommand}", f"version={__version__}"]
    lines += [f"{k}={fmt_value(v)}" for k, v in settings.items()]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# subcommands ----------------------------------------------------------------

def _emit(text: str, settings: dict[str, Any], subcommand: str) -> None:
    out = settings.get("output")
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)
    write_manifest(out + ".manifest", subcommand, settings)


def _model(s) -> PhaseShiftModel:
    return PhaseShiftModel(beta_min=s["beta_min"], phi=s["phi"], k=s["k"])


def _ao(s, solver=ElementSolver.QUADRATIC_FIT, bits=2) -> AOConfig:
    return AOConfig(tol=s["tol"], max_outer_iters=s["max_iters"], element_solver=solver,
                    grid_points=s["grid_points"], discrete_bits=bits, full_circle=s["full_circle"])


def cmd_circuit_sweep(s) -> str:
    params = CircuitParams.from_frequency(s["L1"], s["L2"], s["Z0"], s["freq"])
    rows = sweep_reflection(params, s["c_min"], s["c_max"], s["points"], s["r_values"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["C_farads", "R_ohms", "amplitude", "phase_rad"])
    for r in rows:
        w.writerow([repr(r.C), repr(r.R), repr(r.amplitude), repr(r.phase)])
    return buf.getvalue()


def cmd_fit_model(s) -> str:
    if s["input"] is None:
        raise ConfigError("fit-model needs --input")
    samples = []
    with open(s["input"], newline="") as fh:
        for row in csv.DictReader(fh):
            if s["r_ohms"] is not None and not math.isclose(float(row["R_ohms"]), s["r_ohms"]):
                continue
            samples.append((float(row["phase_rad"]), float(row["amplitude"])))
    res = fit(samples)
    m = res.model
    return (f"beta_min={m.beta_min!r}\nphi={m.phi!r}\nphi_over_pi={m.phi / math.pi!r}\n"
            f"k={m.k!r}\nrmse={res.rmse!r}\nsamples={len(samples)}\n")


def cmd_optimize(s) -> str:
    geom = Geometry(d=s["d"])
    ch = sample_channels(trial_rng(s["seed"], s["trial"]), geom, PathLossConfig(), s["M"], s["N"])
    if s["dump_channels"]:
        with open(s["dump_channels"], "w", newline="") as fh:
            fh.write("link,row,col,re,im\n")
            dump_channels(ch, fh)
    P_T, sigma2 = dbm_to_watts(s["P_T_dbm"]), dbm_to_watts(s["sigma2_dbm"])
    init = init_phases(trial_rng(s["seed"], s["trial"], INIT_STREAM), s["N"])
    model = _model(s)
    scheme = s["scheme"]
    trace = np.array([])
    sweeps, converged = 0, True
    if scheme == "no_irs":
        rate = no_irs_rate(ch, P_T, sigma2)
    elif scheme in ("upper_bound", "ideal_mismatched"):
        res = ideal_upper_bound(ch, _ao(s), init)
        if scheme == "upper_bound":
            rate = mrt_rate(res.state, ch, P_T, sigma2)
        else:
            rate = evaluate_mismatched(res.state.thetas, model, ch, P_T, sigma2)
        trace, sweeps, converged = res.trace, res.sweeps, res.converged
    elif scheme == "practical":
        res = ao_optimize(ch, model, _ao(s, ElementSolver(s["solver"]), s["bits"]), init)
        rate = mrt_rate(res.state, ch, P_T, sigma2)
        trace, sweeps, converged = res.trace, res.sweeps, res.converged
    else:
        raise ConfigError(f"unknown scheme {scheme!r}")
    lines = [f"# scheme={scheme}", f"# rate_bpshz={rate!r}", f"# sweeps={sweeps}",
             f"# converged={fmt_value(converged)}", "sweep,objective"]
    lines += [f"{i},{float(v)!r}" for i, v in enumerate(trace)]
    return "\n".join(lines) + "\n"


def resolve_experiment(s) -> ExperimentConfig:
    kw = {k: s[k] for k in ("M", "N", "d", "P_T_dbm", "sigma2_dbm", "seed", "trials")}
    for key in ("sweep", "values", "schemes", "bits"):
        if s[key] is not None:
            kw[key] = s[key]
    if kw.get("sweep") == "N":
        kw["values"] = tuple(int(v) for v in kw["values"])
    kw["model"] = _model(s)
    kw["ao"] = _ao(s)
    return ExperimentConfig(**kw)


def cmd_experiment(s) -> str:
    cfg = resolve_experiment(s)
    # materialize the preset-derived values so the manifest is self-contained
    s.update(sweep=cfg.sweep, values=cfg.values, schemes=cfg.schemes, bits=cfg.bits, N=cfg.N)
    result = run_experiment(cfg, threads=s["threads"])
    if s["plot"]:
        plot_result(result, s["plot"])
    if s["dump_channels"]:
        with open(s["dump_channels"], "w", newline="") as fh:
            fh.write("sweep_value,trial,link,row,col,re,im\n")
            for value in cfg.values:
                N, d = cfg.point(value)
                geom = Geometry(d=d, ap_irs_distance=cfg.ap_irs_distance,
                                vertical_offset=cfg.vertical_offset)
                for t in range(cfg.trials):
                    ch = sample_channels(trial_rng(cfg.seed, t), geom, cfg.path_loss, cfg.M, N)
                    buf = io.StringIO()
                    dump_channels(ch, buf, trial=t)
                    fh.writelines(f"{fmt_value(value)},{line}\n" for line in buf.getvalue().splitlines())
    buf = io.StringIO()
    write_csv(result.rows, buf)
    return buf.getvalue()


COMMANDS = {
    "circuit-sweep": (cmd_circuit_sweep, "sweep the element circuit and emit amplitude/phase CSV"),
    "fit-model": (cmd_fit_model, "fit the amplitude-vs-phase model to a circuit-sweep CSV"),
    "optimize": (cmd_optimize, "optimize one channel realization and print the objective trace"),
    "experiment": (cmd_experiment, "Monte Carlo scheme comparison"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irs-sim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="key=value settings file (flags override it)")
        for o in OPTIONS[name]:
            flag = "--" + o.name.replace("_", "-")
            if o.conv is parse_bool:
                p.add_argument(flag, dest=o.name, action="store_const", const=True, default=None,
                               help=o.help)
            else:
                p.add_argument(flag, dest=o.name, type=o.conv, default=None,
                               help=f"{o.help} (default: {fmt_value(o.default) or 'none'})")
    return parser


def resolve_settings(args: argparse.Namespace) -> dict[str, Any]:
    """Defaults, then the experiment preset, then ``--config``, then flags."""
    opts = OPTIONS[args.subcommand]
    settings = {o.name: o.default for o in opts}
    from_file = read_config(args.config, args.subcommand) if args.config else {}
    from_flags = {o.name: getattr(args, o.name) for o in opts if getattr(args, o.name) is not None}
    if args.subcommand == "experiment":
        name = from_flags.get("preset", from_file.get("preset", settings["preset"]))
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
        settings.update(PRESETS[name])
    settings.update(from_file)
    settings.update(from_flags)
    return settings


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handler = COMMANDS[args.subcommand][0]
    try:
        settings = resolve_settings(args)
        text = handler(settings)
        _emit(text, settings, args.subcommand)
    except ConfigError as exc:
        print(f"irs-sim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"irs-sim: file error: {exc}", file=sys.stderr)
        return EXIT_FILESYSTEM
    except (IRSError, ValueError) as exc:
        print(f"irs-sim: error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
