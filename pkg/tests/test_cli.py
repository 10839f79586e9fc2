import subprocess
import sys

import pytest

from irs_practical.cli import EXIT_COMPUTE, EXIT_CONFIG, EXIT_FILESYSTEM, EXIT_USAGE, main, parse_float


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_float_accepts_pi_multiples():
    assert parse_float("0.5pi") == pytest.approx(1.5707963267948966)
    assert parse_float("-pi") == pytest.approx(-3.141592653589793)
    assert parse_float("2.5e-9") == 2.5e-9


def test_circuit_sweep_stdout(capsys):
    code, out, _ = run(["circuit-sweep", "--points", "3", "--r-values", "0,2.5"], capsys)
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "C_farads,R_ohms,amplitude,phase_rad"
    assert len(lines) == 7


def test_sweep_then_fit(tmp_path, capsys):
    sweep = tmp_path / "sweep.csv"
    assert main(["circuit-sweep", "--output", str(sweep)]) == 0
    assert (tmp_path / "sweep.csv.manifest").exists()
    code, out, _ = run(["fit-model", "--input", str(sweep)], capsys)
    assert code == 0
    values = dict(line.split("=") for line in out.splitlines())
    assert float(values["rmse"]) <= 0.05
    assert 0 <= float(values["beta_min"]) <= 1


def test_optimize_prints_trace(tmp_path, capsys):
    dump = tmp_path / "ch.csv"
    code, out, _ = run(["optimize", "--N", "6", "--seed", "3", "--dump-channels", str(dump)], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# scheme=practical"
    header = lines.index("sweep,objective")
    sweeps = int(lines[2].split("=")[1])
    assert len(lines) - header - 1 == sweeps + 1
    assert dump.read_text().startswith("link,row,col,re,im")


@pytest.mark.parametrize("scheme", ["upper_bound", "ideal_mismatched", "no_irs"])
def test_optimize_schemes(scheme, capsys):
    code, out, _ = run(["optimize", "--scheme", scheme, "--N", "6"], capsys)
    assert code == 0 and f"# scheme={scheme}" in out


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\nN = 6\ntrials=3\nvalues=498\nseed=11  # trailing comment\n")
    out = tmp_path / "res.csv"
    assert main(["experiment", "--config", str(cfg), "--seed", "5", "--output", str(out)]) == 0
    manifest = (tmp_path / "res.csv.manifest").read_text()
    assert "seed=5\n" in manifest and "N=6\n" in manifest and "trials=3\n" in manifest
    assert out.read_text().splitlines()[1].endswith(",3,5")


def test_manifest_replay_is_byte_identical(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["experiment", "--preset", "fig5", "--values", "4,6", "--trials", "4", "--output", str(out)]) == 0
    replay = tmp_path / "b.csv"
    assert main(["experiment", "--config", str(out) + ".manifest", "--output", str(replay)]) == 0
    assert out.read_bytes() == replay.read_bytes()


def test_manifest_for_other_subcommand_rejected(tmp_path):
    out = tmp_path / "s.csv"
    main(["circuit-sweep", "--points", "3", "--output", str(out)])
    assert main(["experiment", "--config", str(out) + ".manifest"]) == EXIT_CONFIG


def test_exit_codes(tmp_path, capsys):
    assert main(["no-such-command"]) == EXIT_USAGE
    assert main(["optimize", "--bogus"]) == EXIT_USAGE
    bad = tmp_path / "bad.cfg"
    bad.write_text("N=abc\n")
    assert main(["optimize", "--config", str(bad)]) == EXIT_CONFIG
    bad.write_text("just words\n")
    assert main(["optimize", "--config", str(bad)]) == EXIT_CONFIG
    bad.write_text("colour=blue\n")
    assert main(["optimize", "--config", str(bad)]) == EXIT_CONFIG
    assert main(["optimize", "--config", str(tmp_path / "missing.cfg")]) == EXIT_FILESYSTEM
    assert main(["fit-model", "--input", str(tmp_path / "missing.csv")]) == EXIT_FILESYSTEM
    assert main(["optimize", "--d", "-3"]) == EXIT_COMPUTE
    assert main(["experiment", "--preset", "fig9"]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "irs-sim" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "irs_practical", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "irs-sim" in proc.stdout
