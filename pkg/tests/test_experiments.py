import io
import math

import numpy as np
import pytest

from irs_practical.channel import trial_rng
from irs_practical.experiments import (
    CSV_HEADER,
    PRESETS,
    ExperimentConfig,
    init_phases,
    preset,
    run_experiment,
    write_csv,
)


def test_init_phases_are_max_amplitude_endpoints():
    th = init_phases(trial_rng(3, 0, 1), 100)
    assert np.all(th == -math.pi)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(sweep="x")
    with pytest.raises(ValueError):
        ExperimentConfig(schemes=("bogus",))
    with pytest.raises(ValueError):
        preset("fig9")


def test_presets():
    assert preset("fig4").values == (400.0, 425.0, 450.0, 470.0, 485.0, 495.0, 498.0)
    assert preset("fig5").point(80) == (80, 498.0)
    cfg = preset("fig6")
    assert "practical_discrete_b2" in cfg.all_schemes and "ideal_discrete_b3" in cfg.all_schemes
    assert set(PRESETS) == {"fig4", "fig5", "fig6"}


def small(**kw):
    base = dict(trials=12, values=(470.0, 498.0), N=8)
    base.update(kw)
    return ExperimentConfig(**base)


def test_thread_count_does_not_change_results(monkeypatch):
    import irs_practical.experiments as ex

    monkeypatch.setattr(ex, "CHUNK", 5)
    a = run_experiment(small(), threads=1)
    b = run_experiment(small(), threads=3)
    for k in a.rates:
        assert np.array_equal(a.rates[k], b.rates[k])


def test_chunking_does_not_change_results(monkeypatch):
    import irs_practical.experiments as ex

    a = run_experiment(small(), threads=1)
    monkeypatch.setattr(ex, "CHUNK", 5)
    b = run_experiment(small(), threads=1)
    for k in a.rates:
        assert np.array_equal(a.rates[k], b.rates[k])


def test_trial_prefix_is_stable():
    a = run_experiment(small(trials=6))
    b = run_experiment(small(trials=12))
    for k in a.rates:
        assert np.array_equal(a.rates[k], b.rates[k][:6])


def test_csv_layout():
    res = run_experiment(small(trials=3))
    buf = io.StringIO()
    write_csv(res.rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 2 * 5
    first = lines[1].split(",")
    assert first[0] == "d" and first[1] == "470.0" and first[5] == "3" and first[6] == "7"
    # full round-trip precision
    assert float(first[3]) == res.rows[0].mean_rate


def test_single_trial_has_nan_stderr():
    res = run_experiment(small(trials=1, values=(498.0,)))
    assert all(math.isnan(r.stderr) for r in res.rows)


def test_n_sweep_and_b_sweep():
    res = run_experiment(ExperimentConfig(sweep="N", values=(4, 6), trials=2))
    assert [r.sweep_value for r in res.rows[::5]] == [4, 6]
    assert all(r.sweep_var == "N" for r in res.rows)
    res = run_experiment(ExperimentConfig(sweep="b", values=(498.0,), bits=(1,), trials=2, N=6,
                                          schemes=("practical_quadratic",)))
    assert [r.scheme for r in res.rows] == ["practical_quadratic", "practical_discrete_b1", "ideal_discrete_b1"]


def test_plot_writes_svg(tmp_path):
    pytest.importorskip("matplotlib")
    from irs_practical.experiments import plot_result

    res = run_experiment(small(trials=2))
    out = tmp_path / "rates.svg"
    plot_result(res, str(out))
    assert out.read_text().lstrip().startswith("<?xml")
