# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The tsgan Authors

import math

import numpy as np
import pytest

import tsgan


def test_synth_catchment_is_seeded():
    a = tsgan.synth_catchment(length=500, seed=4)
    b = tsgan.synth_catchment(length=500, seed=4)
    c = tsgan.synth_catchment(length=500, seed=5)
    assert set(a) == {"timestamp", "precipitation_mm", "temperature_c", "flow"}
    assert a["flow"].shape == (500,)
    np.testing.assert_array_equal(a["flow"], b["flow"])
    assert not np.array_equal(a["flow"], c["flow"])
    assert np.all(np.diff(a["timestamp"]) == 300)
    assert np.all(a["precipitation_mm"] >= 0)


def test_make_windows_count_and_content():
    series = np.arange(60, dtype=float).reshape(30, 2)
    w = tsgan.make_windows(series)
    assert w.shape == (30 - 24 + 1, 24, 2)
    np.testing.assert_array_equal(w[3], series[3:27])


def test_metric_analytics():
    rng = np.random.default_rng(0)
    x = rng.normal(size=2000)
    assert tsgan.jsd(x, x) == pytest.approx(0.0, abs=1e-12)
    assert tsgan.jsd(rng.uniform(0, 1, 500), rng.uniform(5, 6, 500)) == pytest.approx(math.log(2), abs=1e-6)
    # P = (1/2, 1/2), Q = (1/4, 3/4).
    assert tsgan.kld([0.0, 1.0], [0.0, 1.0, 1.0, 1.0], bins=2, lo=0.0, hi=1.0) == pytest.approx(0.1438, abs=1e-4)
    assert tsgan.mae([1.0, 2.0], [2.0, 4.0]) == pytest.approx(1.5)


def test_peak_event_metrics_partition():
    obs = np.arange(100, dtype=float)
    m = tsgan.peak_event_metrics(obs + 1.0, obs, quantile=0.9)
    assert m["peak_count"] + m["dry_count"] == 100
    assert m["mae"] == pytest.approx(1.0)
    assert m["peak_bias"] == pytest.approx(1.0)


def test_gradcheck_within_tolerance():
    for name, (err, tol) in tsgan.gradcheck(cases=3, seed=1).items():
        assert err < tol, name


def test_halving_plan():
    p = tsgan.halving_plan(9, 2, 4500)
    assert p["entrants"] == [9, 3]
    assert p["final_survivors"] == 1
    assert p["base_steps"] == 300
    assert p["steps"] == [300, 900]
    with pytest.raises(tsgan.ConfigError):
        tsgan.halving_plan(9, 2, 10)


def test_config_errors():
    text = tsgan.config_text({"gan.steps": "12", "seed": "3"})
    assert "gan.steps = 12\n" in text
    with pytest.raises(tsgan.ConfigError):
        tsgan.config_text({"no.such.key": "1"})
    with pytest.raises(tsgan.ConfigError):
        tsgan.config_text({"gan.generator_layers": "9"})


SMALL = {
    "seed": "2",
    "data.length": "1200",
    "data.storm_start_probability": "0.02",
    "split.train_windows": "800",
    "split.test_windows": "300",
    "gan.steps": "4",
    "gan.generator_layers": "1",
    "gan.generator_hidden": "32",
    "gan.critic_layers": "1",
    "gan.critic_hidden": "32",
    "gan.eval_every": "2",
    "gan.eval_samples": "64",
}


def test_train_gan_and_checkpoint(tmp_path):
    r = tsgan.run_command("train-gan", SMALL, tmp_path)
    assert r["exit_code"] == 0
    names = [a[0] for a in r["artifacts"]]
    assert "gan.ckpt" in names
    ckpt = tsgan.load_checkpoint(tmp_path / "gan.ckpt")
    assert ckpt["meta"]["kind"] == "gan"
    assert ckpt["meta"]["generator_steps"] == "4"
    assert "gan.steps = 4\n" in ckpt["config"]
    assert all(np.all(np.isfinite(t)) for t in ckpt["tensors"].values())

    again = tsgan.run_command("train-gan", SMALL, tmp_path / "again")
    assert (tmp_path / "gan.ckpt").read_bytes() == (tmp_path / "again" / "gan.ckpt").read_bytes()


def test_missing_output_directory():
    with pytest.raises(tsgan.ConfigError):
        tsgan.run_command("synth-data", SMALL)
    with pytest.raises(tsgan.FormatError):
        tsgan.load_checkpoint(__file__)
