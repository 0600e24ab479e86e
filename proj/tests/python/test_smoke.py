import math

import numpy as np
import pytest

import debrisense as ds


def test_free_space_amplitude():
    expect = ds.SPEED_OF_LIGHT / (4 * math.pi * 3e11 * 5e5)
    assert ds.fspl_amplitude(3e11, 5e5) == pytest.approx(expect, rel=1e-14)


def test_geometry_and_losses():
    assert ds.incidence_angle(100, 100, 100) == pytest.approx(math.pi / 6)
    assert ds.diffraction_loss(10.0) == 0.0225
    assert ds.diffraction_loss(1.0) == pytest.approx(0.5 * math.exp(-0.95))
    total, terms, converged = ds.beckmann_series(1.0)
    assert converged and terms > 5
    assert total == pytest.approx(sum(1 / (math.factorial(m) * m) for m in range(1, 40)))


def test_fresnel_normal_incidence():
    te, tm = ds.fresnel_coefficients(1e11, 0.0, ds.Material.lossless(2.0))
    assert abs(te) == pytest.approx(1 / 3)
    assert abs(tm) == pytest.approx(1 / 3)
    assert abs(ds.wave_impedance(1e11, ds.Material.lossless(1.0))) == pytest.approx(376.73, abs=0.01)


def test_features_match_numpy():
    rng = np.random.default_rng(4)
    h = rng.normal(size=(4, 6)) + 1j * rng.normal(size=(4, 6))
    f = ds.extract_features(h)
    mag = np.abs(h).ravel()
    assert f["mean"] == pytest.approx(mag.mean(), rel=1e-12)
    assert f["var"] == pytest.approx(mag.var(), rel=1e-12)
    assert f["max"] == pytest.approx(mag.max())
    assert f["min"] == pytest.approx(mag.min())
    skew = ((mag - mag.mean()) ** 3).mean() / mag.var() ** 1.5
    assert f["skew"] == pytest.approx(skew, rel=1e-10)


def test_siso_link_against_q_function():
    ebn0 = 10 ** (4 / 10)
    ber, bits = ds.simulate_link([np.eye(1, dtype=complex)], 4 + 10 * math.log10(2), 100000, perfect_csi=True, seed=3)
    p = ds.q_function(math.sqrt(2 * ebn0))
    assert bits == 200000
    assert abs(ber - p) < 4 * math.sqrt(p * (1 - p) / bits)


def test_config_round_trip_and_errors():
    cfg = ds.ExperimentConfig.table(2)
    assert cfg.snr_db == [5, 10, 15, 20]
    again = ds.ExperimentConfig.from_ini(cfg.to_ini())
    assert again.to_ini() == cfg.to_ini()
    with pytest.raises(ds.ConfigError):
        ds.ExperimentConfig.from_ini("[campaign]\nbogus = 1\n")
    with pytest.raises(ds.ConfigError):
        ds.ExperimentConfig.table(4)
    with pytest.raises(ds.Error):
        ds.default_material("plastic")


def test_small_campaign_is_deterministic():
    cfg = ds.ExperimentConfig()
    cfg.frequencies_hz = [5e12]
    cfg.samples_per_condition = 30
    metrics, csv = ds.run_campaign(cfg, seed=2)
    assert len(metrics) == 1
    m = metrics[0]
    assert 0.0 <= m["mean_ber"] <= 0.5
    assert 0.0 <= m["det_acc"] <= 1.0
    lines = csv.strip().split("\n")
    assert lines[0] == ds.SAMPLE_CSV_HEADER
    assert len(lines) == 31
    assert ds.run_campaign(cfg, seed=2)[1] == csv
