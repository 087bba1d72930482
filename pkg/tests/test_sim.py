import csv

import numpy as np
import pytest

from cazackit import extend, numtheory as nt, sim


def goldbach_set(split=(113, 7), n=120, count=None, family="Bjorck"):
    g = nt.GoldbachSplit(split, n)
    plan = extend.ExtensionPlan(n, g, "CyclicShift", count or max(split))
    return extend.extend_even(plan, extend.default_bases(g, family))


def scenario(**kw):
    base = dict(
        name="t", candidates=goldbach_set(), scs_hz=15e3,
        sample_rate_hz=1.92e6, carrier_hz=2e9, doppler_range_hz=(-1e3, 1e3),
        hypotheses_hz=tuple(np.arange(-2e3, 2e3 + 1, 500.0)),
        sinr_db=(0.0,), trials=50, interferers=0, seed=3,
        delay_window=8, search_window=9)
    base.update(kw)
    return sim.SimScenario(**base)


def test_scenario_validation():
    with pytest.raises(ValueError):
        scenario(hypotheses_hz=(500.0, 0.0))       # unsorted
    with pytest.raises(ValueError):
        scenario(sample_rate_hz=1.0e6)             # non-integer FFT length
    with pytest.raises(ValueError):
        scenario(interferers=200)                  # more than pool size
    with pytest.raises(ValueError):
        scenario(search_window=4, delay_window=8)  # window shorter than draws
    assert scenario().fft_length == 128


def test_time_reference_unit_power():
    s = goldbach_set(count=3)
    for col in s.columns:
        x = sim.time_reference(col, 128)
        assert np.mean(np.abs(x) ** 2) == pytest.approx(1.0)
        assert x.size == 128


def test_assignment_pool():
    pool = sim.assignment_pool(goldbach_set((113, 7)), 14)
    assert len(pool) == 14
    assert len(set(pool)) == 14
    assert pool[:7] == [0, 16, 32, 48, 64, 80, 96]  # orthogonal subset first
    pool19 = sim.assignment_pool(goldbach_set((101, 19), count=101), 14)
    assert pool19 == [5 * k for k in range(14)]
    rep = sim.assignment_pool(
        extend.repetition_set(113, 120, 113), 14)
    assert rep == [8 * k for k in range(14)]


def test_synthesize_and_detect_high_snr():
    sc = scenario(sinr_db=(30.0,))
    rng = np.random.default_rng(0)
    # tx_column indexes the pool; with no interferers the pool is [0]
    rx = sim.synthesize_rx(sc, tx_column=0, true_delay=5.0,
                           true_doppler_hz=500.0, sinr_db=30.0, rng=rng)
    assert rx.size == 128
    out = sim.detect(rx, sc.candidates, sc.hypotheses_hz,
                     sim.DetectionThreshold(0.1, (0.1, 30.0)),
                     sc.sample_rate_hz, true_delay=5.0, true_freq_hz=500.0)
    assert out.detected
    assert out.identified_column == 0
    assert abs(out.est_delay_samples - 5.0) <= 1.0
    assert abs(out.est_freq_hz - 500.0) <= 500.0


def test_calibrate_threshold():
    sc = scenario(calib_trials=2000)
    with pytest.raises(ValueError):
        sim.calibrate_threshold(sc, 1e-3, -5.0, trials=2000)  # < 10 events
    th = sim.calibrate_threshold(sc, 0.05, -5.0, trials=2000)
    assert th.gamma > 0
    loose = sim.calibrate_threshold(sc, 0.5, -5.0, trials=2000)
    assert loose.gamma < th.gamma  # looser target, lower threshold


def test_measure_pfa_tracks_target():
    sc = scenario()
    th = sim.calibrate_threshold(sc, 0.05, -5.0, trials=4000)
    pfa = sim.measure_pfa(sc, th, sinr_db=-5.0, trials=4000)
    assert pfa == pytest.approx(0.05, abs=0.02)


def test_run_campaign_shapes_and_determinism():
    sc = scenario(sinr_db=(-5.0, 5.0), trials=100, calib_trials=2000,
                  gamma=0.3)
    r1 = sim.run_campaign(sc, keep_outcomes=True)
    r2 = sim.run_campaign(sc)
    assert [p.pd for p in r1.points] == [p.pd for p in r2.points]
    assert [p.time_rmse_s for p in r1.points] == [p.time_rmse_s for p in r2.points]
    assert len(r1.points) == 2
    assert len(r1.outcomes[0]) == 100
    for p in r1.points:
        assert 0.0 <= p.pd <= 1.0
        assert p.trials == 100
    # Pd improves with SINR on this easy scenario
    assert r1.points[1].pd >= r1.points[0].pd


def test_campaign_csv(tmp_path):
    sc = scenario(trials=50, gamma=0.3)
    res = sim.run_campaign(sc, keep_outcomes=True)
    cpath = tmp_path / "campaign.csv"
    sim.write_campaign_csv(res, cpath)
    rows = list(csv.DictReader(open(cpath)))
    assert list(rows[0]) == ["scenario", "family", "extension", "sinr_db",
                             "pd", "time_rmse_s", "freq_rmse_hz", "trials",
                             "seed"]
    assert rows[0]["trials"] == "50"
    tpath = tmp_path / "trials.csv"
    sim.write_trials_csv(res.outcomes[0], tpath)
    trows = list(csv.DictReader(open(tpath)))
    assert list(trows[0]) == ["trial", "detected", "true_delay", "est_delay",
                              "true_f", "est_f", "peak", "column"]
    assert len(trows) == 50


def test_mitigate_subset():
    s = goldbach_set()
    sub = sim.mitigate_subset(s, max_doppler_hz=40e3, scs_hz=15e3)
    # stride = 2*ceil(40/15) + 1 = 7
    assert sub.meta["subset_stride"] == 7
    assert [rec[0] for rec in sub.assignment[:3]] == [0, 7, 14]
    same = sim.mitigate_subset(s, max_doppler_hz=0.0, scs_hz=15e3)
    assert same.n_columns == s.n_columns  # stride 1 keeps everything
    with pytest.raises(ValueError):
        sim.mitigate_subset(goldbach_set(count=5), 40e3, 15e3)


def test_mitigate_coarse_recovers_residual():
    s = extend.select_columns(goldbach_set(), [0, 1, 2])
    fs, scs = 1.92e6, 15e3
    k = np.arange(128)
    # column 2 with -28 kHz Doppler, coarse hypothesis -30 kHz
    rx = sim.time_reference(s.columns[2], 128) * np.exp(
        2j * np.pi * -28e3 * k / fs)
    out = sim.mitigate_coarse(rx, s, coarse_doppler_hz=-30e3, scs_hz=scs,
                              sample_rate_hz=fs,
                              threshold=sim.DetectionThreshold(0.6, (0.0, 0.0)))
    assert out.detected
    assert out.identified_column == 2
    assert out.est_freq_hz == pytest.approx(2e3)  # residual after coarse removal
    assert out.peak_magnitude > 0.99
