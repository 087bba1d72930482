"""Monte-Carlo link simulator: detection, time/frequency-offset estimation,
and Doppler-misidentification mitigation.

Signal model (single-tap channel): the frequency-domain column is mapped to
an L-point IDFT grid (L = sample_rate / scs), delayed cyclically by a real
number of samples, multiplied by a continuous Doppler phase ramp, and summed
with interference plus circularly-symmetric white Gaussian noise.

Interference follows the TN overlap model: a fixed population of users is
assigned columns orthogonal-subset-first, all arriving with complete overlap
(common delay, random carrier phases), so the coupling between users is the
zero-lag inner product of their columns.  Detection is per-user: the receiver
correlates against the target user's column only, across delays and frequency
hypotheses; a false alarm is a suprathreshold peak when the target is silent
but the other users still transmit.

Signal power is fixed at 1; with interferers present the noise power is fixed
by a reference SNR and only the interference power varies across SINR, while
interference-free scenarios sweep the noise power directly (SINR == SNR).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import corr
from .seqgen import FLOAT_FMT, SequenceSet

_CHUNK = 256  # fixed batch size; part of the deterministic stream layout
_STREAM_CALIB = 0xCA11B  # seed-stream tags keep calibration / pfa / trial draws disjoint
_STREAM_PFA = 0x0F0FA


@dataclass(frozen=True)
class SimScenario:
    """Fully-specified Monte-Carlo campaign configuration."""

    name: str
    candidates: SequenceSet
    scs_hz: float
    sample_rate_hz: float
    carrier_hz: float
    doppler_range_hz: tuple[float, float]
    hypotheses_hz: tuple[float, ...]
    sinr_db: tuple[float, ...]
    trials: int
    interferers: int
    seed: int
    delay_window: int = 16          # true delays drawn uniformly from [0, delay_window)
    search_window: int | None = None  # detector delay search span; None -> all L delays
    delay_tol: float = 1.0          # samples; detection counts as correct within this
    snr_ref_db: float = 10.0        # fixes noise power when interferers are present
    overlap: str = "complete"       # interferer delays: "complete" (= target's),
                                    # "zero" (synchronized), "uniform" cyclic offsets
    fractional_delay: bool = True   # draw continuous delays (quantization floor realism)
    gamma: float | None = None      # detection threshold; None -> calibrate per campaign
    calib_trials: int = 20000
    calib_sinr_db: float = -5.0
    target_pfa: float = 1e-3

    def __post_init__(self):
        hyp = tuple(float(h) for h in self.hypotheses_hz)
        if list(hyp) != sorted(hyp):
            raise ValueError("hypotheses must be sorted ascending")
        if not all(math.isfinite(h) for h in hyp):
            raise ValueError("hypotheses must be finite")
        object.__setattr__(self, "hypotheses_hz", hyp)
        object.__setattr__(self, "sinr_db", tuple(float(s) for s in self.sinr_db))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.interferers < len(self.candidates.columns):
            raise ValueError("interferer count must fit inside the candidate set")
        if self.overlap not in ("complete", "zero", "uniform"):
            raise ValueError(f"unknown overlap policy {self.overlap!r}")
        lo, hi = self.doppler_range_hz
        if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
            raise ValueError("doppler_range_hz must be a finite (min, max) pair")
        n = self.candidates.columns[0].length
        fft_len = self.sample_rate_hz / self.scs_hz
        if abs(fft_len - round(fft_len)) > 1e-9 or round(fft_len) < n:
            raise ValueError("sample_rate_hz must be an integer multiple of scs_hz, >= n bins")
        if not 0 < self.delay_window <= round(fft_len):
            raise ValueError("delay_window must lie in (0, fft length]")
        if self.search_window is not None and not (
                self.delay_window <= self.search_window <= round(fft_len)):
            raise ValueError("search_window must cover the delay window")

    @property
    def fft_length(self) -> int:
        return int(round(self.sample_rate_hz / self.scs_hz))


@dataclass(frozen=True)
class TrialOutcome:
    detected: bool
    est_delay_samples: int
    est_freq_hz: float
    true_delay_samples: float
    true_freq_hz: float
    peak_magnitude: float
    identified_column: int


@dataclass(frozen=True)
class DetectionThreshold:
    gamma: float
    calibration: tuple[float, float]  # (target pfa, calibration SINR dB)

    def __post_init__(self):
        if not self.gamma >= 0:
            raise ValueError("gamma must be >= 0")


@dataclass(frozen=True)
class CampaignPoint:
    sinr_db: float
    pd: float
    time_rmse_s: float
    freq_rmse_hz: float
    trials: int
    pd_se: float
    time_rmse_se_s: float
    freq_rmse_se_hz: float


@dataclass(frozen=True)
class CampaignResult:
    scenario: SimScenario
    threshold: DetectionThreshold
    points: tuple[CampaignPoint, ...]
    outcomes: tuple[tuple[TrialOutcome, ...], ...] = field(repr=False, default=())


def time_reference(column, fft_length: int) -> np.ndarray:
    """Unit-average-power time-domain waveform of one frequency-domain column."""
    x = corr.time_domain(column, fft_length).samples
    return x / np.sqrt(np.mean(np.abs(x) ** 2))


def assignment_pool(sset: SequenceSet, users: int) -> list[int]:
    """Column indices for a fixed user population, orthogonal-subset-first.

    Goldbach cyclic-shift sets fill the evenly-spaced orthogonal subset first
    and then reuse adjacent shifts round by round; sets without an orthogonal
    subset (repetition baseline, single-part meta) spread users evenly across
    the available shifts.
    """
    n_cols = len(sset.columns)
    if not 1 <= users <= n_cols:
        raise ValueError(f"user count {users} outside [1, {n_cols}]")
    split = tuple(sset.meta.get("split", ()))
    if len(split) >= 2 and sset.kind == "CyclicShift":
        q1, q2 = split[0], split[1]
        stride = q1 // q2
        if stride % q2 == 0:
            stride += 1
        pool: list[int] = []
        step = max(1, stride // 2)  # reuse rounds sit midway between subset shifts
        for r in range(2 * stride):
            for k in range(q2):
                idx = k * stride + r * step
                if idx < n_cols and idx not in pool:
                    pool.append(idx)
                if len(pool) == users:
                    return pool
        raise ValueError("candidate set too small for the requested population")
    stride = max(1, n_cols // users)
    return [k * stride for k in range(users)]


class _Workspace:
    """Precomputed time references and ambiguity FFT factors for one scenario."""

    def __init__(self, scenario: SimScenario):
        self.scenario = scenario
        L = scenario.fft_length
        self.L = L
        self.pool = assignment_pool(scenario.candidates, scenario.interferers + 1)
        self.refs = np.stack(
            [time_reference(scenario.candidates.columns[i], L) for i in self.pool])
        k = np.arange(L)
        hyp = np.asarray(scenario.hypotheses_hz)
        tone = np.exp(-2j * np.pi * hyp[:, None] * k[None, :] / scenario.sample_rate_hz)
        g = np.conj(self.refs)[:, None, :] * tone[None, :, :]  # (U, K, L)
        self.ghat = np.fft.ifft(g, axis=-1) * L
        self.n_hyp = hyp.size
        self.search = L if scenario.search_window is None else scenario.search_window

    def peak_stats(self, rx_block: np.ndarray, tx_block: np.ndarray):
        """Per-trial global ambiguity peak against each trial's target column.

        Returns (peak magnitude, delay, hypothesis index) arrays.  Argmax is
        delay-major then hypothesis, the detector's deterministic tie-break.
        """
        L = self.L
        x = np.fft.fft(rx_block, axis=-1)  # (B, L)
        surf = np.fft.ifft(x[:, None, :] * self.ghat[tx_block], axis=-1) / L
        mags = np.abs(np.swapaxes(surf, 1, 2))[:, :self.search, :]  # (B, D, K)
        flat = mags.reshape(mags.shape[0], -1)
        arg = np.argmax(flat, axis=1)
        peak = flat[np.arange(flat.shape[0]), arg]
        delay, hyp = np.divmod(arg, self.n_hyp)
        return peak, delay, hyp


def _delay_ramp(L: int, delay: float) -> np.ndarray:
    freqs = np.fft.fftfreq(L)
    return np.exp(-2j * np.pi * freqs * delay)


def _apply_channel(ref: np.ndarray, delay: float, doppler_hz: float,
                   sample_rate_hz: float) -> np.ndarray:
    L = ref.size
    if delay:
        ref = np.fft.ifft(np.fft.fft(ref) * _delay_ramp(L, delay))
    if doppler_hz:
        ref = ref * np.exp(2j * np.pi * doppler_hz * np.arange(L) / sample_rate_hz)
    return ref


def _powers(scenario: SimScenario, sinr_db: float) -> tuple[float, float]:
    """(noise power, total interference power) for unit signal power."""
    lin = 10.0 ** (sinr_db / 10.0)
    if scenario.interferers == 0:
        return 1.0 / lin, 0.0
    p_noise = 10.0 ** (-scenario.snr_ref_db / 10.0)
    return p_noise, max(1.0 / lin - p_noise, 0.0)


def _interference(ws: _Workspace, tx_slot: int, common_delay: float,
                  p_int: float, rng) -> np.ndarray:
    """Sum of the other active users' waveforms (random carrier phases)."""
    sc = ws.scenario
    out = np.zeros(ws.L, dtype=complex)
    if sc.interferers == 0 or p_int <= 0:
        return out
    amp = math.sqrt(p_int / sc.interferers)
    for slot in range(len(ws.pool)):
        if slot == tx_slot:
            continue
        if sc.overlap == "complete":
            delay = common_delay
        elif sc.overlap == "zero":
            delay = 0.0
        else:
            delay = float(rng.integers(ws.L))
        phase = np.exp(2j * np.pi * rng.uniform())
        out += amp * phase * _apply_channel(ws.refs[slot], delay, 0.0,
                                            sc.sample_rate_hz)
    return out


def _synthesize(ws: _Workspace, tx_slot: int, true_delay: float,
                true_doppler_hz: float, sinr_db: float, rng,
                signal: bool = True) -> np.ndarray:
    sc = ws.scenario
    p_noise, p_int = _powers(sc, sinr_db)
    rx = _interference(ws, tx_slot, true_delay, p_int, rng)
    if signal:
        rx = rx + _apply_channel(ws.refs[tx_slot], true_delay, true_doppler_hz,
                                 sc.sample_rate_hz)
    noise = rng.standard_normal(ws.L) + 1j * rng.standard_normal(ws.L)
    return rx + np.sqrt(p_noise / 2.0) * noise


def synthesize_rx(scenario: SimScenario, tx_column: int, true_delay: float,
                  true_doppler_hz: float, sinr_db: float, rng) -> np.ndarray:
    """One received vector: delayed/Doppler-shifted reference + interference + noise.

    tx_column indexes the scenario's user pool (assignment_pool order).
    """
    return _synthesize(_Workspace(scenario), tx_column, true_delay,
                       true_doppler_hz, sinr_db, rng)


def detect(rx, candidates: SequenceSet, hypotheses_hz, threshold: DetectionThreshold,
           sample_rate_hz: float, true_delay: float = math.nan,
           true_freq_hz: float = math.nan) -> TrialOutcome:
    """Global peak search over (candidate, delay, hypothesis)."""
    rx = np.asarray(rx)
    hyp = np.asarray(hypotheses_hz, dtype=float)
    best = None
    for idx, col in enumerate(candidates.columns):
        ref = time_reference(col, rx.size)
        surf = corr.ambiguity(ref, rx, hyp, sample_rate_hz)
        if best is None or surf.peak_magnitude > best[0]:
            best = (surf.peak_magnitude, idx, surf.peak_delay, surf.peak_freq_hz)
    peak, col_idx, delay, freq = best
    return TrialOutcome(detected=bool(peak >= threshold.gamma),
                        est_delay_samples=int(delay), est_freq_hz=float(freq),
                        true_delay_samples=true_delay, true_freq_hz=true_freq_hz,
                        peak_magnitude=float(peak), identified_column=int(col_idx))


def _nosignal_peaks(ws: _Workspace, sinr_db: float, trials: int, seed_key) -> np.ndarray:
    """Peak statistic of target-silent trials (other users + noise only)."""
    sc = ws.scenario
    peaks = np.empty(trials)
    done = 0
    chunk_idx = 0
    while done < trials:
        b = min(_CHUNK, trials - done)
        rng = np.random.default_rng((sc.seed, *seed_key, chunk_idx))
        rx = np.empty((b, ws.L), dtype=complex)
        tx = np.empty(b, dtype=int)
        for t in range(b):
            tx[t] = rng.integers(len(ws.pool))
            delay = rng.uniform(0, sc.delay_window)
            rx[t] = _synthesize(ws, int(tx[t]), delay, 0.0, sinr_db, rng,
                                signal=False)
        peaks[done:done + b] = ws.peak_stats(rx, tx)[0]
        done += b
        chunk_idx += 1
    return peaks


def calibrate_threshold(scenario: SimScenario, target_pfa: float,
                        calib_sinr_db: float, trials: int,
                        stream: int = 0) -> DetectionThreshold:
    """Empirical (1 - pfa) quantile of the no-signal peak statistic."""
    if target_pfa <= 0 or target_pfa > 1:
        raise ValueError("target_pfa must lie in (0, 1]")
    if target_pfa * trials < 10:
        raise ValueError(f"{trials} trials cannot resolve pfa {target_pfa}")
    if target_pfa == 1.0:
        return DetectionThreshold(0.0, (target_pfa, calib_sinr_db))
    peaks = _nosignal_peaks(_Workspace(scenario), calib_sinr_db, trials,
                            (_STREAM_CALIB, stream))
    gamma = float(np.quantile(peaks, 1.0 - target_pfa))
    return DetectionThreshold(gamma, (target_pfa, calib_sinr_db))


def measure_pfa(scenario: SimScenario, threshold: DetectionThreshold,
                sinr_db: float, trials: int, stream: int = 1) -> float:
    """Empirical false-alarm rate on fresh no-signal trials."""
    peaks = _nosignal_peaks(_Workspace(scenario), sinr_db, trials,
                            (_STREAM_PFA, stream))
    return float(np.mean(peaks >= threshold.gamma))


def _circular_delay_error(est: np.ndarray, true: np.ndarray, L: int) -> np.ndarray:
    d = (est - true) % L
    return np.where(d >= L / 2, d - L, d)


def run_campaign(scenario: SimScenario, keep_outcomes: bool = False) -> CampaignResult:
    """Monte-Carlo sweep over the scenario's SINR grid.

    Per trial: a target user, delay and Doppler are drawn, the received vector
    synthesized and detected against the target's column.  Pd counts trials
    whose global peak clears the threshold within the delay tolerance; RMSE
    metrics aggregate every suprathreshold trial (wrong-peak trials count
    against the estimator).
    """
    ws = _Workspace(scenario)
    L = ws.L
    sc = scenario
    if sc.gamma is not None:
        threshold = DetectionThreshold(sc.gamma, (math.nan, math.nan))
    else:
        threshold = calibrate_threshold(sc, sc.target_pfa, sc.calib_sinr_db,
                                        sc.calib_trials)
    hyp = np.asarray(sc.hypotheses_hz)
    ts = 1.0 / sc.sample_rate_hz
    points = []
    all_outcomes = []
    for p_idx, sinr in enumerate(sc.sinr_db):
        tx = np.empty(sc.trials, dtype=int)
        true_d = np.empty(sc.trials)
        true_f = np.empty(sc.trials)
        rx = np.empty((sc.trials, L), dtype=complex)
        for t in range(sc.trials):
            rng = np.random.default_rng((sc.seed, p_idx, t))
            tx[t] = rng.integers(len(ws.pool))
            d = rng.uniform(0, sc.delay_window)
            true_d[t] = d if sc.fractional_delay else float(int(d))
            true_f[t] = rng.uniform(*sc.doppler_range_hz)
            rx[t] = _synthesize(ws, int(tx[t]), true_d[t], true_f[t], sinr, rng)
        peak = np.empty(sc.trials)
        delay = np.empty(sc.trials, dtype=int)
        hyp_idx = np.empty(sc.trials, dtype=int)
        for start in range(0, sc.trials, _CHUNK):
            sl = slice(start, min(start + _CHUNK, sc.trials))
            peak[sl], delay[sl], hyp_idx[sl] = ws.peak_stats(rx[sl], tx[sl])
        detected = peak >= threshold.gamma
        d_err = _circular_delay_error(delay.astype(float), true_d, L)
        f_err = hyp[hyp_idx] - true_f
        correct = detected & (np.abs(d_err) <= sc.delay_tol)
        pd = float(np.mean(correct))
        pd_se = math.sqrt(max(pd * (1 - pd), 1e-12) / sc.trials)
        if detected.any():
            t_sq = (d_err[detected] * ts) ** 2
            f_sq = f_err[detected] ** 2
            t_rmse = math.sqrt(float(np.mean(t_sq)))
            f_rmse = math.sqrt(float(np.mean(f_sq)))
            m = t_sq.size
            # delta method: se(RMSE) ~ std(err^2) / (2 RMSE sqrt(m))
            t_se = float(np.std(t_sq) / (2 * t_rmse * math.sqrt(m))) if t_rmse else 0.0
            f_se = float(np.std(f_sq) / (2 * f_rmse * math.sqrt(m))) if f_rmse else 0.0
        else:
            t_rmse = f_rmse = t_se = f_se = math.nan
        points.append(CampaignPoint(float(sinr), pd, t_rmse, f_rmse,
                                    sc.trials, pd_se, t_se, f_se))
        if keep_outcomes:
            all_outcomes.append(tuple(
                TrialOutcome(bool(detected[t]), int(delay[t]), float(hyp[hyp_idx[t]]),
                             float(true_d[t]), float(true_f[t]), float(peak[t]),
                             int(ws.pool[tx[t]]))
                for t in range(sc.trials)))
    return CampaignResult(sc, threshold, tuple(points),
                          tuple(all_outcomes) if keep_outcomes else ())


def mitigate_coarse(rx, candidates: SequenceSet, coarse_doppler_hz: float,
                    scs_hz: float, sample_rate_hz: float,
                    threshold: DetectionThreshold, step_hz: float = 500.0,
                    true_delay: float = math.nan,
                    true_freq_hz: float = math.nan) -> TrialOutcome:
    """Approach 1: compensate a coarse Doppler estimate, then search the
    narrowed residual grid [-scs/2, +scs/2].  est_freq_hz is the residual."""
    rx = np.asarray(rx)
    k = np.arange(rx.size)
    comp = rx * np.exp(-2j * np.pi * coarse_doppler_hz * k / sample_rate_hz)
    half = scs_hz / 2.0
    n_steps = int(round(half / step_hz))
    hyp = np.arange(-n_steps, n_steps + 1) * step_hz
    return detect(comp, candidates, hyp, threshold, sample_rate_hz,
                  true_delay=true_delay, true_freq_hz=true_freq_hz)


def mitigate_subset(sset: SequenceSet, max_doppler_hz: float,
                    scs_hz: float) -> SequenceSet:
    """Approach 2: keep long-shift indices spaced by stride
    S = 2 ceil(max_doppler / scs) + 1, so no two surviving shifts can be
    confused across the whole Doppler range."""
    if sset.kind != "CyclicShift":
        raise ValueError("subset mitigation applies to cyclic-shift sets")
    stride = 2 * math.ceil(max_doppler_hz / scs_hz) + 1
    if stride == 1:
        return sset
    n_cols = len(sset.columns)
    if stride >= n_cols:
        raise ValueError(f"stride {stride} leaves fewer than 2 of {n_cols} columns")
    keep = [i for i, rec in enumerate(sset.assignment) if rec[0] % stride == 0]
    meta = dict(sset.meta)
    meta["subset_stride"] = stride
    return SequenceSet(columns=tuple(sset.columns[i] for i in keep),
                       kind=sset.kind,
                       assignment=tuple(sset.assignment[i] for i in keep),
                       meta=meta)


def write_campaign_csv(result: CampaignResult, path) -> None:
    sc = result.scenario
    ext = sc.candidates.meta.get("extension", "")
    fam = sc.candidates.meta.get("family", "")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "family", "extension", "sinr_db", "pd",
                    "time_rmse_s", "freq_rmse_hz", "trials", "seed"])
        for p in result.points:
            w.writerow([sc.name, fam, ext,
                        FLOAT_FMT % p.sinr_db, FLOAT_FMT % p.pd,
                        FLOAT_FMT % p.time_rmse_s, FLOAT_FMT % p.freq_rmse_hz,
                        p.trials, sc.seed])


def write_trials_csv(outcomes, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "detected", "true_delay", "est_delay",
                    "true_f", "est_f", "peak", "column"])
        for i, o in enumerate(outcomes):
            w.writerow([i, int(o.detected),
                        FLOAT_FMT % o.true_delay_samples, o.est_delay_samples,
                        FLOAT_FMT % o.true_freq_hz, FLOAT_FMT % o.est_freq_hz,
                        FLOAT_FMT % o.peak_magnitude, o.identified_column])
