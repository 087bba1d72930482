"""Correlation measurement and analytic RMS predictors.

Inner products, periodic/aperiodic cross-correlation profiles, closed-form
RMS predictions for extended cyclic-shift sets, the delay-Doppler ambiguity
surface, and the subcarrier-to-time-domain mapping.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .seqgen import FLOAT_FMT, ComplexSequence


def _samples(x) -> np.ndarray:
    if isinstance(x, ComplexSequence):
        return x.samples
    return np.asarray(x, dtype=np.complex128)


@dataclass(frozen=True)
class CorrelationProfile:
    """Lag-indexed normalized cross-correlation values with RMS summary."""

    kind: str  # "Periodic" | "Aperiodic"
    lags: np.ndarray
    values: np.ndarray
    rms: float


@dataclass(frozen=True)
class RmsPrediction:
    case_id: "RmsCase"
    value: float
    inputs: tuple[int, int, int]  # (n, q1, q2)


@dataclass(frozen=True)
class AmbiguitySurface:
    """|A(n, k)| over a delay x frequency-hypothesis grid."""

    magnitudes: np.ndarray  # (n_delays, n_hypotheses)
    hypotheses: np.ndarray  # Hz
    sample_rate: float  # Hz
    peak: tuple[int, int, float]  # (delay index, hypothesis index, magnitude)

    @property
    def peak_delay(self) -> int:
        return self.peak[0]

    @property
    def peak_freq_hz(self) -> float:
        return float(self.hypotheses[self.peak[1]])

    @property
    def peak_magnitude(self) -> float:
        return self.peak[2]


def inner_product(a, b) -> complex:
    """Unnormalized inner product sum(a[n] * conj(b[n]))."""
    sa, sb = _samples(a), _samples(b)
    if sa.size != sb.size:
        raise ValueError(f"length mismatch: {sa.size} vs {sb.size}")
    return complex(np.sum(sa * np.conj(sb)))


def periodic_xcorr(a, b) -> CorrelationProfile:
    """Normalized periodic cross-correlation over lags 0..N-1.

    C(tau) = (1/N) sum_n a[n] conj(b[(n - tau) mod N]).
    """
    sa, sb = _samples(a), _samples(b)
    n = sa.size
    if n != sb.size:
        raise ValueError(f"length mismatch: {n} vs {sb.size}")
    # DFT over tau of the unnormalized correlation is FFT(a) * conj(FFT(b));
    # the fast path is checked against the brute-force sum in the test suite.
    values = np.fft.ifft(np.fft.fft(sa) * np.conj(np.fft.fft(sb))) / n
    rms = float(np.sqrt(np.mean(np.abs(values) ** 2)))
    return CorrelationProfile("Periodic", np.arange(n), values, rms)


def _periodic_brute(a, b) -> np.ndarray:
    sa, sb = _samples(a), _samples(b)
    n = sa.size
    return np.array(
        [np.sum(sa * np.conj(np.roll(sb, tau))) / n for tau in range(n)]
    )


def aperiodic_xcorr(a, b) -> CorrelationProfile:
    """Normalized aperiodic cross-correlation over lags -(N-1)..N-1.

    C(tau) = (1/N) sum_{n=0}^{N-1-tau} a[n + tau] conj(b[n]) for tau >= 0,
    with C(-tau) the conjugate of the swapped-argument value.
    """
    sa, sb = _samples(a), _samples(b)
    n = sa.size
    if n != sb.size:
        raise ValueError(f"length mismatch: {n} vs {sb.size}")
    # np.correlate(a, b, "full")[k] = sum_n a[n + k - (N-1)] conj(b[n]).
    values = np.correlate(sa, sb, mode="full") / n
    lags = np.arange(-(n - 1), n)
    rms = float(np.sqrt(np.mean(np.abs(values) ** 2)))
    return CorrelationProfile("Aperiodic", lags, values, rms)


def _aperiodic_brute(a, b) -> np.ndarray:
    sa, sb = _samples(a), _samples(b)
    n = sa.size
    out = np.zeros(2 * n - 1, dtype=np.complex128)
    for tau in range(n):
        out[n - 1 + tau] = np.sum(sa[tau:] * np.conj(sb[: n - tau])) / n
    for tau in range(1, n):
        out[n - 1 - tau] = np.conj(np.sum(sb[tau:] * np.conj(sa[: n - tau]))) / n
    return out


class RmsCase(Enum):
    PERIODIC_CASE1 = "periodic_case1"  # pi(i) != pi(j)
    PERIODIC_CASE2 = "periodic_case2"  # pi(i) == pi(j)
    APERIODIC_CASE1 = "aperiodic_case1"
    APERIODIC_CASE2 = "aperiodic_case2"


def predict_rms(case: RmsCase, n: int, q1: int, q2: int) -> RmsPrediction:
    """Closed-form RMS prediction for extended cyclic-shift pairs.

    Periodic cases use the random-phase approximation for nonzero lags;
    aperiodic cases return the square root of the expected mean square with
    P = Q2*N + Q1*(Q1 - Q2 - 1).
    """
    if n != q1 + q2:
        raise ValueError(f"inconsistent inputs: {q1} + {q2} != {n}")
    if case is RmsCase.PERIODIC_CASE1:
        value = np.sqrt((1 - 1 / n) / n)
    elif case is RmsCase.PERIODIC_CASE2:
        value = np.sqrt((1 - 1 / n + (q2 / n) ** 2) / n)
    else:
        p = q2 * n + q1 * (q1 - q2 - 1)
        ms = 2 * p
        if case is RmsCase.APERIODIC_CASE2:
            ms += q2 ** 2
        value = np.sqrt(ms / ((2 * n - 1) * n ** 2))
    return RmsPrediction(case, float(value), (n, q1, q2))


def time_domain(freq_seq: ComplexSequence, idft_length: int) -> ComplexSequence:
    """Inverse DFT with 1/N normalization, sequence mapped to the lowest bins.

    A recorded cyclic-shift provenance is applied modulo the IDFT length, so
    the frequency-shift / time-ramp duality holds exactly for any IDFT length
    (a shift wrapped modulo the shorter sequence length would break it).
    """
    q = freq_seq.length
    if idft_length < q:
        raise ValueError(f"idft_length {idft_length} < sequence length {q}")
    shift = freq_seq.provenance.get("shift", 0)
    base = np.roll(freq_seq.samples, -shift) if shift else freq_seq.samples
    spectrum = np.zeros(idft_length, dtype=np.complex128)
    spectrum[:q] = base
    if shift:
        spectrum = np.roll(spectrum, shift)
    prov = dict(freq_seq.provenance)
    prov.update({"domain": "time", "idft_length": idft_length})
    return ComplexSequence(np.fft.ifft(spectrum), freq_seq.family, prov)


def ambiguity(ref, rx, hypotheses_hz, sample_rate_hz: float) -> AmbiguitySurface:
    """Delay-Doppler surface A(n, k) of a received vector against a reference.

    A(n, k) = (1/N) sum_l rx[(n + l) mod N] conj(ref[l])
              exp(-j 2 pi f_k l / sample_rate).
    """
    sr, sx = _samples(ref), _samples(rx)
    n = sr.size
    if n != sx.size:
        raise ValueError(f"length mismatch: {n} vs {sx.size}")
    hyp = np.asarray(hypotheses_hz, dtype=float)
    if hyp.size == 0:
        raise ValueError("hypothesis set must be non-empty")
    l = np.arange(n)
    # g_k[l] = conj(ref[l]) e^{-j 2 pi f_k l / fs}; the surface column for
    # hypothesis k is (1/N) IFFT(FFT(rx) * N * IFFT(g_k)).
    g = np.conj(sr)[None, :] * np.exp(-2j * np.pi * hyp[:, None] * l[None, :] / sample_rate_hz)
    ghat = np.fft.ifft(g, axis=1) * n
    x = np.fft.fft(sx)
    surface = np.fft.ifft(x[None, :] * ghat, axis=1) / n  # (K, N)
    mags = np.abs(surface).T  # (N, K)
    flat = int(np.argmax(mags))
    n_star, k_star = divmod(flat, hyp.size)
    return AmbiguitySurface(mags, hyp, float(sample_rate_hz),
                            (n_star, k_star, float(mags[n_star, k_star])))


def _ambiguity_brute(ref, rx, hypotheses_hz, sample_rate_hz: float) -> np.ndarray:
    sr, sx = _samples(ref), _samples(rx)
    n = sr.size
    hyp = np.asarray(hypotheses_hz, dtype=float)
    out = np.zeros((n, hyp.size))
    l = np.arange(n)
    for k, f in enumerate(hyp):
        tone = np.exp(-2j * np.pi * f * l / sample_rate_hz)
        for d in range(n):
            out[d, k] = abs(np.sum(sx[(d + l) % n] * np.conj(sr) * tone)) / n
    return out


def write_profile_csv(profile: CorrelationProfile, path) -> None:
    """CSV export: lag,re,im,abs."""
    with open(path, "w") as f:
        f.write("lag,re,im,abs\n")
        for lag, z in zip(profile.lags, profile.values):
            f.write(
                f"{lag},{FLOAT_FMT % z.real},{FLOAT_FMT % z.imag},{FLOAT_FMT % abs(z)}\n"
            )


def write_surface_csv(surface: AmbiguitySurface, path) -> None:
    """CSV export: delay,f_hz,magnitude."""
    with open(path, "w") as f:
        f.write("delay,f_hz,magnitude\n")
        for d in range(surface.magnitudes.shape[0]):
            for k, f_hz in enumerate(surface.hypotheses):
                f.write(
                    f"{d},{FLOAT_FMT % f_hz},{FLOAT_FMT % surface.magnitudes[d, k]}\n"
                )
