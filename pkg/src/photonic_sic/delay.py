"""Rough delay by cross-correlation, segmented search and amplitude estimation.

A segmented reference frame splits one looping reference waveform into
``U`` equal segments. Each usable segment carries its own candidate
(delays, amplitudes); guard segments are muted. One capture of the IF
output therefore scores every candidate at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
from scipy import signal as sps
from scipy.special import i0

from .errors import ConfigurationError, EstimationError
from .metrics import BandSpec
from .signals import RealSignal, analytic, fractional_delay, resample

__all__ = [
    "CorrelationResult",
    "Candidate",
    "SegmentPlan",
    "ResidualEvaluator",
    "FractionalDelayBank",
    "xcorr_rough_delay",
    "separated_rough_delay",
    "segment_powers",
    "build_segmented_reference",
    "segmented_search",
    "SearchResult",
    "amplitude_from_power",
    "quantize_delay",
    "upsampled_delay",
]


@dataclass(frozen=True)
class CorrelationResult:
    lags_s: np.ndarray
    values: np.ndarray
    peak_lags_s: list
    peak_heights: list = field(default_factory=list)

    @property
    def rough_delay_s(self):
        """Separation of the two strongest peaks (0 for a single merged peak)."""
        if not self.peak_lags_s:
            raise EstimationError("no correlation peaks")
        if len(self.peak_lags_s) == 1:
            return 0.0
        return abs(self.peak_lags_s[0] - self.peak_lags_s[1])


def xcorr_rough_delay(
    known_tx: RealSignal,
    captured: RealSignal,
    symbol_period_s: float = 1e-9,
    mode: str = "envelope",
    threshold: float = 0.3,
    if_hz: float | None = None,
) -> CorrelationResult:
    """Circular normalised cross-correlation of a known IF transmit record with a capture.

    Peaks are located on the correlation envelope (magnitude of its analytic
    signal), keeping those above ``threshold`` times the maximum and at least
    half a symbol period apart. With ``mode="carrier"`` each peak lag is then
    moved to the largest raw ``|R|`` sample within a quarter IF period, which
    is what peak-picking on the real IF correlation returns.
    """
    if known_tx.sample_rate_hz != captured.sample_rate_hz:
        raise ConfigurationError("xcorr inputs must share a sample rate")
    if len(known_tx) != len(captured):
        raise ConfigurationError("xcorr inputs must share a length")
    fs = captured.sample_rate_hz
    n = len(captured)
    a = captured.samples
    b = known_tx.samples
    r = np.fft.irfft(np.fft.rfft(a) * np.conj(np.fft.rfft(b)), n)
    norm = np.linalg.norm(a) * np.linalg.norm(b)
    if norm == 0:
        raise EstimationError("zero-energy correlation input")
    r = np.fft.fftshift(r / norm)
    lags = (np.arange(n) - n // 2) / fs
    env = np.abs(analytic(r))
    distance = max(1, int(round(0.5 * symbol_period_s * fs)))
    peaks, props = sps.find_peaks(env, height=threshold * env.max(), distance=distance)
    if peaks.size == 0:
        raise EstimationError("no correlation peak above threshold")
    order = np.argsort(-props["peak_heights"], kind="stable")
    peaks = peaks[order]
    heights = props["peak_heights"][order]
    if mode == "carrier":
        if if_hz is None:
            raise ValueError("carrier mode needs if_hz")
        w = max(1, int(round(fs / (4 * if_hz))))
        refined = []
        for p in peaks:
            lo, hi = max(0, p - w), min(n, p + w + 1)
            refined.append(lo + int(np.argmax(np.abs(r[lo:hi]))))
        peaks = np.array(refined)
    elif mode != "envelope":
        raise ValueError(f"unknown mode {mode!r}")
    return CorrelationResult(lags, r, [float(lags[p]) for p in peaks], [float(h) for h in heights])


def separated_rough_delay(
    known_tx: RealSignal,
    reference_capture: RealSignal,
    si_capture: RealSignal,
    symbol_period_s: float = 1e-9,
    mode: str = "envelope",
    threshold: float = 0.3,
    if_hz: float | None = None,
) -> CorrelationResult:
    """Peak separation from two captures: reference alone and SI alone.

    Same measurement as ``xcorr_rough_delay`` on a combined capture, but the
    two correlation lobes cannot overlap, which matters once the lobe width
    (about one symbol period) approaches the delay being measured.
    """
    ref = xcorr_rough_delay(known_tx, reference_capture, symbol_period_s, mode, threshold, if_hz)
    si = xcorr_rough_delay(known_tx, si_capture, symbol_period_s, mode, threshold, if_hz)
    return CorrelationResult(
        si.lags_s,
        si.values,
        [ref.peak_lags_s[0], si.peak_lags_s[0]],
        [ref.peak_heights[0], si.peak_heights[0]],
    )


@dataclass(frozen=True)
class Candidate:
    delays_s: tuple
    amplitudes: tuple

    def __post_init__(self):
        object.__setattr__(self, "delays_s", tuple(float(d) for d in self.delays_s))
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        if len(self.delays_s) != len(self.amplitudes):
            raise ConfigurationError("delays and amplitudes must have equal length")

    def to_dict(self):
        return {
            "delays_ps": [d * 1e12 for d in self.delays_s],
            "amplitudes": list(self.amplitudes),
        }


@dataclass(frozen=True)
class SegmentPlan:
    total_duration_s: float
    segments: int
    guard_segments: int = 8

    def __post_init__(self):
        if not self.segments > self.guard_segments >= 0:
            raise ConfigurationError("need segments > guard_segments >= 0")

    @property
    def usable(self):
        return self.segments - self.guard_segments

    def usable_indices(self):
        """Guards are split between the start and the end of the frame."""
        head = self.guard_segments // 2
        return np.arange(head, head + self.usable)

    def bounds(self, n_samples):
        """Sample boundaries of every segment for a frame of ``n_samples``."""
        if n_samples % self.segments:
            raise ConfigurationError(
                f"{n_samples} samples do not split into {self.segments} equal segments"
            )
        step = n_samples // self.segments
        return [(u * step, (u + 1) * step) for u in range(self.segments)]

    def captures_needed(self, n_candidates):
        return math.ceil(n_candidates / self.usable)


class ResidualEvaluator(Protocol):
    """One outstanding capture at a time: reference frame in, captured IF frame out."""

    def submit(self, reference_frame: RealSignal) -> RealSignal: ...


class FractionalDelayBank:
    """Kaiser-windowed sinc interpolator for circular delays of one waveform.

    This is the polyphase form of upsample -> integer shift -> downsample,
    evaluated only on the samples that are needed, so a segmented frame with
    hundreds of distinct delays costs one short FIR per segment.
    """

    def __init__(self, x: RealSignal, half_length: int = 48, beta: float = 10.0):
        self.x = x
        self.fs = x.sample_rate_hz
        self.half_length = half_length
        self.beta = beta
        self._j = np.arange(-half_length, half_length)

    def kernel(self, frac):
        pos = self._j + frac
        w = i0(self.beta * np.sqrt(np.clip(1 - (pos / self.half_length) ** 2, 0, None))) / i0(self.beta)
        return np.sinc(pos) * w

    def delayed(self, delay_s, start, stop):
        """Samples ``start:stop`` of ``x(t - delay_s)`` (circular)."""
        n = len(self.x)
        if start == 0 and stop == n:
            # whole frame: the FFT phase ramp is exact and far cheaper
            return fractional_delay(self.x, delay_s % self.x.duration_s).samples.copy()
        d = delay_s * self.fs
        k = math.floor(d)
        frac = d - k
        h = self.kernel(frac)
        out = np.empty(stop - start)
        # chunked so full-frame segments do not build a huge index matrix
        for a in range(start, stop, 8192):
            b = min(stop, a + 8192)
            idx = (np.arange(a, b)[:, None] - k + self._j[None, :]) % n
            out[a - start : b - start] = self.x.samples[idx] @ h
        return out


def build_segmented_reference(banks, plan: SegmentPlan, candidates, n_samples=None) -> RealSignal:
    """Reference frame with one candidate per usable segment; guards muted.

    ``banks`` holds one ``FractionalDelayBank`` per reference component.
    Unused usable segments (fewer candidates than usable segments) are muted.
    """
    n = len(banks[0].x) if n_samples is None else n_samples
    out = np.zeros(n)
    bounds = plan.bounds(n)
    for cand, u in zip(candidates, plan.usable_indices()):
        lo, hi = bounds[u]
        seg = np.zeros(hi - lo)
        for bank, d, a in zip(banks, cand.delays_s, cand.amplitudes):
            if a != 0:
                seg += a * bank.delayed(d, lo, hi)
        out[lo:hi] = seg
    return RealSignal(banks[0].fs, out)


def segment_powers(cap: RealSignal, plan: SegmentPlan, band: BandSpec, edge_fraction: float = 0.01):
    """In-band power of every segment of a captured frame.

    Each segment drops ``edge_fraction`` of its samples at both ends, removes
    its mean, applies a Hann window and sums the periodogram over ``band``.
    """
    band.check(cap.sample_rate_hz)
    fs = cap.sample_rate_hz
    bounds = plan.bounds(len(cap))
    seg_len = bounds[0][1] - bounds[0][0]
    cut = int(math.ceil(edge_fraction * seg_len))
    m = seg_len - 2 * cut
    if m < 8:
        raise ConfigurationError("segments too short for power measurement")
    win = np.hanning(m)
    f = np.fft.rfftfreq(m, 1 / fs)
    sel = (f >= band.lo_hz) & (f <= band.hi_hz)
    segs = cap.samples[: plan.segments * seg_len].reshape(plan.segments, seg_len)[:, cut : seg_len - cut]
    segs = segs - segs.mean(axis=1, keepdims=True)
    spec = np.abs(np.fft.rfft(segs * win, axis=1)) ** 2
    # one-sided periodogram normalised so a full-band sum is the mean power
    scale_ = 2.0 / (m * np.sum(win**2))
    return np.sum(spec[:, sel], axis=1) * scale_


@dataclass
class SearchResult:
    best: Candidate
    residual_powers: dict
    depths_db: dict
    captures: int


def segmented_search(
    evaluator: ResidualEvaluator,
    grid,
    plan: SegmentPlan,
    banks,
    band: BandSpec,
    baseline: np.ndarray | None = None,
    edge_fraction: float = 0.01,
) -> SearchResult:
    """Score ``grid`` with as few segmented captures as the plan allows.

    With a ``baseline`` (per-segment in-band power of a capture with the
    reference muted) candidates are ranked by per-segment depth, which
    removes the data-dependent power of each segment; segments whose
    baseline is below 1e-3 of the median are ignored. Without a baseline
    the raw residual power is ranked.
    """
    grid = list(grid)
    if not grid:
        raise ConfigurationError("empty search grid")
    usable = plan.usable_indices()
    residuals = {}
    depths = {}
    captures = 0
    floor = None if baseline is None else 1e-3 * np.median(baseline[usable])
    for start in range(0, len(grid), plan.usable):
        batch = grid[start : start + plan.usable]
        frame = build_segmented_reference(banks, plan, batch)
        cap = evaluator.submit(frame)
        captures += 1
        powers = segment_powers(cap, plan, band, edge_fraction)
        for cand, u in zip(batch, usable):
            residuals[cand] = float(powers[u])
            if baseline is not None:
                if baseline[u] < floor:
                    depths[cand] = -np.inf
                else:
                    depths[cand] = float(10 * np.log10(baseline[u] / max(powers[u], 1e-300)))
    if baseline is None:
        best = min(grid, key=lambda c: residuals[c])
    else:
        best = max(grid, key=lambda c: depths[c])
    return SearchResult(best, residuals, depths, captures)


def amplitude_from_power(si_power: float, ref_power_unattenuated: float) -> float:
    """Reference attenuation factor ``sqrt(P_si / P_ref)``, clamped to [0, 1]."""
    if ref_power_unattenuated <= 0 or si_power < 0:
        raise ValueError("powers must be positive")
    return float(min(1.0, math.sqrt(si_power / ref_power_unattenuated)))


def quantize_delay(delay_s: float, fine_rate_hz: float = 1e12) -> float:
    """Snap a delay to the sample grid of the upsampled rate (error <= 0.5 / rate)."""
    return round(delay_s * fine_rate_hz) / fine_rate_hz


def upsampled_delay(sig: RealSignal, delay_s: float, fine_rate_hz: float = 1e12) -> RealSignal:
    """Delay by upsampling to ``fine_rate_hz``, shifting whole samples, and downsampling."""
    up = resample(sig, fine_rate_hz)
    k = int(round(delay_s * fine_rate_hz))
    shifted = RealSignal(up.sample_rate_hz, np.roll(up.samples, k))
    return resample(shifted, sig.sample_rate_hz, allow_alias=True)
