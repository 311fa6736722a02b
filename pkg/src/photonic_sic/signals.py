"""Waveform containers and generators for the SI, SOI and LO signals.

Every frame is treated as one period of a looping waveform generator, so
delays, filters and resampling are circular and exact for band-limited
content.

Amplitude conventions
---------------------
* Complex baseband generators return unit RMS envelopes.
* ``upconvert`` returns ``Re{bb * exp(j 2 pi fc t)}``, so a unit-RMS
  envelope becomes a passband signal of mean power 0.5.
* ``to_dac`` rescales a passband waveform to a peak-to-peak voltage (1 V by
  default) at the generator output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import ConfigurationError

__all__ = [
    "RealSignal",
    "ComplexBaseband",
    "OfdmConfig",
    "SoiConfig",
    "gen_ofdm",
    "gen_qpsk",
    "qpsk_symbols",
    "rrc_response",
    "upconvert",
    "downconvert",
    "analytic",
    "fractional_delay",
    "resample",
    "scale",
    "to_dac",
    "tone",
    "digital_if",
]


def _frozen(values, dtype):
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class RealSignal:
    """Uniformly sampled real waveform."""

    sample_rate_hz: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))
        object.__setattr__(self, "samples", _frozen(self.samples, float))

    def __len__(self):
        return self.samples.size

    @property
    def duration_s(self):
        return self.samples.size / self.sample_rate_hz

    @property
    def t(self):
        return np.arange(self.samples.size) / self.sample_rate_hz

    def power(self):
        return float(np.mean(self.samples**2))

    def with_samples(self, samples):
        return RealSignal(self.sample_rate_hz, samples)

    def __add__(self, other):
        _check_rates(self, other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other):
        _check_rates(self, other)
        return self.with_samples(self.samples - other.samples)


@dataclass(frozen=True, eq=False)
class ComplexBaseband:
    """Uniformly sampled complex envelope."""

    sample_rate_hz: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))
        object.__setattr__(self, "samples", _frozen(self.samples, complex))

    def __len__(self):
        return self.samples.size

    def power(self):
        return float(np.mean(np.abs(self.samples) ** 2))


def _check_rates(*sigs):
    rates = {s.sample_rate_hz for s in sigs}
    if len(rates) != 1:
        raise ConfigurationError(f"sample-rate mismatch: {sorted(rates)}")
    if len({len(s) for s in sigs}) != 1:
        raise ConfigurationError("signal length mismatch")


@dataclass(frozen=True)
class OfdmConfig:
    """16-QAM OFDM frame description.

    ``baud_rate_hz`` is the occupied RF bandwidth; the subcarrier spacing is
    ``baud_rate_hz / occupied_subcarriers``.
    """

    baud_rate_hz: float = 1e9
    fft_size: int = 256
    occupied_subcarriers: int = 200
    cp_fraction: float = 1 / 16
    qam_order: int = 16
    zero_padding_fraction: float = 0.0
    frame_duration_s: float = 4e-6
    seed: int = 0

    def __post_init__(self):
        if self.baud_rate_hz <= 0:
            raise ConfigurationError("baud_rate_hz must be positive")
        if self.frame_duration_s <= 0:
            raise ConfigurationError("frame_duration_s must be positive")
        if self.occupied_subcarriers > self.fft_size - 2 or self.occupied_subcarriers < 2:
            raise ConfigurationError("occupied_subcarriers must be in [2, fft_size - 2]")
        if self.qam_order not in (4, 16, 64):
            raise ConfigurationError("qam_order must be 4, 16 or 64")
        if not 0 <= self.cp_fraction < 1:
            raise ConfigurationError("cp_fraction must be in [0, 1)")
        if not 0 <= self.zero_padding_fraction < 1:
            raise ConfigurationError("zero_padding_fraction must be in [0, 1)")

    @property
    def subcarrier_spacing_hz(self):
        return self.baud_rate_hz / self.occupied_subcarriers


@dataclass(frozen=True)
class SoiConfig:
    """Root-raised-cosine QPSK signal of interest."""

    baud_rate_hz: float = 0.5e9
    rolloff: float = 0.35
    seed: int = 100
    frame_duration_s: float = 4e-6

    def __post_init__(self):
        if self.baud_rate_hz <= 0:
            raise ConfigurationError("baud_rate_hz must be positive")
        if not 0 <= self.rolloff <= 1:
            raise ConfigurationError("rolloff must be in [0, 1]")

    @property
    def n_symbols(self):
        return int(round(self.frame_duration_s * self.baud_rate_hz))


def _qam_constellation(order):
    m = int(round(np.sqrt(order)))
    levels = np.arange(-(m - 1), m, 2, dtype=float)
    # Gray order along each axis
    gray = np.array([i ^ (i >> 1) for i in range(m)])
    axis = np.empty(m)
    axis[gray] = levels
    pts = (axis[:, None] + 1j * axis[None, :]).ravel()
    return pts / np.sqrt(np.mean(np.abs(pts) ** 2))


def gen_ofdm(cfg: OfdmConfig, sample_rate_hz: float) -> ComplexBaseband:
    """Synthesize one periodic OFDM frame directly at ``sample_rate_hz``."""
    if sample_rate_hz < 2 * cfg.baud_rate_hz:
        raise ConfigurationError(
            f"sample rate {sample_rate_hz:g} below twice the occupied bandwidth {cfg.baud_rate_hz:g}"
        )
    df = cfg.subcarrier_spacing_hz
    n_sym = int(round(sample_rate_hz / df))
    n_cp = int(round(cfg.cp_fraction * n_sym))
    n_gap = int(round((n_sym + n_cp) * cfg.zero_padding_fraction / (1 - cfg.zero_padding_fraction)))
    n_total = int(round(cfg.frame_duration_s * sample_rate_hz))
    period = n_sym + n_cp + n_gap
    n_blocks = int(np.ceil(n_total / period))

    rng = np.random.default_rng(cfg.seed)
    const = _qam_constellation(cfg.qam_order)
    half = cfg.occupied_subcarriers // 2
    bins = np.concatenate([np.arange(-half, 0), np.arange(1, cfg.occupied_subcarriers - half + 1)])

    out = np.zeros(n_blocks * period, dtype=complex)
    spec = np.zeros(n_sym, dtype=complex)
    for b in range(n_blocks):
        spec[:] = 0
        spec[bins % n_sym] = const[rng.integers(0, const.size, bins.size)]
        body = np.fft.ifft(spec) * n_sym
        start = b * period
        out[start : start + n_cp] = body[n_sym - n_cp :]
        out[start + n_cp : start + n_cp + n_sym] = body
    x = out[:n_total]

    # periodic spectral mask: removes splatter from symbol-boundary discontinuities
    X = np.fft.fft(x)
    f = np.fft.fftfreq(n_total, 1 / sample_rate_hz)
    edge = (bins.max() + 1) * df
    X[np.abs(f) > edge] = 0
    x = np.fft.ifft(X)
    x /= np.sqrt(np.mean(np.abs(x) ** 2))
    return ComplexBaseband(sample_rate_hz, x)


def qpsk_symbols(cfg: SoiConfig) -> np.ndarray:
    """The deterministic QPSK symbol sequence carried by ``gen_qpsk(cfg, ...)``."""
    rng = np.random.default_rng(cfg.seed)
    bits = rng.integers(0, 2, (cfg.n_symbols, 2))
    return ((1 - 2 * bits[:, 0]) + 1j * (1 - 2 * bits[:, 1])) / np.sqrt(2)


def rrc_response(f, baud_rate_hz, rolloff):
    """Root-raised-cosine amplitude response (unit passband gain)."""
    f = np.abs(np.asarray(f, dtype=float))
    t = 1.0 / baud_rate_hz
    f1 = (1 - rolloff) / (2 * t)
    f2 = (1 + rolloff) / (2 * t)
    h = np.zeros_like(f)
    h[f <= f1] = 1.0
    if rolloff > 0:
        mid = (f > f1) & (f <= f2)
        h[mid] = np.sqrt(0.5 * (1 + np.cos(np.pi * t / rolloff * (f[mid] - f1))))
    return h


def gen_qpsk(cfg: SoiConfig, sample_rate_hz: float) -> ComplexBaseband:
    """RRC-shaped QPSK frame; symbol k is centred on sample ``k * sps``."""
    if sample_rate_hz < 2 * cfg.baud_rate_hz * (1 + cfg.rolloff):
        raise ConfigurationError("sample rate violates Nyquist for the RRC-shaped SOI")
    sps_f = sample_rate_hz / cfg.baud_rate_hz
    sps = int(round(sps_f))
    if abs(sps - sps_f) > 1e-9:
        raise ConfigurationError("sample rate must be an integer multiple of the SOI baud rate")
    syms = qpsk_symbols(cfg)
    n = syms.size * sps
    train = np.zeros(n, dtype=complex)
    train[::sps] = syms
    f = np.fft.fftfreq(n, 1 / sample_rate_hz)
    x = np.fft.ifft(np.fft.fft(train) * rrc_response(f, cfg.baud_rate_hz, cfg.rolloff))
    x /= np.sqrt(np.mean(np.abs(x) ** 2))
    return ComplexBaseband(sample_rate_hz, x)


def upconvert(bb: ComplexBaseband, carrier_hz: float, baud_rate_hz: float | None = None) -> RealSignal:
    """Real passband ``Re{bb exp(j 2 pi fc t)}``."""
    fs = bb.sample_rate_hz
    half_bw = 0.0 if baud_rate_hz is None else baud_rate_hz / 2
    if carrier_hz + half_bw >= fs / 2:
        raise ConfigurationError(
            f"carrier {carrier_hz:g} Hz + half bandwidth aliases at {fs:g} Sa/s"
        )
    t = np.arange(len(bb)) / fs
    return RealSignal(fs, np.real(bb.samples * np.exp(2j * np.pi * carrier_hz * t)))


def analytic(x: np.ndarray) -> np.ndarray:
    """Circular analytic signal (positive frequencies doubled)."""
    return sps.hilbert(x)


def downconvert(sig: RealSignal, lo_hz: float) -> ComplexBaseband:
    """Complex envelope of the positive-frequency content relative to ``lo_hz``.

    ``downconvert(upconvert(bb, fc), fc)`` returns ``bb`` for band-limited
    envelopes that do not straddle DC.
    """
    t = sig.t
    return ComplexBaseband(sig.sample_rate_hz, analytic(sig.samples) * np.exp(-2j * np.pi * lo_hz * t))


def fractional_delay(sig: RealSignal, delay_s: float) -> RealSignal:
    """Band-limited circular delay by a linear phase ramp.

    The frame is one period of a looping waveform, so samples shifted past
    the end reappear at the start. The Nyquist bin (even lengths) is scaled
    by the real part of its phase factor so the output stays real.
    """
    n = len(sig)
    if n == 0:
        raise ValueError("cannot delay an empty signal")
    if abs(delay_s) >= sig.duration_s:
        raise ValueError("delay must be shorter than the signal")
    if delay_s == 0:
        return sig
    X = np.fft.rfft(sig.samples)
    f = np.fft.rfftfreq(n, 1 / sig.sample_rate_hz)
    ramp = np.exp(-2j * np.pi * f * delay_s)
    if n % 2 == 0:
        ramp[-1] = ramp[-1].real
    return sig.with_samples(np.fft.irfft(X * ramp, n))


def resample(sig: RealSignal, new_rate_hz: float, allow_alias: bool = False) -> RealSignal:
    """Periodic band-limited resampling to ``new_rate_hz``."""
    if new_rate_hz <= 0:
        raise ValueError("new_rate_hz must be positive")
    num = int(round(len(sig) * new_rate_hz / sig.sample_rate_hz))
    if num == len(sig):
        return RealSignal(new_rate_hz, sig.samples)
    if num < len(sig) and not allow_alias:
        X = np.fft.rfft(sig.samples)
        f = np.fft.rfftfreq(len(sig), 1 / sig.sample_rate_hz)
        total = np.sum(np.abs(X) ** 2)
        above = np.sum(np.abs(X[f >= new_rate_hz / 2]) ** 2)
        if total > 0 and above > 1e-9 * total:
            raise ConfigurationError(
                f"downsampling to {new_rate_hz:g} Sa/s would alias "
                f"{10 * np.log10(above / total):.1f} dB of content"
            )
    return RealSignal(new_rate_hz, sps.resample(sig.samples, num))


def scale(sig: RealSignal, factor: float) -> RealSignal:
    if not np.isfinite(factor):
        raise ValueError("factor must be finite")
    return sig.with_samples(sig.samples * factor)


def to_dac(sig: RealSignal, vpp: float = 1.0) -> RealSignal:
    """Rescale to a peak-to-peak voltage at the generator output."""
    span = np.ptp(sig.samples)
    if span == 0:
        return sig
    return scale(sig, vpp / span)


def tone(freq_hz, sample_rate_hz, n_samples, amplitude=1.0, phase=0.0) -> RealSignal:
    t = np.arange(n_samples) / sample_rate_hz
    return RealSignal(sample_rate_hz, amplitude * np.cos(2 * np.pi * freq_hz * t + phase))


def digital_if(tx: RealSignal, lo_hz: float, capture_rate_hz: float) -> RealSignal:
    """Digitally downconvert a transmitted RF waveform to the IF at the capture rate.

    Mirrors the photonic mixer: positive-frequency content at ``f`` lands at
    ``f - lo_hz``.
    """
    z = analytic(tx.samples) * np.exp(-2j * np.pi * lo_hz * tx.t)
    return resample(RealSignal(tx.sample_rate_hz, z.real), capture_rate_hz, allow_alias=True)
