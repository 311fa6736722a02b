"""DP-MZM optical cancellation, square-law photodetection and IF capture.

Field convention: the unmodulated laser field is 1. A DD-MZM driven with
unit input produces ``(exp(j phi_a) + exp(j phi_b + j bias)) / 2`` and the
DP-MZM output is half the sum of its two DD-MZMs, so that with all arms in
phase the output field is again 1. Under this convention the downconverted
IF tone of a SOI (index m3) beating with an LO (index m4) has amplitude
``(R / 4) J1(m3) J1(m4)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps
from scipy.special import j1

from .errors import ConfigurationError
from .signals import RealSignal, resample

__all__ = [
    "Bias",
    "OpticalEnvelope",
    "ModulatorConfig",
    "PdConfig",
    "ddmzm_full",
    "dpmzm",
    "photodetect",
    "capture",
    "extract_if",
    "if_filter_taps",
    "modulation_index",
    "bessel_if_amplitude",
    "first_order_dpmzm",
]


class Bias(enum.Enum):
    MITP = np.pi
    QUAD = np.pi / 2
    MATP = 0.0


@dataclass(frozen=True, eq=False)
class OpticalEnvelope:
    """Complex optical field relative to the laser carrier."""

    sample_rate_hz: float
    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex)
        if not np.all(np.isfinite(arr)):
            raise ValueError("envelope must be finite")
        object.__setattr__(self, "samples", arr)

    def __len__(self):
        return self.samples.size

    def power(self):
        return float(np.mean(np.abs(self.samples) ** 2))


@dataclass(frozen=True)
class ModulatorConfig:
    v_pi_volts: float = 4.0
    bias_upper: Bias = Bias.MITP
    bias_lower: Bias = Bias.MITP
    # added to both bias phases; zero for an ideal bias controller
    bias_offset_rad: float = 0.0

    def __post_init__(self):
        if self.v_pi_volts <= 0:
            raise ConfigurationError("v_pi_volts must be positive")


@dataclass(frozen=True)
class PdConfig:
    responsivity: float = 1.0
    if_center_hz: float = 1e9
    if_width_hz: float = 1.05e9
    capture_rate_hz: float = 10e9

    def __post_init__(self):
        if self.responsivity <= 0:
            raise ConfigurationError("responsivity must be positive")
        if self.if_width_hz <= 0:
            raise ConfigurationError("IF width must be positive")


def modulation_index(amplitude_v, cfg: ModulatorConfig):
    return np.pi * amplitude_v / cfg.v_pi_volts


def _check(*sigs):
    if len({s.sample_rate_hz for s in sigs}) != 1:
        raise ConfigurationError("drive signals must share a sample rate")
    if len({len(s) for s in sigs}) != 1:
        raise ConfigurationError("drive signals must share a length")


def _ddmzm(a, b, k, bias):
    return 0.5 * np.exp(1j * k * a) + 0.5 * np.exp(1j * (k * b + bias))


def ddmzm_full(drive_a: RealSignal, drive_b: RealSignal, cfg: ModulatorConfig, bias: Bias | None = None):
    """Exact dual-drive MZM field; ``drive_b`` sits on the biased arm."""
    _check(drive_a, drive_b)
    bias = cfg.bias_upper if bias is None else bias
    k = np.pi / cfg.v_pi_volts
    env = _ddmzm(drive_a.samples, drive_b.samples, k, bias.value + cfg.bias_offset_rad)
    return OpticalEnvelope(drive_a.sample_rate_hz, env)


def dpmzm(received: RealSignal, reference: RealSignal, lo: RealSignal, cfg: ModulatorConfig):
    """Exact DP-MZM field: DD-MZM1 (received | reference), DD-MZM2 (LO | idle)."""
    _check(received, reference, lo)
    k = np.pi / cfg.v_pi_volts
    upper = _ddmzm(received.samples, reference.samples, k, cfg.bias_upper.value + cfg.bias_offset_rad)
    lower = _ddmzm(lo.samples, 0.0, k, cfg.bias_lower.value + cfg.bias_offset_rad)
    return OpticalEnvelope(received.sample_rate_hz, 0.5 * (upper + lower))


def first_order_dpmzm(received: RealSignal, reference: RealSignal, lo: RealSignal, cfg: ModulatorConfig):
    """Small-signal DP-MZM field with both DD-MZMs at MITP (first-order sidebands only)."""
    _check(received, reference, lo)
    k = np.pi / cfg.v_pi_volts
    env = 0.25j * k * (received.samples - reference.samples + lo.samples)
    return OpticalEnvelope(received.sample_rate_hz, env)


def bessel_if_amplitude(m_soi, m_lo, responsivity=1.0):
    """IF tone amplitude predicted from first-order sidebands."""
    return responsivity / 4 * j1(m_soi) * j1(m_lo)


def photodetect(env: OpticalEnvelope, cfg: PdConfig) -> RealSignal:
    """Square-law detection; all beat products are kept."""
    return RealSignal(env.sample_rate_hz, cfg.responsivity * np.abs(env.samples) ** 2)


def capture(pd_out: RealSignal, cfg: PdConfig) -> RealSignal:
    """Oscilloscope capture: ideal anti-alias low-pass and resampling."""
    return resample(pd_out, cfg.capture_rate_hz, allow_alias=True)


def if_filter_taps(sample_rate_hz, cfg: PdConfig, stop_db=60.0, transition_fraction=0.2):
    """Kaiser-window linear-phase band-pass around the IF band."""
    nyq = sample_rate_hz / 2
    lo_edge = cfg.if_center_hz - cfg.if_width_hz / 2
    hi_edge = cfg.if_center_hz + cfg.if_width_hz / 2
    tw = transition_fraction * cfg.if_width_hz
    if lo_edge - tw <= 0 or hi_edge + tw >= nyq:
        raise ConfigurationError("IF band (with transition) must lie inside (0, Nyquist)")
    numtaps, beta = sps.kaiserord(stop_db, tw / nyq)
    numtaps |= 1
    return sps.firwin(
        numtaps,
        [lo_edge - tw / 2, hi_edge + tw / 2],
        window=("kaiser", beta),
        pass_zero=False,
        fs=sample_rate_hz,
    )


def extract_if(pd_out: RealSignal, cfg: PdConfig) -> RealSignal:
    """Band-pass the IF band and resample to the capture rate.

    The FIR is applied circularly over the whole frame with its
    ``(numtaps - 1) / 2`` group delay removed, so the output is time-aligned
    with the input.
    """
    fs = pd_out.sample_rate_hz
    if cfg.if_center_hz + cfg.if_width_hz / 2 >= min(fs, cfg.capture_rate_hz) / 2:
        raise ConfigurationError("IF band outside the capture Nyquist zone")
    taps = if_filter_taps(fs, cfg)
    n = len(pd_out)
    h = np.zeros(n)
    half = taps.size // 2
    h[: half + 1] = taps[half:]
    h[n - half :] = taps[:half]
    y = np.fft.irfft(np.fft.rfft(pd_out.samples) * np.fft.rfft(h), n)
    return resample(RealSignal(fs, y), cfg.capture_rate_hz, allow_alias=True)
