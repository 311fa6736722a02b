"""SIC depth, spectra, EVM and the closed-form delay/amplitude mismatch law."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import ConfigurationError
from .signals import RealSignal, SoiConfig, qpsk_symbols, rrc_response

__all__ = [
    "BandSpec",
    "DepthReport",
    "Genie",
    "DEPTH_CAP_DB",
    "WELCH_NPERSEG",
    "psd",
    "band_power",
    "sic_depth",
    "mismatch_residual",
    "mismatch_depth_curve",
    "demod_and_evm",
    "symbol_errors",
    "occupied_bandwidth",
]

DEPTH_CAP_DB = 80.0
WELCH_NPERSEG = 2**14


@dataclass(frozen=True)
class BandSpec:
    center_hz: float
    width_hz: float

    def __post_init__(self):
        if self.width_hz <= 0:
            raise ConfigurationError("band width must be positive")
        if self.lo_hz < 0:
            raise ConfigurationError("band extends below DC")

    @property
    def lo_hz(self):
        return self.center_hz - self.width_hz / 2

    @property
    def hi_hz(self):
        return self.center_hz + self.width_hz / 2

    @classmethod
    def for_if(cls, if_hz, baud_hz, margin=1.05):
        return cls(if_hz, baud_hz * margin)

    def check(self, sample_rate_hz):
        if self.hi_hz > sample_rate_hz / 2:
            raise ConfigurationError(
                f"band [{self.lo_hz:g}, {self.hi_hz:g}] Hz exceeds Nyquist at {sample_rate_hz:g} Sa/s"
            )


@dataclass(frozen=True)
class DepthReport:
    power_before_db: float
    power_after_db: float
    depth_db: float
    capped: bool = False

    def to_dict(self):
        return {
            "power_before_db": self.power_before_db,
            "power_after_db": self.power_after_db,
            "depth_db": self.depth_db,
            "capped": self.capped,
        }


def psd(sig: RealSignal, nperseg: int = WELCH_NPERSEG):
    """One-sided Welch PSD: Hann window, 50 % overlap, no detrending."""
    n = min(nperseg, len(sig))
    return sps.welch(
        sig.samples,
        fs=sig.sample_rate_hz,
        window="hann",
        nperseg=n,
        noverlap=n // 2,
        detrend=False,
        scaling="density",
    )


def band_power(sig: RealSignal, band: BandSpec, nperseg: int = WELCH_NPERSEG) -> float:
    band.check(sig.sample_rate_hz)
    f, pxx = psd(sig, nperseg)
    df = f[1] - f[0]
    sel = (f >= band.lo_hz) & (f <= band.hi_hz)
    return float(np.sum(pxx[sel]) * df)


def _db(p):
    return 10 * np.log10(p) if p > 0 else -np.inf


def sic_depth(before: RealSignal, after: RealSignal, band: BandSpec, cap_db: float = DEPTH_CAP_DB) -> DepthReport:
    if before.sample_rate_hz != after.sample_rate_hz:
        raise ConfigurationError("before/after captures must share a sample rate")
    pb = band_power(before, band)
    pa = band_power(after, band)
    if pa <= 0 or pb / pa > 10 ** (cap_db / 10):
        return DepthReport(_db(pb), _db(pa), cap_db, capped=True)
    return DepthReport(_db(pb), _db(pa), 10 * np.log10(pb / pa))


def mismatch_residual(f_hz, delta_tau_s, rho):
    """Residual-to-SI power ratio of a tone cancelled by a scaled, delayed copy."""
    return 1 + rho**2 - 2 * rho * np.cos(2 * np.pi * f_hz * np.asarray(delta_tau_s, dtype=float))


def mismatch_depth_curve(f_hz, delta_tau_s, rho=1.0, cap_db=DEPTH_CAP_DB):
    if rho < 0:
        raise ValueError("rho must be non-negative")
    r = mismatch_residual(f_hz, delta_tau_s, rho)
    with np.errstate(divide="ignore"):
        depth = -10 * np.log10(r)
    return np.minimum(np.where(r > 0, depth, cap_db), cap_db).tolist()


@dataclass(frozen=True)
class Genie:
    """Simulation-side knowledge of the SOI carrier and timing.

    ``delay_s`` is the arrival time of symbol 0 in the capture. ``gain`` is
    the complex channel gain; when ``None`` it is fitted to the known symbols.
    """

    carrier_hz: float
    delay_s: float = 0.0
    gain: complex | None = None


def demod_and_evm(if_sig: RealSignal, soi_cfg: SoiConfig, genie: Genie):
    """Matched-filter demodulation at known timing; returns (symbols, EVM %)."""
    fs = if_sig.sample_rate_hz
    sps_f = fs / soi_cfg.baud_rate_hz
    sps_i = int(round(sps_f))
    if abs(sps_i - sps_f) > 1e-9:
        raise ConfigurationError("capture rate must be an integer multiple of the SOI baud rate")
    n = len(if_sig)
    t = np.arange(n) / fs
    bb = 2 * if_sig.samples * np.exp(-2j * np.pi * genie.carrier_hz * t)
    f = np.fft.fftfreq(n, 1 / fs)
    mf = rrc_response(f, soi_cfg.baud_rate_hz, soi_cfg.rolloff) * np.exp(2j * np.pi * f * genie.delay_s)
    y = np.fft.ifft(np.fft.fft(bb) * mf)
    ref = qpsk_symbols(soi_cfg)
    rx = y[::sps_i][: ref.size]
    g = genie.gain if genie.gain is not None else np.vdot(ref, rx) / np.vdot(ref, ref)
    rx = rx / g
    evm = 100 * np.sqrt(np.mean(np.abs(rx - ref) ** 2) / np.mean(np.abs(ref) ** 2))
    return rx, float(evm)


def symbol_errors(rx, ref):
    """Count QPSK decisions that differ from the reference symbols."""
    dec = (np.sign(rx.real) + 1j * np.sign(rx.imag)) / np.sqrt(2)
    return int(np.sum(np.abs(dec - ref) > 1e-9))


def occupied_bandwidth(x, sample_rate_hz, fraction=0.99):
    """Width of the centred band holding ``fraction`` of the power of a complex envelope."""
    X = np.fft.fftshift(np.abs(np.fft.fft(x)) ** 2)
    f = np.fft.fftshift(np.fft.fftfreq(len(x), 1 / sample_rate_hz))
    c = np.cumsum(X) / np.sum(X)
    tail = (1 - fraction) / 2
    lo = f[np.searchsorted(c, tail)]
    hi = f[np.searchsorted(c, 1 - tail)]
    return float(hi - lo)
