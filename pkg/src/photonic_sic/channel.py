"""SI propagation channels, SOI mixing, receiver noise and fiber remoting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .signals import RealSignal, scale

__all__ = [
    "Tap",
    "AntennaPaths",
    "PathSet",
    "TABLE_I_MULTIPATHS",
    "apply_paths",
    "add_soi",
    "add_noise",
    "fiber_link",
    "db_to_amp",
]


def db_to_amp(gain_db):
    return 10.0 ** (gain_db / 20.0)


@dataclass(frozen=True)
class Tap:
    delay_s: float
    gain_db: float

    def __post_init__(self):
        if self.delay_s < 0:
            raise ConfigurationError("tap delay must be non-negative")
        if not np.isfinite(self.gain_db):
            raise ConfigurationError("tap gain must be finite")

    @property
    def amplitude(self):
        return db_to_amp(self.gain_db)

    def to_dict(self):
        return {"delay_s": self.delay_s, "gain_db": self.gain_db}


@dataclass(frozen=True)
class AntennaPaths:
    """Direct path plus multipaths; multipath taps are relative to the direct path."""

    direct: Tap
    multipaths: tuple = ()

    def absolute_taps(self):
        taps = [self.direct]
        for m in self.multipaths:
            taps.append(Tap(self.direct.delay_s + m.delay_s, self.direct.gain_db + m.gain_db))
        return taps

    def to_dict(self):
        return {"direct": self.direct.to_dict(), "multipaths": [m.to_dict() for m in self.multipaths]}


@dataclass(frozen=True)
class PathSet:
    antennas: tuple

    def __post_init__(self):
        if len(self.antennas) == 0:
            raise ConfigurationError("PathSet needs at least one antenna")

    @property
    def nt(self):
        return len(self.antennas)

    def to_dict(self):
        return {"antennas": [a.to_dict() for a in self.antennas]}

    @classmethod
    def from_dict(cls, d):
        ants = []
        for a in d["antennas"]:
            direct = Tap(**a["direct"])
            mps = tuple(Tap(**m) for m in a.get("multipaths", []))
            ants.append(AntennaPaths(direct, mps))
        return cls(tuple(ants))

    @classmethod
    def direct_only(cls, delays_s, amplitudes):
        return cls(tuple(AntennaPaths(Tap(d, 20 * np.log10(a))) for d, a in zip(delays_s, amplitudes)))


# Reference multipath settings, relative to each antenna's direct path
TABLE_I_MULTIPATHS = (
    (Tap(8e-9, -10.0), Tap(13e-9, -12.0), Tap(15e-9, -15.0)),
    (Tap(7e-9, -10.0), Tap(15e-9, -12.0), Tap(17e-9, -15.0)),
)


def apply_paths(tx: list, paths: PathSet) -> RealSignal:
    """Sum of delayed, scaled copies of each antenna's transmit waveform."""
    if len(tx) != paths.nt:
        raise ConfigurationError(f"expected {paths.nt} transmit signals, got {len(tx)}")
    rates = {s.sample_rate_hz for s in tx}
    if len(rates) != 1 or len({len(s) for s in tx}) != 1:
        raise ConfigurationError("transmit signals must share sample rate and length")
    fs = tx[0].sample_rate_hz
    n = len(tx[0])
    f = np.fft.rfftfreq(n, 1 / fs)
    acc = np.zeros(f.size, dtype=complex)
    for x, ant in zip(tx, paths.antennas):
        resp = np.zeros(f.size, dtype=complex)
        for tap in ant.absolute_taps():
            ramp = np.exp(-2j * np.pi * f * tap.delay_s)
            if n % 2 == 0:
                ramp[-1] = ramp[-1].real
            resp += tap.amplitude * ramp
        acc += np.fft.rfft(x.samples) * resp
    return RealSignal(fs, np.fft.irfft(acc, n))


def add_soi(rx: RealSignal, soi: RealSignal, sir_db: float) -> RealSignal:
    """Rescale ``soi`` so that P_soi / P_rx equals ``sir_db`` and add it."""
    if rx.sample_rate_hz != soi.sample_rate_hz:
        raise ConfigurationError("sample-rate mismatch between SI and SOI")
    p_soi = soi.power()
    if p_soi <= 0:
        raise ConfigurationError("SOI has zero power")
    g = np.sqrt(rx.power() * 10 ** (sir_db / 10) / p_soi)
    return rx + scale(soi, g)


def add_noise(sig: RealSignal, snr_db: float, seed: int) -> RealSignal:
    """White Gaussian noise at ``snr_db`` relative to the signal power."""
    if np.isinf(snr_db) and snr_db > 0:
        return sig
    rng = np.random.default_rng(seed)
    sigma = np.sqrt(sig.power() / 10 ** (snr_db / 10))
    return sig.with_samples(sig.samples + sigma * rng.standard_normal(len(sig)))


def fiber_link(sig, length_km: float, atten_db_per_km: float = 0.1825, delay_per_km_s: float = 4.9e-6):
    """Dispersion-free fiber: circular delay plus field attenuation.

    Accepts a ``RealSignal`` or an optical envelope (anything with
    ``sample_rate_hz`` and ``samples``); the field is scaled by
    ``10 ** (-atten_total_db / 20)``.
    """
    if length_km < 0:
        raise ConfigurationError("fiber length must be non-negative")
    if length_km == 0:
        return sig
    amp = 10 ** (-length_km * atten_db_per_km / 20)
    delay = length_km * delay_per_km_s
    x = np.asarray(sig.samples)
    n = x.size
    f = np.fft.fftfreq(n, 1 / sig.sample_rate_hz)
    # the frame repeats, so only the delay modulo one period matters
    delay = delay % (n / sig.sample_rate_hz)
    y = np.fft.ifft(np.fft.fft(x) * np.exp(-2j * np.pi * f * delay)) * amp
    if isinstance(sig, RealSignal):
        return sig.with_samples(y.real)
    return type(sig)(sig.sample_rate_hz, y)
