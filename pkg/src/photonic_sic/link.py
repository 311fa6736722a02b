"""Simulation-backed photonic SIC link: the evaluator behind every search.

The link holds the received RF signal (SI through the channel, optional SOI)
and the LO. ``submit`` drives the DP-MZM with a reference frame and returns
the oscilloscope capture of the photocurrent, after an optional fiber span
whose known latency is removed again (genie synchronisation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import PathSet, add_noise, add_soi, apply_paths, fiber_link
from .errors import ConfigurationError
from .metrics import BandSpec, band_power
from .photonics import ModulatorConfig, PdConfig, capture, dpmzm, photodetect
from .signals import (
    OfdmConfig,
    RealSignal,
    SoiConfig,
    fractional_delay,
    gen_ofdm,
    gen_qpsk,
    to_dac,
    tone,
    upconvert,
)

__all__ = ["LinkConfig", "SimulatedLink", "make_tx", "make_soi"]


@dataclass(frozen=True)
class LinkConfig:
    gen_rate_hz: float = 64e9
    capture_rate_hz: float = 10e9
    carrier_hz: float = 9e9
    lo_hz: float = 8e9
    # LO drive amplitude at the modulator (volts)
    lo_amplitude_v: float = 1.0
    modulator: ModulatorConfig = field(default_factory=ModulatorConfig)
    responsivity: float = 1.0
    fiber_km: float = 0.0
    fiber_atten_db_per_km: float = 0.1825
    fiber_delay_per_km_s: float = 4.9e-6
    snr_db: float = math.inf
    noise_seed: int = 7

    def __post_init__(self):
        if self.carrier_hz >= self.gen_rate_hz / 2 or self.lo_hz >= self.gen_rate_hz / 2:
            raise ConfigurationError("carrier and LO must lie below the generation Nyquist")
        if self.if_hz <= 0:
            raise ConfigurationError("carrier and LO coincide: no IF")
        if self.if_hz >= self.capture_rate_hz / 2:
            raise ConfigurationError("IF above the capture Nyquist")

    @property
    def if_hz(self):
        return abs(self.carrier_hz - self.lo_hz)

    def pd_config(self, baud_rate_hz):
        return PdConfig(self.responsivity, self.if_hz, 1.05 * baud_rate_hz, self.capture_rate_hz)

    def band(self, baud_rate_hz):
        return BandSpec.for_if(self.if_hz, baud_rate_hz)


def make_tx(ofdm: OfdmConfig, link: LinkConfig, vpp: float = 1.0) -> RealSignal:
    """One antenna's transmitted RF waveform at the generator output."""
    bb = gen_ofdm(ofdm, link.gen_rate_hz)
    return to_dac(upconvert(bb, link.carrier_hz, ofdm.baud_rate_hz), vpp)


def make_soi(soi: SoiConfig, link: LinkConfig) -> RealSignal:
    bb = gen_qpsk(soi, link.gen_rate_hz)
    return upconvert(bb, link.carrier_hz, soi.baud_rate_hz * (1 + soi.rolloff))


class SimulatedLink:
    """Channel + DP-MZM + fiber + photodetector + oscilloscope.

    Parameters
    ----------
    tx : list of RealSignal
        Transmitted RF waveforms, one per antenna.
    paths : PathSet
        SI channel from every transmit antenna to the receiver.
    link : LinkConfig
    soi : RealSignal, optional
        SOI at the receiver input; rescaled to ``sir_db`` against the SI.
    """

    def __init__(self, tx, paths: PathSet, link: LinkConfig, soi: RealSignal | None = None, sir_db: float = 0.0):
        self.tx = list(tx)
        self.paths = paths
        self.cfg = link
        self.si = apply_paths(self.tx, paths)
        fs = self.si.sample_rate_hz
        n = len(self.si)
        self.silence = RealSignal(fs, np.zeros(n))
        if soi is not None:
            mixed = add_soi(self.si, soi, sir_db)
            self.soi = mixed - self.si
        else:
            self.soi = self.silence
        self.lo = tone(link.lo_hz, fs, n, link.lo_amplitude_v)
        self.captures = 0

    @property
    def frame_samples(self):
        return len(self.si)

    def _received(self, include_si, include_soi):
        rx = self.silence
        if include_si:
            rx = rx + self.si
        if include_soi:
            rx = rx + self.soi
        return rx

    def fiber_latency_s(self):
        delay = self.cfg.fiber_km * self.cfg.fiber_delay_per_km_s
        return delay % (self.frame_samples / self.cfg.gen_rate_hz)

    def photocurrent(self, reference: RealSignal, include_si=True, include_soi=True) -> RealSignal:
        rx = self._received(include_si, include_soi)
        env = dpmzm(rx, reference, self.lo, self.cfg.modulator)
        env = fiber_link(env, self.cfg.fiber_km, self.cfg.fiber_atten_db_per_km, self.cfg.fiber_delay_per_km_s)
        return photodetect(env, PdConfig(self.cfg.responsivity, self.cfg.if_hz, 1.0, self.cfg.capture_rate_hz))

    def submit(self, reference: RealSignal, include_si=True, include_soi=True) -> RealSignal:
        """One capture of the IF output for a reference frame."""
        if reference.sample_rate_hz != self.cfg.gen_rate_hz or len(reference) != self.frame_samples:
            raise ConfigurationError("reference frame must match the generator rate and frame length")
        pd = self.photocurrent(reference, include_si, include_soi)
        cap = capture(pd, PdConfig(self.cfg.responsivity, self.cfg.if_hz, 1.0, self.cfg.capture_rate_hz))
        lat = self.fiber_latency_s()
        if lat:
            cap = fractional_delay(cap, -lat)
        if np.isfinite(self.cfg.snr_db):
            cap = add_noise(cap, self.cfg.snr_db, self.cfg.noise_seed + self.captures)
        self.captures += 1
        return cap

    def baseline(self, include_soi=False) -> RealSignal:
        """Capture with the reference arm muted."""
        return self.submit(self.silence, include_soi=include_soi)

    def depth(self, reference: RealSignal, band: BandSpec, include_soi=False):
        """SIC depth of ``reference`` against the muted-reference baseline."""
        from .metrics import sic_depth

        return sic_depth(self.baseline(include_soi), self.submit(reference, include_soi=include_soi), band)

    def band_power(self, reference: RealSignal, band: BandSpec, include_si=True, include_soi=False):
        return band_power(self.submit(reference, include_si, include_soi), band)
