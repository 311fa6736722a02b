import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonic_sic.errors import ConfigurationError
from photonic_sic.metrics import (
    BandSpec,
    Genie,
    band_power,
    demod_and_evm,
    mismatch_depth_curve,
    sic_depth,
    symbol_errors,
)
from photonic_sic.signals import RealSignal, SoiConfig, gen_qpsk, qpsk_symbols, scale, tone

FS = 10e9
BAND = BandSpec(1e9, 1.05e9)


def test_tone_at_band_centre_has_half_power():
    assert band_power(tone(1e9, FS, 40_000), BAND) == pytest.approx(0.5, rel=0.01)


def test_white_noise_half_nyquist_band_holds_half_power():
    x = RealSignal(FS, np.random.default_rng(0).standard_normal(400_000))
    band = BandSpec(1.25e9, 2.5e9)  # half of the 0..5 GHz span
    assert band_power(x, band) == pytest.approx(0.5 * x.power(), rel=0.03)


def test_out_of_band_tone_leaks_little():
    assert band_power(tone(3.5e9, FS, 40_000), BAND) < 1e-6


def test_band_must_fit():
    with pytest.raises(ConfigurationError):
        BandSpec(1e9, 3e9)
    with pytest.raises(ConfigurationError):
        band_power(tone(1e9, FS, 100), BandSpec(4.9e9, 1e9))


def test_depth_identities():
    x = tone(1e9, FS, 40_000) + tone(1.2e9, FS, 40_000, 0.3)
    assert sic_depth(x, x, BAND).depth_db == pytest.approx(0.0, abs=1e-12)
    assert sic_depth(x, scale(x, 10 ** (-27.3 / 20)), BAND).depth_db == pytest.approx(27.3, abs=0.01)
    rep = sic_depth(x, RealSignal(FS, np.zeros(40_000)), BAND)
    assert rep.capped and rep.depth_db == 80.0


@settings(max_examples=30, deadline=None)
@given(a=st.floats(1e-3, 1.0))
def test_depth_scaling_identity(a):
    x = tone(0.8e9, FS, 20_000) + tone(1.3e9, FS, 20_000, 0.5)
    assert sic_depth(x, scale(x, a), BAND).depth_db == pytest.approx(-20 * np.log10(a), abs=0.01)


def test_mismatch_curve_examples():
    assert mismatch_depth_curve(10e9, [0.5e-12])[0] == pytest.approx(30.1, abs=0.1)
    assert mismatch_depth_curve(5e9, [10e-12])[0] == pytest.approx(10.1, abs=0.1)
    assert mismatch_depth_curve(10e9, [0.0])[0] == 80.0
    with pytest.raises(ValueError):
        mismatch_depth_curve(1e9, [0.0], rho=-1)


@settings(max_examples=30, deadline=None)
@given(f=st.floats(1e9, 20e9), dt=st.floats(0.1e-12, 20e-12), rho=st.floats(0.1, 1.0))
def test_mismatch_curve_matches_phasor_oracle(f, dt, rho):
    residual = abs(1 - rho * np.exp(-2j * np.pi * f * dt)) ** 2
    got = mismatch_depth_curve(f, [dt], rho)[0]
    assert got == pytest.approx(min(80.0, -10 * np.log10(residual)), abs=1e-9)


def _soi_if(cfg, carrier=1e9):
    bb = gen_qpsk(cfg, FS)
    t = np.arange(len(bb)) / FS
    return RealSignal(FS, np.real(bb.samples * np.exp(2j * np.pi * carrier * t)))


def test_clean_loopback_demodulates_exactly():
    cfg = SoiConfig()
    rx, evm = demod_and_evm(_soi_if(cfg), cfg, Genie(1e9))
    assert evm < 1.0
    assert symbol_errors(rx, qpsk_symbols(cfg)) == 0


def test_evm_matches_awgn_oracle():
    cfg = SoiConfig()
    sig = _soi_if(cfg)
    # unit-gain symbols after the matched filter; real IF noise of variance s2 becomes
    # complex baseband noise 4 s2, of which the RRC keeps 1/sps -> SNR = sps / (4 s2)
    rng = np.random.default_rng(3)
    sps = int(FS / cfg.baud_rate_hz)
    n0 = sps / (4 * 10**1.5)
    noisy = sig.with_samples(sig.samples + np.sqrt(n0) * rng.standard_normal(len(sig)))
    _, evm = demod_and_evm(noisy, cfg, Genie(1e9, gain=None))
    assert evm == pytest.approx(100 / np.sqrt(10**1.5), abs=1.5)


def test_ideal_constellation_zero_evm_and_errors():
    ref = qpsk_symbols(SoiConfig())
    assert symbol_errors(ref, ref) == 0
    assert symbol_errors(-ref, ref) == ref.size
