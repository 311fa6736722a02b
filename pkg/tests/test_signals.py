import numpy as np
import pytest
from scipy import signal as sps
from hypothesis import given, settings
from hypothesis import strategies as st

from photonic_sic.errors import ConfigurationError
from photonic_sic.metrics import occupied_bandwidth
from photonic_sic.signals import (
    ComplexBaseband,
    OfdmConfig,
    RealSignal,
    SoiConfig,
    digital_if,
    downconvert,
    fractional_delay,
    gen_ofdm,
    gen_qpsk,
    qpsk_symbols,
    resample,
    to_dac,
    tone,
    upconvert,
)


def _psd_obw(x, fs, fraction=0.99):
    """Independent oracle: integrate |X(f)|^2 outward from DC until `fraction` is reached."""
    X = np.abs(np.fft.fft(x)) ** 2
    f = np.fft.fftfreq(x.size, 1 / fs)
    order = np.argsort(np.abs(f), kind="stable")
    c = np.cumsum(X[order]) / X.sum()
    k = np.searchsorted(c, fraction)
    return 2 * np.abs(f[order][k])


def test_ofdm_frame_length_and_bandwidth():
    cfg = OfdmConfig(baud_rate_hz=1e9)
    bb = gen_ofdm(cfg, 64e9)
    assert len(bb) == 256_000
    # half-power span of the subcarrier comb against the in-band median PSD
    f, X = sps.welch(bb.samples, fs=64e9, nperseg=2**16, return_onesided=False)
    on = f[X > 0.5 * np.median(X[np.abs(f) < 0.4e9])]
    assert abs((on.max() - on.min()) - 1e9) <= cfg.subcarrier_spacing_hz
    assert bb.power() == pytest.approx(1.0, rel=1e-12)


def test_ofdm_half_gbaud_matches_psd_integration_oracle():
    cfg = OfdmConfig(baud_rate_hz=0.5e9)
    bb = gen_ofdm(cfg, 64e9)
    assert abs(_psd_obw(bb.samples, 64e9) - 0.5e9) <= 2 * cfg.subcarrier_spacing_hz
    assert abs(occupied_bandwidth(bb.samples, 64e9) - 0.5e9) <= 2 * cfg.subcarrier_spacing_hz


def test_ofdm_deterministic_per_seed():
    a = gen_ofdm(OfdmConfig(seed=3), 16e9).samples
    b = gen_ofdm(OfdmConfig(seed=3), 16e9).samples
    c = gen_ofdm(OfdmConfig(seed=4), 16e9).samples
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


def test_zero_padding_silences_fraction_of_frame():
    bb = gen_ofdm(OfdmConfig(zero_padding_fraction=0.5, frame_duration_s=4e-6), 16e9)
    quiet = np.abs(bb.samples) < 0.05 * np.sqrt(bb.power())
    assert 0.35 < quiet.mean() < 0.6


def test_ofdm_rejects_undersampling():
    with pytest.raises(ConfigurationError):
        gen_ofdm(OfdmConfig(baud_rate_hz=1e9), 1.5e9)


def test_qpsk_symbols_on_unit_circle_and_rrc_band():
    cfg = SoiConfig()
    syms = qpsk_symbols(cfg)
    assert syms.size == 2000
    assert np.allclose(np.abs(syms), 1.0)
    bb = gen_qpsk(cfg, 10e9)
    X = np.abs(np.fft.fft(bb.samples)) ** 2
    f = np.fft.fftfreq(len(bb), 1e-10)
    assert X[np.abs(f) > 1.01 * 0.5e9 * 1.35 / 2].sum() < 1e-20 * X.sum()


def test_qpsk_needs_integer_samples_per_symbol():
    with pytest.raises(ConfigurationError):
        gen_qpsk(SoiConfig(baud_rate_hz=0.3e9), 10e9)


def test_upconvert_downconvert_round_trip():
    bb = gen_ofdm(OfdmConfig(frame_duration_s=1e-6), 64e9)
    rf = upconvert(bb, 9e9, 1e9)
    assert rf.power() == pytest.approx(0.5, rel=1e-9)
    back = downconvert(rf, 9e9)
    assert np.allclose(back.samples, bb.samples, atol=1e-9)


def test_upconvert_rejects_alias():
    bb = ComplexBaseband(64e9, np.ones(64))
    with pytest.raises(ConfigurationError):
        upconvert(bb, 31.9e9, 1e9)


@settings(max_examples=25, deadline=None)
@given(k=st.integers(-500, 500))
def test_fractional_delay_integer_shift_is_roll(k):
    x = tone(1.3e9, 10e9, 1000) + tone(0.2e9, 10e9, 1000, 0.3)
    y = fractional_delay(x, k / 10e9)
    assert np.allclose(y.samples, np.roll(x.samples, k), atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(d=st.floats(-3e-9, 3e-9))
def test_fractional_delay_of_tone_matches_analytic_shift(d):
    fs, f0, n = 10e9, 1.25e9, 800
    x = tone(f0, fs, n)
    y = fractional_delay(x, d)
    expect = np.cos(2 * np.pi * f0 * (np.arange(n) / fs - d))
    assert np.allclose(y.samples, expect, atol=1e-9)


def test_fractional_delay_rejects_too_long():
    with pytest.raises(ValueError):
        fractional_delay(tone(1e9, 10e9, 10), 2e-9)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(50, 400), new=st.sampled_from([2e9, 5e9, 16e9, 64e9]))
def test_resample_preserves_duration(n, new):
    x = tone(0.3e9, 10e9, n)
    y = resample(x, new, allow_alias=True)
    assert abs(y.duration_s - x.duration_s) <= 1 / new + 1e-18


def test_resample_refuses_silent_aliasing():
    with pytest.raises(ConfigurationError):
        resample(tone(4e9, 10e9, 1000), 5e9)


def test_to_dac_sets_peak_to_peak():
    x = to_dac(tone(1e9, 10e9, 100, 7.0), 1.0)
    assert np.ptp(x.samples) == pytest.approx(1.0)


def test_digital_if_moves_tone_to_difference_frequency():
    rf = tone(9e9, 64e9, 64_000)
    if_ = digital_if(rf, 8e9, 10e9)
    assert if_.sample_rate_hz == 10e9 and len(if_) == 10_000
    f = np.fft.rfftfreq(len(if_), 1e-10)
    assert f[np.argmax(np.abs(np.fft.rfft(if_.samples)))] == pytest.approx(1e9)


def test_real_signal_rejects_nonfinite():
    with pytest.raises(ValueError):
        RealSignal(1.0, [0.0, np.nan])
    with pytest.raises(ValueError):
        RealSignal(0.0, [0.0])
