import dataclasses

import numpy as np
import pytest

from photonic_sic.channel import PathSet
from photonic_sic.errors import ConfigurationError
from photonic_sic.link import LinkConfig, SimulatedLink
from photonic_sic.metrics import band_power
from photonic_sic.signals import fractional_delay, scale


def _reference(tx, delay_s, amp):
    return scale(fractional_delay(tx, delay_s), amp)


def test_exact_reference_cancels(single_path_link, tx1, link_cfg):
    rep = single_path_link.depth(_reference(tx1, 4.768e-9, 0.51), link_cfg.band(1e9))
    assert rep.depth_db > 60


def test_each_submit_is_one_capture(single_path_link, tx1):
    before = single_path_link.captures
    single_path_link.baseline()
    single_path_link.submit(tx1)
    assert single_path_link.captures == before + 2


def test_reference_must_match_frame(single_path_link, tx1):
    from photonic_sic.signals import RealSignal

    with pytest.raises(ConfigurationError):
        single_path_link.submit(RealSignal(tx1.sample_rate_hz, tx1.samples[:-64]))


def test_if_power_follows_square_of_si_amplitude(tx1, link_cfg):
    # small-signal regime: IF amplitude is linear in the received field
    band = link_cfg.band(1e9)
    p = [
        band_power(SimulatedLink([tx1], PathSet.direct_only([4.768e-9], [g]), link_cfg).baseline(), band)
        for g in (0.51, 0.255)
    ]
    assert 10 * np.log10(p[0] / p[1]) == pytest.approx(20 * np.log10(2), abs=0.1)


def test_fiber_span_scales_power_not_depth(tx1, link_cfg):
    band = link_cfg.band(1e9)
    ref = _reference(tx1, 4.769e-9, 0.51)  # 1 ps error keeps the depth finite
    out = {}
    for km in (0.0, 25.2):
        cfg = dataclasses.replace(link_cfg, fiber_km=km)
        link = SimulatedLink([tx1], PathSet.direct_only([4.768e-9], [0.51]), cfg)
        rep = link.depth(ref, band)
        out[km] = (rep.depth_db, rep.power_before_db)
    assert out[25.2][0] == pytest.approx(out[0.0][0], abs=0.01)
    # optical loss counts twice after square-law detection
    assert out[0.0][1] - out[25.2][1] == pytest.approx(2 * 0.1825 * 25.2, abs=0.01)


def test_noise_is_seeded_per_capture(tx1, link_cfg):
    cfg = dataclasses.replace(link_cfg, snr_db=20.0)
    paths = PathSet.direct_only([4.768e-9], [0.51])
    a = SimulatedLink([tx1], paths, cfg)
    b = SimulatedLink([tx1], paths, cfg)
    first, second = a.baseline(), a.baseline()
    assert not np.array_equal(first.samples, second.samples)
    assert np.array_equal(first.samples, b.baseline().samples)


def test_link_config_rejects_bad_plan():
    with pytest.raises(ConfigurationError):
        LinkConfig(carrier_hz=9e9, lo_hz=9e9)
    with pytest.raises(ConfigurationError):
        LinkConfig(carrier_hz=15e9, lo_hz=8e9)  # 7 GHz IF above 5 GHz capture Nyquist
    with pytest.raises(ConfigurationError):
        LinkConfig(carrier_hz=40e9)
