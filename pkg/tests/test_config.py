import json

import pytest

from photonic_sic.config import (
    DEFAULTS,
    SchemaViolation,
    list_presets,
    load_config,
    load_preset,
    parse_override,
    resolve,
    validate,
)


def _diags_at(cfg, path, severity=None):
    return [d for d in validate(cfg) if d.path == path and (severity is None or d.severity == severity)]


def test_carrier_near_nyquist_warns():
    cfg = resolve({}, [("carrier_hz", 28e9), ("lo_hz", 27e9)])
    assert _diags_at(cfg, "carrier_hz", "warning")
    assert not [d for d in validate(cfg) if d.severity == "error"]


def test_carrier_above_nyquist_is_error():
    # 40 GHz lies above the 32 GHz Nyquist of 64 GS/s as well as of 60 GS/s
    for rate in (64e9, 60e9):
        cfg = resolve({}, [("carrier_hz", 40e9), ("lo_hz", 39e9), ("rates.generation_hz", rate)])
        assert _diags_at(cfg, "carrier_hz", "error")


def test_ga_budget_is_one_capture_per_iteration():
    cfg = resolve({"search": {"population": 152, "segments": 160, "guard_segments": 8}})
    (d,) = _diags_at(cfg, "search.population")
    assert d.severity == "info" and d.message.startswith("1 capture")


def test_ga_budget_overflow_warns():
    cfg = resolve({"search": {"population": 200, "segments": 160, "guard_segments": 8}})
    (d,) = _diags_at(cfg, "search.population")
    assert d.severity == "warning" and d.message.startswith("2 capture")


def test_segments_must_divide_frame():
    cfg = resolve({"search": {"segments": 7}})
    assert _diags_at(cfg, "search.segments", "error")


def test_amplitude_out_of_range_is_error():
    cfg = resolve({"search": {"amplitude_ranges": [[0.2, 1.2]]}})
    assert [d for d in validate(cfg) if d.severity == "error" and "amplitude" in d.path]


def test_if_at_dc_is_error():
    cfg = resolve({}, [("lo_hz", 9e9)])
    assert _diags_at(cfg, "lo_hz", "error")


def test_schema_error_is_line_anchored(tmp_path):
    text = '{\n  "name": "bad",\n  "algorithm": "nope"\n}\n'
    p = tmp_path / "bad.json"
    p.write_text(text)
    raw, raw_text = load_config(str(p))
    (d,) = [d for d in validate(resolve(raw), raw_text) if d.severity == "error"]
    assert d.path == "algorithm" and d.line == 3
    assert str(d).startswith("error: line 3: algorithm:")


def test_invalid_json_reports_line(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "name": "x",\n  "seed": ,\n}\n')
    with pytest.raises(SchemaViolation) as exc:
        load_config(str(p))
    assert exc.value.diagnostics[0].line == 3


def test_overrides_parse_json_and_nest():
    assert parse_override("si.baud_rate_hz=5e8") == ("si.baud_rate_hz", 5e8)
    assert parse_override("name=abc") == ("name", "abc")
    with pytest.raises(ValueError):
        parse_override("novalue")
    cfg = resolve({}, ["si.baud_rate_hz=5e8", "paths.antennas.0.direct.gain_db=-6"], seed=4)
    assert cfg["si"]["baud_rate_hz"] == 5e8
    assert cfg["paths"]["antennas"][0]["direct"]["gain_db"] == -6
    assert cfg["seed"] == 4
    assert DEFAULTS["si"]["baud_rate_hz"] == 1e9  # defaults untouched


def test_defaults_validate():
    assert not [d for d in validate(resolve({})) if d.severity == "error"]


def test_every_preset_validates():
    for name, _ in list_presets():
        raw, text = load_preset(name)
        errs = [d for d in validate(resolve(raw), text) if d.severity == "error"]
        assert not errs, (name, errs)


def test_unknown_preset():
    with pytest.raises(FileNotFoundError):
        load_config("no-such-preset")


def test_presets_use_stated_gains():
    raw, _ = load_preset("two-path-fixed")
    gains = [a["direct"]["gain_db"] for a in raw["paths"]["antennas"]]
    assert [round(10 ** (g / 20), 12) for g in gains] == [0.51, 0.53]
    assert json.loads(json.dumps(raw)) == raw
