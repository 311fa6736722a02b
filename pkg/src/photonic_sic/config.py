"""Scenario configuration: defaults, presets, overrides and validation."""

from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass
from importlib import resources

import jsonschema

__all__ = [
    "DEFAULTS",
    "Diagnostic",
    "SchemaViolation",
    "deep_merge",
    "set_key",
    "get_key",
    "load_schema",
    "list_presets",
    "load_preset",
    "load_config",
    "resolve",
    "validate",
    "physics_checks",
]

DEFAULTS = {
    "name": "custom",
    "description": "",
    "algorithm": "segmented",
    "seed": 0,
    "rates": {"generation_hz": 64e9, "capture_hz": 10e9},
    "carrier_hz": 9e9,
    "lo_hz": 8e9,
    "modulator": {"v_pi_volts": 4.0, "lo_amplitude_v": 1.0, "bias_offset_rad": 0.0},
    "si": {
        "baud_rate_hz": 1e9,
        "fft_size": 256,
        "occupied_subcarriers": 200,
        "cp_fraction": 0.0625,
        "qam_order": 16,
        "zero_padding_fraction": 0.0,
        "frame_duration_s": 4e-6,
        "waveform": "ofdm",
        "seed": 1,
    },
    "paths": {"antennas": [{"direct": {"delay_s": 4.768e-9, "gain_db": -5.8486}, "multipaths": []}]},
    "soi": None,
    "snr_db": None,
    "fiber": {"length_km": 0.0, "atten_db_per_km": 0.1825, "delay_per_km_s": 4.9e-6},
    "search": {},
    "sweep": None,
}


class SchemaViolation(Exception):
    """Config failed schema or physics validation; carries diagnostics."""

    module = "experiment-cli"

    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass
class Diagnostic:
    severity: str
    path: str
    message: str
    line: int | None = None

    def __str__(self):
        where = f"line {self.line}: " if self.line else ""
        return f"{self.severity}: {where}{self.path or '<root>'}: {self.message}"

    def to_dict(self):
        return {"severity": self.severity, "path": self.path, "message": self.message, "line": self.line}


def deep_merge(base, over):
    out = copy.deepcopy(base)
    for k, v in (over or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def get_key(cfg, dotted):
    cur = cfg
    for part in dotted.split("."):
        cur = cur[int(part)] if isinstance(cur, list) else cur[part]
    return cur


def set_key(cfg, dotted, value):
    """Set ``a.b.0.c`` style keys in place, creating dicts as needed."""
    parts = dotted.split(".")
    cur = cfg
    for part in parts[:-1]:
        if isinstance(cur, list):
            cur = cur[int(part)]
        else:
            if cur.get(part) is None:
                cur[part] = {}
            cur = cur[part]
    last = parts[-1]
    if isinstance(cur, list):
        cur[int(last)] = value
    else:
        cur[last] = value
    return cfg


def parse_override(text):
    """``key=value`` with the value parsed as JSON when possible."""
    if "=" not in text:
        raise ValueError(f"override {text!r} is not key=value")
    key, raw = text.split("=", 1)
    try:
        val = json.loads(raw)
    except json.JSONDecodeError:
        val = raw
    return key.strip(), val


def load_schema():
    return json.loads(resources.files("photonic_sic").joinpath("schema.json").read_text())


def list_presets():
    """(name, description) for every bundled preset, sorted by name."""
    out = []
    for p in sorted(resources.files("photonic_sic").joinpath("presets").iterdir(), key=lambda p: p.name):
        if p.name.endswith(".json"):
            d = json.loads(p.read_text())
            out.append((d["name"], d.get("description", "")))
    return out


def load_preset(name):
    p = resources.files("photonic_sic").joinpath("presets", f"{name}.json")
    if not p.is_file():
        raise FileNotFoundError(f"no preset named {name!r}")
    return json.loads(p.read_text()), p.read_text()


def load_config(ref):
    """Load a config file path or preset name; returns (raw dict, raw text)."""
    import os

    if os.path.isfile(ref):
        text = open(ref, encoding="utf-8").read()
        try:
            return json.loads(text), text
        except json.JSONDecodeError as exc:
            raise SchemaViolation([Diagnostic("error", "", f"invalid JSON: {exc.msg}", exc.lineno)]) from exc
    return load_preset(ref)


def resolve(raw, overrides=(), seed=None):
    cfg = deep_merge(DEFAULTS, raw)
    for item in overrides:
        k, v = parse_override(item) if isinstance(item, str) else item
        set_key(cfg, k, v)
    if seed is not None:
        cfg["seed"] = int(seed)
    return cfg


def _line_of(text, path):
    """Best-effort line of the last key of ``path`` in the raw JSON text."""
    if not text:
        return None
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    pat = re.compile(r'"%s"\s*:' % re.escape(keys[-1]))
    for i, line in enumerate(text.splitlines(), 1):
        if pat.search(line):
            return i
    return None


def validate(cfg, raw_text=None):
    """Schema and physics diagnostics for a resolved config."""
    diags = []
    validator = jsonschema.Draft202012Validator(load_schema())
    for err in sorted(validator.iter_errors(cfg), key=lambda e: list(map(str, e.absolute_path))):
        path = list(err.absolute_path)
        diags.append(Diagnostic("error", ".".join(map(str, path)), err.message, _line_of(raw_text, path)))
    if not diags:
        for d in physics_checks(cfg):
            d.line = _line_of(raw_text, d.path.split("."))
            diags.append(d)
    return diags


def _nyquist(diags, path, top_hz, rate_hz, what):
    nyq = rate_hz / 2
    if top_hz >= nyq:
        diags.append(Diagnostic("error", path, f"{what} reaches {top_hz / 1e9:g} GHz, at or above Nyquist {nyq / 1e9:g} GHz"))
    elif top_hz > 0.8 * nyq:
        diags.append(Diagnostic("warning", path, f"{what} at {top_hz / 1e9:g} GHz is near Nyquist {nyq / 1e9:g} GHz"))


def physics_checks(cfg):
    diags = []
    gen = cfg["rates"]["generation_hz"]
    cap = cfg["rates"]["capture_hz"]
    si = cfg["si"]
    baud = si["baud_rate_hz"]
    fc, lo = cfg["carrier_hz"], cfg["lo_hz"]
    _nyquist(diags, "carrier_hz", fc + baud / 2, gen, "SI band edge")
    _nyquist(diags, "lo_hz", lo, gen, "LO")
    if_hz = abs(fc - lo)
    if if_hz - 1.05 * baud / 2 <= 0:
        diags.append(Diagnostic("error", "lo_hz", "IF band reaches DC; move the LO away from the carrier"))
    _nyquist(diags, "rates.capture_hz", if_hz + 1.05 * baud / 2, cap, "IF band edge")
    n_gen = si["frame_duration_s"] * gen
    n_cap = si["frame_duration_s"] * cap
    for n, what in ((n_gen, "generation"), (n_cap, "capture")):
        if abs(n - round(n)) > 1e-6:
            diags.append(Diagnostic("error", "si.frame_duration_s", f"frame is not a whole number of {what} samples"))
    soi = cfg.get("soi")
    if soi:
        sps = cap / soi["baud_rate_hz"]
        if abs(sps - round(sps)) > 1e-9:
            diags.append(Diagnostic("error", "soi.baud_rate_hz", "capture rate must be an integer multiple of the SOI baud rate"))
        _nyquist(diags, "soi.baud_rate_hz", fc + soi["baud_rate_hz"] * (1 + soi.get("rolloff", 0.35)) / 2, gen, "SOI band edge")
    s = cfg.get("search") or {}
    seg = s.get("segments")
    if seg:
        guard = s.get("guard_segments", 0)
        if guard >= seg:
            diags.append(Diagnostic("error", "search.guard_segments", "guard segments must be fewer than segments"))
        else:
            for n, what in ((n_gen, "generation"), (n_cap, "capture")):
                if round(n) % seg:
                    diags.append(Diagnostic("error", "search.segments", f"{what} frame does not split into {seg} equal segments"))
            pop = s.get("population")
            if pop:
                per_iter = math.ceil(pop / (seg - guard))
                sev = "info" if per_iter == 1 else "warning"
                diags.append(Diagnostic(sev, "search.population", f"{per_iter} capture(s) per GA iteration"))
    for key in ("amplitudes", "amplitude_ranges"):
        vals = s.get(key)
        if vals is not None:
            flat = [v for r in vals for v in (r if isinstance(r, list) else [r])]
            if any(not 0 <= v <= 1 for v in flat):
                diags.append(Diagnostic("error", f"search.{key}", "amplitudes must lie in [0, 1]"))
    return diags
