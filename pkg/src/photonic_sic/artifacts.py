"""File formats: waveform binary/CSV, PSD and constellation CSVs, JSON."""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .metrics import psd
from .signals import RealSignal

__all__ = [
    "write_waveform_bin",
    "read_waveform_bin",
    "write_waveform_csv",
    "read_waveform_csv",
    "write_csv",
    "write_psd_csv",
    "write_constellation_csv",
    "write_json",
]

_HEADER = struct.Struct("<dQ")


def write_waveform_bin(path, sig: RealSignal):
    """Header: rate (f64) and count (u64); payload: little-endian f64 samples."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(float(sig.sample_rate_hz), len(sig)))
        fh.write(np.asarray(sig.samples, dtype="<f8").tobytes())


def read_waveform_bin(path) -> RealSignal:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError("truncated waveform header")
    rate, count = _HEADER.unpack_from(data)
    payload = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if payload.size != count:
        raise ValueError(f"header says {count} samples, file holds {payload.size}")
    return RealSignal(rate, payload)


def write_waveform_csv(path, sig: RealSignal):
    write_csv(path, ["time_s", "amplitude"], zip(sig.t, sig.samples))


def read_waveform_csv(path) -> RealSignal:
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if arr.shape[0] < 2:
        raise ValueError("need at least two samples to infer the rate")
    return RealSignal(1.0 / (arr[1, 0] - arr[0, 0]), arr[:, 1])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_psd_csv(path, sig: RealSignal):
    f, p = psd(sig)
    with np.errstate(divide="ignore"):
        db = 10 * np.log10(np.maximum(p, 1e-300))
    write_csv(path, ["freq_hz", "psd_db"], zip(f, db))


def write_constellation_csv(path, symbols):
    write_csv(path, ["symbol_i", "symbol_q"], ((s.real, s.imag) for s in symbols))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj):
    """Deterministic JSON: sorted keys, non-finite floats as null."""
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")
