"""Least-squares SI channel estimation and composite reference construction.

The estimation runs at the capture rate on IF records: ``y`` is a capture
with the reference arm muted and ``x_j`` are the digitally downconverted
transmit waveforms. Frames are periodic, so a record covering
``[n - M, n + N - 1]`` is formed by prepending the last ``M`` samples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import ConditioningError, ConfigurationError
from .signals import RealSignal, analytic

__all__ = [
    "DataMatrixSpec",
    "LsModel",
    "periodic_record",
    "build_data_matrix",
    "ls_estimate",
    "construct_reference",
    "if_to_rf",
    "default_order",
]

RIDGE_COND = 1e10
RIDGE_SCALE = 1e-8


def default_order(max_delay_s, capture_rate_hz, margin=0.25, multiple=8):
    """Taps covering the longest multipath plus a margin, rounded up to ``multiple``.

    17 ns at 10 GS/s with a 25 % margin gives 212.5 -> 216.
    """
    m = int(np.ceil(max_delay_s * capture_rate_hz * (1 + margin)))
    return -(-m // multiple) * multiple


@dataclass(frozen=True)
class DataMatrixSpec:
    n_samples: int
    start_index: int
    order: int

    def __post_init__(self):
        if self.n_samples < 1 or self.order < 0:
            raise ConfigurationError("need n_samples >= 1 and order >= 0")
        if self.start_index < self.order:
            raise ConfigurationError("start_index must be at least the order (record must cover n - M)")


def periodic_record(x: RealSignal, order: int) -> np.ndarray:
    """One period of ``x`` preceded by its last ``order`` samples."""
    if order > len(x):
        raise ConfigurationError("order exceeds the frame length")
    s = x.samples
    return np.concatenate([s[len(s) - order :], s]) if order else s.copy()


def build_data_matrix(tx_if, spec: DataMatrixSpec) -> np.ndarray:
    """Toeplitz blocks side by side: block j, row i, column k is ``x_j[n + i - k]``."""
    blocks = []
    n, N, M = spec.start_index, spec.n_samples, spec.order
    for x in tx_if:
        x = np.asarray(getattr(x, "samples", x), dtype=float)
        if x.size < n + N:
            raise ConfigurationError(f"record of {x.size} samples does not cover [{n - M}, {n + N - 1}]")
        col = x[n : n + N]
        row = x[n - M : n + 1][::-1]
        blocks.append(linalg.toeplitz(col, row))
    return np.hstack(blocks)


@dataclass(frozen=True)
class LsModel:
    nt: int
    order: int
    coefficients: np.ndarray
    capture_rate_hz: float
    condition_number: float = float("nan")
    ridge: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if self.nt < 1 or self.order < 0:
            raise ConfigurationError("need nt >= 1 and order >= 0")
        if c.size != self.nt * (self.order + 1):
            raise ConfigurationError("coefficient length must be nt * (order + 1)")
        object.__setattr__(self, "coefficients", c)

    def taps(self, j):
        m1 = self.order + 1
        return self.coefficients[j * m1 : (j + 1) * m1]

    def to_dict(self):
        return {
            "nt": self.nt,
            "order": self.order,
            "capture_rate_hz": self.capture_rate_hz,
            "condition_number": self.condition_number,
            "ridge": self.ridge,
            "coefficients": self.coefficients.tolist(),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        return cls(d["nt"], d["order"], np.array(d["coefficients"]), d["capture_rate_hz"],
                   d.get("condition_number", float("nan")), d.get("ridge", 0.0))


def ls_estimate(y: RealSignal, tx_if, order: int, n_samples: int | None = None, ridge: bool = True) -> LsModel:
    """Solve ``min ||Psi h - y||`` over the first ``n_samples`` of the frame.

    Uses an SVD-based solver. If the condition number exceeds 1e10 and
    ``ridge`` is set, a Tikhonov term ``1e-8 * trace(Psi^T Psi) / cols`` is
    added; a rank-deficient matrix without ridge raises ``ConditioningError``.
    """
    tx_if = list(tx_if)
    for x in tx_if:
        if x.sample_rate_hz != y.sample_rate_hz or len(x) != len(y):
            raise ConfigurationError("IF records must match the capture rate and length")
    N = len(y) if n_samples is None else n_samples
    cols = len(tx_if) * (order + 1)
    if N <= cols:
        raise ConfigurationError(f"system not overdetermined: {N} rows for {cols} unknowns")
    if N > len(y):
        raise ConfigurationError("n_samples exceeds the capture length")
    spec = DataMatrixSpec(N, order, order)
    psi = build_data_matrix([periodic_record(x, order) for x in tx_if], spec)
    rhs = y.samples[:N]
    s = linalg.svdvals(psi)
    if s[0] == 0:
        if not np.any(rhs):
            return LsModel(len(tx_if), order, np.zeros(cols), y.sample_rate_hz, float("inf"))
        raise ConditioningError("data matrix is zero", float("inf"))
    cond = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
    lam = 0.0
    if cond > RIDGE_COND:
        if not ridge:
            raise ConditioningError(f"data matrix ill-conditioned (cond {cond:.3g})", cond)
        lam = RIDGE_SCALE * float(np.sum(s**2)) / cols
        a = np.vstack([psi, np.sqrt(lam) * np.eye(cols)])
        b = np.concatenate([rhs, np.zeros(cols)])
        h = linalg.lstsq(a, b, lapack_driver="gelsd")[0]
    else:
        h = linalg.lstsq(psi, rhs, lapack_driver="gelsd")[0]
    return LsModel(len(tx_if), order, h, y.sample_rate_hz, cond, lam)


def construct_reference(model: LsModel, tx_if) -> RealSignal:
    """Composite IF reference ``Psi h`` over the whole (periodic) frame."""
    tx_if = list(tx_if)
    if len(tx_if) != model.nt:
        raise ConfigurationError(f"model has {model.nt} antennas, got {len(tx_if)} records")
    n = len(tx_if[0])
    acc = np.zeros(n // 2 + 1, dtype=complex)
    for j, x in enumerate(tx_if):
        if x.sample_rate_hz != model.capture_rate_hz:
            raise ConfigurationError("record rate differs from the model capture rate")
        h = np.zeros(n)
        h[: model.order + 1] = model.taps(j)
        acc += np.fft.rfft(x.samples) * np.fft.rfft(h)
    return RealSignal(model.capture_rate_hz, np.fft.irfft(acc, n))


def if_to_rf(ref_if: RealSignal, lo_hz: float, gen_rate_hz: float) -> RealSignal:
    """Translate an IF reference to RF at the generator rate (inverse of ``digital_if``).

    IF content at ``f > 0`` is placed at ``f + lo_hz``.
    """
    n = len(ref_if)
    m = int(round(n * gen_rate_hz / ref_if.sample_rate_hz))
    if lo_hz + ref_if.sample_rate_hz / 2 >= gen_rate_hz / 2:
        raise ConfigurationError("translated reference would alias at the generator rate")
    z = np.fft.fft(analytic(ref_if.samples))
    zz = np.zeros(m, dtype=complex)
    half = n // 2
    zz[:half] = z[:half]
    zz *= m / n
    t = np.arange(m) / gen_rate_hz
    rf = np.real(np.fft.ifft(zz) * np.exp(2j * np.pi * lo_hz * t))
    return RealSignal(gen_rate_hz, rf)
