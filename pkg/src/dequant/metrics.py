"""Restoration quality measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quantizer import QuantizedSignal, Signal

__all__ = ["EvaluationReport", "sdr", "delta_sdr", "linf_violation", "evaluate"]


def _samples(x) -> np.ndarray:
    return x.samples if isinstance(x, (Signal, QuantizedSignal)) else np.asarray(x, dtype=float)


def sdr(u, v) -> float:
    """Signal-to-distortion ratio ``10 log10(||u||^2 / ||u - v||^2)`` in dB.

    Returns ``math.inf`` when ``v`` equals ``u`` exactly.
    """
    u, v = _samples(u), _samples(v)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    signal = float(np.sum(u * u))
    if signal == 0:
        raise ValueError("reference signal is all zeros")
    noise = float(np.sum((u - v) ** 2))
    if noise == 0:
        return math.inf
    return 10 * math.log10(signal / noise)


def delta_sdr(original, quantized, restored) -> float:
    """SDR gain of ``restored`` over ``quantized``, both measured against ``original``."""
    return sdr(original, restored) - sdr(original, quantized)


def linf_violation(restored, q: QuantizedSignal) -> float:
    """Largest distance by which a restored sample leaves its consistency interval."""
    r = _samples(restored)
    if r.shape != q.samples.shape:
        raise ValueError(f"length mismatch: {r.shape} vs {q.samples.shape}")
    return max(0.0, float(np.max(np.abs(r - q.samples))) - q.delta / 2)


@dataclass(frozen=True)
class EvaluationReport:
    sdr_quantized: float
    sdr_restored: float
    delta_sdr: float
    linf_violation: float
    l1_objective: float


def evaluate(original, q: QuantizedSignal, restored, l1_objective: float = math.nan) -> EvaluationReport:
    s_q = sdr(original, q)
    s_r = sdr(original, restored)
    return EvaluationReport(s_q, s_r, s_r - s_q, linf_violation(restored, q), float(l1_objective))
