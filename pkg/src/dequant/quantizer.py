"""Mid-riser uniform quantization and the feasibility box it induces.

A ``w``-bit mid-riser quantizer has step ``delta = 2**(1 - w)`` and levels
``±delta * (k + 1/2)``; zero is not a level.  Any signal whose samples lie
within ``delta / 2`` of the quantized samples re-quantizes to the same codes,
which is the consistency requirement the restoration solvers enforce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MIN_WORD_LENGTH",
    "MAX_WORD_LENGTH",
    "DEFAULT_CONSISTENCY_TOL",
    "Signal",
    "QuantizedSignal",
    "quantization_step",
    "quantize",
    "feasibility_bounds",
    "is_consistent",
]

MIN_WORD_LENGTH = 2
MAX_WORD_LENGTH = 16
DEFAULT_CONSISTENCY_TOL = 1e-9


def _as_samples(samples) -> np.ndarray:
    x = np.array(samples, dtype=float, copy=True).reshape(-1)
    x.setflags(write=False)
    return x


@dataclass(frozen=True, eq=False)
class Signal:
    """Real mono waveform.

    Parameters
    ----------
    samples : array_like
        Amplitudes, nominally in [-1, 1].
    sample_rate : int
        Sampling frequency in Hz.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        x = _as_samples(self.samples)
        if x.size < 1:
            raise ValueError("signal must contain at least one sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("signal contains non-finite samples")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True, eq=False)
class QuantizedSignal:
    """Output of :func:`quantize` together with the step that produced it."""

    samples: np.ndarray
    word_length: int
    delta: float
    sample_rate: int

    def __post_init__(self):
        x = _as_samples(self.samples)
        expected = quantization_step(self.word_length)
        if self.delta != expected:
            raise ValueError(f"delta {self.delta} does not match word length {self.word_length}")
        # Every sample must sit on the lattice ±delta*(k + 1/2) within the representable range.
        k = np.abs(x) / self.delta - 0.5
        if not np.allclose(k, np.round(k), rtol=0, atol=1e-9) or np.any(k < -1e-9):
            raise ValueError("samples are not mid-riser quantization levels")
        if np.any(np.abs(x) > 1 - self.delta / 2 + 1e-12):
            raise ValueError("samples exceed the largest representable level")
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.size

    @property
    def half_width(self) -> float:
        return self.delta / 2

    def as_signal(self) -> Signal:
        return Signal(self.samples, self.sample_rate)


def quantization_step(word_length: int) -> float:
    """Quantization step ``2**(1 - word_length)`` for a word length in bits."""
    if int(word_length) != word_length or not MIN_WORD_LENGTH <= word_length <= MAX_WORD_LENGTH:
        raise ValueError(
            f"word_length must be an integer in [{MIN_WORD_LENGTH}, {MAX_WORD_LENGTH}], got {word_length!r}"
        )
    return 2.0 ** (1 - int(word_length))


def _mid_riser(x: np.ndarray, delta: float) -> np.ndarray:
    sign = np.where(x >= 0, 1.0, -1.0)
    y = sign * delta * (np.floor(np.abs(x) / delta) + 0.5)
    top = 1 - delta / 2
    return np.clip(y, -top, top)


def quantize(x: Signal, word_length: int) -> QuantizedSignal:
    """Quantize with a ``word_length``-bit mid-riser uniform quantizer.

    Zero maps to ``+delta/2``.  Outputs are clamped to ``±(1 - delta/2)``, so a
    full-scale sample of exactly ±1 lands on the outermost level rather than on
    a level no ``w``-bit code can represent.

    Parameters
    ----------
    x : Signal
        Input waveform.  A bare array is accepted and treated as having a
        sample rate of 1 Hz.
    word_length : int
        Bits per sample, between 2 and 16.

    Returns
    -------
    QuantizedSignal
    """
    if not isinstance(x, Signal):
        x = Signal(x, 1)
    delta = quantization_step(word_length)
    return QuantizedSignal(_mid_riser(x.samples, delta), int(word_length), delta, x.sample_rate)


def feasibility_bounds(q: QuantizedSignal) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample ``(lower, upper)`` bounds of the consistency box."""
    h = q.delta / 2
    return q.samples - h, q.samples + h


def is_consistent(restored, q: QuantizedSignal, tol: float = DEFAULT_CONSISTENCY_TOL) -> bool:
    """True iff every restored sample lies within ``delta/2 + tol`` of its level."""
    r = restored.samples if isinstance(restored, Signal) else np.asarray(restored, dtype=float)
    if r.shape != q.samples.shape:
        raise ValueError(f"length mismatch: {r.shape} vs {q.samples.shape}")
    return bool(np.max(np.abs(r - q.samples)) <= q.delta / 2 + tol)
