"""Proximal maps and projections shared by the dequantization solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import FrameSpec
from .quantizer import QuantizedSignal

__all__ = [
    "BoxSet",
    "soft_threshold",
    "clip_magnitude",
    "project_time_box",
    "project_coeff_set",
]


@dataclass(frozen=True, eq=False)
class BoxSet:
    """Closed box ``{x : |x - center| <= half_width}`` in the time domain.

    ``half_width`` is per sample.  Samples appended as padding get a zero
    half-width, which pins them to zero.
    """

    center: np.ndarray
    half_width: np.ndarray

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(-1)
        hw = np.broadcast_to(np.asarray(self.half_width, dtype=float), center.shape).copy()
        if np.any(hw < 0):
            raise ValueError("half_width must be non-negative")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "half_width", hw)

    @classmethod
    def from_quantized(cls, q: QuantizedSignal, length: int | None = None) -> "BoxSet":
        """Consistency box of ``q``, zero-padded to ``length`` samples."""
        n = len(q)
        length = n if length is None else int(length)
        if length < n:
            raise ValueError(f"cannot pad {n} samples down to {length}")
        center = np.zeros(length)
        center[:n] = q.samples
        hw = np.zeros(length)
        hw[:n] = q.delta / 2
        return cls(center, hw)

    def __len__(self):
        return self.center.size

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.half_width

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.half_width


def _check_gamma(gamma, name):
    if not np.isfinite(gamma) or gamma < 0:
        raise ValueError(f"{name} must be a non-negative finite number, got {gamma!r}")


def soft_threshold(c, gamma: float, weights=1.0) -> np.ndarray:
    """Soft thresholding, the prox of ``gamma * sum(weights * |c|)``.

    Complex entries keep their phase and lose ``gamma * weight`` of their
    modulus; entries below the threshold become exactly zero.
    """
    _check_gamma(gamma, "gamma")
    c = np.asarray(c)
    if gamma == 0:
        return c.copy()
    mag = np.abs(c)
    thresh = gamma * np.asarray(weights, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        shrink = np.where(mag > thresh, 1.0 - thresh / mag, 0.0)
    return c * shrink


def clip_magnitude(c, lam: float, weights=1.0) -> np.ndarray:
    """Projection of each entry onto the disc of radius ``lam * weight``.

    Real entries become ``sign(z) * min(|z|, lam)``; complex ones are rescaled
    along their phase.
    """
    if not np.isfinite(lam) or lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam!r}")
    c = np.asarray(c)
    mag = np.abs(c)
    radius = lam * np.asarray(weights, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(mag > radius, radius / mag, 1.0)
    return c * scale


def project_time_box(y, box: BoxSet) -> np.ndarray:
    """Nearest point of ``box`` to ``y`` (samplewise clamp to the interval)."""
    y = np.asarray(y, dtype=float)
    if y.shape != box.center.shape:
        raise ValueError(f"length mismatch: {y.shape} vs {box.center.shape}")
    return np.clip(y, box.lower, box.upper)


def project_coeff_set(z, frame: FrameSpec, box: BoxSet) -> np.ndarray:
    """Projection onto ``{c : D c in box}`` for a Parseval tight frame.

    Computed as ``z - A(Dz - P(Dz))`` where ``P`` is :func:`project_time_box`;
    this is exact only because ``D A`` is the identity.
    """
    z = np.asarray(z)
    if z.shape != frame.shape:
        raise ValueError(f"expected coefficients of shape {frame.shape}, got {z.shape}")
    if len(box) != frame.signal_length:
        raise ValueError(f"box length {len(box)} does not match frame length {frame.signal_length}")
    y = frame.synthesize(z)
    residual = y - project_time_box(y, box)
    if not np.any(residual):
        return z.copy()
    return z - frame.analyze(residual)
