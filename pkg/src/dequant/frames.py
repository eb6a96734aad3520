"""Parseval tight time-frequency frames: real DGT and windowed MDCT.

Both transforms act on periodic signals of a fixed length ``signal_length``.
The analysis operator ``A`` maps a real signal to a coefficient array and the
synthesis operator ``D`` is its adjoint with respect to the real inner product
``Re(vdot(c, d))``.  Windows are normalized so that ``D A`` is the identity.

Real DGT coefficients are stored as ``channels // 2 + 1`` rows (the
non-negative frequencies) by ``signal_length // hop`` columns.  Rows whose
conjugate partner is dropped are scaled by ``sqrt(2)`` so that the stored
array has the same Euclidean norm as the full spectrum; :attr:`FrameSpec.l1_weights`
undoes that scaling when the full-spectrum l1 norm is needed.

WMDCT coefficients are a real ``channels x (signal_length // channels)`` array
and the transform is an orthonormal basis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft
from scipy.signal import windows

__all__ = [
    "FrameKind",
    "FrameSpec",
    "UnsupportedFrameError",
    "make_dgt_frame",
    "make_wmdct_frame",
    "analyze",
    "synthesize",
    "operator_norm",
    "estimate_operator_norm",
    "padded_length",
]


class UnsupportedFrameError(ValueError):
    """Raised for frame geometries outside what this module implements."""


class FrameKind(str, enum.Enum):
    DGT_REAL = "dgt"
    WMDCT = "wmdct"


@dataclass(frozen=True, eq=False)
class FrameSpec:
    """Geometry and window of a tight frame.

    Build instances with :func:`make_dgt_frame` or :func:`make_wmdct_frame`.
    ``hop`` equals ``channels`` for the WMDCT.
    """

    kind: FrameKind
    window: np.ndarray
    window_length: int
    hop: int
    channels: int
    signal_length: int
    _index: np.ndarray = field(repr=False)
    _row_scale: np.ndarray = field(repr=False)

    @property
    def n_frames(self) -> int:
        return self.signal_length // self.hop

    @property
    def n_rows(self) -> int:
        if self.kind is FrameKind.DGT_REAL:
            return self.channels // 2 + 1
        return self.channels

    @property
    def shape(self) -> tuple[int, int]:
        """Shape of the stored coefficient array."""
        return (self.n_rows, self.n_frames)

    @property
    def coefficient_count(self) -> int:
        """Number of complex lattice points (DGT) or real coefficients (WMDCT)."""
        if self.kind is FrameKind.DGT_REAL:
            return self.channels * self.n_frames
        return self.signal_length

    @property
    def redundancy(self) -> float:
        return self.channels / self.hop

    @property
    def dtype(self):
        return complex if self.kind is FrameKind.DGT_REAL else float

    @property
    def l1_weights(self) -> np.ndarray:
        """Per-entry weights, broadcastable to :attr:`shape`.

        ``sum(l1_weights * abs(c))`` equals the l1 norm of the full
        (conjugate-symmetric) coefficient set.
        """
        return self._row_scale

    def l1_norm(self, c: np.ndarray) -> float:
        return float(np.sum(self._row_scale * np.abs(c)))

    def analyze(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.signal_length,):
            raise ValueError(f"expected a signal of length {self.signal_length}, got shape {x.shape}")
        segments = x[self._index] * self.window
        if self.kind is FrameKind.DGT_REAL:
            c = sfft.rfft(segments, n=self.channels, axis=1, norm="ortho")
        else:
            c = sfft.dct(_fold(segments, self.channels), type=4, axis=1, norm="ortho")
        return c.T * self._row_scale

    def synthesize(self, c) -> np.ndarray:
        c = np.asarray(c)
        if c.shape != self.shape:
            raise ValueError(f"expected coefficients of shape {self.shape}, got {c.shape}")
        if self.kind is FrameKind.DGT_REAL:
            # irfft counts each paired row twice, so undo the sqrt(2) storage scale first.
            half = (c / self._row_scale).T
            segments = sfft.irfft(half, n=self.channels, axis=1, norm="ortho")[:, : self.window_length]
        else:
            segments = _unfold(sfft.dct(np.real(c).T, type=4, axis=1, norm="ortho"))
        segments = segments * self.window
        return np.bincount(self._index.ravel(), weights=segments.ravel(), minlength=self.signal_length)


def _fold(z: np.ndarray, m: int) -> np.ndarray:
    h = m // 2
    a, b, c, d = z[:, :h], z[:, h:m], z[:, m : m + h], z[:, m + h :]
    return np.concatenate([-c[:, ::-1] - d, a - b[:, ::-1]], axis=1)


def _unfold(v: np.ndarray) -> np.ndarray:
    h = v.shape[1] // 2
    v1, v2 = v[:, :h], v[:, h:]
    return np.concatenate([v2, -v2[:, ::-1], -v1[:, ::-1], -v1], axis=1)


def _tight_normalize(g: np.ndarray, hop: int) -> np.ndarray:
    # Sum of squared hop-translates, periodized on the hop lattice.
    n = g.size
    pad = (-n) % hop
    energy = np.sum(np.concatenate([g, np.zeros(pad)]).reshape(-1, hop) ** 2, axis=0)
    if np.any(energy <= 1e-14 * energy.max()):
        raise UnsupportedFrameError("window translates do not cover every sample; reduce the hop")
    return g / np.sqrt(np.tile(energy, (n + pad) // hop)[:n])


def _check_positive_int(name, value):
    if int(value) != value or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def make_dgt_frame(
    window_length: int = 1024, channels: int = 1024, hop: int = 256, signal_length: int = 16384
) -> FrameSpec:
    """Real-input discrete Gabor transform with a tight Hann window.

    Only the painless case ``window_length <= channels`` is supported: each
    windowed segment fits inside one FFT, so the frame operator is diagonal
    and the window can be made tight in closed form.

    Parameters
    ----------
    window_length : int
        Support of the Hann window in samples.
    channels : int
        FFT length, i.e. the number of frequency channels.
    hop : int
        Time shift between adjacent windows.  Redundancy is ``channels / hop``.
    signal_length : int
        Length of the (padded) signals the frame acts on; a multiple of ``hop``.
    """
    window_length = _check_positive_int("window_length", window_length)
    channels = _check_positive_int("channels", channels)
    hop = _check_positive_int("hop", hop)
    signal_length = _check_positive_int("signal_length", signal_length)
    if signal_length % hop:
        raise ValueError(f"hop {hop} does not divide signal_length {signal_length}")
    if window_length > channels:
        raise UnsupportedFrameError(
            f"window_length {window_length} > channels {channels}: only painless frames are supported"
        )
    if window_length > signal_length:
        raise ValueError(f"window_length {window_length} exceeds signal_length {signal_length}")

    g = _tight_normalize(windows.hann(window_length, sym=False), hop)
    n_frames = signal_length // hop
    index = (np.arange(n_frames)[:, None] * hop - window_length // 2 + np.arange(window_length)) % signal_length

    # Rows 1 .. ceil(channels/2)-1 stand for a conjugate pair; Nyquist only exists for even channels.
    scale = np.full(channels // 2 + 1, np.sqrt(2.0))
    scale[0] = 1.0
    if channels % 2 == 0:
        scale[-1] = 1.0
    g.setflags(write=False)
    return FrameSpec(FrameKind.DGT_REAL, g, window_length, hop, channels, signal_length, index, scale[:, None])


def make_wmdct_frame(window_length: int = 1024, channels: int = 1024, signal_length: int = 16384) -> FrameSpec:
    """Windowed MDCT with ``channels`` bands and hop ``channels``.

    The Hann window of length ``window_length`` (between ``channels`` and
    ``2 * channels``) is centred in a ``2 * channels`` block and normalized so
    that the lapped transform is an orthonormal basis.  With
    ``window_length == channels`` the normalized window is flat over its
    support and blocks do not overlap.
    """
    window_length = _check_positive_int("window_length", window_length)
    channels = _check_positive_int("channels", channels)
    signal_length = _check_positive_int("signal_length", signal_length)
    if signal_length % channels:
        raise ValueError(f"channels {channels} does not divide signal_length {signal_length}")
    if channels % 2:
        raise UnsupportedFrameError("WMDCT needs an even number of channels")
    if not channels <= window_length <= 2 * channels or window_length % 2:
        raise UnsupportedFrameError(
            f"window_length must be even and within [channels, 2*channels], got {window_length}"
        )
    if signal_length < 2 * channels:
        raise ValueError(f"signal_length must be at least 2*channels = {2 * channels}")

    block = 2 * channels
    h = np.zeros(block)
    start = (block - window_length) // 2
    # Half-sample symmetric Hann; symmetry about the block centre is needed for aliasing cancellation.
    h[start : start + window_length] = np.sin(np.pi * (np.arange(window_length) + 0.5) / window_length) ** 2
    g = _tight_normalize(h, channels)
    n_frames = signal_length // channels
    index = (np.arange(n_frames)[:, None] * channels - channels // 2 + np.arange(block)) % signal_length
    g.setflags(write=False)
    return FrameSpec(
        FrameKind.WMDCT, g, window_length, channels, channels, signal_length, index, np.ones((1, 1))
    )


def analyze(frame: FrameSpec, x) -> np.ndarray:
    """Coefficients ``A x`` of a real signal of length ``frame.signal_length``."""
    return frame.analyze(x)


def synthesize(frame: FrameSpec, c) -> np.ndarray:
    """Real signal ``D c``; ``D`` is the adjoint of :func:`analyze`."""
    return frame.synthesize(c)


def operator_norm(frame: FrameSpec) -> float:
    """Operator norm of ``A``; exactly 1 for every frame this module builds."""
    return 1.0


def estimate_operator_norm(frame: FrameSpec, n_iter: int = 50, seed: int = 0) -> float:
    """Power iteration on ``D A`` as an independent check of :func:`operator_norm`."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(frame.signal_length)
    x /= np.linalg.norm(x)
    value = 0.0
    for _ in range(n_iter):
        y = frame.synthesize(frame.analyze(x))
        value = float(np.linalg.norm(y))
        x = y / value
    return float(np.sqrt(value))


def padded_length(n: int, kind: FrameKind | str, window_length: int, hop: int, channels: int) -> int:
    """Smallest admissible frame length holding ``n`` samples.

    DGT lengths are multiples of ``hop`` no shorter than the window; WMDCT
    lengths are multiples of ``channels`` no shorter than two blocks.
    """
    kind = FrameKind(kind)
    if kind is FrameKind.DGT_REAL:
        step, floor = hop, window_length
    else:
        step, floor = channels, max(window_length, 2 * channels)
    target = max(n, floor)
    return -(-target // step) * step
