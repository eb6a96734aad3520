"""Mono WAV reading/writing and peak normalization."""

from __future__ import annotations

import struct
import warnings
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .quantizer import Signal

__all__ = ["AudioFile", "UnsupportedFormatError", "read_wav", "write_wav", "peak_normalize"]

_PCM, _FLOAT, _EXTENSIBLE = 1, 3, 0xFFFE
_INT_DEPTHS = (8, 16, 24, 32)


class UnsupportedFormatError(ValueError):
    """The file is not a mono PCM/float WAV this module can handle."""


@dataclass(frozen=True)
class AudioFile:
    path: Path
    signal: Signal
    source_bit_depth: int


def _read_fmt(path: Path) -> tuple[int, int, int]:
    """Return ``(format_tag, channels, bits_per_sample)`` from the fmt chunk."""
    with open(path, "rb") as f:
        header = f.read(12)
        if len(header) < 12 or header[:4] not in (b"RIFF", b"RIFX") or header[8:12] != b"WAVE":
            raise UnsupportedFormatError(f"{path}: not a RIFF/WAVE file")
        if header[:4] == b"RIFX":
            raise UnsupportedFormatError(f"{path}: big-endian RIFX is not supported")
        while True:
            chunk = f.read(8)
            if len(chunk) < 8:
                raise UnsupportedFormatError(f"{path}: no fmt chunk")
            cid, size = chunk[:4], struct.unpack("<I", chunk[4:])[0]
            if cid != b"fmt ":
                f.seek(size + (size & 1), 1)
                continue
            body = f.read(size)
            tag, channels, _, _, _, bits = struct.unpack("<HHIIHH", body[:16])
            if tag == _EXTENSIBLE and len(body) >= 26:
                tag = struct.unpack("<H", body[24:26])[0]
            return tag, channels, bits


def read_wav(path) -> AudioFile:
    """Read a mono WAV file into amplitudes in [-1, 1].

    Integer samples are divided by ``2**(bits - 1)`` (8-bit data is unsigned
    and offset by 128 first), so full-scale negative maps to exactly -1.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    UnsupportedFormatError
        For compressed, multichannel or otherwise unsupported files.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    tag, channels, bits = _read_fmt(path)
    if channels != 1:
        raise UnsupportedFormatError(f"{path}: {channels} channels, only mono is supported")
    if not (tag == _PCM and bits in _INT_DEPTHS) and not (tag == _FLOAT and bits == 32):
        raise UnsupportedFormatError(f"{path}: format tag {tag} with {bits} bits is not supported")

    rate, data = wavfile.read(path)
    if data.dtype == np.uint8:
        x = (data.astype(float) - 128.0) / 128.0
    elif data.dtype.kind == "i":
        # scipy left-justifies 24-bit samples in int32, so the container width sets the scale.
        x = data.astype(float) / 2.0 ** (8 * data.dtype.itemsize - 1)
    else:
        x = data.astype(float)
    return AudioFile(path, Signal(x, rate), bits)


def write_wav(path, signal: Signal, bit_depth: int = 16) -> None:
    """Write ``signal`` as mono PCM (8/16/24/32 bits) or 32-bit float (``bit_depth="float32"``).

    Samples outside [-1, 1] are clipped with a warning.  Integer depths round
    to the nearest code, so reading back is accurate to one LSB.
    """
    path = Path(path)
    x = np.asarray(signal.samples, dtype=float)
    if np.any(np.abs(x) > 1):
        warnings.warn(f"{path}: {np.sum(np.abs(x) > 1)} samples outside [-1, 1] clipped", stacklevel=2)
        x = np.clip(x, -1.0, 1.0)

    if bit_depth == "float32":
        wavfile.write(path, signal.sample_rate, x.astype(np.float32))
        return
    if bit_depth not in _INT_DEPTHS:
        raise ValueError(f"bit_depth must be one of {_INT_DEPTHS} or 'float32', got {bit_depth!r}")

    scale = 2.0 ** (bit_depth - 1)
    codes = np.clip(np.round(x * scale), -scale, scale - 1).astype(np.int64)
    if bit_depth == 8:
        raw = (codes + 128).astype(np.uint8).tobytes()
    else:
        width = bit_depth // 8
        # Little-endian two's complement, truncated to the sample width.
        raw = codes.astype("<i8").view(np.uint8).reshape(-1, 8)[:, :width].tobytes()
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(bit_depth // 8)
        w.setframerate(signal.sample_rate)
        w.writeframes(raw)


def peak_normalize(signal: Signal) -> Signal:
    """Scale so that the largest magnitude is exactly 1."""
    peak = float(np.max(np.abs(signal.samples)))
    if peak == 0:
        raise ValueError("cannot peak-normalize an all-zero signal")
    return Signal(signal.samples / peak, signal.sample_rate)
