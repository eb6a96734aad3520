"""Bundled 16 kHz mono test clips and the generator that produced them.

The clips are synthetic: a glottal pulse train with a drifting pitch is
shaped by moving formant resonators, gated into syllables, and mixed with
short fricative noise bursts.  They are speech-like in the sense that
matters here (harmonic, time-varying, sparse in time-frequency) and free to
redistribute.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy import signal as sps

__all__ = ["CLIP_NAMES", "clip_path", "clip_paths", "synth_speech"]

DATA_DIR = Path(__file__).resolve().parent
CLIP_NAMES = ("speech_a.wav", "speech_b.wav", "speech_c.wav")

# (F1, F2, F3) in Hz for a handful of vowels.
_VOWELS = np.array(
    [
        (730, 1090, 2440),
        (270, 2290, 3010),
        (530, 1840, 2480),
        (570, 840, 2410),
        (300, 870, 2240),
        (660, 1720, 2410),
    ]
)
_BANDWIDTHS = (80.0, 110.0, 160.0)


def clip_path(name: str) -> Path:
    return DATA_DIR / name


def clip_paths() -> list[Path]:
    return [clip_path(n) for n in CLIP_NAMES]


def _resonate(x, freq, bw, fs):
    # Time-varying two-pole resonator, unity gain at DC-normalized peak.
    r = np.exp(-np.pi * bw / fs)
    theta = 2 * np.pi * freq / fs
    a1 = -2 * r * np.cos(theta)
    a2 = r * r
    y = np.zeros_like(x)
    y1 = y2 = 0.0
    gain = 1 - r
    for n in range(x.size):
        y0 = gain * x[n] - a1[n] * y1 - a2 * y2
        y[n] = y0
        y2, y1 = y1, y0
    return y


def synth_speech(duration: float = 2.2, sample_rate: int = 16000, seed: int = 0, f0: float = 115.0) -> np.ndarray:
    """Generate a peak-normalized speech-like waveform.

    Parameters
    ----------
    duration : float
        Length in seconds.
    sample_rate : int
        Sampling rate in Hz.
    seed : int
        Seeds syllable timing, vowel choice and pitch contour.
    f0 : float
        Mean fundamental frequency in Hz.
    """
    rng = np.random.default_rng(seed)
    fs = sample_rate
    n = int(round(duration * fs))
    t = np.arange(n) / fs

    # Syllables of 120-260 ms separated by short gaps, with an occasional pause.
    gate = np.zeros(n)
    targets = np.zeros((n, 3))
    fric = np.zeros(n)
    pos = int(0.08 * fs)
    while pos < n - int(0.1 * fs):
        length = int(rng.uniform(0.12, 0.26) * fs)
        end = min(pos + length, n)
        seg = np.arange(end - pos)
        # Stressed and unstressed syllables differ by several dB.
        stress = 10 ** (rng.normal(0, 6) / 20)
        gate[pos:end] = stress * np.sin(np.pi * seg / seg.size) ** 0.6
        v0, v1 = _VOWELS[rng.integers(len(_VOWELS), size=2)]
        mix = (seg / seg.size)[:, None]
        targets[pos:end] = (1 - mix) * v0 + mix * v1
        if rng.random() < 0.5:
            flen = int(rng.uniform(0.04, 0.09) * fs)
            fstart = max(pos - flen, 0)
            fric[fstart:pos] = np.hanning(pos - fstart) if pos > fstart else 0
        pos = end + int(rng.uniform(0.03, 0.08) * fs)
        if rng.random() < 0.15:
            pos += int(0.2 * fs)
    # Hold formants through gaps so the resonators do not jump.
    held = targets.copy()
    for k in range(1, n):
        if not held[k].any():
            held[k] = held[k - 1]
    held[~held.any(axis=1)] = _VOWELS[0]
    b, a = sps.butter(2, 30 / (fs / 2))
    held = sps.filtfilt(b, a, held, axis=0)

    jitter = sps.filtfilt(b, a, rng.standard_normal(n)) * 0.5
    pitch = f0 * (1 + 0.12 * np.sin(2 * np.pi * 0.7 * t + rng.uniform(0, 2 * np.pi)) - 0.1 * t / duration + jitter)
    phase = np.cumsum(pitch) / fs
    # Band-limited glottal pulses with a -9 dB/octave roll-off.
    source = np.zeros(n)
    for h in range(1, int(fs / 2 / (f0 * 1.3))):
        source += np.sin(2 * np.pi * h * phase) / h**1.5
    source *= gate * (1 - 0.4 * t / duration)

    voiced = sum(
        _resonate(source, held[:, i], bw, fs) * (1.0, 0.6, 0.3)[i] for i, bw in enumerate(_BANDWIDTHS)
    )
    hb, ha = sps.butter(4, 3000 / (fs / 2), btype="high")
    noise = sps.lfilter(hb, ha, rng.standard_normal(n)) * fric
    x = voiced / np.max(np.abs(voiced)) + 0.15 * noise
    return x / np.max(np.abs(x))
