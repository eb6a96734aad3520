"""
Quantizing a signal and measuring the damage
============================================

A mid-riser quantizer with word length w has step 2**(1 - w).  Zero is not
a level; the smallest output magnitude is half a step.
"""

import numpy as np

from dequant import Signal, feasibility_bounds, quantization_step, quantize, sdr

# A short chirp, peak 0.9
fs = 16000
t = np.arange(fs // 2) / fs
x = Signal(0.9 * np.sin(2 * np.pi * (200 + 800 * t) * t), fs)

for w in range(2, 9):
    q = quantize(x, w)
    print(f"w={w}  step={quantization_step(w):.5f}  levels used={np.unique(q.samples).size:3d}  "
          f"SDR={sdr(x, q):6.2f} dB")

# Every sample of the original lies in the box the quantized value defines.
q = quantize(x, 3)
lo, hi = feasibility_bounds(q)
print("original inside its box:", bool(np.all((lo <= x.samples) & (x.samples <= hi))))
print("zero maps to half a step:", quantize(np.zeros(1), 3).samples[0])
