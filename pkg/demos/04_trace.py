"""
Watching the iterations
=======================

With a reference signal the solver records SDR at every iteration.  The
gain climbs quickly in the first iterations and then settles as the
objective keeps decreasing.
"""

from dequant import dequantize, peak_normalize, quantize, read_wav
from dequant.data import clip_path

x = peak_normalize(read_wav(clip_path("speech_a.wav")).signal)
q = quantize(x, 4)
run = dequantize(q, "dgt", "synthesis", reference=x, trace_metrics=True)

print(" iter   l1 objective   dSDR")
for rec in run.trace:
    if rec.iteration in (1, 2, 3, 5, 10, 20, 50, 100, 200, 300, 400):
        print(f"{rec.iteration:5d}   {rec.l1_objective:12.3f}   {rec.delta_sdr:5.2f}")
best = max(run.trace, key=lambda r: r.delta_sdr)
print(f"best dSDR {best.delta_sdr:.2f} dB at iteration {best.iteration}")
