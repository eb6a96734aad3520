"""
Tight time-frequency frames
===========================

Both transforms are Parseval tight: analysis preserves energy and synthesis
undoes it exactly.  The Gabor frame is four times redundant, the MDCT is an
orthonormal basis.
"""

import numpy as np

from dequant import make_dgt_frame, make_wmdct_frame

rng = np.random.default_rng(0)
x = rng.standard_normal(16384)

for frame in (make_dgt_frame(1024, 1024, 256, 16384), make_wmdct_frame(1024, 1024, 16384)):
    c = frame.analyze(x)
    print(f"{frame.kind.value:6s} coefficients stored {c.shape}, redundancy {frame.redundancy:g}")
    print(f"       energy ratio      {np.linalg.norm(c) ** 2 / np.linalg.norm(x) ** 2:.15f}")
    print(f"       reconstruction    {np.linalg.norm(frame.synthesize(c) - x):.2e}")

# A pure tone concentrates in a few Gabor coefficients, which is what the
# l1 model rewards.
tone = np.sin(2 * np.pi * 64 / 1024 * np.arange(16384))
frame = make_dgt_frame(1024, 1024, 256, 16384)
mags = np.sort(np.abs(frame.analyze(tone)).ravel())[::-1]
share = np.sum(mags[: mags.size // 100] ** 2) / np.sum(mags**2)
print(f"share of energy in the top 1% of coefficients: {share:.6f}")
