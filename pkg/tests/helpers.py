import numpy as np

from dequant import is_consistent, linf_violation, quantize


def assert_consistent(restored, q, tol=1e-9):
    """Box membership plus bit-exact re-quantization away from box edges."""
    x = np.asarray(getattr(restored, "samples", restored))
    assert linf_violation(x, q) <= tol
    assert is_consistent(x, q, tol)
    inside = np.abs(x - q.samples) < q.delta / 2 - 1e-12
    requantized = quantize(np.clip(x, -1, 1), q.word_length).samples
    assert np.array_equal(requantized[inside], q.samples[inside])
