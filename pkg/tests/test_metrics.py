import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from hypothesis.extra.numpy import arrays

from dequant.metrics import delta_sdr, evaluate, linf_violation, sdr
from dequant.quantizer import quantize


def test_sdr_examples(rng):
    u = rng.standard_normal(100)
    assert sdr(u, u) == math.inf
    assert sdr(u, u / 2) == pytest.approx(10 * math.log10(4), abs=1e-12)
    assert sdr(u, 0 * u) == pytest.approx(0.0, abs=1e-12)


def test_sdr_errors():
    with pytest.raises(ValueError):
        sdr(np.ones(3), np.ones(4))
    with pytest.raises(ValueError):
        sdr(np.zeros(3), np.ones(3))


def test_delta_sdr_examples(rng):
    x = rng.uniform(-0.9, 0.9, 200)
    q = quantize(x, 4)
    assert delta_sdr(x, q, q.samples) == 0.0
    assert delta_sdr(x, q, x) == math.inf
    closer = q.samples + 0.5 * (x - q.samples)
    assert delta_sdr(x, q, closer) > 0


def test_linf_violation_examples(rng):
    q = quantize(rng.uniform(-0.9, 0.9, 50), 5)
    assert linf_violation(q.samples, q) == 0.0
    assert linf_violation(q.samples + q.delta / 2, q) == 0.0
    assert linf_violation(q.samples + q.delta, q) == pytest.approx(q.delta / 2, abs=1e-15)
    with pytest.raises(ValueError):
        linf_violation(q.samples[1:], q)


def test_evaluation_report_delta_is_difference(rng):
    x = rng.uniform(-0.9, 0.9, 300)
    q = quantize(x, 3)
    r = evaluate(x, q, 0.5 * (x + q.samples), 1.0)
    assert r.delta_sdr == r.sdr_restored - r.sdr_quantized


vectors = arrays(float, 16, elements=st.floats(-1, 1, allow_nan=False))


@given(vectors, vectors, st.floats(0.01, 100).flatmap(lambda a: st.sampled_from([a, -a])))
def test_sdr_scale_invariant(u, v, alpha):
    assume(np.linalg.norm(u) > 1e-3 and np.linalg.norm(u - v) > 1e-3)
    assert sdr(alpha * u, alpha * v) == pytest.approx(sdr(u, v), abs=1e-6)


@given(vectors, vectors, vectors)
def test_delta_sdr_antisymmetric(x, a, b):
    assume(min(np.linalg.norm(x), np.linalg.norm(x - a), np.linalg.norm(x - b)) > 1e-3)
    assert delta_sdr(x, a, b) == pytest.approx(-delta_sdr(x, b, a), abs=1e-9)
