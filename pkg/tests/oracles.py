"""Independent reference computations used by the test suite.

Nothing here calls the FFT/DCT code paths in ``dequant.frames`` or the
iterative solvers; matrices are built from the textbook definitions and
optimization problems are handed to generic LP/SOCP solvers.
"""

import numpy as np
from scipy.optimize import linprog


def dgt_matrix(window, channels, hop, length):
    """Stored real-DGT analysis matrix, rows ordered (frequency, frame) like ``c.ravel()``."""
    lw = window.size
    n_frames = length // hop
    rows = channels // 2 + 1
    out = np.zeros((rows, n_frames, length), dtype=complex)
    j = np.arange(lw)
    for m in range(rows):
        weight = 1.0 if m == 0 or (channels % 2 == 0 and m == channels // 2) else np.sqrt(2.0)
        kernel = weight / np.sqrt(channels) * window * np.exp(-2j * np.pi * m * j / channels)
        for n in range(n_frames):
            idx = (n * hop - lw // 2 + j) % length
            np.add.at(out[m, n], idx, kernel)
    return out.reshape(rows * n_frames, length)


def wmdct_matrix(window, channels, length):
    """Orthonormal MDCT analysis matrix from the cosine definition."""
    m = channels
    n_frames = length // m
    j = np.arange(2 * m)
    out = np.zeros((m, n_frames, length))
    for k in range(m):
        kernel = np.sqrt(2.0 / m) * window * np.cos(np.pi / m * (j + 0.5 + m / 2) * (k + 0.5))
        for n in range(n_frames):
            idx = (n * m - m // 2 + j) % length
            np.add.at(out[k, n], idx, kernel)
    return out.reshape(m * n_frames, length)


def real_l1_box_lp(D, lower, upper):
    """Solve ``min ||c||_1 s.t. lower <= D c <= upper`` for real ``c`` exactly by LP."""
    n, p = D.shape
    cost = np.ones(2 * p)
    A_ub = np.vstack([np.hstack([D, -D]), np.hstack([-D, D])])
    b_ub = np.concatenate([upper, -lower])
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    c = res.x[:p] - res.x[p:]
    return c, float(res.fun)


def separable_interval_optimum(coefficients, half_width):
    """Per-coordinate point of ``[c - h, c + h]`` nearest zero, and its l1 norm."""
    c = np.asarray(coefficients, dtype=float)
    mag = np.maximum(np.abs(c) - half_width, 0.0)
    return np.sign(c) * mag, float(mag.sum())


def complex_l1_box_socp(D, weights, lower, upper):
    """``min sum(weights * |c|)`` over complex ``c`` with ``lower <= Re(D c) <= upper``.

    ``D`` maps stacked (real, imag) parts to the signal; solved with cvxpy.
    """
    import cvxpy as cp

    p = weights.size
    cr = cp.Variable(p)
    ci = cp.Variable(p)
    x = D[:, :p] @ cr + D[:, p:] @ ci
    mags = cp.norm(cp.vstack([cr, ci]), 2, axis=0)
    prob = cp.Problem(cp.Minimize(weights @ mags), [x >= lower, x <= upper])
    prob.solve(solver=cp.CLARABEL)
    return cr.value + 1j * ci.value, float(prob.value)
