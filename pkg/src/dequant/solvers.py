"""Douglas-Rachford (synthesis) and Chambolle-Pock (analysis) dequantization.

Synthesis model::

    minimize  ||c||_1   subject to  ||D c - q||_inf <= delta / 2

Analysis model::

    minimize  ||A x||_1 subject to  ||x - q||_inf <= delta / 2

``A``/``D`` are the analysis/synthesis operators of a Parseval tight frame
from :mod:`dequant.frames`.  Both solvers return a signal that is consistent
with the quantized input regardless of when iteration stops.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import frames as _frames
from .frames import FrameKind, FrameSpec
from .metrics import sdr
from .proximal import BoxSet, clip_magnitude, project_coeff_set, project_time_box, soft_threshold
from .quantizer import QuantizedSignal, Signal

__all__ = [
    "Algorithm",
    "Model",
    "SolverConfig",
    "SolverRun",
    "TraceRecord",
    "TableParam",
    "NumericalFailure",
    "ConvergenceWarning",
    "PARAMETER_TABLE",
    "default_params",
    "should_stop",
    "solve_synthesis_dr",
    "solve_analysis_cp",
    "build_frame",
    "dequantize",
]

DEFAULT_MAX_ITER = 400
DEFAULT_MIN_ITER = 50
DEFAULT_TOL = 1e-6


class NumericalFailure(FloatingPointError):
    """An iterate became non-finite."""


class ConvergenceWarning(UserWarning):
    pass


class Algorithm(str, enum.Enum):
    DOUGLAS_RACHFORD = "dr"
    CHAMBOLLE_POCK = "cp"


class Model(str, enum.Enum):
    SYNTHESIS = "synthesis"
    ANALYSIS = "analysis"

    @property
    def algorithm(self) -> Algorithm:
        return Algorithm.DOUGLAS_RACHFORD if self is Model.SYNTHESIS else Algorithm.CHAMBOLLE_POCK


# gamma (DR) or zeta (CP) for word lengths 2..8, tuned to stop after roughly 100 iterations.
PARAMETER_TABLE = {
    (Algorithm.DOUGLAS_RACHFORD, FrameKind.DGT_REAL): (0.0073, 0.0040, 0.0015, 0.00025, 0.000049, 0.000017, 0.0000066),
    (Algorithm.DOUGLAS_RACHFORD, FrameKind.WMDCT): (0.0204, 0.0123, 0.0055, 0.00035, 0.000084, 0.000028, 0.0000099),
    (Algorithm.CHAMBOLLE_POCK, FrameKind.DGT_REAL): (0.0055, 0.0031, 0.0013, 0.00017, 0.000041, 0.000015, 0.0000057),
    (Algorithm.CHAMBOLLE_POCK, FrameKind.WMDCT): (0.0213, 0.0110, 0.0053, 0.00023, 0.000066, 0.000022, 0.0000075),
}


class TableParam(NamedTuple):
    value: float
    tabulated: bool


def default_params(algorithm, transform_kind, word_length: int) -> TableParam:
    """Step parameter (gamma for DR, zeta for CP) for a word length.

    Word lengths 2..8 return the tabulated value with ``tabulated=True``.
    Others are extrapolated linearly in ``log(value)`` from the two nearest
    table entries and come back with ``tabulated=False``.
    """
    values = PARAMETER_TABLE[Algorithm(algorithm), FrameKind(transform_kind)]
    w = int(word_length)
    if 2 <= w <= 8:
        return TableParam(values[w - 2], True)
    logs = np.log(values)
    if w < 2:
        (w0, w1), (l0, l1) = (2, 3), logs[:2]
    else:
        (w0, w1), (l0, l1) = (7, 8), logs[-2:]
    return TableParam(float(np.exp(l0 + (l1 - l0) * (w - w0) / (w1 - w0))), False)


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of one solver run.

    ``gamma`` and ``lambda_relax`` are used by Douglas-Rachford; ``zeta``,
    ``sigma`` and ``rho`` by Chambolle-Pock.  ``sigma`` defaults to ``1/zeta``.
    """

    algorithm: Algorithm
    gamma: float | None = None
    lambda_relax: float = 1.0
    zeta: float | None = None
    sigma: float | None = None
    rho: float = 1.0
    max_iter: int = DEFAULT_MAX_ITER
    min_iter: int = DEFAULT_MIN_ITER
    tol: float = DEFAULT_TOL
    trace_metrics: bool = False

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.min_iter < 1 or self.max_iter < self.min_iter:
            raise ValueError(f"need 1 <= min_iter <= max_iter, got {self.min_iter}, {self.max_iter}")
        if self.algorithm is Algorithm.DOUGLAS_RACHFORD:
            if self.gamma is None or not self.gamma > 0:
                raise ValueError(f"gamma must be positive, got {self.gamma!r}")
            if not 0 < self.lambda_relax <= 2:
                raise ValueError(f"lambda_relax must lie in (0, 2], got {self.lambda_relax!r}")
        else:
            if self.zeta is None or not self.zeta > 0:
                raise ValueError(f"zeta must be positive, got {self.zeta!r}")
            if self.sigma is None:
                object.__setattr__(self, "sigma", 1.0 / self.zeta)
            if not self.sigma > 0:
                raise ValueError(f"sigma must be positive, got {self.sigma!r}")
            if not 0 <= self.rho <= 1:
                raise ValueError(f"rho must lie in [0, 1], got {self.rho!r}")

    @classmethod
    def defaults(cls, algorithm, transform_kind, word_length: int, **overrides) -> "SolverConfig":
        """Configuration with the tabulated step for ``word_length``."""
        algorithm = Algorithm(algorithm)
        step = default_params(algorithm, transform_kind, word_length).value
        key = "gamma" if algorithm is Algorithm.DOUGLAS_RACHFORD else "zeta"
        overrides = {k: v for k, v in overrides.items() if v is not None}
        overrides.setdefault(key, step)
        return cls(algorithm, **overrides)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    l1_objective: float
    linf_violation: float
    sdr: float | None = None
    delta_sdr: float | None = None


@dataclass(eq=False)
class SolverRun:
    """Result of one solver execution.

    ``restored`` covers the original (unpadded) support; ``coefficients`` are
    the final coefficients on the padded frame.
    """

    config: SolverConfig
    restored: Signal
    coefficients: np.ndarray
    iterations_used: int
    l1_objective: float
    trace: list[TraceRecord] = field(default_factory=list)


def should_stop(iteration: int, rel_change: float, cfg: SolverConfig) -> bool:
    """Stopping rule after ``iteration`` completed iterations.

    Never stops before ``cfg.min_iter``, always stops at ``cfg.max_iter`` and
    in between stops once the relative iterate change drops below ``cfg.tol``.
    """
    if iteration >= cfg.max_iter:
        return True
    if iteration < cfg.min_iter:
        return False
    return rel_change < cfg.tol


def _rel_change(new, old) -> float:
    num = np.linalg.norm(new - old)
    den = np.linalg.norm(old)
    if not np.isfinite(num):
        raise NumericalFailure("iterate became non-finite")
    return float(num / den) if den > 0 else (0.0 if num == 0 else math.inf)


class _Tracer:
    def __init__(self, frame: FrameSpec, box: BoxSet, n: int, reference, quantized):
        self.frame = frame
        self.box = box
        self.n = n
        self.reference = None
        if reference is not None:
            ref = reference.samples if isinstance(reference, Signal) else np.asarray(reference, dtype=float)
            if ref.shape != (n,):
                raise ValueError(f"reference has shape {ref.shape}, expected ({n},)")
            self.reference = ref
            self.sdr_quantized = sdr(ref, quantized)
        self.records: list[TraceRecord] = []

    def record(self, iteration: int, coefficients: np.ndarray, signal: np.ndarray):
        excess = np.abs(signal - self.box.center) - self.box.half_width
        viol = float(max(0.0, excess.max()))
        s = d = None
        if self.reference is not None:
            s = sdr(self.reference, signal[: self.n])
            d = s - self.sdr_quantized
        self.records.append(TraceRecord(iteration, self.frame.l1_norm(coefficients), viol, s, d))


def _prepare(q: QuantizedSignal, frame: FrameSpec, cfg: SolverConfig, expected: Algorithm):
    if cfg.algorithm is not expected:
        raise ValueError(f"config is for {cfg.algorithm.name}, expected {expected.name}")
    if frame.signal_length < len(q):
        raise ValueError(f"frame length {frame.signal_length} is shorter than the signal ({len(q)})")
    return BoxSet.from_quantized(q, frame.signal_length)


def solve_synthesis_dr(
    q: QuantizedSignal, frame: FrameSpec, cfg: SolverConfig, reference=None
) -> SolverRun:
    """Douglas-Rachford iterations for the synthesis (sparse) model.

    Starting from ``c = A q``, each iteration computes the projection
    ``c~ = proj(c)`` onto the consistent coefficients and updates
    ``c <- c + lambda * (soft_gamma(2 c~ - c) - c~)``.  The returned signal is
    synthesized from the last projected iterate, so it is consistent.

    Parameters
    ----------
    q : QuantizedSignal
        Observation; zero-padded internally to ``frame.signal_length``.
    frame : FrameSpec
        Tight frame for the padded length.
    cfg : SolverConfig
        Must use ``Algorithm.DOUGLAS_RACHFORD``.
    reference : Signal or array_like, optional
        Original signal; enables SDR columns in the trace.
    """
    box = _prepare(q, frame, cfg, Algorithm.DOUGLAS_RACHFORD)
    weights = frame.l1_weights
    tracer = _Tracer(frame, box, len(q), reference, q.samples) if cfg.trace_metrics else None

    c = frame.analyze(box.center)
    iteration = 0
    while True:
        c_proj = project_coeff_set(c, frame, box)
        c_new = c + cfg.lambda_relax * (soft_threshold(2 * c_proj - c, cfg.gamma, weights) - c_proj)
        iteration += 1
        change = _rel_change(c_new, c)
        c = c_new
        if tracer is not None:
            # Record what would be returned if the run stopped here.
            c_out = project_coeff_set(c, frame, box)
            tracer.record(iteration, c_out, project_time_box(frame.synthesize(c_out), box))
        if should_stop(iteration, change, cfg):
            break

    c_final = project_coeff_set(c, frame, box)
    # Clamp away round-off left by D A = I so the output is consistent to machine precision.
    x = project_time_box(frame.synthesize(c_final), box)
    return SolverRun(
        cfg,
        Signal(x[: len(q)], q.sample_rate),
        c_final,
        iteration,
        frame.l1_norm(c_final),
        tracer.records if tracer else [],
    )


def solve_analysis_cp(
    q: QuantizedSignal, frame: FrameSpec, cfg: SolverConfig, reference=None
) -> SolverRun:
    """Chambolle-Pock iterations for the analysis (cosparse) model.

    Primal ``p`` starts at ``q`` and the dual variable at zero.  Each iteration::

        dual <- clip_1(dual + sigma * A p_bar)
        p_new <- proj_box(p - zeta * D dual)
        p_bar <- p_new + rho * (p_new - p)

    Every primal iterate is in the consistency box by construction; the
    final ``p`` is returned.  Arguments as in :func:`solve_synthesis_dr`.
    """
    box = _prepare(q, frame, cfg, Algorithm.CHAMBOLLE_POCK)
    norm = _frames.operator_norm(frame)
    if cfg.rho == 1 and cfg.zeta * cfg.sigma * norm**2 >= 1:
        warnings.warn(
            f"zeta*sigma*||A||^2 = {cfg.zeta * cfg.sigma * norm ** 2:g} >= 1; convergence is not guaranteed",
            ConvergenceWarning,
            stacklevel=2,
        )
    weights = frame.l1_weights
    tracer = _Tracer(frame, box, len(q), reference, q.samples) if cfg.trace_metrics else None

    p = box.center.copy()
    p_bar = p.copy()
    dual = np.zeros(frame.shape, dtype=frame.dtype)
    iteration = 0
    while True:
        dual = clip_magnitude(dual + cfg.sigma * frame.analyze(p_bar), 1.0, weights)
        p_new = project_time_box(p - cfg.zeta * frame.synthesize(dual), box)
        p_bar = p_new + cfg.rho * (p_new - p)
        iteration += 1
        change = _rel_change(p_new, p)
        p = p_new
        if tracer is not None:
            tracer.record(iteration, frame.analyze(p), p)
        if should_stop(iteration, change, cfg):
            break

    coefficients = frame.analyze(p)
    return SolverRun(
        cfg,
        Signal(p[: len(q)], q.sample_rate),
        coefficients,
        iteration,
        frame.l1_norm(coefficients),
        tracer.records if tracer else [],
    )


def build_frame(
    n: int,
    transform="dgt",
    window_length: int = 1024,
    channels: int = 1024,
    hop: int = 256,
) -> FrameSpec:
    """Frame for a signal of ``n`` samples, padded as :func:`frames.padded_length` requires."""
    kind = FrameKind(transform)
    length = _frames.padded_length(n, kind, window_length, hop, channels)
    if kind is FrameKind.DGT_REAL:
        return _frames.make_dgt_frame(window_length, channels, hop, length)
    return _frames.make_wmdct_frame(window_length, channels, length)


def dequantize(
    q: QuantizedSignal,
    transform="dgt",
    model="synthesis",
    frame: FrameSpec | None = None,
    reference=None,
    **config,
) -> SolverRun:
    """Restore ``q`` with default frame geometry and tabulated parameters.

    Keyword arguments override :class:`SolverConfig` fields, e.g.
    ``gamma=1e-3`` or ``max_iter=100``.
    """
    model = Model(model)
    if frame is None:
        frame = build_frame(len(q), transform)
    cfg = SolverConfig.defaults(model.algorithm, frame.kind, q.word_length, **config)
    if model is Model.SYNTHESIS:
        return solve_synthesis_dr(q, frame, cfg, reference)
    return solve_analysis_cp(q, frame, cfg, reference)
