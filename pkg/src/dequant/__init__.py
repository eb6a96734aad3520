"""Restoration of uniformly quantized audio by l1 minimization.

The synthesis (sparse) model is solved with Douglas-Rachford, the analysis
(cosparse) model with Chambolle-Pock, both over Parseval tight Gabor or MDCT
frames.  Restored signals always re-quantize to the observed codes.
"""

from .audio_io import AudioFile, UnsupportedFormatError, peak_normalize, read_wav, write_wav
from .frames import (
    FrameKind,
    FrameSpec,
    UnsupportedFrameError,
    analyze,
    make_dgt_frame,
    make_wmdct_frame,
    operator_norm,
    synthesize,
)
from .metrics import EvaluationReport, delta_sdr, evaluate, linf_violation, sdr
from .proximal import BoxSet, clip_magnitude, project_coeff_set, project_time_box, soft_threshold
from .quantizer import QuantizedSignal, Signal, feasibility_bounds, is_consistent, quantization_step, quantize
from .solvers import (
    Algorithm,
    Model,
    NumericalFailure,
    SolverConfig,
    SolverRun,
    build_frame,
    default_params,
    dequantize,
    should_stop,
    solve_analysis_cp,
    solve_synthesis_dr,
)

__version__ = "0.1.0"
