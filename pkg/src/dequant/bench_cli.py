"""Benchmark harness: dequantize WAV files over a grid of word lengths,
transforms and signal models, and tabulate the SDR improvement.

Each (file, word length, transform, model) cell runs the pipeline::

    read -> peak-normalize -> quantize -> pad/build frame -> solve
         -> strip padding -> evaluate -> emit

Example::

    dequant-bench --input clips/ --out results/ --bits 2-8 --jobs 4
"""

from __future__ import annotations

import argparse
import configparser
import csv
import glob
import io
import logging
import math
import sys
import time
import traceback
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .audio_io import peak_normalize, read_wav, write_wav
from .frames import FrameKind
from .metrics import evaluate
from .quantizer import MAX_WORD_LENGTH, MIN_WORD_LENGTH, quantize
from .solvers import (
    ConvergenceWarning,
    Model,
    SolverConfig,
    SolverRun,
    build_frame,
    default_params,
    solve_analysis_cp,
    solve_synthesis_dr,
)

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "CellFailure",
    "SweepResult",
    "run_single",
    "run_sweep",
    "emit_trace",
    "write_results",
    "write_summary",
    "summarize",
    "format_table",
    "main",
]

log = logging.getLogger(__name__)

RESULTS_SCHEMA = "# dequant-results v1"
SUMMARY_SCHEMA = "# dequant-summary v1"
TRACE_SCHEMA = "# dequant-trace v1"

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    inputs: tuple[str, ...]
    out_dir: str = "results"
    word_lengths: tuple[int, ...] = tuple(range(2, 9))
    transforms: tuple[str, ...] = ("dgt", "wmdct")
    models: tuple[str, ...] = ("synthesis", "analysis")
    gamma: float | None = None
    zeta: float | None = None
    max_iter: int = 400
    min_iter: int = 50
    emit_trace: bool = False
    emit_audio: bool = False
    jobs: int = 1
    sample_rate: int | None = 16000

    def __post_init__(self):
        if not self.inputs:
            raise ConfigError("no input given")
        for w in self.word_lengths:
            if not MIN_WORD_LENGTH <= w <= MAX_WORD_LENGTH:
                raise ConfigError(f"word length {w} outside [{MIN_WORD_LENGTH}, {MAX_WORD_LENGTH}]")
            if not default_params("dr", "dgt", w).tabulated:
                log.warning("word length %d is outside the parameter table; using extrapolated steps", w)
        for t in self.transforms:
            FrameKind(t)
        for m in self.models:
            Model(m)
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not 1 <= self.min_iter <= self.max_iter:
            raise ConfigError(f"need 1 <= min_iter <= max_iter, got {self.min_iter}, {self.max_iter}")

    def input_files(self) -> list[Path]:
        """Expand files, directories (``*.wav`` inside) and glob patterns, sorted and de-duplicated."""
        found = set()
        for item in self.inputs:
            p = Path(item)
            if p.is_dir():
                found.update(p.glob("*.wav"))
            elif p.exists():
                found.add(p)
            else:
                matches = glob.glob(item)
                if not matches:
                    raise ConfigError(f"input {item!r} matches nothing")
                found.update(Path(m) for m in matches)
        files = sorted(found, key=str)
        if not files:
            raise ConfigError("input set is empty")
        return files


@dataclass(frozen=True)
class ResultRow:
    file: str
    word_length: int
    transform: str
    model: str
    iterations_used: int
    sdr_quantized: float
    sdr_restored: float
    delta_sdr: float
    l1_objective: float
    linf_violation: float
    wall_time: float

    @property
    def key(self):
        return (self.file, self.word_length, self.transform, self.model)


@dataclass(frozen=True)
class CellFailure:
    file: str
    word_length: int
    transform: str
    model: str
    error: str

    @property
    def key(self):
        return (self.file, self.word_length, self.transform, self.model)


@dataclass
class SweepResult:
    rows: list[ResultRow] = field(default_factory=list)
    failures: list[CellFailure] = field(default_factory=list)


def _cell_stem(path: Path, word_length: int, transform: str, model: str) -> str:
    return f"{path.stem}_w{word_length}_{transform}_{model}"


def run_single(
    path,
    word_length: int,
    transform: str,
    model: str,
    cfg: ExperimentConfig,
) -> tuple[ResultRow, SolverRun]:
    """Run one grid cell and emit its optional audio and trace files."""
    path = Path(path)
    start = time.perf_counter()
    audio = read_wav(path)
    if cfg.sample_rate and audio.signal.sample_rate != cfg.sample_rate:
        raise ValueError(
            f"{path}: sample rate {audio.signal.sample_rate} Hz, expected {cfg.sample_rate} Hz "
            "(resample externally or pass --sample-rate)"
        )
    original = peak_normalize(audio.signal)
    q = quantize(original, word_length)
    model = Model(model)
    frame = build_frame(len(q), transform)
    solver_cfg = SolverConfig.defaults(
        model.algorithm,
        frame.kind,
        word_length,
        gamma=cfg.gamma if model is Model.SYNTHESIS else None,
        zeta=cfg.zeta if model is Model.ANALYSIS else None,
        max_iter=cfg.max_iter,
        min_iter=cfg.min_iter,
        trace_metrics=cfg.emit_trace,
    )
    with warnings.catch_warnings():
        # sigma = 1/zeta is the documented default; the diagnostic is logged once per sweep instead.
        warnings.simplefilter("ignore", ConvergenceWarning)
        solve = solve_synthesis_dr if model is Model.SYNTHESIS else solve_analysis_cp
        run = solve(q, frame, solver_cfg, reference=original)
    report = evaluate(original, q, run.restored, run.l1_objective)
    row = ResultRow(
        str(path),
        int(word_length),
        frame.kind.value,
        model.value,
        run.iterations_used,
        report.sdr_quantized,
        report.sdr_restored,
        report.delta_sdr,
        report.l1_objective,
        report.linf_violation,
        time.perf_counter() - start,
    )
    out = Path(cfg.out_dir)
    stem = _cell_stem(path, word_length, frame.kind.value, model.value)
    if cfg.emit_audio:
        out.mkdir(parents=True, exist_ok=True)
        write_wav(out / f"{stem}_restored.wav", run.restored, "float32")
    if cfg.emit_trace:
        out.mkdir(parents=True, exist_ok=True)
        emit_trace(run, out / f"{stem}_trace.csv")
    return row, run


def _run_cell(args):
    path, w, transform, model, cfg = args
    try:
        row, _ = run_single(path, w, transform, model, cfg)
        return row
    except Exception as exc:  # one bad cell must not take down the sweep
        log.debug("cell failed:\n%s", traceback.format_exc())
        return CellFailure(str(path), w, transform, model, f"{type(exc).__name__}: {exc}")


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Run every grid cell for every input file.

    With ``cfg.jobs > 1`` cells run in a process pool.  Rows and failures are
    sorted by (file, word length, transform, model), so the outcome does not
    depend on scheduling.
    """
    files = cfg.input_files()
    tasks = [
        (path, w, FrameKind(t).value, Model(m).value, cfg)
        for path in files
        for w in cfg.word_lengths
        for t in cfg.transforms
        for m in cfg.models
    ]
    if "analysis" in {Model(m).value for m in cfg.models}:
        log.warning("Chambolle-Pock uses sigma = 1/zeta, on the boundary of its convergence condition")
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            outcomes = list(pool.map(_run_cell, tasks))
    else:
        outcomes = [_run_cell(t) for t in tasks]
    result = SweepResult()
    for o in outcomes:
        (result.rows if isinstance(o, ResultRow) else result.failures).append(o)
    result.rows.sort(key=lambda r: r.key)
    result.failures.sort(key=lambda f: f.key)
    return result


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return "" if value is None else str(value)


def _write_csv(path: Path, schema: str, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    buf.write(schema + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([_fmt(v) for v in r])
    path.write_text(buf.getvalue())


def write_results(rows, path) -> None:
    names = [f.name for f in fields(ResultRow)]
    _write_csv(Path(path), RESULTS_SCHEMA, names, ([getattr(r, n) for n in names] for r in rows))


SUMMARY_COLUMNS = (
    "word_length",
    "transform",
    "model",
    "n",
    "mean_delta_sdr",
    "std_delta_sdr",
    "mean_sdr_quantized",
    "mean_sdr_restored",
    "mean_iterations",
)


def summarize(rows) -> list[tuple]:
    """Mean and standard deviation of the results per (word length, transform, model)."""
    cells: dict[tuple, list[ResultRow]] = {}
    for r in rows:
        cells.setdefault((r.word_length, r.transform, r.model), []).append(r)
    out = []
    for key in sorted(cells):
        group = cells[key]
        d = np.array([r.delta_sdr for r in group])
        with np.errstate(invalid="ignore"):  # inf - inf for perfect restorations
            std = float(np.std(d, ddof=1)) if len(group) > 1 else 0.0
        out.append(
            (
                *key,
                len(group),
                float(np.mean(d)),
                std,
                float(np.mean([r.sdr_quantized for r in group])),
                float(np.mean([r.sdr_restored for r in group])),
                float(np.mean([r.iterations_used for r in group])),
            )
        )
    return out


def write_summary(summary, path) -> None:
    _write_csv(Path(path), SUMMARY_SCHEMA, SUMMARY_COLUMNS, summary)


def format_table(summary) -> str:
    lines = [f"{'w':>2}  {'transform':<9} {'model':<9} {'n':>3}  {'dSDR mean':>9} {'std':>6}  {'iters':>6}"]
    for w, t, m, n, mean, std, _, _, iters in summary:
        lines.append(f"{w:>2}  {t:<9} {m:<9} {n:>3}  {mean:>9.3f} {std:>6.3f}  {iters:>6.1f}")
    return "\n".join(lines)


def emit_trace(run: SolverRun, path) -> None:
    """Write the per-iteration trace of ``run`` as CSV, one row per iteration."""
    if not run.config.trace_metrics:
        raise ValueError("run has no trace; solve with trace_metrics=True (--trace on the command line)")
    rows = ((t.iteration, t.l1_objective, t.linf_violation, t.sdr, t.delta_sdr) for t in run.trace)
    _write_csv(
        Path(path), TRACE_SCHEMA, ("iteration", "l1_objective", "linf_violation", "sdr", "delta_sdr"), rows
    )


def _parse_bits(text: str) -> tuple[int, ...]:
    bits = set()
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            bits.update(range(int(lo), int(hi) + 1))
        else:
            bits.add(int(part))
    if not bits:
        raise ValueError("empty word-length list")
    return tuple(sorted(bits))


def _choices(value: str, options: tuple[str, ...]) -> tuple[str, ...]:
    return options if value == "both" else (value,)


def _read_config_file(path) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    text = Path(path).read_text()
    parser.read_string("[bench]\n" + text)
    return {k.replace("-", "_"): v for k, v in parser["bench"].items()}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dequant-bench",
        description="Restore uniformly quantized WAV files by l1 minimization and report SDR gains.",
    )
    p.add_argument("--config", metavar="FILE", help="key = value file; command-line flags take precedence")
    p.add_argument("--input", nargs="+", metavar="PATH", help="WAV files, directories or glob patterns")
    p.add_argument("--out", default="results", metavar="DIR")
    p.add_argument("--bits", default="2-8", metavar="LIST", help="word lengths, e.g. 2-8 or 2,4,8")
    p.add_argument("--transform", default="both", choices=("dgt", "wmdct", "both"))
    p.add_argument("--model", default="both", choices=("synthesis", "analysis", "both"))
    p.add_argument("--gamma", type=float, help="Douglas-Rachford threshold (default: parameter table)")
    p.add_argument("--zeta", type=float, help="Chambolle-Pock primal step (default: parameter table)")
    p.add_argument("--max-iter", type=int, default=400)
    p.add_argument("--min-iter", type=int, default=50)
    p.add_argument("--trace", action="store_true", help="write per-iteration *_trace.csv files")
    p.add_argument("--emit-audio", action="store_true", help="write *_restored.wav files")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument(
        "--sample-rate", type=int, default=16000, help="required input rate in Hz; 0 accepts any rate"
    )
    p.add_argument("-v", "--verbose", action="store_true")
    return p


_BOOL_KEYS = {"trace", "emit_audio", "verbose"}


def parse_config(argv=None) -> ExperimentConfig:
    """Merge an optional ``--config`` file with command-line flags."""
    parser = _build_parser()
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        try:
            values = _read_config_file(pre.config)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {pre.config}: {exc}") from exc
        known = {a.dest for a in parser._actions}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        defaults = {}
        for key, raw in values.items():
            if key in _BOOL_KEYS:
                defaults[key] = raw.strip().lower() in ("1", "true", "yes", "on")
            elif key == "input":
                defaults[key] = raw.split()
            else:
                action = next(a for a in parser._actions if a.dest == key)
                try:
                    defaults[key] = action.type(raw) if action.type else raw.strip()
                except ValueError as exc:
                    raise ConfigError(f"bad value for {key!r} in {pre.config}: {raw!r}") from exc
        parser.set_defaults(**defaults)
    args = parser.parse_args(argv)
    if args.verbose:
        logging.getLogger("dequant").setLevel(logging.DEBUG)
    if not args.input:
        raise ConfigError("no input given (use --input or 'input =' in the config file)")
    try:
        bits = _parse_bits(args.bits)
    except ValueError as exc:
        raise ConfigError(f"bad --bits value {args.bits!r}: {exc}") from exc
    try:
        return ExperimentConfig(
            inputs=tuple(args.input),
            out_dir=args.out,
            word_lengths=bits,
            transforms=_choices(args.transform, ("dgt", "wmdct")),
            models=_choices(args.model, ("synthesis", "analysis")),
            gamma=args.gamma,
            zeta=args.zeta,
            max_iter=args.max_iter,
            min_iter=args.min_iter,
            emit_trace=args.trace,
            emit_audio=args.emit_audio,
            jobs=args.jobs,
            sample_rate=args.sample_rate or None,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    try:
        cfg = parse_config(argv)
        cfg.input_files()
    except ConfigError as exc:
        print(f"dequant-bench: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)

    result = run_sweep(cfg)
    out = Path(cfg.out_dir)
    write_results(result.rows, out / "results.csv")
    summary = summarize(result.rows)
    write_summary(summary, out / "summary.csv")
    table = format_table(summary)
    (out / "summary.txt").write_text(table + "\n")
    print(table)
    for f in result.failures:
        print(f"FAILED {f.file} w={f.word_length} {f.transform}/{f.model}: {f.error}", file=sys.stderr)
    if result.failures:
        print(f"{len(result.failures)} of {len(result.failures) + len(result.rows)} cells failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
