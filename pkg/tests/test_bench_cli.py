import csv
from pathlib import Path

import numpy as np
import pytest

from dequant import Signal, quantize, write_wav
from dequant.bench_cli import (
    ConfigError,
    ExperimentConfig,
    ResultRow,
    emit_trace,
    main,
    parse_config,
    run_single,
    run_sweep,
    summarize,
    write_results,
    write_summary,
)
from dequant.data import clip_path, clip_paths
from helpers import assert_consistent

FAST = dict(max_iter=50, min_iter=50)


@pytest.fixture
def clips(tmp_path):
    """Three short tonal clips, 4096 samples at 16 kHz."""
    rng = np.random.default_rng(7)
    d = tmp_path / "clips"
    d.mkdir()
    t = np.arange(4096) / 16000
    for i in range(3):
        x = sum(rng.uniform(0.1, 0.3) * np.sin(2 * np.pi * f * t + rng.uniform(0, 6)) for f in rng.uniform(100, 3000, 4))
        write_wav(d / f"tone{i}.wav", Signal(x / np.abs(x).max() * 0.9, 16000))
    return d


def _data_rows(path):
    lines = Path(path).read_text().splitlines()
    assert lines[0].startswith("# dequant-")
    return list(csv.DictReader(lines[1:]))


def test_run_single_golden_w5(tmp_path):
    cfg = ExperimentConfig(inputs=("unused",), out_dir=str(tmp_path))
    row, run = run_single(clip_path("speech_a.wav"), 5, "dgt", "synthesis", cfg)
    assert row.delta_sdr > 0
    assert row.delta_sdr == pytest.approx(3.8011046104586086, abs=1e-6)
    assert row.delta_sdr == pytest.approx(row.sdr_restored - row.sdr_quantized, abs=1e-12)
    assert row.linf_violation <= 1e-9
    assert 50 <= row.iterations_used <= 400


def test_run_single_low_bits_beat_high_bits(tmp_path):
    cfg = ExperimentConfig(inputs=("unused",), out_dir=str(tmp_path))
    lo, _ = run_single(clip_path("speech_a.wav"), 2, "dgt", "synthesis", cfg)
    hi, _ = run_single(clip_path("speech_a.wav"), 8, "dgt", "synthesis", cfg)
    assert lo.delta_sdr > hi.delta_sdr


def test_run_single_outputs_and_requantization(clips, tmp_path):
    out = tmp_path / "out"
    cfg = ExperimentConfig(inputs=(str(clips),), out_dir=str(out), emit_trace=True, emit_audio=True, **FAST)
    row, run = run_single(clips / "tone0.wav", 3, "wmdct", "analysis", cfg)
    assert (out / "tone0_w3_wmdct_analysis_restored.wav").is_file()
    trace = _data_rows(out / "tone0_w3_wmdct_analysis_trace.csv")
    assert len(trace) == run.iterations_used == 50
    assert list(trace[0]) == ["iteration", "l1_objective", "linf_violation", "sdr", "delta_sdr"]
    from dequant import peak_normalize, read_wav

    original = peak_normalize(read_wav(clips / "tone0.wav").signal)
    assert_consistent(run.restored, quantize(original, 3))


def test_emit_trace_requires_flag(clips, tmp_path):
    cfg = ExperimentConfig(inputs=(str(clips),), out_dir=str(tmp_path), **FAST)
    _, run = run_single(clips / "tone0.wav", 4, "dgt", "synthesis", cfg)
    with pytest.raises(ValueError, match="trace"):
        emit_trace(run, tmp_path / "t.csv")


def test_emit_trace_hundred_rows(clips, tmp_path):
    cfg = ExperimentConfig(inputs=(str(clips),), out_dir=str(tmp_path), emit_trace=True, max_iter=100, min_iter=100)
    _, run = run_single(clips / "tone1.wav", 4, "dgt", "synthesis", cfg)
    emit_trace(run, tmp_path / "t.csv")
    text = (tmp_path / "t.csv").read_text().splitlines()
    assert len(text) == 1 + 1 + 100


def test_grid_cardinality(clips, tmp_path):
    cfg = ExperimentConfig(inputs=(str(clips),), out_dir=str(tmp_path), **FAST)
    result = run_sweep(cfg)
    assert not result.failures
    assert len(result.rows) == 3 * 28
    summary = summarize(result.rows)
    assert len(summary) == 28
    assert all(cell[3] == 3 for cell in summary)


def test_single_cell_sweep_equals_run_single(clips, tmp_path):
    cfg = ExperimentConfig(inputs=(str(clips / "tone2.wav"),), out_dir=str(tmp_path),
                           word_lengths=(4,), transforms=("dgt",), models=("synthesis",), **FAST)
    (row,) = run_sweep(cfg).rows
    single, _ = run_single(clips / "tone2.wav", 4, "dgt", "synthesis", cfg)
    assert row.delta_sdr == single.delta_sdr
    (cell,) = summarize([row])
    assert cell[4] == row.delta_sdr and cell[5] == 0.0


def test_failure_isolation(clips, tmp_path):
    bad = clips / "broken.wav"
    bad.write_bytes(b"not a wav file at all")
    base = ExperimentConfig(inputs=(str(clips / "tone0.wav"),), out_dir=str(tmp_path),
                            word_lengths=(3, 5), transforms=("dgt",), **FAST)
    mixed = ExperimentConfig(inputs=(str(clips / "tone0.wav"), str(bad)), out_dir=str(tmp_path),
                             word_lengths=(3, 5), transforms=("dgt",), **FAST)
    clean = run_sweep(base)
    result = run_sweep(mixed)
    assert len(result.failures) == 4
    assert all("broken.wav" in f.file for f in result.failures)
    assert [r.delta_sdr for r in result.rows] == [r.delta_sdr for r in clean.rows]


def test_sample_rate_mismatch_is_a_cell_failure(tmp_path):
    write_wav(tmp_path / "a.wav", Signal(np.sin(np.arange(4096) * 0.1) * 0.5, 8000))
    cfg = ExperimentConfig(inputs=(str(tmp_path / "a.wav"),), out_dir=str(tmp_path),
                           word_lengths=(4,), transforms=("dgt",), models=("synthesis",), **FAST)
    result = run_sweep(cfg)
    assert result.failures and "sample rate" in result.failures[0].error
    from dataclasses import replace

    assert run_sweep(replace(cfg, sample_rate=None)).rows


def _sweep_files(argv, out):
    assert main(argv + ["--out", str(out)]) == 0
    return (out / "summary.csv").read_bytes(), _strip_wall_time(out / "results.csv")


def _strip_wall_time(path):
    lines = path.read_text().splitlines()
    return [",".join(line.split(",")[:-1]) for line in lines]


def test_determinism_and_parallel_equivalence(clips, tmp_path):
    argv = ["--input", str(clips), "--bits", "2,6", "--max-iter", "50"]
    a = _sweep_files(argv, tmp_path / "a")
    b = _sweep_files(argv, tmp_path / "b")
    c = _sweep_files(argv + ["--jobs", "4"], tmp_path / "c")
    assert a == b == c


def test_results_csv_schema(clips, tmp_path):
    assert main(["--input", str(clips / "tone0.wav"), "--bits", "4", "--transform", "dgt",
                 "--model", "synthesis", "--max-iter", "50", "--out", str(tmp_path)]) == 0
    rows = _data_rows(tmp_path / "results.csv")
    assert list(rows[0]) == [
        "file", "word_length", "transform", "model", "iterations_used", "sdr_quantized",
        "sdr_restored", "delta_sdr", "l1_objective", "linf_violation", "wall_time",
    ]
    summary = _data_rows(tmp_path / "summary.csv")
    assert summary[0]["n"] == "1"
    assert (tmp_path / "summary.txt").is_file()


def test_exit_codes(clips, tmp_path, capsys):
    assert main(["--out", str(tmp_path)]) == 2
    assert main(["--input", str(tmp_path / "missing*.wav"), "--out", str(tmp_path)]) == 2
    assert main(["--input", str(clips), "--bits", "1-x"]) == 2
    assert main(["--input", str(clips), "--jobs", "0"]) == 2
    assert main(["--input", str(clips), "--transform", "fft"]) == 2
    (clips / "broken.wav").write_bytes(b"junk")
    code = main(["--input", str(clips), "--bits", "4", "--transform", "dgt", "--model", "synthesis",
                 "--max-iter", "50", "--out", str(tmp_path)])
    assert code == 1
    assert "broken.wav" in capsys.readouterr().err


def test_all_cells_failing_is_nonzero(tmp_path):
    (tmp_path / "junk.wav").write_bytes(b"junk")
    assert main(["--input", str(tmp_path / "junk.wav"), "--bits", "4", "--out", str(tmp_path / "o")]) == 1


def test_config_file_and_flag_precedence(clips, tmp_path):
    conf = tmp_path / "bench.conf"
    conf.write_text(
        f"input = {clips}\nbits = 2,3\ntransform = wmdct\nmodel = analysis\n"
        "max-iter = 80\ntrace = yes\nzeta = 0.01  # primal step\n"
    )
    cfg = parse_config(["--config", str(conf)])
    assert cfg.word_lengths == (2, 3) and cfg.transforms == ("wmdct",)
    assert cfg.models == ("analysis",) and cfg.max_iter == 80 and cfg.emit_trace and cfg.zeta == 0.01
    cfg = parse_config(["--config", str(conf), "--bits", "7", "--max-iter", "60", "--transform", "both"])
    assert cfg.word_lengths == (7,) and cfg.max_iter == 60 and cfg.transforms == ("dgt", "wmdct")
    assert cfg.zeta == 0.01


def test_config_file_errors(clips, tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text(f"input = {clips}\nbogus = 1\n")
    with pytest.raises(ConfigError):
        parse_config(["--config", str(conf)])
    conf.write_text(f"input = {clips}\nmax-iter = many\n")
    with pytest.raises(ConfigError):
        parse_config(["--config", str(conf)])
    with pytest.raises(ConfigError):
        parse_config(["--config", str(tmp_path / "nope.conf")])
    with pytest.raises(ConfigError):
        parse_config(["--input", str(clips), "--bits", "1"])


def test_bits_parsing(clips):
    assert parse_config(["--input", str(clips)]).word_lengths == tuple(range(2, 9))
    assert parse_config(["--input", str(clips), "--bits", "8,2-3"]).word_lengths == (2, 3, 8)


def test_input_expansion(clips):
    cfg = ExperimentConfig(inputs=(str(clips), str(clips / "tone1.wav"), str(clips / "tone*.wav")))
    assert [p.name for p in cfg.input_files()] == ["tone0.wav", "tone1.wav", "tone2.wav"]


def test_write_helpers_handle_inf(tmp_path):
    row = ResultRow("f", 4, "dgt", "synthesis", 50, 10.0, float("inf"), float("inf"), 1.0, 0.0, 0.1)
    write_results([row], tmp_path / "r.csv")
    assert _data_rows(tmp_path / "r.csv")[0]["delta_sdr"] == "inf"
    write_summary(summarize([row, row]), tmp_path / "s.csv")


def test_bundled_clips_are_readable():
    from dequant import read_wav

    for p in clip_paths():
        audio = read_wav(p)
        assert audio.signal.sample_rate == 16000
        assert len(audio.signal.samples) >= 2 * 16000
