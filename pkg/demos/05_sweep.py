"""
A small benchmark sweep
=======================

The ``dequant-bench`` command runs the word-length grid over WAV files and
writes results.csv and summary.csv.  Here it is called in-process on the
bundled clips with a reduced grid.
"""

import tempfile
from pathlib import Path

from dequant.bench_cli import main
from dequant.data import clip_paths

with tempfile.TemporaryDirectory() as out:
    code = main(["--input", *map(str, clip_paths()), "--bits", "2,5,8", "--transform", "both",
                 "--model", "synthesis", "--max-iter", "100", "--jobs", "3", "--out", out])
    print("exit code", code)
    print(Path(out, "summary.csv").read_text())
