"""Adapter running a blackbox as an external process.

Wire protocol: the point is written to a temporary file as one line of
space-separated ``%.17g`` decimals, the command is invoked as
``command <file>``, and it must print one line with ``m + J`` decimals
(objectives, then constraints). Any failure to produce that line is a
hidden failure; failing to start the program at all is an I/O error.
"""

from __future__ import annotations

import math
import os
import shlex
import subprocess
import tempfile
import threading
from dataclasses import dataclass, field

import numpy as np

from ..core import BlackboxIOError, Evaluation, ProblemSpec, hidden_failure, make_evaluation


def format_point(x) -> str:
    return " ".join(format(float(v), ".17g") for v in np.asarray(x, dtype=float).reshape(-1))


def parse_outputs(text: str, count: int) -> list[float] | None:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 1:
        return None
    tokens = lines[0].split()
    if len(tokens) != count:
        return None
    try:
        values = [float(t) for t in tokens]
    except ValueError:
        return None
    if any(math.isnan(v) for v in values):
        return None
    return values


@dataclass
class ExternalBlackbox:
    command: str
    spec: ProblemSpec
    timeout: float = 60.0
    name: str = "external"
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")

    def evaluate(self, x) -> Evaluation:
        return evaluate_external(self, x)


def evaluate_external(bb: ExternalBlackbox, x) -> Evaluation:
    x = np.asarray(x, dtype=float)
    spec = bb.spec
    fd, path = tempfile.mkstemp(prefix="bb_", suffix=".txt")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(format_point(x) + "\n")
        argv = shlex.split(bb.command) + [path]
        with bb._lock:
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, timeout=bb.timeout)
            except subprocess.TimeoutExpired:
                return hidden_failure(x, spec.m, spec.j_count)
            except OSError as exc:
                raise BlackboxIOError(f"cannot run blackbox {bb.command!r}: {exc}") from exc
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass
    if proc.returncode != 0:
        return hidden_failure(x, spec.m, spec.j_count)
    values = parse_outputs(proc.stdout, spec.m + spec.j_count)
    if values is None:
        return hidden_failure(x, spec.m, spec.j_count)
    return make_evaluation(x, values[: spec.m], values[spec.m:], spec)
