"""Diagnostics: iteration traces, transfer curves, compensation maps, histograms."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from pec.core import CorrectionParams, compensation, correct, iterate_steps
from pec.image import Histogram256, histogram256

# toy vectors up to this size keep full snapshots, larger inputs only summaries
SNAPSHOT_LIMIT = 4096


@dataclass
class TraceStep:
    block: int
    step: int
    min: float
    max: float
    mean: float
    norm: float
    snapshot: np.ndarray | None = None


@dataclass
class IterationTrace:
    """Iterates of a run plus per-step relative errors.

    ``steps`` holds the start of each block (``step == 0``) and every
    iterate. ``relative_errors[i]`` belongs to ``error_index[i] = (t, k)``
    with ``k >= 1``, so there are ``sum(K)`` of them.
    """

    params: CorrectionParams
    steps: list[TraceStep] = field(default_factory=list)
    relative_errors: list[float] = field(default_factory=list)
    error_index: list[tuple[int, int]] = field(default_factory=list)

    def block_errors(self, t: int) -> list[float]:
        return [r for (b, _), r in zip(self.error_index, self.relative_errors) if b == t]

    def snapshots(self) -> list[np.ndarray]:
        return [s.snapshot for s in self.steps if s.snapshot is not None]

    def final(self) -> TraceStep:
        return self.steps[-1]


def _norm(a: np.ndarray, ord) -> float:
    return float(np.linalg.norm(a.ravel(), ord=ord))


def _trace(y: np.ndarray, params: CorrectionParams, keep: bool, ord=2) -> IterationTrace:
    trace = IterationTrace(params)
    prev = None
    for t, k, x in iterate_steps(y, params):
        nx = _norm(x, ord)
        trace.steps.append(
            TraceStep(t, k, float(x.min()), float(x.max()), float(x.mean()), nx, x.copy() if keep else None)
        )
        if k >= 1:
            diff = _norm(x - prev, ord)
            trace.relative_errors.append(diff / nx if nx > 0.0 else 0.0)
            trace.error_index.append((t, k))
        prev = x
    return trace


def toy_trace(M: int, params: CorrectionParams, seed: int = 0, y=None) -> IterationTrace:
    """Trace a length-``M`` vector, uniform random from ``seed`` unless ``y`` is given."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if y is None:
        y = np.random.default_rng(seed).random(M)
    y = np.asarray(y, dtype=np.float64).reshape(1, M)
    return _trace(y, params, keep=M <= SNAPSHOT_LIMIT)


def relative_error_trace(y, params: CorrectionParams, ord=2) -> IterationTrace:
    """Relative change ``||x^k - x^(k-1)|| / ||x^k||`` for every step, blocks in order.

    A zero iterate gives a relative error of 0. ``ord`` selects the norm
    (``numpy.linalg.norm`` convention on the flattened array).
    """
    y = np.asarray(y, dtype=np.float64)
    return _trace(y, params, keep=y.size <= SNAPSHOT_LIMIT, ord=ord)


@dataclass
class TransferCurve:
    inputs: np.ndarray
    outputs: np.ndarray


def transfer_curve(params: CorrectionParams, N: int = 256, **kwargs) -> TransferCurve:
    """Scalar input/output mapping on ``N`` evenly spaced inputs ``i / (N - 1)``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    v = np.arange(N, dtype=np.float64) / (N - 1)
    out = correct(v.reshape(1, N), params, **kwargs).reshape(N)
    return TransferCurve(v, out)


def compensation_map(y, params: CorrectionParams, **kwargs) -> tuple[np.ndarray, np.ndarray]:
    """Compensation implied by a correction run, raw and min-max normalised.

    A flat map normalises to zeros.
    """
    y = np.asarray(y, dtype=np.float64)
    eps = compensation(y, correct(y, params, **kwargs), params.mode)
    lo, hi = float(eps.min()), float(eps.max())
    norm = (eps - lo) / (hi - lo) if hi > lo else np.zeros_like(eps)
    return eps, norm


def histogram_comparison(y, x, channel: int = 0) -> tuple[Histogram256, Histogram256]:
    """Histograms of the same channel before and after correction."""
    return histogram256(y, channel), histogram256(x, channel)


# -- CSV ---------------------------------------------------------------------


def _fmt(v: float) -> str:
    return repr(float(v))


def trace_csv(trace: IterationTrace) -> str:
    """One row per shrinkage step: ``t, k, r_k, min, max, mean``."""
    by_key = {(s.block, s.step): s for s in trace.steps}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "k", "r_k", "min", "max", "mean"])
    for (t, k), r in zip(trace.error_index, trace.relative_errors):
        s = by_key[(t, k)]
        w.writerow([t, k, _fmt(r), _fmt(s.min), _fmt(s.max), _fmt(s.mean)])
    return buf.getvalue()


def curve_csv(curve: TransferCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["input", "output"])
    for a, b in zip(curve.inputs, curve.outputs):
        w.writerow([_fmt(a), _fmt(b)])
    return buf.getvalue()


def histogram_csv(hist: Histogram256) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin", "count"])
    for i, n in enumerate(hist.bins):
        w.writerow([i, int(n)])
    return buf.getvalue()
