"""Wall-clock runtime harness for :func:`pec.core.correct`.

Only the correction call is timed. The input is seeded uniform noise and
the output buffer is allocated once, outside the timed region.
"""
from __future__ import annotations

import hashlib
import os
import platform
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from pec import _backend
from pec.core import CorrectionParams, correct

DEFAULT_REPEATS = 20
DEFAULT_WARMUP = 3

ALLOCATION_POLICY = "output buffer preallocated outside the timed region"
IO_POLICY = "image decode/encode excluded"


@dataclass
class BenchResult:
    width: int
    height: int
    params: CorrectionParams
    repeats: int
    warmup: int
    threads: int
    backend: str
    seconds: list[float] = field(default_factory=list)
    checksum: str = ""

    @property
    def mean(self) -> float:
        return statistics.fmean(self.seconds)

    @property
    def median(self) -> float:
        return statistics.median(self.seconds)

    @property
    def stddev(self) -> float:
        return statistics.pstdev(self.seconds)

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "params": self.params.to_dict(),
            "repeats": self.repeats,
            "warmup": self.warmup,
            "threads": self.threads,
            "seconds": self.seconds,
            "mean": self.mean,
            "median": self.median,
            "stddev": self.stddev,
            "checksum": self.checksum,
            "backend": self.backend,
            "channels": 3,
            "allocation": ALLOCATION_POLICY,
            "io": IO_POLICY,
            "machine": platform.machine(),
            "cpu_count": os.cpu_count(),
        }


def synthetic_image(width: int, height: int, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).random((height, width, 3))


def checksum(a: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(a, dtype=np.float64).tobytes()).hexdigest()


def time_correct(
    width: int,
    height: int,
    params: CorrectionParams,
    repeats: int = DEFAULT_REPEATS,
    warmup: int = DEFAULT_WARMUP,
    threads: int | None = None,
    seed: int = 0,
    backend: str = "auto",
) -> BenchResult:
    """Time ``correct`` on a seeded ``height x width x 3`` noise image."""
    if width < 1 or height < 1:
        raise ValueError(f"image dimensions must be positive, got {width}x{height}")
    if repeats < 3:
        raise ValueError(f"repeats must be >= 3, got {repeats}")
    if warmup < 0:
        raise ValueError(f"warmup must be >= 0, got {warmup}")
    threads = threads or os.cpu_count() or 1
    name, _ = _backend.get(backend)
    y = synthetic_image(width, height, seed)
    out = np.empty_like(y)
    for _ in range(warmup):
        correct(y, params, threads=threads, backend=name, out=out)
    seconds = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        correct(y, params, threads=threads, backend=name, out=out)
        seconds.append(time.perf_counter() - t0)
    return BenchResult(
        width, height, params, repeats, warmup, threads, name, seconds, checksum(out)
    )


def compare_backends(width: int, height: int, params: CorrectionParams, **kwargs) -> dict[str, BenchResult]:
    """Run :func:`time_correct` once per available backend."""
    return {
        name: time_correct(width, height, params, backend=name, **kwargs)
        for name in _backend.available()
    }
