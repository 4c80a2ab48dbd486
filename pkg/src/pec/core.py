"""Numerical kernels of the shrinkage exposure corrector.

All values live in the closed unit interval and every operation is
element-wise, so arrays of any shape are accepted (scalars, toy vectors,
``H x W x C`` images). Nothing here clamps: the iteration stays inside
``[0, 1]`` analytically for ``0 <= c <= 1`` and the tests rely on that.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from pec import _backend

MAX_BLOCKS = 3


class ExposureMode(str, enum.Enum):
    """Which way to correct: brighten (``UNDER``) or darken (``OVER``)."""

    UNDER = "under"
    OVER = "over"

    @property
    def sign(self) -> float:
        return 1.0 if self is ExposureMode.UNDER else -1.0

    @classmethod
    def parse(cls, value: "ExposureMode | str") -> "ExposureMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"exposure mode must be 'under' or 'over', got {value!r}") from None


@dataclass(frozen=True)
class CorrectionParams:
    """Coefficient ``c``, block schedule ``K`` (one count per block) and mode.

    The block count ``T`` is ``len(K)``.
    """

    c: float
    K: tuple[int, ...]
    mode: ExposureMode = ExposureMode.UNDER

    def __post_init__(self):
        object.__setattr__(self, "mode", ExposureMode.parse(self.mode))
        object.__setattr__(self, "K", tuple(int(k) for k in self.K))
        object.__setattr__(self, "c", float(self.c))
        check_coefficient(self.c)
        if not 1 <= len(self.K) <= MAX_BLOCKS:
            raise ValueError(f"block count T must be in [1, {MAX_BLOCKS}], got {len(self.K)}")
        if any(k < 1 for k in self.K):
            raise ValueError(f"every per-block iteration count must be >= 1, got {list(self.K)}")

    @property
    def T(self) -> int:
        return len(self.K)

    @property
    def total_steps(self) -> int:
        return sum(self.K)

    @classmethod
    def default(cls, mode: "ExposureMode | str") -> "CorrectionParams":
        """Heuristic defaults: strong brightening, gentle darkening.

        Under: ``c=1, K=(1, 1, 1)``. Over: ``c=0.5, K=(3,)``.
        """
        mode = ExposureMode.parse(mode)
        if mode is ExposureMode.UNDER:
            return cls(1.0, (1, 1, 1), mode)
        return cls(0.5, (3,), mode)

    def to_dict(self) -> dict:
        return {"mode": self.mode.value, "c": self.c, "T": self.T, "K": list(self.K)}


class Step(NamedTuple):
    """One iterate of the scheme: ``block`` is 1-based, ``step`` is 0 for the block's start."""

    block: int
    step: int
    x: np.ndarray


def check_coefficient(c: float) -> None:
    if not (0.0 <= c <= 1.0) or math.isnan(c):
        raise ValueError(f"coefficient c must satisfy 0 <= c <= 1, got {c}")


def check_unit(a: np.ndarray, name: str = "input") -> np.ndarray:
    """Return ``a`` as float64, raising if any element leaves ``[0, 1]``."""
    a = np.asarray(a, dtype=np.float64)
    if a.size and not (a.min() >= 0.0 and a.max() <= 1.0):
        raise ValueError(f"{name} values must lie in [0, 1]")
    return a


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def adversarial(z, c: float) -> np.ndarray:
    """Exposure adversarial function ``c * z * (1 - z)``.

    Symmetric about ``z = 1/2`` and bounded by ``c / 4``.
    """
    check_coefficient(c)
    z = check_unit(z, "z")
    return c * z * (1.0 - z)


def _adv(z: np.ndarray, c: float) -> np.ndarray:
    return c * z * (1.0 - z)


def _apply(g: np.ndarray, f: np.ndarray, mode: ExposureMode) -> np.ndarray:
    return g + f if mode is ExposureMode.UNDER else g - f


def warm_start(y, c: float, mode: "ExposureMode | str") -> np.ndarray:
    """Initial correction ``y + f(y)`` (under) or ``y - f(y)`` (over)."""
    mode = ExposureMode.parse(mode)
    y = check_unit(y, "y")
    return _apply(y, adversarial(y, c), mode)


def block_iterate(g, x0, c: float, K: int, mode: "ExposureMode | str") -> np.ndarray:
    """Run ``K`` shrinkage steps ``x <- g +/- f(x)`` starting from ``x0``."""
    mode = ExposureMode.parse(mode)
    check_coefficient(c)
    g = check_unit(g, "g")
    x = check_unit(x0, "x0")
    _check_same_shape(g, x)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    for _ in range(int(K)):
        x = _apply(g, _adv(x, c), mode)
    return x


def iterate_steps(y, params: CorrectionParams) -> Iterator[Step]:
    """Yield every iterate of the full schedule, block by block.

    Each block yields its starting point (``step == 0``, the current anchor)
    followed by ``K[t]`` shrinkage iterates. The last iterate equals
    :func:`correct` bit for bit.
    """
    y = check_unit(y, "y")
    c, mode = params.c, params.mode
    g = _apply(y, _adv(y, c), mode)
    for t, Kt in enumerate(params.K, start=1):
        x = g
        yield Step(t, 0, x)
        for k in range(1, Kt + 1):
            x = _apply(g, _adv(x, c), mode)
            yield Step(t, k, x)
        g = x


def correct(
    y,
    params: CorrectionParams,
    *,
    threads: int = 1,
    backend: str = "auto",
    out: np.ndarray | None = None,
) -> np.ndarray:
    """Correct exposure of ``y`` with the warm start and the block schedule.

    Args:
        y: intensities in ``[0, 1]``, any shape.
        params: coefficient, schedule and mode.
        threads: data-parallel width. Results are bit-identical for any value.
        backend: ``"auto"``, ``"cython"`` or ``"python"``.
        out: optional preallocated float64 buffer of ``y``'s shape.

    Returns:
        The corrected array (``out`` when given).
    """
    y = np.ascontiguousarray(check_unit(y, "y"))
    _, impl = _backend.get(backend)
    if out is None:
        out = np.empty_like(y)
    elif out.shape != y.shape or out.dtype != np.float64 or not out.flags.c_contiguous:
        raise ValueError("out must be a C-contiguous float64 array shaped like y")
    K = np.asarray(params.K, dtype=np.intc)
    impl.correct_flat(
        y.reshape(-1),
        out.reshape(-1),
        params.c,
        params.mode is ExposureMode.UNDER,
        K,
        int(threads),
    )
    return out


def compensation(y, x, mode: "ExposureMode | str") -> np.ndarray:
    """Recover the compensation map: ``x - y`` (under) or ``y - x`` (over)."""
    mode = ExposureMode.parse(mode)
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    _check_same_shape(y, x)
    return x - y if mode is ExposureMode.UNDER else y - x


def fixed_point(g, c: float, mode: "ExposureMode | str"):
    """Closed-form limit of a block started anywhere in ``[0, 1]``.

    Under solves ``c x^2 + (1 - c) x - g = 0``, over solves
    ``c x^2 - (1 + c) x + g = 0``; the root in ``[0, 1]`` is returned in the
    rationalised form, which stays accurate for small ``c``. With ``c = 0``
    the block is the identity map on ``g`` and ``g`` is returned.
    """
    mode = ExposureMode.parse(mode)
    check_coefficient(c)
    g_arr = check_unit(g, "g")
    if c == 0.0:
        res = g_arr.copy()
    else:
        if mode is ExposureMode.UNDER:
            b = 1.0 - c
            den = b + np.sqrt(b * b + 4.0 * c * g_arr)
        else:
            b = 1.0 + c
            den = b + np.sqrt(b * b - 4.0 * c * g_arr)
        # den vanishes only for c = 1, g = 0 (under), whose root is 0
        res = np.divide(2.0 * g_arr, den, out=np.zeros_like(g_arr), where=den > 0.0)
    return float(res) if res.ndim == 0 else res


def mirror_params(params: CorrectionParams) -> CorrectionParams:
    """Same coefficient and schedule with the opposite mode."""
    other = ExposureMode.OVER if params.mode is ExposureMode.UNDER else ExposureMode.UNDER
    return CorrectionParams(params.c, params.K, other)


def parse_schedule(K: "str | Sequence[int]") -> tuple[int, ...]:
    """Parse ``"1,2,3"`` (or a sequence) into a schedule tuple."""
    if isinstance(K, str):
        parts = [p for p in K.replace(" ", "").split(",") if p]
        if not parts:
            raise ValueError("empty K list")
        try:
            return tuple(int(p) for p in parts)
        except ValueError:
            raise ValueError(f"K must be a comma-separated list of integers, got {K!r}") from None
    return tuple(int(k) for k in K)
