"""Training-free exposure correction by segmented shrinkage iteration.

The per-pixel correction kernel is compiled with Cython when available and
falls back to numpy otherwise; :data:`BACKEND` names the one in use.
"""
from pec._backend import DEFAULT as BACKEND
from pec.core import (
    CorrectionParams,
    ExposureMode,
    adversarial,
    block_iterate,
    compensation,
    correct,
    fixed_point,
    iterate_steps,
    warm_start,
)

__all__ = [
    "BACKEND",
    "CorrectionParams",
    "ExposureMode",
    "adversarial",
    "block_iterate",
    "compensation",
    "correct",
    "fixed_point",
    "iterate_steps",
    "warm_start",
]

__version__ = "0.1.0"
