"""Kernel backend selection.

The compiled Cython module is preferred; the numpy fallback is used when it
cannot be imported. Callers may also request a backend by name.
"""
from pec import _fallback

try:
    from pec import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

BACKENDS = ("auto", "cython", "python")

DEFAULT = "cython" if _compiled is not None else "python"


def available():
    """Names of the backends usable in this installation."""
    return ("cython", "python") if _compiled is not None else ("python",)


def get(name="auto"):
    """Return ``(resolved_name, module)`` for a backend request."""
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "auto":
        name = DEFAULT
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; use backend='python'")
        return name, _compiled
    return name, _fallback
