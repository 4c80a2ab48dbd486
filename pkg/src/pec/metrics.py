"""Image quality metrics: PSNR, SSIM, discrete entropy and lightness order error.

Planes are float arrays in ``[0, 1]``; 2-D arrays are treated as single
channel. SSIM and entropy run on the gray luminance of colour input, LOE on
``max(R, G, B)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from pec import _backend
from pec.image import histogram256, luminance

SSIM_WIN = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

LOE_MAX_SIDE = 100


def _plane(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 2:
        a = a[:, :, None]
    if a.ndim != 3:
        raise ValueError(f"expected a 2-D or (H, W, C) array, got shape {a.shape}")
    return a


def _same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def psnr(ref, test) -> float:
    """Peak signal-to-noise ratio in dB with peak 1; ``inf`` for identical input."""
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    _same_shape(ref, test)
    mse = float(np.mean((ref - test) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def gaussian_window(size: int = SSIM_WIN, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Normalised 1-D Gaussian taps."""
    r = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    w = np.exp(-(r * r) / (2.0 * sigma * sigma))
    return w / w.sum()


def _filter_valid(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    n = w.shape[0]
    rows = np.lib.stride_tricks.sliding_window_view(a, n, axis=0) @ w
    return np.lib.stride_tricks.sliding_window_view(rows, n, axis=1) @ w


def ssim_map(ref, test, data_range: float = 1.0) -> np.ndarray:
    """Local SSIM over every fully-contained 11x11 Gaussian window."""
    x = luminance(_plane(ref), "gray")[:, :, 0]
    y = luminance(_plane(test), "gray")[:, :, 0]
    _same_shape(x, y)
    if min(x.shape) < SSIM_WIN:
        raise ValueError(f"SSIM needs both sides >= {SSIM_WIN} pixels, got {x.shape}")
    w = gaussian_window()
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    mx = _filter_valid(x, w)
    my = _filter_valid(y, w)
    sxx = _filter_valid(x * x, w) - mx * mx
    syy = _filter_valid(y * y, w) - my * my
    sxy = _filter_valid(x * y, w) - mx * my
    num = (2.0 * mx * my + c1) * (2.0 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return num / den


def ssim(ref, test) -> float:
    """Mean structural similarity on gray luminance."""
    return float(np.mean(ssim_map(ref, test)))


def discrete_entropy(p) -> float:
    """Shannon entropy (bits) of the 256-bin gray-luminance histogram."""
    g = luminance(_plane(p), "gray")
    if g.size == 0:
        raise ValueError("entropy of an empty plane")
    bins = histogram256(g).bins
    q = bins[bins > 0] / bins.sum()
    h = float(-(q * np.log2(q)).sum())
    return max(h, 0.0)


def downsample_nearest(a: np.ndarray, max_side: int = LOE_MAX_SIDE) -> np.ndarray:
    """Nearest-neighbour shrink of a 2-D map so that ``max(H, W) <= max_side``."""
    h, w = a.shape
    scale = max(h, w) / max_side
    if scale <= 1.0:
        return a
    nh = max(1, int(h // scale))
    nw = max(1, int(w // scale))
    rows = np.minimum((np.arange(nh) * h) // nh, h - 1)
    cols = np.minimum((np.arange(nw) * w) // nw, w - 1)
    return a[np.ix_(rows, cols)]


def loe(original, enhanced, max_side: int = LOE_MAX_SIDE, threads: int = 1, backend: str = "auto") -> float:
    """Lightness order error between an image and its enhanced version.

    Lightness is ``max(R, G, B)``. Both maps are downsampled to at most
    ``max_side`` on the long edge, then every ordered pixel pair ``(p, q)``
    (self-pairs included, they never count) is checked for a flip of the
    relation ``L(p) >= L(q)``. The flip count is divided by the number of
    downsampled pixels.
    """
    a = _plane(original)
    b = _plane(enhanced)
    _same_shape(a, b)
    la = downsample_nearest(luminance(a, "max")[:, :, 0], max_side)
    lb = downsample_nearest(luminance(b, "max")[:, :, 0], max_side)
    m = la.size
    _, impl = _backend.get(backend)
    count = impl.loe_count(
        np.ascontiguousarray(la.ravel()), np.ascontiguousarray(lb.ravel()), int(threads)
    )
    return count / m


@dataclass
class MetricReport:
    """Metric values; ``None`` where a reference was needed but not given."""

    de: float
    psnr: float | None = None
    ssim: float | None = None
    loe: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["psnr"] is not None and math.isinf(d["psnr"]):
            d["psnr"] = "inf"
        return d


def evaluate(test, ref=None, loe_max_side: int = LOE_MAX_SIDE) -> MetricReport:
    """All metrics for ``test``; full-reference ones only when ``ref`` is given.

    ``ref`` doubles as the pre-correction original for LOE.
    """
    report = MetricReport(de=discrete_entropy(test))
    if ref is not None:
        report.psnr = psnr(ref, test)
        report.ssim = ssim(ref, test)
        report.loe = loe(ref, test, loe_max_side)
    return report
