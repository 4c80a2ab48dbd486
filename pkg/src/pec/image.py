"""Image I/O, unit-interval conversion, luminance and histograms.

Planes are float64 arrays shaped ``(H, W, C)`` with ``C`` in ``{1, 3}``.
PNG and JPEG go through Pillow; binary PPM (P6) and PGM (P5) are handled
here so that malformed headers and >8-bit data get explicit errors.
"""
from __future__ import annotations

import io
import os
import re
from dataclasses import dataclass

import numpy as np

GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114])

FORMATS = ("png", "jpeg", "ppm")

_EXTENSIONS = {
    ".png": "png",
    ".jpg": "jpeg",
    ".jpeg": "jpeg",
    ".ppm": "ppm",
    ".pgm": "ppm",
    ".pnm": "ppm",
}


class ImageFormatError(ValueError):
    """Raised for malformed or unsupported image data."""


@dataclass
class RawImage:
    """8-bit image; ``samples`` is a ``(height, width, channels)`` uint8 array."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim == 2:
            s = s[:, :, None]
        if s.ndim != 3 or s.shape[2] not in (1, 3):
            raise ValueError(f"expected (H, W, 1|3) samples, got shape {s.shape}")
        if s.shape[0] < 1 or s.shape[1] < 1:
            raise ValueError("image must have positive height and width")
        if s.dtype != np.uint8:
            raise ValueError(f"samples must be uint8, got {s.dtype}")
        self.samples = np.ascontiguousarray(s)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]


@dataclass
class Histogram256:
    bins: np.ndarray

    @property
    def total(self) -> int:
        return int(self.bins.sum())


def as_plane(a) -> np.ndarray:
    """Coerce a 2-D or 3-D array into a validated ``(H, W, C)`` plane."""
    p = np.asarray(a, dtype=np.float64)
    if p.ndim == 2:
        p = p[:, :, None]
    if p.ndim != 3 or p.shape[2] not in (1, 3):
        raise ValueError(f"expected a (H, W, 1|3) plane, got shape {p.shape}")
    if p.shape[0] < 1 or p.shape[1] < 1:
        raise ValueError("plane must have positive height and width")
    if p.size and not (p.min() >= 0.0 and p.max() <= 1.0):
        raise ValueError("plane values must lie in [0, 1]")
    return p


def guess_format(data: bytes) -> str:
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return "png"
    if data[:3] == b"\xff\xd8\xff":
        return "jpeg"
    if data[:2] in (b"P5", b"P6"):
        return "ppm"
    raise ImageFormatError("unrecognised image data (expected PNG, JPEG, PPM or PGM)")


def format_from_path(path: "str | os.PathLike") -> str:
    """Format implied by the file extension; PPM when it is not recognised."""
    return _EXTENSIONS.get(os.path.splitext(str(path))[1].lower(), "ppm")


# -- netpbm ------------------------------------------------------------------

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _decode_netpbm(data: bytes) -> RawImage:
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise ImageFormatError(f"unsupported netpbm type {magic!r}; only binary P5/P6")
    pos = 2
    fields = []
    for _ in range(3):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise ImageFormatError("truncated netpbm header")
        try:
            fields.append(int(m.group(1)))
        except ValueError:
            raise ImageFormatError(f"bad netpbm header field {m.group(1)!r}") from None
        pos = m.end()
    width, height, maxval = fields
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise ImageFormatError("truncated netpbm header")
    pos += 1
    if width < 1 or height < 1:
        raise ImageFormatError("netpbm image has zero size")
    if not 1 <= maxval <= 255:
        raise ImageFormatError(
            f"unsupported bit depth: maxval {maxval} needs more than 8 bits"
            if maxval > 255
            else f"invalid maxval {maxval}"
        )
    channels = 3 if magic == b"P6" else 1
    n = width * height * channels
    body = data[pos : pos + n]
    if len(body) < n:
        raise ImageFormatError(f"truncated pixel data: expected {n} bytes, got {len(body)}")
    samples = np.frombuffer(body, dtype=np.uint8).reshape(height, width, channels)
    if maxval != 255:
        samples = np.round(samples.astype(np.float64) * (255.0 / maxval)).astype(np.uint8)
    return RawImage(samples.copy())


def _encode_netpbm(img: RawImage) -> bytes:
    magic = b"P6" if img.channels == 3 else b"P5"
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    return header + img.samples.tobytes()


# -- Pillow formats ----------------------------------------------------------


def _decode_pillow(data: bytes) -> RawImage:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            mode = im.mode
            if mode in ("I;16", "I;16B", "I;16L", "I", "F") or mode.startswith("I;"):
                raise ImageFormatError(f"unsupported bit depth: image mode {mode} exceeds 8 bits")
            if mode in ("1", "L", "LA", "P") and _is_gray(im):
                im = im.convert("L")
            else:
                im = im.convert("RGB")
            arr = np.asarray(im, dtype=np.uint8)
    except ImageFormatError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise ImageFormatError(f"cannot decode image: {exc}") from exc
    return RawImage(arr.copy())


def _is_gray(im) -> bool:
    if im.mode != "P":
        return True
    rgb = np.asarray(im.convert("RGB"))
    return bool((rgb[..., 0] == rgb[..., 1]).all() and (rgb[..., 1] == rgb[..., 2]).all())


def _encode_png(img: RawImage) -> bytes:
    from PIL import Image

    arr = img.samples[:, :, 0] if img.channels == 1 else img.samples
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L" if img.channels == 1 else "RGB").save(buf, format="PNG")
    return buf.getvalue()


# -- public API --------------------------------------------------------------


def decode(data: bytes, format: str | None = None) -> RawImage:
    """Decode PNG, JPEG or binary PPM/PGM bytes into an 8-bit image.

    Grayscale stays single-channel; everything else becomes RGB (alpha is
    dropped).
    """
    if not data:
        raise ImageFormatError("empty image data")
    fmt = format or guess_format(data)
    if fmt not in FORMATS:
        raise ImageFormatError(f"unsupported format {fmt!r}")
    if fmt == "ppm":
        return _decode_netpbm(data)
    return _decode_pillow(data)


def encode(img: RawImage, format: str = "png") -> bytes:
    """Encode as PNG or binary PPM/PGM. JPEG output is not offered."""
    if format == "png":
        return _encode_png(img)
    if format == "ppm":
        return _encode_netpbm(img)
    raise ImageFormatError(f"cannot encode format {format!r}; use png or ppm")


def read_image(path: "str | os.PathLike") -> RawImage:
    with open(path, "rb") as fh:
        data = fh.read()
    return decode(data)


def write_image(path: "str | os.PathLike", img: RawImage, format: str | None = None) -> None:
    fmt = format or format_from_path(path)
    if fmt == "jpeg":
        raise ImageFormatError("JPEG output is not supported; write .png or .ppm")
    with open(path, "wb") as fh:
        fh.write(encode(img, fmt))


def to_plane(img: RawImage) -> np.ndarray:
    """Map samples to ``v / 255``."""
    return img.samples.astype(np.float64) / 255.0


def from_plane(p) -> RawImage:
    """Quantize a plane with ``clamp(round(v * 255), 0, 255)``."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim == 2:
        p = p[:, :, None]
    q = np.clip(np.rint(p * 255.0), 0, 255).astype(np.uint8)
    return RawImage(q)


def luminance(p, variant: str = "max") -> np.ndarray:
    """Single-channel lightness of a plane.

    ``variant="max"`` takes ``max(R, G, B)`` (used by LOE); ``"gray"`` takes
    ``0.299 R + 0.587 G + 0.114 B``. Single-channel input comes back as is.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.ndim == 2:
        p = p[:, :, None]
    if p.shape[2] == 1:
        return p
    if variant == "max":
        return p.max(axis=2, keepdims=True)
    if variant == "gray":
        return (p[..., 0] * GRAY_WEIGHTS[0] + p[..., 1] * GRAY_WEIGHTS[1] + p[..., 2] * GRAY_WEIGHTS[2])[
            :, :, None
        ]
    raise ValueError(f"unknown luminance variant {variant!r}; expected 'max' or 'gray'")


def bin_index(v) -> np.ndarray:
    """256-bin index ``clamp(floor(v * 256), 0, 255)``."""
    return np.clip(np.floor(np.asarray(v, dtype=np.float64) * 256.0), 0, 255).astype(np.intp)


def histogram256(p, channel: int = 0) -> Histogram256:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim == 2:
        p = p[:, :, None]
    if not 0 <= channel < p.shape[2]:
        raise IndexError(f"channel {channel} out of range for {p.shape[2]}-channel plane")
    counts = np.bincount(bin_index(p[:, :, channel]).ravel(), minlength=256)
    return Histogram256(counts.astype(np.int64))
