import io

import numpy as np
import pytest
from PIL import Image

from pec.image import (
    ImageFormatError,
    RawImage,
    as_plane,
    decode,
    encode,
    format_from_path,
    from_plane,
    histogram256,
    luminance,
    read_image,
    to_plane,
    write_image,
)


def _png_bytes(arr, mode=None):
    buf = io.BytesIO()
    Image.fromarray(arr, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def test_decode_ppm_2x2():
    body = bytes(range(12))
    img = decode(b"P6 2 2 255\n" + body)
    assert (img.height, img.width, img.channels) == (2, 2, 3)
    assert img.samples.ravel().tolist() == list(range(12))


def test_decode_pgm_with_comment():
    img = decode(b"P5\n# made by hand\n3 1\n255\n\x00\x80\xff")
    assert img.channels == 1
    assert img.samples.ravel().tolist() == [0, 128, 255]


def test_decode_png_red_pixel():
    img = decode(_png_bytes(np.array([[[255, 0, 0]]], dtype=np.uint8)))
    assert img.samples.ravel().tolist() == [255, 0, 0]


def test_decode_png_gray_stays_single_channel():
    img = decode(_png_bytes(np.array([[0, 7], [200, 255]], dtype=np.uint8)))
    assert img.channels == 1
    assert img.samples[:, :, 0].tolist() == [[0, 7], [200, 255]]


def test_decode_png_alpha_dropped():
    rgba = np.array([[[10, 20, 30, 40]]], dtype=np.uint8)
    img = decode(_png_bytes(rgba, "RGBA"))
    assert img.samples.ravel().tolist() == [10, 20, 30]


def test_decode_jpeg():
    buf = io.BytesIO()
    Image.fromarray(np.full((8, 8, 3), 128, dtype=np.uint8)).save(buf, format="JPEG")
    img = decode(buf.getvalue())
    assert img.channels == 3 and img.samples.shape == (8, 8, 3)


@pytest.mark.parametrize(
    "data",
    [
        b"P6 2 2 255\n" + bytes(11),
        b"P6 2 2",
        b"P5 2",
        _png_bytes(np.zeros((4, 4, 3), dtype=np.uint8))[:30],
        b"",
        b"GIF89a....",
    ],
)
def test_decode_malformed(data):
    with pytest.raises(ImageFormatError):
        decode(data)


def test_decode_rejects_16bit_ppm():
    with pytest.raises(ImageFormatError, match="bit depth"):
        decode(b"P6 1 1 65535\n" + bytes(6))


def test_decode_rejects_16bit_png():
    arr = np.array([[0, 60000]], dtype=np.uint16)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    with pytest.raises(ImageFormatError, match="bit depth"):
        decode(buf.getvalue())


def test_decode_ppm_small_maxval_rescaled():
    img = decode(b"P5 2 1 15\n\x00\x0f")
    assert img.samples.ravel().tolist() == [0, 255]


@pytest.mark.parametrize("fmt", ["png", "ppm"])
@pytest.mark.parametrize("channels", [1, 3])
def test_encode_decode_roundtrip(rng, fmt, channels):
    samples = rng.integers(0, 256, size=(5, 7, channels), dtype=np.uint8)
    img = RawImage(samples)
    back = decode(encode(img, fmt))
    np.testing.assert_array_equal(back.samples, samples)


def test_encode_jpeg_refused():
    with pytest.raises(ImageFormatError):
        encode(RawImage(np.zeros((1, 1, 3), dtype=np.uint8)), "jpeg")


def test_file_roundtrip(tmp_path, rng):
    samples = rng.integers(0, 256, size=(4, 3, 3), dtype=np.uint8)
    for name in ("a.png", "a.ppm", "a.unknown"):
        write_image(tmp_path / name, RawImage(samples))
        np.testing.assert_array_equal(read_image(tmp_path / name).samples, samples)
    assert (tmp_path / "a.unknown").read_bytes().startswith(b"P6")
    assert format_from_path("x.JPG") == "jpeg"
    assert format_from_path("x") == "ppm"


def test_to_plane_values():
    p = to_plane(RawImage(np.array([[0, 128, 255]], dtype=np.uint8)))
    assert p.shape == (1, 3, 1)
    assert p[0, 0, 0] == 0.0 and p[0, 2, 0] == 1.0
    assert p[0, 1, 0] == pytest.approx(0.50196, abs=1e-5)


def test_plane_roundtrip_all_values():
    samples = np.arange(256, dtype=np.uint8).reshape(16, 16, 1)
    back = from_plane(to_plane(RawImage(samples)))
    np.testing.assert_array_equal(back.samples, samples)


def test_from_plane_rounds_and_clamps():
    img = from_plane(np.array([[0.0, 1.0, 128 / 255, -0.2, 1.3, 0.5]]))
    assert img.samples.ravel().tolist() == [0, 255, 128, 0, 255, 128]


def test_luminance_variants():
    red = np.array([[[1.0, 0.0, 0.0]]])
    gray = np.full((1, 1, 3), 0.5)
    white = np.ones((1, 1, 3))
    assert luminance(red, "max")[0, 0, 0] == 1.0
    assert luminance(gray, "max")[0, 0, 0] == 0.5
    assert luminance(gray, "gray")[0, 0, 0] == pytest.approx(0.5, abs=1e-15)
    assert luminance(white, "gray")[0, 0, 0] == pytest.approx(1.0, abs=1e-15)
    single = np.full((2, 2, 1), 0.3)
    assert luminance(single, "gray") is not None
    np.testing.assert_array_equal(luminance(single, "max"), single)
    with pytest.raises(ValueError):
        luminance(white, "hsv")


def test_histogram_constant_planes():
    assert histogram256(np.zeros((3, 4)), 0).bins[0] == 12
    h = histogram256(np.ones((3, 4, 3)), 2)
    assert h.bins[255] == 12 and h.total == 12


def test_histogram_ramp():
    ramp = (np.arange(256) / 256).reshape(16, 16)
    assert (histogram256(ramp).bins == 1).all()


def test_histogram_bad_channel():
    with pytest.raises(IndexError):
        histogram256(np.zeros((2, 2, 3)), 3)


def test_histogram_total_matches_pixel_count(rng):
    p = rng.random((17, 9, 3))
    for ch in range(3):
        assert histogram256(p, ch).total == 17 * 9


def test_as_plane_validation():
    assert as_plane(np.zeros((2, 3))).shape == (2, 3, 1)
    with pytest.raises(ValueError):
        as_plane(np.zeros((2, 3, 2)))
    with pytest.raises(ValueError):
        as_plane(np.full((2, 2), 1.5))


def test_rawimage_validation():
    with pytest.raises(ValueError):
        RawImage(np.zeros((2, 2, 3), dtype=np.float64))
    with pytest.raises(ValueError):
        RawImage(np.zeros((0, 2, 3), dtype=np.uint8))
