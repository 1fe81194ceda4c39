"""Image decoding/encoding, grayscale conversion and resampling.

Grayscale images are float64 arrays of shape (height, width) with values in
[0, 1]; color images are uint8 arrays of shape (height, width, 3). Origin is
the top-left pixel, x grows rightward, y downward.
"""

import os

import numpy as np
from PIL import Image

# rgb2gray-convention luminance coefficients
GRAY_COEFFS = (0.2989, 0.5870, 0.1140)

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class DecodeError(ValueError):
    """Raised when an image file is malformed."""


def _check_gray(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("grayscale image must be a 2-D array")
    return img


def _check_rgb(img):
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError("color image must have shape (height, width, 3)")
    return img.astype(np.uint8)


class _NetpbmReader:
    """Tokenizer for binary PGM/PPM headers, tracking the byte offset."""

    def __init__(self, data, path):
        self.data = data
        self.path = path
        self.pos = 0

    def fail(self, why):
        raise DecodeError("%s: %s at byte %d" % (self.path, why, self.pos))

    def token(self):
        d = self.data
        while self.pos < len(d):
            c = d[self.pos:self.pos + 1]
            if c == b"#":
                while self.pos < len(d) and d[self.pos:self.pos + 1] != b"\n":
                    self.pos += 1
            elif c.isspace():
                self.pos += 1
            else:
                break
        start = self.pos
        while self.pos < len(d) and not d[self.pos:self.pos + 1].isspace():
            self.pos += 1
        if self.pos == start:
            self.fail("malformed header (missing field)")
        return d[start:self.pos]

    def int_field(self, name):
        tok = self.token()
        try:
            return int(tok)
        except ValueError:
            self.fail("malformed header (bad %s %r)" % (name, tok))


def _load_netpbm(data, path):
    r = _NetpbmReader(data, path)
    magic = r.token()
    if magic not in (b"P5", b"P6"):
        r.fail("unsupported netpbm magic %r" % magic)
    width = r.int_field("width")
    height = r.int_field("height")
    maxval = r.int_field("maxval")
    if width < 1 or height < 1:
        r.fail("bad dimensions %dx%d" % (width, height))
    if maxval != 255:
        r.fail("unsupported maxval %d" % maxval)
    # exactly one whitespace byte separates header and payload
    if r.pos >= len(data) or not data[r.pos:r.pos + 1].isspace():
        r.fail("malformed header (missing payload separator)")
    r.pos += 1
    channels = 3 if magic == b"P6" else 1
    expected = width * height * channels
    payload = data[r.pos:r.pos + expected]
    if len(payload) < expected:
        r.pos = len(data)
        r.fail("truncated payload (%d of %d bytes)" % (len(payload), expected))
    pixels = np.frombuffer(payload, dtype=np.uint8)
    if channels == 1:
        gray = pixels.reshape(height, width)
        return np.repeat(gray[:, :, None], 3, axis=2)
    return pixels.reshape(height, width, 3).copy()


def load_image(path):
    """Decode a PNG or binary PGM/PPM file into an RGB uint8 array.

    Grayscale sources are replicated across the three channels.
    """
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise IOError("cannot read image %s: %s" % (path, e)) from e
    if data.startswith(b"P5") or data.startswith(b"P6"):
        return _load_netpbm(data, path)
    if data.startswith(_PNG_MAGIC):
        try:
            with Image.open(path) as im:
                if im.mode not in ("L", "RGB"):
                    im = im.convert("RGB")
                arr = np.asarray(im)
        except Exception as e:
            raise DecodeError("%s: bad PNG data at byte 0 (%s)" % (path, e)) from e
        if arr.ndim == 2:
            return np.repeat(arr[:, :, None], 3, axis=2)
        return arr[:, :, :3].copy()
    raise DecodeError("%s: unrecognized image magic at byte 0" % path)


def to_gray(img):
    """Convert an RGB uint8 image to luminance in [0, 1]."""
    img = _check_rgb(img).astype(np.float64)
    r, g, b = GRAY_COEFFS
    return (r * img[:, :, 0] + g * img[:, :, 1] + b * img[:, :, 2]) / 255.0


def resize_bilinear(img, new_w, new_h):
    """Resample a grayscale image to (new_w, new_h).

    Uses half-pixel-center bilinear interpolation, except for an exact 2x
    downscale where a 2x2 box average is used (alias-free halving for the
    pyramid).
    """
    img = _check_gray(img)
    if new_w < 1 or new_h < 1:
        raise ValueError("target size must be at least 1x1")
    h, w = img.shape
    if new_w * 2 == w and new_h * 2 == h:
        return (img[0::2, 0::2] + img[0::2, 1::2]
                + img[1::2, 0::2] + img[1::2, 1::2]) / 4.0
    xs = np.clip((np.arange(new_w) + 0.5) * (w / new_w) - 0.5, 0, w - 1)
    ys = np.clip((np.arange(new_h) + 0.5) * (h / new_h) - 0.5, 0, h - 1)
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0
    top = img[y0][:, x0] * (1 - fx) + img[y0][:, x1] * fx
    bot = img[y1][:, x0] * (1 - fx) + img[y1][:, x1] * fx
    return top * (1 - fy[:, None]) + bot * fy[:, None]


def _quantize(gray):
    return np.clip(np.rint(gray * 255.0), 0, 255).astype(np.uint8)


def save_image(img, path):
    """Write a grayscale or RGB image; format chosen by file extension.

    ``.pgm`` writes binary P5 (grayscale only), ``.ppm`` binary P6, ``.png``
    an 8-bit PNG. Grayscale samples are quantized to 0..255.
    """
    img = np.asarray(img)
    is_gray = img.ndim == 2
    ext = os.path.splitext(path)[1].lower()
    try:
        if ext == ".pgm":
            if not is_gray:
                raise ValueError("PGM output requires a grayscale image")
            pix = _quantize(_check_gray(img))
            h, w = pix.shape
            with open(path, "wb") as f:
                f.write(b"P5\n%d %d\n255\n" % (w, h))
                f.write(pix.tobytes())
        elif ext == ".ppm":
            pix = _quantize(_check_gray(img)) if is_gray else _check_rgb(img)
            if pix.ndim == 2:
                pix = np.repeat(pix[:, :, None], 3, axis=2)
            h, w = pix.shape[:2]
            with open(path, "wb") as f:
                f.write(b"P6\n%d %d\n255\n" % (w, h))
                f.write(pix.tobytes())
        elif ext == ".png":
            if is_gray:
                Image.fromarray(_quantize(_check_gray(img)), mode="L").save(path)
            else:
                Image.fromarray(_check_rgb(img), mode="RGB").save(path)
        else:
            raise ValueError("unsupported image extension %r" % ext)
    except OSError as e:
        raise IOError("cannot write image %s: %s" % (path, e)) from e
