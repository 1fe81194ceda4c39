"""Template construction from annotated training images.

A template is a fixed-size block of feature-space weights built by averaging
the orientation histograms of positive patches and subtracting the average
over negative patches. Annotations are either a point (window center) or a
rectangle (cropped, then resampled to the canonical window).
"""

import json
import os
import struct
from dataclasses import dataclass

import numpy as np

from .features import (DEFAULT_BINS, DEFAULT_CELL_SIZE, DEFAULT_TAU,
                       hog_features, image_gradient)
from .imgio import load_image, resize_bilinear, to_gray

TEMPLATE_MAGIC = b"HTPL"

DEFAULT_WINDOW = 64
MIN_RECT = 8


class AnnotationError(ValueError):
    """Raised for malformed or out-of-bounds annotations."""


@dataclass(frozen=True)
class Annotation:
    kind: str                # "point" or "rect"
    polarity: str            # "positive" or "negative"
    x: int
    y: int
    w: int = 0               # rect only
    h: int = 0


@dataclass(frozen=True)
class Template:
    """Signed feature-space weights, shape (tcells_y, tcells_x, bins)."""

    weights: np.ndarray

    @property
    def tcells_y(self):
        return self.weights.shape[0]

    @property
    def tcells_x(self):
        return self.weights.shape[1]

    @property
    def bins(self):
        return self.weights.shape[2]

    @property
    def norm(self):
        return float(np.sqrt(np.sum(self.weights ** 2)))


def parse_annotation(obj):
    kind = obj.get("kind")
    polarity = obj.get("polarity")
    if kind not in ("point", "rect"):
        raise AnnotationError("unknown annotation kind %r" % kind)
    if polarity not in ("positive", "negative"):
        raise AnnotationError("unknown polarity %r" % polarity)
    try:
        x = int(obj["x"])
        y = int(obj["y"])
    except (KeyError, TypeError, ValueError) as e:
        raise AnnotationError("annotation missing integer x/y") from e
    w = h = 0
    if kind == "rect":
        try:
            w = int(obj["w"])
            h = int(obj["h"])
        except (KeyError, TypeError, ValueError) as e:
            raise AnnotationError("rect annotation missing integer w/h") from e
    return Annotation(kind=kind, polarity=polarity, x=x, y=y, w=w, h=h)


def load_annotation_file(path):
    """Parse one JSON annotation file.

    Returns (image_path, annotations); the image path is resolved relative
    to the annotation file's directory.
    """
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    image = doc.get("image")
    if not isinstance(image, str):
        raise AnnotationError("%s: missing \"image\" entry" % path)
    if not os.path.isabs(image):
        image = os.path.join(os.path.dirname(os.path.abspath(path)), image)
    anns = []
    for i, obj in enumerate(doc.get("annotations", [])):
        try:
            anns.append(parse_annotation(obj))
        except AnnotationError as e:
            raise AnnotationError("%s: annotation %d: %s" % (path, i, e)) from e
    return image, anns


def extract_patch(img, ann, win_px=DEFAULT_WINDOW):
    """Cut the training window an annotation describes.

    Point annotations take the win_px square centered at (x, y) (floor
    offsets for even sizes); rect annotations crop (x, y, w, h) and resample
    it to win_px square.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    if ann.kind == "point":
        x0 = ann.x - win_px // 2
        y0 = ann.y - win_px // 2
        x1, y1 = x0 + win_px, y0 + win_px
        if x0 < 0 or y0 < 0 or x1 > w or y1 > h:
            raise AnnotationError(
                "point window (%d,%d)+%d outside %dx%d image"
                % (ann.x, ann.y, win_px, w, h))
        return img[y0:y1, x0:x1].copy()
    if ann.w < MIN_RECT or ann.h < MIN_RECT:
        raise ValueError("rect must be at least %dx%d pixels"
                         % (MIN_RECT, MIN_RECT))
    if ann.x < 0 or ann.y < 0 or ann.x + ann.w > w or ann.y + ann.h > h:
        raise AnnotationError(
            "rect (%d,%d,%d,%d) outside %dx%d image"
            % (ann.x, ann.y, ann.w, ann.h, w, h))
    crop = img[ann.y:ann.y + ann.h, ann.x:ann.x + ann.w]
    if ann.w == win_px and ann.h == win_px:
        return crop.copy()
    return resize_bilinear(crop, win_px, win_px)


def collect_patches(annotation_paths, win_px=DEFAULT_WINDOW):
    """Aggregate positive/negative patches across annotation files."""
    positives, negatives = [], []
    for path in annotation_paths:
        image_path, anns = load_annotation_file(path)
        gray = to_gray(load_image(image_path))
        for i, ann in enumerate(anns):
            try:
                patch = extract_patch(gray, ann, win_px)
            except (AnnotationError, ValueError) as e:
                raise AnnotationError("%s: annotation %d: %s"
                                      % (path, i, e)) from e
            (positives if ann.polarity == "positive" else negatives).append(patch)
    return positives, negatives


def _patch_hist(patch, cell_size, bins, tau):
    return hog_features(image_gradient(patch), cell_size, bins, tau).hist


def build_template(positives, negatives, cell_size=DEFAULT_CELL_SIZE,
                   bins=DEFAULT_BINS, tau=DEFAULT_TAU):
    """Average positive features minus average negative features.

    Each patch is featurized independently (its own 10%-of-max threshold);
    means are taken in feature space in list order.
    """
    if not positives:
        raise ValueError("at least one positive patch is required")
    shape = positives[0].shape
    for p in positives + negatives:
        if p.shape != shape:
            raise ValueError("all patches must share the same window size")
    pos = [_patch_hist(p, cell_size, bins, tau) for p in positives]
    weights = sum(pos) / len(pos)
    if negatives:
        neg = [_patch_hist(p, cell_size, bins, tau) for p in negatives]
        weights = weights - sum(neg) / len(neg)
    tmpl = Template(weights=weights)
    if tmpl.norm == 0.0:
        raise ValueError("degenerate template: zero-norm weights")
    return tmpl


def save_template(tmpl, path):
    with open(path, "wb") as f:
        f.write(TEMPLATE_MAGIC)
        f.write(struct.pack("<III", tmpl.tcells_x, tmpl.tcells_y, tmpl.bins))
        f.write(np.ascontiguousarray(tmpl.weights, dtype="<f8").tobytes())


def load_template(path):
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != TEMPLATE_MAGIC:
        raise ValueError("%s: not a %s template file"
                         % (path, TEMPLATE_MAGIC.decode()))
    tcx, tcy, bins = struct.unpack_from("<III", data, 4)
    count = tcx * tcy * bins
    weights = np.frombuffer(data, dtype="<f8", count=count, offset=16)
    if weights.size != count:
        raise ValueError("%s: truncated template payload" % path)
    return Template(weights=weights.reshape(tcy, tcx, bins).astype(np.float64))
