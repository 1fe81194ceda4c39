"""scikit-learn style wrappers around the feature and detection pipeline."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .detector import (NmsConfig, PyramidConfig, detect, detect_multiscale)
from .features import hog_features, image_gradient, normalize_cells
from .training import build_template


def _as_image_list(X):
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return [X]
    images = [np.asarray(x, dtype=np.float64) for x in X]
    for im in images:
        if im.ndim != 2:
            raise ValueError("expected 2-D grayscale images")
    return images


class HogTransformer(TransformerMixin, BaseEstimator):
    """Turn grayscale images into flattened orientation-histogram vectors.

    Stateless; ``fit`` only records the expected image shape so transform
    output has a fixed width.
    """

    def __init__(self, cell_size=8, bins=9, tau=0.10, normalize=False):
        self.cell_size = cell_size
        self.bins = bins
        self.tau = tau
        self.normalize = normalize

    def fit(self, X, y=None):
        images = _as_image_list(X)
        if not images:
            raise ValueError("need at least one image")
        self.image_shape_ = images[0].shape
        return self

    def transform(self, X):
        rows = []
        for im in _as_image_list(X):
            grid = hog_features(image_gradient(im), self.cell_size,
                                self.bins, self.tau)
            if self.normalize:
                grid = normalize_cells(grid)
            rows.append(grid.hist.ravel())
        return np.vstack(rows)


class TemplateMatchingDetector(BaseEstimator):
    """Detector trained from labeled square patches.

    ``fit(X, y)`` takes window-sized grayscale patches with labels 1
    (positive) or 0/-1 (negative) and builds the averaged, negative-
    subtracted template. ``predict`` returns a list of detection lists,
    one per input image.
    """

    def __init__(self, window=64, cell_size=8, bins=9, tau=0.10, top_n=5,
                 min_dist=128.0, multiscale=False, scale=0.5):
        self.window = window
        self.cell_size = cell_size
        self.bins = bins
        self.tau = tau
        self.top_n = top_n
        self.min_dist = min_dist
        self.multiscale = multiscale
        self.scale = scale

    def fit(self, X, y):
        patches = _as_image_list(X)
        y = np.asarray(y)
        if len(patches) != len(y):
            raise ValueError("X and y length mismatch")
        for p in patches:
            if p.shape != (self.window, self.window):
                raise ValueError("patches must be %dx%d"
                                 % (self.window, self.window))
        positives = [p for p, lab in zip(patches, y) if lab == 1]
        negatives = [p for p, lab in zip(patches, y) if lab != 1]
        self.template_ = build_template(positives, negatives, self.cell_size,
                                        self.bins, self.tau)
        return self

    def predict(self, X):
        if not hasattr(self, "template_"):
            raise NotFittedError("fit must be called before predict")
        nms = NmsConfig(min_dist=self.min_dist)
        results = []
        for im in _as_image_list(X):
            if self.multiscale:
                dets = detect_multiscale(im, self.template_, self.top_n, nms,
                                         PyramidConfig(scale=self.scale),
                                         self.cell_size, self.bins, self.tau)
            else:
                dets = detect(im, self.template_, self.top_n, nms,
                              self.cell_size, self.bins, self.tau)
            results.append(dets)
        return results
