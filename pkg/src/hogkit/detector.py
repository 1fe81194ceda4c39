"""Template scoring, overlap suppression and multi-scale search.

Placements are scored by cosine similarity between the template weights and
the matching window of the feature grid (normalized cross-correlation, no
mean subtraction: templates are already signed after negative averaging).
Detections too close to an already accepted, higher-scoring one are dropped
greedily, using the Chebyshev distance between box centers.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .features import (DEFAULT_BINS, DEFAULT_CELL_SIZE, DEFAULT_TAU,
                       hog_features, image_gradient)
from .imgio import resize_bilinear

DEFAULT_MIN_DIST = 128.0
DEFAULT_SCALE = 0.5
DEFAULT_TOP_N = 5


@dataclass(frozen=True)
class Detection:
    """Scored box in base-image pixel coordinates."""

    x: int
    y: int
    w: int
    h: int
    score: float
    level: int
    rank: int


@dataclass(frozen=True)
class ScoreGrid:
    """Per-placement scores plus the template's cell footprint."""

    scores: np.ndarray
    tcells_x: int
    tcells_y: int


@dataclass(frozen=True)
class NmsConfig:
    min_dist: float = DEFAULT_MIN_DIST

    def __post_init__(self):
        if self.min_dist < 0:
            raise ValueError("min_dist must be non-negative")


@dataclass(frozen=True)
class PyramidConfig:
    scale: float = DEFAULT_SCALE
    max_levels: int = 32

    def __post_init__(self):
        if not 0.0 < self.scale < 1.0:
            raise ValueError("scale must lie in (0, 1)")


def score_map(grid, tmpl):
    """Cosine similarity of the template against every grid placement.

    Output shape is (cells_y - tcells_y + 1, cells_x - tcells_x + 1);
    placements whose window has zero norm score 0.
    """
    tcy, tcx, bins = tmpl.weights.shape
    if bins != grid.bins:
        raise ValueError("template has %d bins, grid has %d" % (bins, grid.bins))
    if grid.cells_y < tcy or grid.cells_x < tcx:
        raise ValueError("grid %dx%d cells smaller than template %dx%d"
                         % (grid.cells_x, grid.cells_y, tcx, tcy))
    windows = sliding_window_view(grid.hist, (tcy, tcx, bins))[:, :, 0]
    dots = np.einsum("yxabc,abc->yx", windows, tmpl.weights)
    norms = np.sqrt(np.einsum("yxabc,yxabc->yx", windows, windows))
    scores = np.zeros_like(dots)
    np.divide(dots, norms * tmpl.norm, out=scores, where=norms > 0)
    return ScoreGrid(scores=scores, tcells_x=tcx, tcells_y=tcy)


def _chebyshev_ok(x, y, w, h, accepted, min_dist):
    cx = x + w / 2.0
    cy = y + h / 2.0
    for a in accepted:
        if max(abs(cx - (a.x + a.w / 2.0)), abs(cy - (a.y + a.h / 2.0))) < min_dist:
            return False
    return True


def _greedy_select(candidates, n, min_dist):
    """Greedy acceptance over (score, level, y, x, w, h) tuples.

    Candidates must already be sorted by descending score with the fixed
    (level, y, x) tie order.
    """
    accepted = []
    for score, level, y, x, w, h in candidates:
        if _chebyshev_ok(x, y, w, h, accepted, min_dist):
            accepted.append(Detection(x=x, y=y, w=w, h=h, score=float(score),
                                      level=level, rank=len(accepted)))
            if len(accepted) == n:
                break
    return accepted


def nms_top_n(score_grid, n, cfg=None, cell_size=DEFAULT_CELL_SIZE):
    """Top-n detections of a single-scale score grid after suppression."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if cfg is None:
        cfg = NmsConfig()
    scores = score_grid.scores
    w = score_grid.tcells_x * cell_size
    h = score_grid.tcells_y * cell_size
    pys, pxs = np.unravel_index(np.arange(scores.size), scores.shape)
    cands = [(float(scores[py, px]), 0, int(py) * cell_size,
              int(px) * cell_size, w, h)
             for py, px in zip(pys, pxs)]
    cands.sort(key=lambda c: (-c[0], c[2], c[3]))
    return _greedy_select(cands, n, cfg.min_dist)


def build_pyramid(img, cfg=None, tmpl_px_w=64, tmpl_px_h=64):
    """Downscaled copies of the base image, largest first.

    Level k is the base resampled by scale**k; levels are kept while both
    dimensions still fit the template. Level 0 is the untouched base.
    """
    if cfg is None:
        cfg = PyramidConfig()
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    if w < tmpl_px_w or h < tmpl_px_h:
        raise ValueError("base image %dx%d smaller than template %dx%d"
                         % (w, h, tmpl_px_w, tmpl_px_h))
    levels = [img]
    for k in range(1, cfg.max_levels):
        factor = cfg.scale ** k
        nw = max(1, round(w * factor))
        nh = max(1, round(h * factor))
        if nw < tmpl_px_w or nh < tmpl_px_h:
            break
        levels.append(resize_bilinear(img, nw, nh))
    return levels


def detect(img, tmpl, n=DEFAULT_TOP_N, nms=None, cell_size=DEFAULT_CELL_SIZE,
           bins=DEFAULT_BINS, tau=DEFAULT_TAU):
    """Single-scale detection: featurize, score, suppress."""
    grid = hog_features(image_gradient(img), cell_size, bins, tau)
    return nms_top_n(score_map(grid, tmpl), n, nms, cell_size)


def detect_multiscale(img, tmpl, n=DEFAULT_TOP_N, nms=None, pyr=None,
                      cell_size=DEFAULT_CELL_SIZE, bins=DEFAULT_BINS,
                      tau=DEFAULT_TAU):
    """Pyramid search with all candidates pooled in base coordinates.

    Each level's placements are mapped back to the base image by dividing
    positions and sizes by scale**level (rounded, clamped); suppression then
    runs once over the pooled, score-sorted list with ties broken by
    (level, y, x) ascending.
    """
    if nms is None:
        nms = NmsConfig()
    if pyr is None:
        pyr = PyramidConfig()
    img = np.asarray(img, dtype=np.float64)
    base_h, base_w = img.shape
    tpw = tmpl.tcells_x * cell_size
    tph = tmpl.tcells_y * cell_size
    levels = build_pyramid(img, pyr, tpw, tph)
    cands = []
    for level, level_img in enumerate(levels):
        grid = hog_features(image_gradient(level_img), cell_size, bins, tau)
        sg = score_map(grid, tmpl)
        inv = 1.0 / (pyr.scale ** level)
        w = min(round(tpw * inv), base_w)
        h = min(round(tph * inv), base_h)
        ny, nx = sg.scores.shape
        for py in range(ny):
            for px in range(nx):
                x = min(max(round(px * cell_size * inv), 0), base_w - w)
                y = min(max(round(py * cell_size * inv), 0), base_h - h)
                cands.append((sg.scores[py, px], level, y, x, w, h))
    cands.sort(key=lambda c: (-c[0], c[1], c[2], c[3]))
    return _greedy_select(cands, n, nms.min_dist)
