"""Line-glyph rendering of orientation-histogram grids.

Each cell is drawn as a star of centered line segments, one per nonzero bin,
oriented perpendicular to the bin-center angle so strokes follow the image
edges. Segment intensity is the bin value relative to the global maximum,
raised to a display exponent, accumulated additively and clamped at 1.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GlyphConfig:
    glyph_size: int = 15
    gamma: float = 1.0

    def __post_init__(self):
        if self.glyph_size < 3 or self.glyph_size % 2 == 0:
            raise ValueError("glyph_size must be odd and at least 3")


def _round_half_down(v):
    # ties break toward the smaller coordinate for byte-exact determinism
    return int(math.ceil(v - 0.5))


def _segment_pixels(glyph_size, angle):
    """Integer pixel set of a centered segment at the given angle."""
    center = (glyph_size - 1) // 2
    half = (glyph_size - 3) // 2  # segment spans glyph_size - 2 pixels
    x0 = _round_half_down(center - half * math.cos(angle))
    y0 = _round_half_down(center - half * math.sin(angle))
    x1 = _round_half_down(center + half * math.cos(angle))
    y1 = _round_half_down(center + half * math.sin(angle))
    steps = max(abs(x1 - x0), abs(y1 - y0))
    pixels = []
    for i in range(steps + 1):
        t = i / steps if steps else 0.0
        pixels.append((_round_half_down(x0 + t * (x1 - x0)),
                       _round_half_down(y0 + t * (y1 - y0))))
    return pixels


def render_glyphs(grid, cfg=None):
    """Render a feature grid as a grayscale glyph image.

    Output size is (cells_y * glyph_size, cells_x * glyph_size); an all-zero
    grid renders all black.
    """
    if cfg is None:
        cfg = GlyphConfig()
    g = cfg.glyph_size
    out = np.zeros((grid.cells_y * g, grid.cells_x * g))
    vmax = float(grid.hist.max())
    if vmax <= 0:
        return out
    width = 2.0 * math.pi / grid.bins
    segments = []
    for k in range(grid.bins):
        bin_center = -math.pi + (k + 0.5) * width
        segments.append(_segment_pixels(g, bin_center + math.pi / 2.0))
    for cy in range(grid.cells_y):
        for cx in range(grid.cells_x):
            cell = grid.hist[cy, cx]
            if not cell.any():
                continue
            tile = np.zeros((g, g))
            for k in range(grid.bins):
                v = cell[k]
                if v <= 0:
                    continue
                level = (v / vmax) ** cfg.gamma
                for x, y in segments[k]:
                    tile[y, x] += level
            np.minimum(tile, 1.0, out=tile)
            out[cy * g:(cy + 1) * g, cx * g:(cx + 1) * g] = tile
    return out
