import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))


def oriented_block_pattern(orients, block_px, period):
    """Tile of sinusoidal stripes, one orientation per block.

    ``orients`` is a (by, bx) array of angles; block (i, j) is filled with a
    sinusoid whose gradient points along orients[i, j]. Doubling block_px and
    period yields the same pattern at twice the scale.
    """
    by, bx = orients.shape
    h, w = by * block_px, bx * block_px
    ys, xs = np.mgrid[0:h, 0:w]
    out = np.zeros((h, w))
    for i in range(by):
        for j in range(bx):
            sel = (ys // block_px == i) & (xs // block_px == j)
            th = orients[i, j]
            phase = xs * np.cos(th) + ys * np.sin(th)
            out[sel] = 0.5 + 0.45 * np.sin(2 * np.pi * phase[sel] / period)
    return out


def self_match_fixture(seed=7, size=256, rect=(64, 40, 64, 64)):
    """Flat image with one textured rectangle whose interior is inset 2 px.

    The inset keeps every nonzero gradient (and the global maximum) strictly
    inside the rectangle, so the cropped patch featurizes identically to the
    matching window of the full image.
    """
    rng = np.random.default_rng(seed)
    img = np.full((size, size), 0.5)
    x, y, w, h = rect
    inner = rng.random((h - 4, w - 4))
    img[y + 2:y + h - 2, x + 2:x + w - 2] = inner
    return img, rect
