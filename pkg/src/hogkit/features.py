"""Gradient computation and cell-histogram orientation features.

The feature is a grid of per-cell orientation histograms: the image is tiled
into cells (8x8 pixels by default), gradient orientations are quantized into
9 signed bins over (-pi, pi], and each cell counts its pixels whose gradient
magnitude exceeds a threshold set at 10% of the image's maximum magnitude.
Votes are binary (one count per qualifying pixel), not magnitude-weighted.
"""

import math
import struct
from dataclasses import dataclass

import numpy as np

HOG_MAGIC = b"HOG1"

DEFAULT_CELL_SIZE = 8
DEFAULT_BINS = 9
DEFAULT_TAU = 0.10


@dataclass(frozen=True)
class GradientField:
    """Per-pixel derivatives, magnitude and orientation of a grayscale image."""

    gx: np.ndarray
    gy: np.ndarray
    mag: np.ndarray
    theta: np.ndarray

    @property
    def height(self):
        return self.mag.shape[0]

    @property
    def width(self):
        return self.mag.shape[1]


@dataclass(frozen=True)
class HogGrid:
    """Grid of per-cell orientation histograms.

    ``hist`` has shape (cells_y, cells_x, bins). Raw feature values are
    non-negative integer counts; after :func:`normalize_cells` they are
    unit-scaled floats.
    """

    hist: np.ndarray
    cell_size: int
    threshold_used: float

    @property
    def cells_y(self):
        return self.hist.shape[0]

    @property
    def cells_x(self):
        return self.hist.shape[1]

    @property
    def bins(self):
        return self.hist.shape[2]


def image_gradient(img):
    """Centered-difference gradient with no smoothing.

    gx(x, y) = I(x+1, y) - I(x-1, y) and gy(x, y) = I(x, y+1) - I(x, y-1)
    on interior pixels; the one-pixel border is forced to zero. Orientation
    is atan2(gy, gx), defined as 0 where the magnitude vanishes.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("expected a 2-D grayscale image")
    gx = np.zeros_like(img)
    gy = np.zeros_like(img)
    if img.shape[0] >= 3 and img.shape[1] >= 3:
        gx[1:-1, 1:-1] = img[1:-1, 2:] - img[1:-1, :-2]
        gy[1:-1, 1:-1] = img[2:, 1:-1] - img[:-2, 1:-1]
    mag = np.hypot(gx, gy)
    theta = np.arctan2(gy, gx)
    theta[mag == 0] = 0.0
    return GradientField(gx=gx, gy=gy, mag=mag, theta=theta)


def orientation_bin(theta, bins=DEFAULT_BINS):
    """Map an orientation in [-pi, pi] to its histogram bin index.

    Bins are half-open intervals of width 2*pi/bins starting at -pi;
    theta = pi is clamped into the last bin.
    """
    if bins < 1:
        raise ValueError("bins must be at least 1")
    if not -math.pi <= theta <= math.pi:
        raise ValueError("orientation %r outside [-pi, pi]" % theta)
    k = int((theta + math.pi) // (2.0 * math.pi / bins))
    return min(k, bins - 1)


def _bin_indices(theta, bins):
    k = np.floor((theta + np.pi) / (2.0 * np.pi / bins)).astype(np.intp)
    return np.minimum(k, bins - 1)


def hog_features(field, cell_size=DEFAULT_CELL_SIZE, bins=DEFAULT_BINS,
                 tau=DEFAULT_TAU):
    """Accumulate thresholded orientation counts over the cell lattice.

    The threshold is ``tau`` times the maximum gradient magnitude of the
    whole field; only pixels strictly above it vote. Partial cells at the
    right/bottom edges are discarded.
    """
    if cell_size < 1:
        raise ValueError("cell_size must be at least 1")
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    cells_y = field.height // cell_size
    cells_x = field.width // cell_size
    if cells_y == 0 or cells_x == 0:
        raise ValueError("image %dx%d smaller than one %dx%d cell"
                         % (field.width, field.height, cell_size, cell_size))
    threshold = tau * float(field.mag.max())
    mag = field.mag[:cells_y * cell_size, :cells_x * cell_size]
    theta = field.theta[:cells_y * cell_size, :cells_x * cell_size]
    mask = mag > threshold
    k = _bin_indices(theta, bins)
    row = np.arange(cells_y * cell_size) // cell_size
    col = np.arange(cells_x * cell_size) // cell_size
    flat = (row[:, None] * cells_x + col[None, :]) * bins + k
    counts = np.bincount(flat[mask], minlength=cells_y * cells_x * bins)
    hist = counts.astype(np.float64).reshape(cells_y, cells_x, bins)
    return HogGrid(hist=hist, cell_size=cell_size, threshold_used=threshold)


def normalize_cells(grid, epsilon=1e-6):
    """Scale each cell's histogram to (near) unit length.

    Each cell vector v becomes v / sqrt(|v|^2 + epsilon^2), so zero cells
    stay zero and output norms never exceed 1.
    """
    norms = np.sqrt(np.sum(grid.hist ** 2, axis=2, keepdims=True)
                    + epsilon ** 2)
    return HogGrid(hist=grid.hist / norms, cell_size=grid.cell_size,
                   threshold_used=grid.threshold_used)


def save_hog(grid, path):
    """Write a feature grid in the versioned binary layout."""
    with open(path, "wb") as f:
        f.write(HOG_MAGIC)
        f.write(struct.pack("<IIII", grid.cells_x, grid.cells_y, grid.bins,
                            grid.cell_size))
        f.write(struct.pack("<d", grid.threshold_used))
        f.write(np.ascontiguousarray(grid.hist, dtype="<f8").tobytes())


def load_hog(path):
    """Read a feature grid written by :func:`save_hog`."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != HOG_MAGIC:
        raise ValueError("%s: not a %s feature file" % (path, HOG_MAGIC.decode()))
    cells_x, cells_y, bins, cell_size = struct.unpack_from("<IIII", data, 4)
    (threshold,) = struct.unpack_from("<d", data, 20)
    count = cells_x * cells_y * bins
    hist = np.frombuffer(data, dtype="<f8", count=count, offset=28)
    if hist.size != count:
        raise ValueError("%s: truncated feature payload" % path)
    hist = hist.reshape(cells_y, cells_x, bins).astype(np.float64)
    return HogGrid(hist=hist, cell_size=cell_size, threshold_used=threshold)
