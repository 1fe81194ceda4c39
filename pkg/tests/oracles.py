"""Independent brute-force reference implementations used by the tests.

These deliberately avoid the library's vectorized code paths: binning walks
an explicit edge list, histograms loop per pixel, scoring is a naive triple
loop, and suppression replays the greedy rule over an explicit pool.
"""

import math

import numpy as np


def gradient_oracle(img):
    """Direct stencil evaluation, zero border."""
    h, w = img.shape
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            gx[y, x] = img[y, x + 1] - img[y, x - 1]
            gy[y, x] = img[y + 1, x] - img[y - 1, x]
    return gx, gy


def bin_oracle(theta, bins):
    """Locate theta by scanning the explicit bin-edge list."""
    edges = [-math.pi + k * 2.0 * math.pi / bins for k in range(bins + 1)]
    if theta == math.pi:
        return bins - 1
    for k in range(bins):
        if edges[k] <= theta < edges[k + 1]:
            return k
    raise AssertionError("theta %r not in any bin" % theta)


def hog_oracle(img, cell_size=8, bins=9, tau=0.10):
    """Per-pixel counting loop over complete cells."""
    h, w = img.shape
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    if h >= 3 and w >= 3:
        gx[1:-1, 1:-1] = img[1:-1, 2:] - img[1:-1, :-2]
        gy[1:-1, 1:-1] = img[2:, 1:-1] - img[:-2, 1:-1]
    mag = np.sqrt(gx * gx + gy * gy)
    thr = tau * mag.max()
    cy, cx = h // cell_size, w // cell_size
    hist = np.zeros((cy, cx, bins))
    for y in range(cy * cell_size):
        for x in range(cx * cell_size):
            m = mag[y, x]
            if m <= thr:
                continue
            th = math.atan2(gy[y, x], gx[y, x])
            hist[y // cell_size, x // cell_size, bin_oracle(th, bins)] += 1
    return hist, thr


def halving_oracle(img):
    """Brute-force 2x2 mean for exact-half resizing."""
    h, w = img.shape
    out = np.zeros((h // 2, w // 2))
    for y in range(h // 2):
        for x in range(w // 2):
            out[y, x] = (img[2 * y, 2 * x] + img[2 * y, 2 * x + 1]
                         + img[2 * y + 1, 2 * x] + img[2 * y + 1, 2 * x + 1]) / 4.0
    return out


def score_oracle(hist, weights):
    """Naive per-placement dot product / norms."""
    cy, cx, bins = hist.shape
    tcy, tcx, _ = weights.shape
    tnorm = math.sqrt(float((weights ** 2).sum()))
    out = np.zeros((cy - tcy + 1, cx - tcx + 1))
    for py in range(out.shape[0]):
        for px in range(out.shape[1]):
            dot = 0.0
            sq = 0.0
            for a in range(tcy):
                for b in range(tcx):
                    for k in range(bins):
                        v = hist[py + a, px + b, k]
                        dot += v * weights[a, b, k]
                        sq += v * v
            wnorm = math.sqrt(sq)
            out[py, px] = dot / (wnorm * tnorm) if wnorm > 0 else 0.0
    return out


def greedy_oracle(pool, n, min_dist):
    """Replay the greedy acceptance rule over an explicit candidate pool.

    ``pool`` holds (score, level, y, x, w, h) tuples in arbitrary order;
    returns accepted tuples in acceptance order.
    """
    ordered = sorted(pool, key=lambda c: (-c[0], c[1], c[2], c[3]))
    accepted = []
    for c in ordered:
        cx = c[3] + c[4] / 2.0
        cy = c[2] + c[5] / 2.0
        ok = True
        for a in accepted:
            ax = a[3] + a[4] / 2.0
            ay = a[2] + a[5] / 2.0
            if max(abs(cx - ax), abs(cy - ay)) < min_dist:
                ok = False
                break
        if ok:
            accepted.append(c)
            if len(accepted) == n:
                break
    return accepted
