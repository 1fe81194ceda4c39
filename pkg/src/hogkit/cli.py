"""Command-line front end: hogkit hog|train|detect|bench.

Machine-readable output (detection JSON lines, bench timings) goes to
stdout; human-readable summaries and errors go to stderr. The optional
HOGKIT_THREADS environment variable caps internal parallelism; all outputs
are bit-identical regardless of its value.
"""

import argparse
import os
import statistics
import sys
import time

import numpy as np

from . import detector, features, glyph, imgio, training


def _thread_cap():
    raw = os.environ.get("HOGKIT_THREADS")
    if raw is None:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        return None


def _add_hog_params(p):
    p.add_argument("--cell-size", type=int, default=features.DEFAULT_CELL_SIZE)
    p.add_argument("--bins", type=int, default=features.DEFAULT_BINS)
    p.add_argument("--tau", type=float, default=features.DEFAULT_TAU)


def _load_gray(path):
    return imgio.to_gray(imgio.load_image(path))


def cmd_hog(args):
    gray = _load_gray(args.input)
    grid = features.hog_features(features.image_gradient(gray),
                                 args.cell_size, args.bins, args.tau)
    if args.normalize:
        grid = features.normalize_cells(grid)
    features.save_hog(grid, args.out)
    if args.draw:
        cfg = glyph.GlyphConfig(glyph_size=args.glyph_size)
        imgio.save_image(glyph.render_glyphs(grid, cfg), args.draw)
    return 0


def cmd_train(args):
    positives, negatives = training.collect_patches(args.annotations,
                                                    args.window)
    if not positives:
        raise training.AnnotationError("no positive annotations found")
    tmpl = training.build_template(positives, negatives, args.cell_size,
                                   args.bins, args.tau)
    training.save_template(tmpl, args.out)
    print("positives: %d, negatives: %d" % (len(positives), len(negatives)),
          file=sys.stderr)
    return 0


def _rank_color(rank, n):
    t = rank / (n - 1) if n > 1 else 0.0
    return (round(255 * t), round(255 * (1 - t)), 0)


def draw_overlay(rgb, dets):
    """Draw 2-px ranked box outlines, green fading to red."""
    out = rgb.copy()
    h, w = out.shape[:2]
    n = len(dets)
    for d in dets:
        color = np.array(_rank_color(d.rank, n), dtype=np.uint8)
        x0, y0 = max(d.x, 0), max(d.y, 0)
        x1, y1 = min(d.x + d.w, w), min(d.y + d.h, h)
        if x0 >= x1 or y0 >= y1:
            continue
        out[y0:min(y0 + 2, y1), x0:x1] = color
        out[max(y1 - 2, y0):y1, x0:x1] = color
        out[y0:y1, x0:min(x0 + 2, x1)] = color
        out[y0:y1, max(x1 - 2, x0):x1] = color
    return out


def format_detection(d):
    return ('{"rank":%d,"x":%d,"y":%d,"w":%d,"h":%d,"score":%.6f,"level":%d}'
            % (d.rank, d.x, d.y, d.w, d.h, d.score, d.level))


def cmd_detect(args):
    rgb = imgio.load_image(args.input)
    gray = imgio.to_gray(rgb)
    tmpl = training.load_template(args.template)
    nms = detector.NmsConfig(min_dist=args.min_dist)
    if args.multiscale:
        dets = detector.detect_multiscale(
            gray, tmpl, args.top, nms, detector.PyramidConfig(scale=args.scale),
            args.cell_size, args.bins, args.tau)
    else:
        dets = detector.detect(gray, tmpl, args.top, nms,
                               args.cell_size, args.bins, args.tau)
    for d in dets:
        print(format_detection(d))
    if args.overlay:
        imgio.save_image(draw_overlay(rgb, dets), args.overlay)
    return 0


def cmd_bench(args):
    try:
        w, h = (int(v) for v in args.size.lower().split("x"))
    except ValueError:
        raise ValueError("--size must look like 1024x768")
    rng = np.random.default_rng(args.seed)
    img = rng.random((h, w))
    runs_ms = []
    reference = None
    for _ in range(args.iters):
        t0 = time.perf_counter()
        grid = features.hog_features(features.image_gradient(img),
                                     args.cell_size, args.bins, args.tau)
        runs_ms.append((time.perf_counter() - t0) * 1000.0)
        blob = grid.hist.tobytes()
        if reference is None:
            reference = blob
        elif blob != reference:
            raise RuntimeError("non-deterministic feature output across runs")
    print("min: %.3f ms  median: %.3f ms"
          % (min(runs_ms), statistics.median(runs_ms)))
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="hogkit",
        description="HOG-feature object detection by template matching")
    sub = p.add_subparsers(dest="command", required=True)

    ph = sub.add_parser("hog", help="extract features, optionally draw glyphs")
    ph.add_argument("--input", required=True)
    ph.add_argument("--out", required=True)
    ph.add_argument("--draw")
    ph.add_argument("--glyph-size", type=int, default=15)
    ph.add_argument("--normalize", action="store_true")
    _add_hog_params(ph)
    ph.set_defaults(func=cmd_hog)

    pt = sub.add_parser("train", help="build a template from annotations")
    pt.add_argument("--annotations", action="append", required=True)
    pt.add_argument("--out", required=True)
    pt.add_argument("--window", type=int, default=training.DEFAULT_WINDOW)
    _add_hog_params(pt)
    pt.set_defaults(func=cmd_train)

    pd = sub.add_parser("detect", help="run the detector on an image")
    pd.add_argument("--input", required=True)
    pd.add_argument("--template", required=True)
    pd.add_argument("--top", type=int, default=detector.DEFAULT_TOP_N)
    pd.add_argument("--min-dist", type=float, default=detector.DEFAULT_MIN_DIST)
    pd.add_argument("--multiscale", action="store_true")
    pd.add_argument("--scale", type=float, default=detector.DEFAULT_SCALE)
    pd.add_argument("--overlay")
    _add_hog_params(pd)
    pd.set_defaults(func=cmd_detect)

    pb = sub.add_parser("bench", help="time the gradient+feature pass")
    pb.add_argument("--size", required=True)
    pb.add_argument("--iters", type=int, default=10)
    pb.add_argument("--seed", type=int, default=0)
    _add_hog_params(pb)
    pb.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    _thread_cap()  # validated for side effects; results never depend on it
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as e:
        print("hogkit: error: %s" % e, file=sys.stderr)
        return 1


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
