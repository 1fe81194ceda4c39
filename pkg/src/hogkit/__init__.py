"""HOG-feature object detection by template matching."""

from .detector import (Detection, NmsConfig, PyramidConfig, ScoreGrid,
                       build_pyramid, detect, detect_multiscale, nms_top_n,
                       score_map)
from .estimator import HogTransformer, TemplateMatchingDetector
from .features import (GradientField, HogGrid, hog_features, image_gradient,
                       load_hog, normalize_cells, orientation_bin, save_hog)
from .glyph import GlyphConfig, render_glyphs
from .imgio import (DecodeError, load_image, resize_bilinear, save_image,
                    to_gray)
from .training import (Annotation, AnnotationError, Template, build_template,
                       collect_patches, extract_patch, load_annotation_file,
                       load_template, save_template)

__version__ = "0.1.0"

__all__ = [
    "Annotation", "AnnotationError", "DecodeError", "Detection",
    "GlyphConfig", "GradientField", "HogGrid", "HogTransformer", "NmsConfig",
    "PyramidConfig", "ScoreGrid", "Template", "TemplateMatchingDetector",
    "build_pyramid", "build_template", "collect_patches", "detect",
    "detect_multiscale", "extract_patch", "hog_features", "image_gradient",
    "load_annotation_file", "load_hog", "load_image", "load_template",
    "nms_top_n", "normalize_cells", "orientation_bin", "render_glyphs",
    "resize_bilinear", "save_hog", "save_image", "save_template", "score_map",
    "to_gray",
]
