"""Saliency map extraction from image classifiers."""

from .cams import METHODS, attribute
from .errors import ConfigError, ExtractorError, UnsupportedCombination
from .extract import CLASS_MODES, ExtractionJob, extract
from .models import (
    INPUT_SIZE,
    MODELS,
    build_model,
    load_image,
    preprocess,
    resolve_target,
)
from .smap import write_smap

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "MODELS",
    "CLASS_MODES",
    "INPUT_SIZE",
    "ExtractionJob",
    "ConfigError",
    "ExtractorError",
    "UnsupportedCombination",
    "attribute",
    "build_model",
    "extract",
    "load_image",
    "preprocess",
    "resolve_target",
    "write_smap",
    "__version__",
]
