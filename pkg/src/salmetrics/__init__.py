"""Accuracy and stability metrics for class-guided saliency maps.

The library half lives in the submodules; the most common entry points are
re-exported here. The command-line half is `salmetrics` (see cli.py).
"""

__version__ = "0.1.0"

from .accuracy import (
    AccuracyRecord,
    AccuracySummary,
    aggregate,
    evaluate_mask,
    evaluate_pair,
    pointing_game,
    uniform_baseline,
    weighting_game,
)
from .coco import (
    ClassAnnotationSet,
    InstanceShape,
    class_union_mask,
    decode_rle,
    load_mask_png,
    parse_annotations,
    rasterize_polygon,
    scan_mask_dir,
)
from .errors import (
    ConfigError,
    CropOutOfBounds,
    DegenerateRanks,
    DimensionMismatch,
    EmptyAggregate,
    EmptyDataset,
    FormatError,
    ManifestError,
    NegativeValues,
    NonFiniteValues,
    ParseError,
    RleCorrupt,
    RleLengthMismatch,
    SalmetricsError,
    SchemaError,
    ZeroMassSaliency,
)
from .formats import (
    NegativePolicy,
    read_saliency,
    write_gray_png,
    write_mask_png,
    write_saliency,
)
from .grid import (
    BinaryMask,
    PixelLocation,
    SaliencyMap,
    area_fraction,
    argmax_location,
    is_constant,
    masked_mass,
    total_mass,
)
from .morphology import KernelSpec, dilate, dilate_disc
from .report_io import ReportDocument, read_report, write_report
from .resample import (
    CropSpec,
    RngStream,
    apply_crop,
    bilinear_resize,
    resize_array,
    sample_crop,
    synthesize_zoom_sequence,
)
from .stability import (
    CropBatchEntry,
    FrameSequenceManifest,
    StabilityRecord,
    StabilitySummary,
    aggregate_stability,
    crop_stability,
    crop_stability_batch,
    crop_stability_entry,
    default_frame_pairs,
    frame_stability,
    load_crop_manifest,
    load_frame_manifest,
    spearman,
)
from .synth import (
    Shape,
    SyntheticScene,
    equivariant_saliency,
    gaussian_saliency,
    random_scene,
)
