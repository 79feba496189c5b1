"""Local Ternary Tree Pattern descriptors, LBP/LTP/LGS baselines and a
one-to-many identification harness."""

from .baselines import lbp_transform, lgs_transform, ltp_feature, ltp_transform
from .descriptors import DESCRIPTOR_NAMES, Descriptor, get_descriptor
from .errors import ImageFormatError, LttpError, ManifestError, ValidationError
from .evaluation import (
    EvalReport,
    IdentificationRun,
    cmc_curve,
    compare_descriptors,
    identify,
    rank_k_accuracy,
    run_identification,
    split_entries,
)
from .image import (
    DatasetManifest,
    GrayImage,
    load_gray_image,
    load_manifest,
    partition_blocks,
    save_gray_image,
)
from .matching import Metric, cosine_similarity, rank_gallery, sad
from .pattern import (
    TernaryTree,
    TransformedImage,
    Variant,
    build_ternary_tree,
    encode_lttp,
    label_edges,
    lttp_feature,
    lttp_transform,
)

__version__ = "0.1.0"

__all__ = [
    "DESCRIPTOR_NAMES",
    "DatasetManifest",
    "Descriptor",
    "EvalReport",
    "GrayImage",
    "IdentificationRun",
    "ImageFormatError",
    "LttpError",
    "ManifestError",
    "Metric",
    "TernaryTree",
    "TransformedImage",
    "ValidationError",
    "Variant",
    "build_ternary_tree",
    "cmc_curve",
    "compare_descriptors",
    "cosine_similarity",
    "encode_lttp",
    "get_descriptor",
    "identify",
    "label_edges",
    "lbp_transform",
    "lgs_transform",
    "load_gray_image",
    "load_manifest",
    "ltp_feature",
    "ltp_transform",
    "lttp_feature",
    "lttp_transform",
    "partition_blocks",
    "rank_gallery",
    "rank_k_accuracy",
    "run_identification",
    "sad",
    "save_gray_image",
    "split_entries",
]
