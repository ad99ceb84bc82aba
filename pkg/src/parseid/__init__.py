"""Training-free person re-identification over human-parsing masks.

Per body class the engine keeps interpretable descriptors (binarized Lab
histograms, Lab mean, LBP texture split into contour and inner region) and
scores pairs by a weighted per-class, per-channel similarity. On top of
that sit gallery ranking, rank-r/mAP evaluation, attribute search without
a probe image, a feature store, an HTTP service and a CLI.
"""

from .attributes import (
    AttributeEntry,
    AttributeQuery,
    load_presets,
    search_by_attributes,
    synthesize_record,
)
from .classes import CLASS_BY_KEY, MergedClass, merge_labels
from .color import (
    BinarizedHistogram,
    ChannelHistogram,
    LabMean,
    binarize,
    decode_lab,
    encode_lab,
    lab_to_rgb,
    rgb_to_lab,
    stretch_l,
)
from .config import EngineConfig, extractor_version, load_weights_file, parse_weights_text
from .errors import (
    ConfigError,
    IngestError,
    ParseidError,
    QueryError,
    StoreError,
    VersionConflictError,
)
from .evaluation import (
    EvalSummary,
    QueryRow,
    RankingResult,
    Split,
    SplitImage,
    average_precision,
    evaluate,
    load_split,
    mean_average_precision,
    rank_query,
    rank_r,
    write_query_csv,
)
from .features import ClassFeatures, ExtractionConfig, FeatureRecord, extract_features
from .masks import PersonImage, load_person_image, parse_market_name
from .scoring import (
    ClassWeights,
    FeatureWeights,
    GalleryMatrix,
    SimilarityReport,
    class_similarity,
    default_class_weights,
    order_by_score,
    pair_score,
    score_against_gallery,
    score_batch,
)
from .store import BuildReport, FeatureStore, build_from_dataset, record_from_dict, record_to_dict
from .texture import LbpHistogram, lbp_code_map, lbp_histograms, texture_similarity

__version__ = "0.1.0"

__all__ = [
    "AttributeEntry",
    "AttributeQuery",
    "BinarizedHistogram",
    "BuildReport",
    "CLASS_BY_KEY",
    "ChannelHistogram",
    "ClassFeatures",
    "ClassWeights",
    "ConfigError",
    "EngineConfig",
    "EvalSummary",
    "ExtractionConfig",
    "FeatureRecord",
    "FeatureStore",
    "FeatureWeights",
    "GalleryMatrix",
    "IngestError",
    "LabMean",
    "LbpHistogram",
    "MergedClass",
    "ParseidError",
    "PersonImage",
    "QueryError",
    "QueryRow",
    "RankingResult",
    "SimilarityReport",
    "Split",
    "SplitImage",
    "StoreError",
    "VersionConflictError",
    "average_precision",
    "binarize",
    "build_from_dataset",
    "class_similarity",
    "decode_lab",
    "default_class_weights",
    "encode_lab",
    "evaluate",
    "extract_features",
    "extractor_version",
    "lab_to_rgb",
    "lbp_code_map",
    "lbp_histograms",
    "load_person_image",
    "load_presets",
    "load_split",
    "load_weights_file",
    "mean_average_precision",
    "merge_labels",
    "order_by_score",
    "pair_score",
    "parse_market_name",
    "parse_weights_text",
    "rank_query",
    "rank_r",
    "record_from_dict",
    "record_to_dict",
    "rgb_to_lab",
    "score_against_gallery",
    "score_batch",
    "search_by_attributes",
    "stretch_l",
    "synthesize_record",
    "texture_similarity",
    "write_query_csv",
]
