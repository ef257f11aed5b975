"""Hierarchical cluster/PCA modelling and generation of eye-tracking scan paths."""

from .clustering import (
    Centroid,
    ClusterAssignment,
    ClusterGroup,
    combine_close_subclusters,
    kmeans,
)
from .errors import (
    ConfigError,
    EmptyDatasetError,
    FeatureError,
    GenerationError,
    ParseError,
    ScanPathError,
    SchemaError,
    VersionError,
)
from .eval_harness import (
    EvalReport,
    MlpClassifier,
    NearestCentroidClassifier,
    cross_validate,
    deception_rate,
    featurize_recordings,
    format_report,
    train_mlp,
)
from .features import (
    FeatureVector,
    augment,
    featurize_heatmap,
    featurize_hov,
)
from .gaze_data import (
    Bounds,
    CsvFormat,
    Dataset,
    GazePoint,
    GazeRecording,
    dimensionality,
    load_recordings,
    normalize,
    recording_from_array,
    write_recordings,
)
from .generator import (
    GeneratorConfig,
    add_time,
    generate_batch,
    generate_scanpath,
    normalize_time,
)
from .model_builder import (
    BuildConfig,
    ModelNode,
    ScanPathModel,
    UpdateRule,
    apply_update_rule,
    generate_model,
    load_model,
    save_model,
)

__version__ = "0.1.0"

__all__ = [
    "Bounds",
    "BuildConfig",
    "Centroid",
    "ClusterAssignment",
    "ClusterGroup",
    "ConfigError",
    "CsvFormat",
    "Dataset",
    "EmptyDatasetError",
    "EvalReport",
    "FeatureError",
    "FeatureVector",
    "GazePoint",
    "GazeRecording",
    "GenerationError",
    "GeneratorConfig",
    "MlpClassifier",
    "ModelNode",
    "NearestCentroidClassifier",
    "ParseError",
    "ScanPathError",
    "ScanPathModel",
    "SchemaError",
    "UpdateRule",
    "VersionError",
    "add_time",
    "apply_update_rule",
    "augment",
    "combine_close_subclusters",
    "cross_validate",
    "deception_rate",
    "dimensionality",
    "featurize_heatmap",
    "featurize_hov",
    "featurize_recordings",
    "format_report",
    "generate_batch",
    "generate_model",
    "generate_scanpath",
    "kmeans",
    "load_model",
    "load_recordings",
    "normalize",
    "normalize_time",
    "recording_from_array",
    "save_model",
    "train_mlp",
    "write_recordings",
]
