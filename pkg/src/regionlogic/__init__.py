"""regionlogic: which image regions does a black-box classifier actually need?

The pipeline prunes regions of a segmented image while the model's prediction
holds, collects the minimal preserving subsets ("final states"), compiles
them into a factored AND/OR expression, and scores them against ground-truth
masks with precision / recall / divergence plus a behavior classification.
"""

from .analysis import (
    BehaviorClass,
    BehaviorThresholds,
    MetricsReport,
    aggregate_reports,
    build_report,
    classify,
    divergence,
    precision,
    recall,
)
from .composer import FillPolicy, compose, image_to_png, load_image, mean_color, png_to_image
from .errors import (
    ConfigError,
    DimensionMismatchError,
    EmptyStateSetError,
    GroundTruthError,
    LabelMapError,
    LiteralRangeError,
    MalformedResponseError,
    PredictorError,
    PredictorTimeoutError,
    QueryBudgetExceededError,
    RegionLogicError,
    RemoteModelError,
    TransportError,
    TruthTableLimitError,
)
from .logic import (
    TRUE,
    And,
    Literal,
    LogicExpr,
    Or,
    TrueExpr,
    conjunction,
    disjunction,
    equivalent,
    evaluate,
    expr_from_json,
    expr_to_json,
    literal_count,
    max_literal,
    render,
    translate,
)
from .overlay import render_overlay
from .predictor import (
    ExecPredictor,
    HttpPredictor,
    ImagePredictor,
    PixelProbeModel,
    PredictionCache,
    StateLabeler,
    SyntheticLogicModel,
    open_predictor,
    predict,
    predict_batch,
    random_formula,
)
from .refine import RefinementConfig, brute_force_final_states, refine
from .regions import (
    GroundTruthMaskSet,
    RegionPartition,
    ground_truth_state,
    load_ground_truth_masks,
    load_label_map,
    merge_small_regions,
    partition_from_labels,
)
from .states import FinalStateSet, StateVector

__version__ = "0.1.0"

__all__ = [
    "BehaviorClass",
    "BehaviorThresholds",
    "MetricsReport",
    "aggregate_reports",
    "build_report",
    "classify",
    "divergence",
    "precision",
    "recall",
    "FillPolicy",
    "compose",
    "image_to_png",
    "load_image",
    "mean_color",
    "png_to_image",
    "ConfigError",
    "DimensionMismatchError",
    "EmptyStateSetError",
    "GroundTruthError",
    "LabelMapError",
    "LiteralRangeError",
    "MalformedResponseError",
    "PredictorError",
    "PredictorTimeoutError",
    "QueryBudgetExceededError",
    "RegionLogicError",
    "RemoteModelError",
    "TransportError",
    "TruthTableLimitError",
    "TRUE",
    "And",
    "Literal",
    "LogicExpr",
    "Or",
    "TrueExpr",
    "conjunction",
    "disjunction",
    "equivalent",
    "evaluate",
    "expr_from_json",
    "expr_to_json",
    "literal_count",
    "max_literal",
    "render",
    "translate",
    "render_overlay",
    "ExecPredictor",
    "HttpPredictor",
    "ImagePredictor",
    "PixelProbeModel",
    "PredictionCache",
    "StateLabeler",
    "SyntheticLogicModel",
    "open_predictor",
    "predict",
    "predict_batch",
    "random_formula",
    "RefinementConfig",
    "brute_force_final_states",
    "refine",
    "GroundTruthMaskSet",
    "RegionPartition",
    "ground_truth_state",
    "load_ground_truth_masks",
    "load_label_map",
    "merge_small_regions",
    "partition_from_labels",
    "FinalStateSet",
    "StateVector",
    "__version__",
]
