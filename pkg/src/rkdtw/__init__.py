"""1-NN time series classification under DTW with learned per-class warping bands."""

from .bands import (
    BandSet,
    RKBand,
    adjust_segment,
    bandset_from_json,
    bandset_to_json,
    cell_allowed,
    full_band,
    sakoe_chiba,
    uniform_bandset,
    zero_band,
)
from .classify import (
    ClassifierModel,
    build_model,
    loo_accuracy,
    predict_1nn,
    predict_many,
    run_pipeline,
)
from .dtw import band_envelope, cost_matrix, dtw_distance, dtw_path, lb_keogh
from .learning import (
    LearnLog,
    SegmentTask,
    best_warping_window,
    extract_boundary_bands,
    hillclimb_learn,
    iterative_learn,
    learn_best_band,
    path_matrix,
)
from .series import (
    ComplexityUnreachableError,
    DatasetFormatError,
    LabeledDataset,
    complexity,
    load_labeled,
    load_unlabeled,
    preprocess,
    resample_half,
    znormalize,
    znormalize_rows,
)
from .silhouette import (
    SilhouetteReport,
    distance_table,
    evaluate,
    silhouette_item,
    silhouette_report,
)

__all__ = [
    "BandSet",
    "ClassifierModel",
    "ComplexityUnreachableError",
    "DatasetFormatError",
    "LabeledDataset",
    "LearnLog",
    "RKBand",
    "SegmentTask",
    "SilhouetteReport",
    "adjust_segment",
    "band_envelope",
    "bandset_from_json",
    "bandset_to_json",
    "best_warping_window",
    "build_model",
    "cell_allowed",
    "complexity",
    "cost_matrix",
    "distance_table",
    "dtw_distance",
    "dtw_path",
    "evaluate",
    "extract_boundary_bands",
    "full_band",
    "hillclimb_learn",
    "iterative_learn",
    "lb_keogh",
    "learn_best_band",
    "load_labeled",
    "load_unlabeled",
    "loo_accuracy",
    "path_matrix",
    "predict_1nn",
    "predict_many",
    "preprocess",
    "resample_half",
    "run_pipeline",
    "sakoe_chiba",
    "silhouette_item",
    "silhouette_report",
    "uniform_bandset",
    "znormalize",
    "znormalize_rows",
    "zero_band",
]
