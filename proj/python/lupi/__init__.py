"""Teacher-student distillation with privileged information."""

from ._core import (
    Architecture,
    ConfigError,
    ContractError,
    Dataset,
    DatasetSpec,
    DimensionError,
    FormatError,
    FrozenTeacher,
    PairedSample,
    TrainConfig,
    accuracy,
    compute_eer,
    cosine_score,
    format_results,
    generate,
    parse_results_csv,
    read_dataset,
    relative_delta,
    round_percent,
    run_matrix,
    summarize,
    train_student,
    train_teacher,
    unweighted_accuracy,
    validate_run_spec,
    write_dataset,
)

__all__ = [
    "Architecture",
    "ConfigError",
    "ContractError",
    "Dataset",
    "DatasetSpec",
    "DimensionError",
    "FormatError",
    "FrozenTeacher",
    "PairedSample",
    "TrainConfig",
    "accuracy",
    "compute_eer",
    "cosine_score",
    "format_results",
    "generate",
    "parse_results_csv",
    "read_dataset",
    "relative_delta",
    "round_percent",
    "run_matrix",
    "summarize",
    "train_student",
    "train_teacher",
    "unweighted_accuracy",
    "validate_run_spec",
    "write_dataset",
]
