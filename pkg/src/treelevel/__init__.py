"""treelevel: recursive-partitioning classification for multilevel data.

The package covers a complete comparison pipeline for hierarchically nested
binary outcomes (students in classes in schools): schema-driven ingestion,
group-mean aggregation of lower-level variables, Gini-based classification
trees with surrogate splits and cost-complexity pruning, tree-driven
predictor selection feeding fixed-effect and random-intercept logistic
models, evaluation metrics, and a repeated random-split experiment harness
with a synthetic hierarchical data generator.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("treelevel")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.0.0"

from .dataset import (
    ColumnInfo,
    ColumnSchema,
    DataError,
    Dataset,
    SchemaError,
    TreelevelError,
    load_dataset,
    load_schema,
    validate_hierarchy,
    write_dataset,
    write_schema,
)
from .metrics import (
    ConfusionMatrix,
    RocCurve,
    aggregate_roc,
    auc,
    brier_score,
    confusion_matrix,
    error_rate,
    roc_curve,
    roc_table,
)
from .preprocess import (
    MergePair,
    aggregate_means,
    dichotomize_response,
    merge_parent_student,
    select_variable_set,
)
from .cart import (
    CpRow,
    CvResult,
    GrowControls,
    Split,
    SplitProfile,
    Surrogate,
    Tree,
    TreeNode,
    best_split,
    cost_complexity_sequence,
    cp_sweep,
    cross_validate_cp,
    export_tree,
    grow_tree,
    import_tree,
    predict_tree,
    prune,
    split_variable_profile,
)
from .regression import (
    DesignMatrix,
    GlmFit,
    GlmmFit,
    MixedSpec,
    encode_design,
    fit_logistic_irls,
    fit_random_intercept_logistic,
    predict_glm,
    predict_glmm,
)
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    GroundTruth,
    ImportanceRow,
    RepetitionResult,
    SyntheticSpec,
    count_split_variables,
    generate_synthetic,
    random_partition,
    run_experiment,
    tree_select_predictors,
    write_reports,
)

__all__ = [
    "__version__",
    "ColumnInfo",
    "ColumnSchema",
    "ConfusionMatrix",
    "CpRow",
    "CvResult",
    "DataError",
    "Dataset",
    "DesignMatrix",
    "ExperimentConfig",
    "ExperimentReport",
    "GlmFit",
    "GlmmFit",
    "GroundTruth",
    "GrowControls",
    "ImportanceRow",
    "MergePair",
    "MixedSpec",
    "RepetitionResult",
    "RocCurve",
    "SchemaError",
    "Split",
    "SplitProfile",
    "Surrogate",
    "SyntheticSpec",
    "Tree",
    "TreeNode",
    "TreelevelError",
    "aggregate_means",
    "aggregate_roc",
    "auc",
    "best_split",
    "brier_score",
    "confusion_matrix",
    "cost_complexity_sequence",
    "count_split_variables",
    "cp_sweep",
    "cross_validate_cp",
    "dichotomize_response",
    "encode_design",
    "error_rate",
    "export_tree",
    "fit_logistic_irls",
    "fit_random_intercept_logistic",
    "generate_synthetic",
    "grow_tree",
    "import_tree",
    "load_dataset",
    "load_schema",
    "merge_parent_student",
    "predict_glm",
    "predict_glmm",
    "predict_tree",
    "prune",
    "random_partition",
    "roc_curve",
    "roc_table",
    "run_experiment",
    "select_variable_set",
    "split_variable_profile",
    "tree_select_predictors",
    "validate_hierarchy",
    "write_dataset",
    "write_reports",
    "write_schema",
]
