"""Binary classification trees: Gini growing, surrogate splits, pruning."""

from .export import export_tree, import_tree
from .grow import grow_tree
from .predict import SplitProfile, predict_tree, route_row, split_variable_profile
from .prune import (
    CvResult,
    SweepRow,
    alpha_intervals,
    cost_complexity_sequence,
    cp_sweep,
    cross_validate_cp,
    prune,
)
from .splitting import best_split, build_views, gini_impurity
from .structures import CpRow, GrowControls, Split, Surrogate, Tree, TreeNode

__all__ = [
    "CpRow",
    "CvResult",
    "GrowControls",
    "Split",
    "SplitProfile",
    "Surrogate",
    "SweepRow",
    "Tree",
    "TreeNode",
    "alpha_intervals",
    "best_split",
    "build_views",
    "cost_complexity_sequence",
    "cp_sweep",
    "cross_validate_cp",
    "export_tree",
    "gini_impurity",
    "grow_tree",
    "import_tree",
    "predict_tree",
    "prune",
    "route_row",
    "split_variable_profile",
]
