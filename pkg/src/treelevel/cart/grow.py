"""Recursive tree growing with surrogate-based routing of missing values."""

from __future__ import annotations

import numpy as np

from ..dataset import DataError, Dataset
from .splitting import (
    ColumnView,
    _left_mask,
    build_views,
    choose_split,
    find_surrogates,
    response_array,
)
from .structures import GrowControls, Tree, TreeNode


def grow_tree(
    ds: Dataset,
    response: str,
    predictors: list[str],
    controls: GrowControls | None = None,
) -> Tree:
    """Grow a classification tree.

    A node is split while it holds at least ``min_split`` observations, lies
    above ``max_depth``, and the best admissible split clears the pre-pruning
    bar (Gini improvement strictly above ``cp`` times the root
    misclassification risk).  Observations missing the primary split variable
    route through the surrogates in rank order and fall back to the majority
    direction, so every observation reaches a child.
    """
    if controls is None:
        controls = GrowControls()
    if not predictors:
        raise DataError("at least one predictor is required")
    seen = set()
    for name in predictors:
        if name == response:
            raise DataError("response cannot be a predictor")
        if name in seen:
            raise DataError(f"duplicate predictor {name!r}")
        seen.add(name)
    y = response_array(ds, response)
    if y.size == 0:
        raise DataError("cannot grow a tree on an empty dataset")
    views = build_views(ds, predictors)
    info = {name: ds.column_info(name) for name in predictors}
    return grow_from_arrays(views, y, response, predictors, info, controls)


def grow_from_arrays(
    views: dict[str, ColumnView],
    y: np.ndarray,
    response: str,
    predictors: list[str],
    predictor_info: dict,
    controls: GrowControls,
) -> Tree:
    """Array-level entry used by cross-validation to avoid dataset copies."""
    n_root = int(y.size)
    root_risk = int(min((y == 0).sum(), (y == 1).sum()))
    root = _grow_node(
        views,
        y,
        np.arange(n_root),
        depth=0,
        node_id=1,
        controls=controls,
        predictors=predictors,
        n_root=n_root,
        root_risk=root_risk,
    )
    return Tree(
        root=root,
        response=response,
        predictors=list(predictors),
        predictor_info=dict(predictor_info),
        controls=controls,
        n_root=n_root,
    )


def _grow_node(
    views,
    y,
    idx,
    depth,
    node_id,
    controls,
    predictors,
    n_root,
    root_risk,
) -> TreeNode:
    n1 = int(y[idx].sum())
    counts = (idx.size - n1, n1)
    node = TreeNode(node_id=node_id, depth=depth, counts=counts)
    if idx.size < controls.min_split or depth >= controls.max_depth:
        return node
    if counts[0] == 0 or counts[1] == 0:
        return node
    chosen = choose_split(views, y, idx, predictors, controls.min_bucket, n_root)
    if chosen is None:
        return node
    split, improvement_counts = chosen
    # pre-pruning: strict, so cp=1 never splits balanced data
    if improvement_counts <= controls.cp * root_risk:
        return node
    surrogates = find_surrogates(views, idx, split, predictors, controls.max_surrogate)
    left = _route_indices(views, idx, split, surrogates)
    node.split = split
    node.surrogates = surrogates
    node.left = _grow_node(
        views, y, idx[left], depth + 1, 2 * node_id, controls, predictors, n_root, root_risk
    )
    node.right = _grow_node(
        views, y, idx[~left], depth + 1, 2 * node_id + 1, controls, predictors, n_root, root_risk
    )
    return node


def _route_indices(views, idx, split, surrogates) -> np.ndarray:
    """Boolean left-mask for all observations at a node."""
    side = np.full(idx.size, -1, dtype=np.int8)

    def apply(sp):
        undecided = side == -1
        if not undecided.any():
            return
        codes = views[sp.variable].codes[idx]
        known = ~np.isnan(codes)
        target = undecided & known
        if not target.any():
            return
        left = _left_mask(views[sp.variable], codes, sp)
        side[target] = np.where(left[target], 0, 1)

    apply(split)
    for surrogate in surrogates:
        apply(surrogate.split)
    side[side == -1] = 0 if split.majority_direction == "left" else 1
    return side == 0
