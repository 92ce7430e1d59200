"""Routing new observations through a grown tree and summarizing split usage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import DataError, Dataset
from .structures import Tree, TreeNode


def _encode(value, info):
    """Raw cell to routing code; unknown levels degrade to missing."""
    if value is None:
        return None
    if info.kind == "ordinal":
        try:
            return float(info.levels.index(value) + 1)
        except ValueError:
            return None
    if info.kind == "nominal":
        return value if value in info.levels else None
    try:
        return float(value)
    except (TypeError, ValueError):
        return None


def route_row(tree: Tree, row: dict) -> TreeNode:
    """Leaf reached by one record; never raises on missing or unknown values.

    Routing tries the primary split, then the surrogates in rank order, and
    finally the stored majority direction, so a decision always exists.
    """
    node = tree.root
    while not node.is_leaf:
        direction = None
        for split in [node.split] + [s.split for s in node.surrogates]:
            code = _encode(row.get(split.variable), tree.predictor_info[split.variable])
            if code is None:
                continue
            direction = "left" if split.goes_left(code) else "right"
            break
        if direction is None:
            direction = node.split.majority_direction
        node = node.left if direction == "left" else node.right
    return node


def predict_tree(tree: Tree, data, output: str = "prob") -> np.ndarray:
    """Predictions for a Dataset or an iterable of row dicts.

    ``output``: ``prob`` (class-1 probability of the leaf), ``class``
    (majority label, ties to 0), or ``node`` (leaf id).
    """
    if output not in ("prob", "class", "node"):
        raise DataError(f"unknown output kind {output!r}")
    if isinstance(data, Dataset):
        rows = (data.row(i) for i in range(data.n_rows))
    else:
        rows = iter(data)
    out = []
    for row in rows:
        leaf = route_row(tree, row)
        if output == "prob":
            out.append(leaf.predicted_prob)
        elif output == "class":
            out.append(leaf.predicted_class)
        else:
            out.append(leaf.node_id)
    dtype = float if output == "prob" else int
    return np.asarray(out, dtype=dtype)


@dataclass(frozen=True)
class SplitProfile:
    """Usage of one variable across a tree's primary splits.

    ``positions`` marks appearances in the first three split slots: the root
    split and the splits of the root's left and right children.
    """

    count: int
    depths: tuple[int, ...]
    positions: tuple[int, ...]


def split_variable_profile(tree: Tree) -> dict[str, SplitProfile]:
    """Primary-split usage per variable (surrogates are not counted)."""
    position_of: dict[str, set[int]] = {}
    slots = [(tree.root, 1)]
    if not tree.root.is_leaf:
        slots += [(tree.root.left, 2), (tree.root.right, 3)]
    for node, slot in slots:
        if node is not None and not node.is_leaf:
            position_of.setdefault(node.split.variable, set()).add(slot)

    counts: dict[str, int] = {}
    depths: dict[str, set[int]] = {}
    for node in tree.internal_nodes():
        var = node.split.variable
        counts[var] = counts.get(var, 0) + 1
        depths.setdefault(var, set()).add(node.depth)
    return {
        var: SplitProfile(
            count=counts[var],
            depths=tuple(sorted(depths[var])),
            positions=tuple(sorted(position_of.get(var, ()))),
        )
        for var in counts
    }
