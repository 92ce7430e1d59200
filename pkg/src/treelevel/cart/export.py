"""Tree serialization: stable indented text, DOT, and lossless versioned JSON."""

from __future__ import annotations

import json
import math

from ..dataset import ColumnInfo, DataError
from .structures import CpRow, GrowControls, Split, Surrogate, Tree, TreeNode

JSON_FORMAT = "treelevel-tree"
JSON_VERSION = 1


def _describe_split(split: Split) -> str:
    if split.threshold is not None:
        op = ">" if split.flip else "<="
        return f"{split.variable} {op} {split.threshold:g}"
    levels = ",".join(sorted(split.left_levels))
    return f"{split.variable} in {{{levels}}}"


def _text_lines(node: TreeNode, lines: list[str]) -> None:
    pad = "  " * node.depth
    head = (
        f"{pad}{node.node_id}) n=({node.counts[0]},{node.counts[1]})"
        f" class={node.predicted_class} prob={node.predicted_prob:.4f}"
    )
    if node.is_leaf:
        lines.append(head + " leaf")
        return
    lines.append(head)
    lines.append(
        f"{pad}   split: {_describe_split(node.split)}"
        f" improvement={node.split.improvement:.6g}"
        f" majority={node.split.majority_direction}"
    )
    for surrogate in node.surrogates:
        lines.append(
            f"{pad}   surrogate: {_describe_split(surrogate.split)}"
            f" agreement={surrogate.agreement:.4f}"
        )
    _text_lines(node.left, lines)
    _text_lines(node.right, lines)


def _as_text(tree: Tree) -> str:
    lines = [
        f"tree: response={tree.response} n={tree.n_root}"
        f" risk={tree.root_risk} splits={tree.n_splits}"
    ]
    _text_lines(tree.root, lines)
    return "\n".join(lines) + "\n"


def _as_dot(tree: Tree) -> str:
    lines = ["digraph tree {", "  node [shape=box];"]
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            label = (
                f"class={node.predicted_class}\\n"
                f"prob={node.predicted_prob:.3f}\\n"
                f"n=({node.counts[0]},{node.counts[1]})"
            )
        else:
            label = (
                f"{_describe_split(node.split)}\\n"
                f"n=({node.counts[0]},{node.counts[1]})"
            )
        lines.append(f'  n{node.node_id} [label="{label}"];')
        if not node.is_leaf:
            lines.append(f'  n{node.node_id} -> n{node.left.node_id} [label="yes"];')
            lines.append(f'  n{node.node_id} -> n{node.right.node_id} [label="no"];')
            stack.append(node.right)
            stack.append(node.left)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _split_to_json(split: Split | None):
    if split is None:
        return None
    return {
        "variable": split.variable,
        "threshold": split.threshold,
        "left_levels": sorted(split.left_levels) if split.left_levels is not None else None,
        "flip": split.flip,
        "improvement": split.improvement,
        "majority_direction": split.majority_direction,
    }


def _split_from_json(doc) -> Split | None:
    if doc is None:
        return None
    return Split(
        variable=doc["variable"],
        threshold=doc["threshold"],
        left_levels=frozenset(doc["left_levels"]) if doc["left_levels"] is not None else None,
        flip=doc["flip"],
        improvement=doc["improvement"],
        majority_direction=doc["majority_direction"],
    )


def _node_to_json(node: TreeNode):
    return {
        "id": node.node_id,
        "depth": node.depth,
        "counts": list(node.counts),
        "split": _split_to_json(node.split),
        "surrogates": [
            {"split": _split_to_json(s.split), "agreement": s.agreement}
            for s in node.surrogates
        ],
        "collapse_alpha": node.collapse_alpha,
        "left": _node_to_json(node.left) if node.left is not None else None,
        "right": _node_to_json(node.right) if node.right is not None else None,
    }


def _node_from_json(doc) -> TreeNode:
    return TreeNode(
        node_id=doc["id"],
        depth=doc["depth"],
        counts=tuple(doc["counts"]),
        split=_split_from_json(doc["split"]),
        surrogates=[
            Surrogate(split=_split_from_json(s["split"]), agreement=s["agreement"])
            for s in doc["surrogates"]
        ],
        collapse_alpha=doc["collapse_alpha"],
        left=_node_from_json(doc["left"]) if doc["left"] is not None else None,
        right=_node_from_json(doc["right"]) if doc["right"] is not None else None,
    )


def _cp_to_json(row: CpRow):
    return {
        "cp": "inf" if math.isinf(row.cp) else row.cp,
        "n_splits": row.n_splits,
        "rel_error": row.rel_error,
        "x_error": row.x_error,
        "x_std": row.x_std,
    }


def _cp_from_json(doc) -> CpRow:
    cp = math.inf if doc["cp"] == "inf" else doc["cp"]
    return CpRow(
        cp=cp,
        n_splits=doc["n_splits"],
        rel_error=doc["rel_error"],
        x_error=doc["x_error"],
        x_std=doc["x_std"],
    )


def _as_json(tree: Tree) -> str:
    doc = {
        "format": JSON_FORMAT,
        "version": JSON_VERSION,
        "response": tree.response,
        "predictors": tree.predictors,
        "predictor_info": {
            name: {
                "kind": info.kind,
                "levels": list(info.levels),
                "source": info.source,
                "data_level": info.data_level,
            }
            for name, info in tree.predictor_info.items()
        },
        "controls": {
            "min_split": tree.controls.min_split,
            "min_bucket": tree.controls.min_bucket,
            "max_depth": tree.controls.max_depth,
            "cp": tree.controls.cp,
            "max_surrogate": tree.controls.max_surrogate,
            "cv_folds": tree.controls.cv_folds,
            "rng_seed": tree.controls.rng_seed,
        },
        "n_root": tree.n_root,
        "cp_table": None
        if tree.cp_table is None
        else [_cp_to_json(r) for r in tree.cp_table],
        "root": _node_to_json(tree.root),
    }
    return json.dumps(doc, indent=2) + "\n"


def export_tree(tree: Tree, fmt: str = "text") -> str:
    """Render a tree as ``text`` (stable, diff-friendly), ``dot``, or ``json``."""
    if fmt == "text":
        return _as_text(tree)
    if fmt == "dot":
        return _as_dot(tree)
    if fmt == "json":
        return _as_json(tree)
    raise DataError(f"unknown export format {fmt!r}")


def import_tree(text: str) -> Tree:
    """Rebuild a tree from its JSON export; inverse of ``export_tree(json)``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"tree JSON is malformed: {exc}") from None
    if doc.get("format") != JSON_FORMAT:
        raise DataError("not a tree document")
    if doc.get("version") != JSON_VERSION:
        raise DataError(f"unsupported tree format version {doc.get('version')!r}")
    info = {
        name: ColumnInfo(
            kind=entry["kind"],
            levels=tuple(entry["levels"]),
            source=entry["source"],
            data_level=entry["data_level"],
        )
        for name, entry in doc["predictor_info"].items()
    }
    return Tree(
        root=_node_from_json(doc["root"]),
        response=doc["response"],
        predictors=list(doc["predictors"]),
        predictor_info=info,
        controls=GrowControls(**doc["controls"]),
        n_root=doc["n_root"],
        cp_table=None
        if doc["cp_table"] is None
        else [_cp_from_json(r) for r in doc["cp_table"]],
    )
