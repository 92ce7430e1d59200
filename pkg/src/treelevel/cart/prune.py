"""Weakest-link cost-complexity pruning and cross-validated cp selection.

Alphas are misclassification-risk decreases per pruned split, divided by the
root misclassification risk.  Risks are integer counts, so weakest links are
compared in exact arithmetic and simultaneous ties collapse together; the
recorded alpha sequence is therefore strictly increasing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from ..dataset import DataError, Dataset
from .grow import grow_from_arrays, grow_tree
from .predict import route_row
from .splitting import ColumnView, build_views, response_array
from .structures import CpRow, GrowControls, Tree, TreeNode

log = logging.getLogger(__name__)


def cost_complexity_sequence(tree: Tree) -> list[CpRow]:
    """Compute the nested pruning sequence and the complexity table.

    Rows are ordered by decreasing cp: the root-only row carries cp infinity,
    and the row for each larger subtree carries the alpha at which it
    collapses into the next smaller one.  Each internal node of ``tree`` gets
    its ``collapse_alpha`` annotated; the table is cached on ``tree``.
    """
    root_risk = tree.root.risk
    internal = tree.internal_nodes()
    if not internal or root_risk == 0:
        # a pure root grows no splits; 0/0 relative error is taken as 1
        rows = [CpRow(cp=math.inf, n_splits=len(internal), rel_error=1.0)]
        tree.cp_table = rows
        return rows

    parent: dict[int, TreeNode] = {}
    branch_risk: dict[int, int] = {}
    n_leaves: dict[int, int] = {}

    def init(node: TreeNode):
        if node.is_leaf:
            return node.risk, 1
        for child in (node.left, node.right):
            parent[id(child)] = node
        rl, ll = init(node.left)
        rr, lr = init(node.right)
        branch_risk[id(node)] = rl + rr
        n_leaves[id(node)] = ll + lr
        return rl + rr, ll + lr

    init(tree.root)

    alive: dict[int, TreeNode] = {id(n): n for n in internal}
    states = [(len(alive), branch_risk[id(tree.root)] / root_risk)]
    alphas: list[float] = []

    while alive:
        # weakest links by exact fraction comparison
        best_num = best_den = None
        for node in alive.values():
            num = node.risk - branch_risk[id(node)]
            den = n_leaves[id(node)] - 1
            if best_num is None or num * best_den < best_num * den:
                best_num, best_den = num, den
        weakest = [
            node
            for node in alive.values()
            if (node.risk - branch_risk[id(node)]) * best_den
            == best_num * (n_leaves[id(node)] - 1)
        ]
        alpha = best_num / best_den / root_risk

        # keep only the top-most weakest links; descendants vanish with them
        weakest_ids = {id(n) for n in weakest}
        tops = []
        for node in weakest:
            anc = parent.get(id(node))
            while anc is not None and id(anc) not in weakest_ids:
                anc = parent.get(id(anc))
            if anc is None:
                tops.append(node)

        for node in tops:
            delta_risk = node.risk - branch_risk[id(node)]
            delta_leaves = n_leaves[id(node)] - 1
            anc = parent.get(id(node))
            while anc is not None:
                if id(anc) in alive:
                    branch_risk[id(anc)] += delta_risk
                    n_leaves[id(anc)] -= delta_leaves
                anc = parent.get(id(anc))
            stack = [node]
            while stack:
                cur = stack.pop()
                if cur.is_leaf:
                    continue
                if id(cur) in alive:
                    del alive[id(cur)]
                    cur.collapse_alpha = alpha
                stack.append(cur.left)
                stack.append(cur.right)

        alphas.append(alpha)
        if alive:
            risk_now = branch_risk[id(tree.root)]
            splits_now = len(alive)
        else:
            risk_now = tree.root.risk
            splits_now = 0
        states.append((splits_now, risk_now / root_risk))

    rows = [CpRow(cp=math.inf, n_splits=states[-1][0], rel_error=states[-1][1])]
    for j in range(len(alphas) - 1, -1, -1):
        rows.append(CpRow(cp=alphas[j], n_splits=states[j][0], rel_error=states[j][1]))
    tree.cp_table = rows
    return rows


def _copy_pruned(node: TreeNode, cp: float) -> TreeNode:
    collapse = (
        not node.is_leaf
        and cp > 0.0
        and node.collapse_alpha is not None
        and node.collapse_alpha <= cp
    )
    if node.is_leaf or collapse:
        return TreeNode(
            node_id=node.node_id,
            depth=node.depth,
            counts=node.counts,
            collapse_alpha=node.collapse_alpha,
        )
    return TreeNode(
        node_id=node.node_id,
        depth=node.depth,
        counts=node.counts,
        split=node.split,
        surrogates=list(node.surrogates),
        left=_copy_pruned(node.left, cp),
        right=_copy_pruned(node.right, cp),
        collapse_alpha=node.collapse_alpha,
    )


def prune(tree: Tree, cp: float) -> Tree:
    """Subtree of the pruning sequence whose alpha interval contains ``cp``.

    Collapses every internal node whose collapse alpha is at most ``cp``.
    ``cp`` 0 returns the tree unchanged even when the sequence starts with a
    zero alpha (splits whose risk decrease is zero); ``cp`` 1 or more always
    reduces to the root.  Pruning is monotone: a larger cp yields a subtree
    of the result for any smaller cp.
    """
    if cp < 0:
        raise DataError("cp must be >= 0")
    if tree.cp_table is None:
        cost_complexity_sequence(tree)
    pruned = Tree(
        root=_copy_pruned(tree.root, cp),
        response=tree.response,
        predictors=list(tree.predictors),
        predictor_info=dict(tree.predictor_info),
        controls=tree.controls,
        n_root=tree.n_root,
        cp_table=None,
    )
    return pruned


def alpha_intervals(table: list[CpRow]) -> list[tuple[float, float]]:
    """Per-row [low, high) alpha intervals, top-capped at 1.

    Row k's high end is its own cp (1 for the infinite root row); the low end
    is the next row's cp, or 0 for the last row.
    """
    out = []
    for k, row in enumerate(table):
        high = 1.0 if math.isinf(row.cp) else row.cp
        low = table[k + 1].cp if k + 1 < len(table) else 0.0
        low = min(low, high)
        out.append((low, high))
    return out


def _geometric_midpoint(low: float, high: float) -> float:
    if low <= 0.0:
        return 0.0
    return math.sqrt(low * high)


@dataclass(frozen=True)
class CvResult:
    table: list[CpRow]
    selected_cp: float
    selected_row: CpRow
    fold_seed: int
    one_se: bool


def _fold_assignment(n: int, folds: int, y: np.ndarray, seed: int):
    """Seeded fold labels; re-drawn when a training part loses a class."""
    if n < folds:
        raise DataError(f"{n} rows cannot form {folds} folds")
    attempt_seed = seed
    for _ in range(100):
        rng = np.random.default_rng(attempt_seed)
        perm = rng.permutation(n)
        fold = np.empty(n, dtype=int)
        fold[perm] = np.arange(n) % folds
        ok = True
        for f in range(folds):
            train_y = y[fold != f]
            if train_y.size == 0 or len(np.unique(train_y)) < 2:
                ok = False
                break
        if ok:
            return fold, attempt_seed
        log.info("fold draw with seed %d left a constant training fold; redrawing", attempt_seed)
        attempt_seed += 1
    raise DataError("could not draw cross-validation folds with both classes in every training part")


def _subset_views(views: dict[str, ColumnView], idx: np.ndarray) -> dict[str, ColumnView]:
    return {
        name: ColumnView(name=v.name, kind=v.kind, levels=v.levels, codes=v.codes[idx])
        for name, v in views.items()
    }


def _row_getter(views: dict[str, ColumnView], i: int) -> dict:
    row = {}
    for name, view in views.items():
        code = view.codes[i]
        if np.isnan(code):
            row[name] = None
        elif view.kind == "nominal":
            row[name] = view.levels[int(code)]
        elif view.kind == "ordinal":
            row[name] = view.levels[int(code) - 1]
        else:
            row[name] = float(code)
    return row


def cross_validate_cp(
    ds: Dataset,
    response: str,
    predictors: list[str],
    controls: GrowControls | None = None,
    one_se: bool = False,
) -> CvResult:
    """Cross-validated complexity selection.

    Grows the full tree, then re-grows on each training fold and scores every
    row of the main table at the geometric midpoint of its alpha interval.
    The selected cp is the midpoint of the interval of the row minimizing
    cross-validated error (ties prefer fewer splits); with ``one_se`` the
    smallest tree within one standard error of that minimum is taken instead.
    """
    if controls is None:
        controls = GrowControls()
    y = response_array(ds, response)
    views = build_views(ds, predictors)
    info = {name: ds.column_info(name) for name in predictors}
    tree = grow_from_arrays(views, y, response, predictors, info, controls)
    table = cost_complexity_sequence(tree)
    intervals = alpha_intervals(table)
    midpoints = [_geometric_midpoint(lo, hi) for lo, hi in intervals]
    root_risk = tree.root.risk

    if root_risk == 0:
        row = replace(table[0], x_error=1.0, x_std=0.0)
        tree.cp_table = [row]
        return CvResult([row], _geometric_midpoint(*intervals[0]), row, controls.rng_seed, one_se)

    n = y.size
    fold, fold_seed = _fold_assignment(n, controls.cv_folds, y, controls.rng_seed)
    errors = np.zeros((len(table), n))
    for f in range(controls.cv_folds):
        train_idx = np.nonzero(fold != f)[0]
        test_idx = np.nonzero(fold == f)[0]
        fold_views = _subset_views(views, train_idx)
        fold_tree = grow_from_arrays(
            fold_views, y[train_idx], response, predictors, info, controls
        )
        cost_complexity_sequence(fold_tree)
        test_rows = [(i, _row_getter(views, i)) for i in test_idx]
        seen: dict[float, int] = {}
        for k, midpoint in enumerate(midpoints):
            if midpoint in seen:
                errors[k, test_idx] = errors[seen[midpoint], test_idx]
                continue
            seen[midpoint] = k
            pruned = prune(fold_tree, midpoint)
            for i, row in test_rows:
                leaf = route_row(pruned, row)
                errors[k, i] = float(leaf.predicted_class != y[i])

    rows = []
    for k, row in enumerate(table):
        total = float(errors[k].sum())
        p_hat = total / n
        x_error = total / root_risk
        x_std = math.sqrt(n * p_hat * (1.0 - p_hat)) / root_risk
        rows.append(replace(row, x_error=x_error, x_std=x_std))

    best_k = 0
    for k in range(1, len(rows)):
        if rows[k].x_error < rows[best_k].x_error:
            best_k = k
    if one_se:
        bar = rows[best_k].x_error + rows[best_k].x_std
        for k in range(len(rows)):
            if rows[k].x_error <= bar:
                best_k = k
                break
    tree.cp_table = rows
    selected_cp = _geometric_midpoint(*intervals[best_k])
    return CvResult(rows, selected_cp, rows[best_k], fold_seed, one_se)


@dataclass(frozen=True)
class SweepRow:
    cp: float
    n_splits: int
    rel_error: float
    x_error: float
    x_std: float


def cp_sweep(
    ds: Dataset,
    response: str,
    predictors: list[str],
    controls: GrowControls | None = None,
    cps: list[float] | None = None,
) -> list[SweepRow]:
    """Training and cross-validated error along a grid of cp values.

    The tree is grown once at the smallest grid value; each grid cp is then
    mapped onto the row of the cross-validated table whose alpha interval
    contains it.
    """
    if controls is None:
        controls = GrowControls()
    if cps is None:
        cps = [round(0.001 * i, 3) for i in range(0, 101)]
    if not cps:
        raise DataError("empty cp grid")
    for c in cps:
        if not 0.0 <= c <= 1.0:
            raise DataError(f"grid cp {c} outside [0, 1]")
    grow_controls = replace(controls, cp=min(cps))
    result = cross_validate_cp(ds, response, predictors, grow_controls)
    intervals = alpha_intervals(result.table)
    out = []
    for c in sorted(cps):
        chosen = result.table[0]
        for row, (lo, hi) in zip(result.table, intervals):
            if lo <= c < hi or (math.isinf(row.cp) and c >= lo):
                chosen = row
                break
        out.append(
            SweepRow(
                cp=c,
                n_splits=chosen.n_splits,
                rel_error=chosen.rel_error,
                x_error=chosen.x_error,
                x_std=chosen.x_std,
            )
        )
    return out
