"""Cost-complexity pruning sequence, cp table, cross-validated selection."""

import math

import numpy as np
import pytest

from treelevel import (
    DataError,
    GrowControls,
    Tree,
    cost_complexity_sequence,
    cp_sweep,
    cross_validate_cp,
    grow_tree,
    prune,
)
from treelevel.cart.structures import Split, TreeNode
from treelevel.dataset import ColumnInfo

from helpers import numeric_dataset, random_instance
from oracles import weakest_link_states


def leaf(node_id, depth, counts):
    return TreeNode(node_id=node_id, depth=depth, counts=counts)


def hand_tree():
    """Three internal nodes with collapse values 0, 0.1, and 0.6 by hand."""
    n4 = leaf(4, 2, (7, 0))
    n5 = leaf(5, 2, (1, 2))
    n6 = leaf(6, 2, (0, 6))
    n7 = leaf(7, 2, (2, 2))
    n2 = TreeNode(
        node_id=2, depth=1, counts=(8, 2),
        split=Split(variable="b", threshold=0.5), left=n4, right=n5,
    )
    n3 = TreeNode(
        node_id=3, depth=1, counts=(2, 8),
        split=Split(variable="c", threshold=0.5), left=n6, right=n7,
    )
    root = TreeNode(
        node_id=1, depth=0, counts=(10, 10),
        split=Split(variable="a", threshold=0.5), left=n2, right=n3,
    )
    info = {v: ColumnInfo(kind="numeric") for v in "abc"}
    return Tree(
        root=root, response="y", predictors=["a", "b", "c"],
        predictor_info=info, controls=GrowControls(), n_root=20,
    )


def signal_dataset(seed=5, n=150):
    """One strong numeric predictor plus two noise columns."""
    rng = np.random.default_rng(seed)
    x0 = rng.normal(size=n)
    x1 = rng.normal(size=n)
    x2 = rng.normal(size=n)
    y = (rng.random(n) < 1.0 / (1.0 + np.exp(-2.5 * x0))).astype(int)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return numeric_dataset({"x0": x0, "x1": x1, "x2": x2}, y)


def internal_ids(tree):
    return frozenset(n.node_id for n in tree.internal_nodes())


def test_hand_tree_sequence():
    tree = hand_tree()
    table = cost_complexity_sequence(tree)
    assert [(r.cp, r.n_splits, r.rel_error) for r in table] == [
        (math.inf, 0, 1.0),
        (0.6, 1, 0.4),
        (0.1, 2, 0.3),
        (0.0, 3, 0.3),
    ]
    by_id = {n.node_id: n for n in tree.internal_nodes()}
    assert by_id[3].collapse_alpha == 0.0  # the free split goes first
    assert by_id[2].collapse_alpha == 0.1
    assert by_id[1].collapse_alpha == 0.6


def test_hand_tree_prune_points():
    tree = hand_tree()
    cost_complexity_sequence(tree)
    assert internal_ids(prune(tree, 0.0)) == {1, 2, 3}  # zero never prunes
    assert internal_ids(prune(tree, 0.05)) == {1, 2}
    assert internal_ids(prune(tree, 0.1)) == {1}  # interval low end included
    assert internal_ids(prune(tree, 0.59)) == {1}
    assert internal_ids(prune(tree, 0.6)) == frozenset()
    assert internal_ids(prune(tree, 1.0)) == frozenset()
    with pytest.raises(DataError):
        prune(tree, -0.1)
    # pruning does not mutate the source tree
    assert tree.n_splits == 3


def test_pure_root_table():
    pure = numeric_dataset({"x": [1.0, 2.0, 3.0]}, [0, 0, 0])
    tree = grow_tree(pure, "y", ["x"], GrowControls(min_split=2, min_bucket=1, cp=0.0))
    table = cost_complexity_sequence(tree)
    assert len(table) == 1
    assert math.isinf(table[0].cp)
    assert table[0].rel_error == 1.0


def grown_instance(seed):
    ds = random_instance(seed, max_n=160, min_n=40, missing_rate=0.1)
    predictors = [c.name for c in ds.columns if c.role == "predictor"]
    controls = GrowControls(min_split=4, min_bucket=2, cp=0.0, max_surrogate=3)
    return grow_tree(ds, "y", predictors, controls)


def test_sequence_matches_weakest_link_oracle():
    compared = 0
    for seed in range(200, 260):
        tree = grown_instance(seed)
        if tree.root.is_leaf or tree.root.risk == 0:
            continue
        compared += 1
        table = cost_complexity_sequence(tree)
        states = weakest_link_states(tree)
        assert len(table) == len(states)
        # the table lists states by decreasing cp; state order is eventwise
        for row, (alpha, n_splits, rel, _) in zip(table[:0:-1], states):
            assert row.n_splits == n_splits
            assert row.rel_error == pytest.approx(float(rel), abs=1e-15)
        alphas = [row.cp for row in table[:0:-1]]
        oracle_alphas = [float(a) for a, _, _, _ in states[1:]]
        assert alphas == pytest.approx(oracle_alphas, abs=1e-12)
        assert all(b > a for a, b in zip(alphas, alphas[1:]))
        # nesting: every later alive set is contained in every earlier one
        sets = [ids for _, _, _, ids in states]
        for earlier, later in zip(sets, sets[1:]):
            assert later < earlier
    assert compared >= 40


def test_prune_returns_the_containing_interval_member():
    rng = np.random.default_rng(99)
    for seed in range(300, 320):
        tree = grown_instance(seed)
        if tree.root.is_leaf or tree.root.risk == 0:
            continue
        cost_complexity_sequence(tree)
        states = weakest_link_states(tree)
        alphas = [float(a) for a, _, _, _ in states[1:]]
        for cp in rng.uniform(1e-9, 1.0, 12):
            fired = sum(a <= cp for a in alphas)
            expected = states[fired][3]
            assert internal_ids(prune(tree, float(cp))) == expected
        # monotone: larger cp prunes to a subtree of the smaller-cp result
        cps = np.sort(rng.uniform(0.0, 1.0, 6))
        for low, high in zip(cps, cps[1:]):
            assert internal_ids(prune(tree, float(high))) <= internal_ids(
                prune(tree, float(low))
            )
        assert internal_ids(prune(tree, 0.0)) == internal_ids(tree)


def test_cross_validation_table_and_selection():
    ds = signal_dataset()
    controls = GrowControls(min_split=10, min_bucket=5, cp=0.0, cv_folds=5, rng_seed=3)
    result = cross_validate_cp(ds, "y", ["x0", "x1", "x2"], controls)
    table = result.table
    assert len(table) >= 3
    assert math.isinf(table[0].cp)
    assert table[0].n_splits == 0

    tree = grow_tree(ds, "y", ["x0", "x1", "x2"], controls)
    root_risk = tree.root.risk
    n = ds.n_rows
    for row in table:
        assert row.x_error is not None and row.x_std is not None
        assert row.x_std >= 0.0
        p_hat = row.x_error * root_risk / n
        assert row.x_std == pytest.approx(
            math.sqrt(n * p_hat * (1.0 - p_hat)) / root_risk, abs=1e-12
        )

    best = min(r.x_error for r in table)
    assert result.selected_row.x_error == best
    assert result.selected_row.n_splits == min(
        r.n_splits for r in table if r.x_error == best
    )

    # selected cp is the geometric midpoint of the winning row's interval
    idx = table.index(result.selected_row)
    high = 1.0 if math.isinf(table[idx].cp) else table[idx].cp
    low = table[idx + 1].cp if idx + 1 < len(table) else 0.0
    expected = 0.0 if low <= 0 else math.sqrt(low * high)
    assert result.selected_cp == pytest.approx(expected, abs=1e-15)

    again = cross_validate_cp(ds, "y", ["x0", "x1", "x2"], controls)
    assert again.table == result.table
    assert again.selected_cp == result.selected_cp


def test_one_se_rule_prefers_smaller_trees():
    ds = signal_dataset(seed=8)
    controls = GrowControls(min_split=10, min_bucket=5, cp=0.0, cv_folds=5, rng_seed=1)
    plain = cross_validate_cp(ds, "y", ["x0", "x1", "x2"], controls)
    one_se = cross_validate_cp(ds, "y", ["x0", "x1", "x2"], controls, one_se=True)
    assert one_se.table == plain.table
    bar = plain.selected_row.x_error + plain.selected_row.x_std
    assert one_se.selected_row.x_error <= bar
    assert one_se.selected_row.n_splits <= plain.selected_row.n_splits
    # it is the smallest tree within the bar
    for row in one_se.table:
        if row.x_error <= bar:
            assert row.n_splits == one_se.selected_row.n_splits
            break


def test_fold_assignment_needs_both_classes():
    ds = numeric_dataset({"x": [float(i) for i in range(20)]}, [1] + [0] * 19)
    controls = GrowControls(min_split=2, min_bucket=1, cp=0.0, cv_folds=10)
    with pytest.raises(DataError, match="both classes"):
        cross_validate_cp(ds, "y", ["x"], controls)


def test_fold_seed_reported():
    ds = signal_dataset(seed=12)
    controls = GrowControls(min_split=10, min_bucket=5, cp=0.0, cv_folds=5, rng_seed=42)
    result = cross_validate_cp(ds, "y", ["x0", "x1", "x2"], controls)
    assert result.fold_seed >= 42


def test_cp_sweep_follows_table_intervals():
    ds = signal_dataset(seed=21)
    controls = GrowControls(min_split=10, min_bucket=5, cp=0.0, cv_folds=5, rng_seed=2)
    result = cross_validate_cp(ds, "y", ["x0", "x1", "x2"], controls)
    grid = [0.0, 0.002, 0.01, 0.05, 0.3, 1.0]
    rows = cp_sweep(ds, "y", ["x0", "x1", "x2"], controls, grid)
    assert [r.cp for r in rows] == grid
    table = result.table
    for row in rows:
        # find the table row whose interval holds this grid value
        match = table[0]
        for k, trow in enumerate(table):
            high = 1.0 if math.isinf(trow.cp) else trow.cp
            low = table[k + 1].cp if k + 1 < len(table) else 0.0
            if low <= row.cp < high or (math.isinf(trow.cp) and row.cp >= low):
                match = trow
                break
        assert row.n_splits == match.n_splits
        assert row.rel_error == match.rel_error
        assert row.x_error == match.x_error
    # more pruning as cp grows
    sizes = [r.n_splits for r in rows]
    assert sizes == sorted(sizes, reverse=True)


def test_cp_sweep_validation():
    ds = signal_dataset(seed=2, n=60)
    with pytest.raises(DataError, match="empty cp grid"):
        cp_sweep(ds, "y", ["x0"], cps=[])
    with pytest.raises(DataError, match="outside"):
        cp_sweep(ds, "y", ["x0"], cps=[0.5, 1.5])
