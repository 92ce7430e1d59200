"""Split search: hand-checked splits, exhaustive-enumeration oracle, surrogates."""

import numpy as np
import pytest

from treelevel import DataError, GrowControls, best_split, grow_tree
from treelevel.cart.splitting import gini_impurity

from helpers import numeric_dataset, random_column
from oracles import brute_force_best_split


def left_rows(values, split, levels=()):
    """Observed rows a split routes left, mirroring goes_left encoding."""
    out = set()
    for i, v in enumerate(values):
        if v is None:
            continue
        if split.left_levels is not None:
            code = v
        elif levels:
            code = float(levels.index(v) + 1)
        else:
            code = float(v)
        if split.goes_left(code):
            out.add(i)
    return frozenset(out)


def test_gini_impurity_values():
    assert gini_impurity((2, 2)) == 0.5
    assert gini_impurity((4, 0)) == 0.0
    assert gini_impurity((1, 3)) == pytest.approx(2 * 0.25 * 0.75)
    with pytest.raises(DataError):
        gini_impurity((0, 0))
    with pytest.raises(DataError):
        gini_impurity((-1, 2))


def test_numeric_split_midpoint_threshold():
    split = best_split([1.0, 2.0, 3.0, 4.0], [0, 0, 1, 1], "numeric")
    assert split.variable == "x"
    assert split.threshold == 2.5
    assert split.improvement == pytest.approx(0.5, abs=1e-12)
    assert split.majority_direction == "left"  # 2 vs 2 ties left
    assert not split.flip


def test_tied_splits_take_smallest_threshold():
    split = best_split([1.0, 2.0, 3.0], [0, 1, 0], "numeric")
    assert split.threshold == 1.5


def test_ordinal_threshold_in_code_units():
    split = best_split(
        ["low", "low", "mid", "high"],
        [0, 0, 1, 1],
        "ordinal",
        levels=("low", "mid", "high"),
    )
    assert split.threshold == 1.5
    assert split.improvement == pytest.approx(0.5, abs=1e-12)


def test_nominal_split_prefix_of_proportion_order():
    values = ["a", "a", "b", "b", "c", "c"]
    y = [1, 1, 0, 0, 1, 0]
    split = best_split(values, y, "nominal", levels=("a", "b", "c"))
    # {b} and {b, c} tie; the shorter prefix of the proportion order wins
    assert split.left_levels == frozenset({"b"})
    assert split.majority_direction == "right"
    assert split.improvement == pytest.approx(0.25, abs=1e-12)


def test_min_bucket_restricts_cuts():
    values = [1.0, 2.0, 3.0, 4.0]
    y = [0, 0, 1, 1]
    assert best_split(values, y, "numeric", min_bucket=2).threshold == 2.5
    assert best_split(values, y, "numeric", min_bucket=3) is None


def test_no_improving_split_returns_none():
    assert best_split([1.0, 2.0, 3.0], [0, 0, 0], "numeric") is None
    assert best_split([1.0, 1.0, 2.0, 2.0], [0, 1, 0, 1], "numeric") is None
    assert best_split([1.0, 1.0, 1.0], [0, 1, 0], "numeric") is None


def test_missing_cells_scale_improvement():
    values = [1.0, 2.0, 3.0, 4.0, None, None]
    y = [0, 0, 1, 1, 0, 1]
    split = best_split(values, y, "numeric")
    assert split.threshold == 2.5
    # count-unit decrease 2 over 4 observed rows, scaled by 4/6, per 6 rows
    assert split.improvement == pytest.approx((4 / 6) * 2.0 / 6, abs=1e-12)


def test_best_split_input_validation():
    with pytest.raises(DataError, match="length"):
        best_split([1.0, 2.0], [0], "numeric")
    with pytest.raises(DataError, match="0/1"):
        best_split([1.0, 2.0], [0, 2], "numeric")


@pytest.mark.parametrize("kind", ["numeric", "ordinal", "nominal", "binary"])
@pytest.mark.parametrize("missing_rate", [0.0, 0.25])
def test_split_matches_exhaustive_enumeration(kind, missing_rate):
    rng = np.random.default_rng(hash((kind, missing_rate)) % 2**32)
    for trial in range(60):
        n = int(rng.integers(10, 101))
        meta, values = random_column(rng, n, kind, missing_rate=missing_rate)
        y = rng.integers(0, 2, n).tolist()
        min_bucket = int(rng.integers(1, 4))
        levels = meta.get("levels", ())
        split = best_split(values, y, kind, levels=levels, min_bucket=min_bucket)
        oracle_gain, oracle_parts = brute_force_best_split(
            values, y, kind, levels=levels, min_bucket=min_bucket
        )
        if not oracle_parts:
            assert split is None, f"trial {trial}: split where oracle finds none"
            continue
        assert split is not None, f"trial {trial}: no split, oracle gain {oracle_gain}"
        assert split.improvement == pytest.approx(oracle_gain, abs=1e-12)
        routed = left_rows(values, split, levels)
        observed = frozenset(i for i, v in enumerate(values) if v is not None)
        matches = any(
            routed == part or routed == observed - part for part in oracle_parts
        )
        assert matches, f"trial {trial}: partition differs from every optimum"


def test_tied_variables_keep_first():
    values = [1.0, 2.0, 3.0, 4.0, 1.5, 3.5]
    y = [0, 0, 1, 1, 0, 1]
    ds = numeric_dataset({"x0": values, "x1": values}, y)
    controls = GrowControls(min_split=2, min_bucket=1, max_depth=1, cp=0.0)
    tree = grow_tree(ds, "y", ["x0", "x1"], controls)
    assert tree.root.split.variable == "x0"


def surrogate_fixture():
    x1 = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
    y = [0, 0, 0, 0, 1, 1, 1, 1]
    columns = {
        "x1": x1,
        "copy": list(x1),
        "anti": [-v for v in x1],
        "noisy": [0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0],
        "coin": [1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        "flat": [5.0] * 8,
    }
    return numeric_dataset(columns, y), list(columns)


def grow_stump(ds, predictors, max_surrogate=5):
    controls = GrowControls(
        min_split=2, min_bucket=1, max_depth=1, cp=0.0, max_surrogate=max_surrogate
    )
    return grow_tree(ds, "y", predictors, controls)


def test_surrogates_ranked_and_validated():
    ds, predictors = surrogate_fixture()
    tree = grow_stump(ds, predictors)
    root = tree.root
    assert root.split.variable == "x1"
    assert root.split.threshold == 4.5
    by_var = {s.split.variable: s for s in root.surrogates}

    assert by_var["copy"].agreement == 1.0
    assert not by_var["copy"].split.flip

    # reversed ordering is recovered through the flip flag
    assert by_var["anti"].agreement == 1.0
    assert by_var["anti"].split.flip
    for v, t in zip(ds.column("anti"), ds.column("x1")):
        assert by_var["anti"].split.goes_left(v) == root.split.goes_left(t)

    assert by_var["noisy"].agreement == pytest.approx(0.75)

    # agreement 4/8 equals the majority baseline: rejected; constants too
    assert "coin" not in by_var
    assert "flat" not in by_var

    # sorted by agreement, descending
    agreements = [s.agreement for s in root.surrogates]
    assert agreements == sorted(agreements, reverse=True)


def test_max_surrogate_truncates():
    ds, predictors = surrogate_fixture()
    assert len(grow_stump(ds, predictors, max_surrogate=1).root.surrogates) == 1
    assert grow_stump(ds, predictors, max_surrogate=0).root.surrogates == []


def test_surrogate_agreement_measured_on_both_observed():
    # the surrogate variable is missing on half the rows; agreement counts
    # only rows observed on both primary and surrogate
    x1 = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
    partial = [1.0, None, 3.0, None, 5.0, None, 7.0, None]
    ds = numeric_dataset({"x1": x1, "partial": partial}, [0, 0, 0, 0, 1, 1, 1, 1])
    tree = grow_stump(ds, ["x1", "partial"])
    by_var = {s.split.variable: s for s in tree.root.surrogates}
    assert by_var["partial"].agreement == 1.0
