"""Gini split search and surrogate-split search.

All searches run on numeric code arrays: numeric and binary columns keep
their values, ordinal levels become integer codes 1..k, nominal levels become
level indices, and missing cells are NaN.  Split goodness is the decrease in
total Gini impurity computed over the observations with the variable
observed, multiplied by the observed fraction; the stored ``improvement`` is
that quantity per root observation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..dataset import ColumnInfo, DataError, Dataset
from .structures import Split, Surrogate

THRESHOLD_KINDS = ("numeric", "ordinal", "binary")


def gini_impurity(counts) -> float:
    """Binary Gini impurity 2p(1-p) of a (n0, n1) count pair."""
    n0, n1 = counts
    if n0 < 0 or n1 < 0:
        raise DataError("counts must be >= 0")
    n = n0 + n1
    if n == 0:
        raise DataError("empty node has no impurity")
    p = n1 / n
    return 2.0 * p * (1.0 - p)


@dataclass(frozen=True)
class ColumnView:
    """Code-array view of one predictor column."""

    name: str
    kind: str  # numeric | ordinal | nominal | binary
    levels: tuple[str, ...]
    codes: np.ndarray  # float64, NaN marks missing

    def level_index(self, name: str) -> int:
        return self.levels.index(name)


def make_view(name: str, kind: str, levels: tuple[str, ...], cells) -> ColumnView:
    codes = np.empty(len(cells), dtype=float)
    if kind in ("numeric", "binary"):
        for i, v in enumerate(cells):
            codes[i] = np.nan if v is None else float(v)
    elif kind == "ordinal":
        code = {level: float(j + 1) for j, level in enumerate(levels)}
        for i, v in enumerate(cells):
            codes[i] = np.nan if v is None else code[v]
    elif kind == "nominal":
        code = {level: float(j) for j, level in enumerate(levels)}
        for i, v in enumerate(cells):
            codes[i] = np.nan if v is None else code[v]
    else:
        raise DataError(f"unknown column kind {kind!r}")
    return ColumnView(name=name, kind=kind, levels=tuple(levels), codes=codes)


def build_views(ds: Dataset, predictors: list[str]) -> dict[str, ColumnView]:
    views = {}
    for name in predictors:
        info = ds.column_info(name)
        views[name] = make_view(name, info.kind, info.levels, ds.column(name))
    return views


def response_array(ds: Dataset, response: str) -> np.ndarray:
    schema = ds.schema(response)
    if schema.scale != "binary":
        raise DataError(f"response {response!r} must be binary")
    cells = ds.column(response)
    if any(v is None for v in cells):
        raise DataError(f"response {response!r} has missing values")
    return np.asarray(cells, dtype=np.int8)


def _threshold_scan(v: np.ndarray, y: np.ndarray, min_bucket: int):
    """Best boundary for sorted-threshold splitting of one variable.

    Returns (gini decrease in count units, threshold, left count) or None
    when no admissible boundary has a positive decrease.  Ties take the
    smallest threshold.
    """
    m = v.size
    order = np.argsort(v, kind="stable")
    vs = v[order]
    ys = y[order].astype(np.int64)
    m1 = int(ys.sum())
    m0 = m - m1
    if m0 == 0 or m1 == 0:
        return None
    k = np.arange(1, m)
    admissible = (vs[1:] > vs[:-1]) & (k >= min_bucket) & (m - k >= min_bucket)
    if not admissible.any():
        return None
    n1_left = np.cumsum(ys)[:-1].astype(float)
    n1_right = m1 - n1_left
    kf = k.astype(float)
    mr = (m - k).astype(float)
    decrease = 2.0 * (
        (m0 * m1) / m
        - n1_left * (kf - n1_left) / kf
        - n1_right * (mr - n1_right) / mr
    )
    decrease[~admissible] = -np.inf
    best = int(np.argmax(decrease))
    if decrease[best] <= 0.0:
        return None
    threshold = (vs[best] + vs[best + 1]) / 2.0
    return float(decrease[best]), float(threshold), int(k[best])


def _nominal_scan(codes: np.ndarray, y: np.ndarray, n_levels: int, min_bucket: int):
    """Best level bipartition via the class-1-proportion ordering.

    For a binary response, sorting the observed levels by their class-1
    proportion and scanning contiguous prefixes finds the Gini-optimal
    bipartition without enumerating all subsets.  Returns (gini decrease in
    count units, left level indices, left count) or None.
    """
    idx = codes.astype(np.int64)
    m = idx.size
    yl = y.astype(np.int64)
    n_l = np.bincount(idx, minlength=n_levels)
    n1_l = np.bincount(idx, weights=yl, minlength=n_levels)
    observed = n_l > 0
    if int(observed.sum()) < 2:
        return None
    m1 = int(yl.sum())
    m0 = m - m1
    if m0 == 0 or m1 == 0:
        return None
    prop = np.where(observed, n1_l / np.maximum(n_l, 1), np.inf)
    # sort by proportion, then declaration order; drop unobserved levels
    order = np.lexsort((np.arange(n_levels), prop))
    order = order[observed[order]]
    cum_n = np.cumsum(n_l[order]).astype(float)
    cum_1 = np.cumsum(n1_l[order])
    k = cum_n[:-1]
    n1_left = cum_1[:-1]
    n1_right = m1 - n1_left
    mr = m - k
    admissible = (k >= min_bucket) & (mr >= min_bucket)
    if not admissible.any():
        return None
    decrease = 2.0 * (
        (m0 * m1) / m
        - n1_left * (k - n1_left) / k
        - n1_right * (mr - n1_right) / mr
    )
    decrease[~admissible] = -np.inf
    best = int(np.argmax(decrease))
    if decrease[best] <= 0.0:
        return None
    left_indices = order[: best + 1]
    return float(decrease[best]), left_indices, int(cum_n[best])


def _scan_view(view: ColumnView, idx: np.ndarray, y: np.ndarray, min_bucket: int):
    """Run the appropriate scan for the node subset ``idx``.

    Returns (Split without improvement scaling, decrease counts, m observed)
    or None.
    """
    codes = view.codes[idx]
    known = ~np.isnan(codes)
    m = int(known.sum())
    if m < 2 or m < 2 * min_bucket:
        return None
    ck = codes[known]
    yk = y[idx][known]
    if view.kind in THRESHOLD_KINDS:
        res = _threshold_scan(ck, yk, min_bucket)
        if res is None:
            return None
        decrease, threshold, left_n = res
        split = Split(
            variable=view.name,
            threshold=threshold,
            majority_direction="left" if left_n >= m - left_n else "right",
        )
    else:
        res = _nominal_scan(ck, yk, len(view.levels), min_bucket)
        if res is None:
            return None
        decrease, left_indices, left_n = res
        split = Split(
            variable=view.name,
            left_levels=frozenset(view.levels[j] for j in left_indices),
            majority_direction="left" if left_n >= m - left_n else "right",
        )
    return split, decrease, m


def choose_split(
    views: dict[str, ColumnView],
    y: np.ndarray,
    idx: np.ndarray,
    predictors: list[str],
    min_bucket: int,
    n_root: int,
):
    """Best split at a node across predictors.

    Returns (Split, improvement in count units) or None.  The recorded
    ``improvement`` on the split is the count-unit value divided by the root
    size.  Ties between predictors keep the earlier one in the predictor
    list; ties within a predictor keep the smallest threshold (or smallest
    prefix of the level ordering).
    """
    n_node = idx.size
    best = None
    best_total = 0.0
    for var in predictors:
        scanned = _scan_view(views[var], idx, y, min_bucket)
        if scanned is None:
            continue
        split, decrease, m = scanned
        total = (m / n_node) * decrease
        if total > best_total:
            best = replace(split, improvement=total / n_root)
            best_total = total
    if best is None:
        return None
    return best, best_total


def best_split(
    values,
    response,
    scale: str,
    levels: tuple[str, ...] = (),
    min_bucket: int = 1,
) -> Split | None:
    """Best split of a single predictor against a binary response.

    ``values`` may contain None (or NaN) for missing cells; goodness is
    computed over the observed cells and scaled by the observed fraction.
    Returns None when no admissible split has positive improvement.
    """
    view = make_view("x", scale, tuple(levels), list(values))
    y = np.asarray(response, dtype=np.int8)
    if y.size != view.codes.size:
        raise DataError("values and response differ in length")
    if not np.isin(y, (0, 1)).all():
        raise DataError("response must be 0/1")
    idx = np.arange(y.size)
    chosen = choose_split({"x": view}, y, idx, ["x"], min_bucket, n_root=y.size)
    if chosen is None:
        return None
    return chosen[0]


def _left_mask(view: ColumnView, codes: np.ndarray, split: Split) -> np.ndarray:
    """Vectorized routing of code values (NaN rows get an arbitrary value)."""
    if split.threshold is not None:
        left = codes <= split.threshold
        return ~left if split.flip else left
    left_idx = np.array(
        [view.level_index(name) for name in split.left_levels], dtype=float
    )
    return np.isin(codes, left_idx)


def find_surrogates(
    views: dict[str, ColumnView],
    idx: np.ndarray,
    primary: Split,
    predictors: list[str],
    max_surrogate: int,
) -> list[Surrogate]:
    """Surrogate splits for the primary routing at one node.

    For every other predictor, finds the split agreeing most often with the
    primary routing over observations non-missing on both variables.
    Threshold surrogates may reverse orientation (``flip``).  A surrogate is
    kept only when its agreement count strictly exceeds the majority-direction
    baseline on the same observations; results are sorted by agreement
    (descending, ties keep predictor order) and truncated.
    """
    if max_surrogate == 0:
        return []
    p_view = views[primary.variable]
    p_codes = p_view.codes[idx]
    p_known = ~np.isnan(p_codes)
    if not p_known.any():
        return []
    went_left = _left_mask(p_view, p_codes, primary) & p_known

    found: list[Surrogate] = []
    for var in predictors:
        if var == primary.variable:
            continue
        view = views[var]
        codes = view.codes[idx]
        both = p_known & ~np.isnan(codes)
        n_both = int(both.sum())
        if n_both == 0:
            continue
        t = went_left[both].astype(np.int64)  # 1 when primary routed left
        c = codes[both]
        t1 = int(t.sum())
        baseline = max(t1, n_both - t1)

        candidate = _best_surrogate_split(view, c, t, t1, n_both)
        if candidate is None:
            continue
        split, agree_count = candidate
        if agree_count <= baseline:
            continue
        found.append(Surrogate(split=split, agreement=agree_count / n_both))

    found.sort(key=lambda s: -s.agreement)
    return found[:max_surrogate]


def _best_surrogate_split(view: ColumnView, c: np.ndarray, t: np.ndarray, t1: int, n_both: int):
    """Max-agreement split of one candidate variable against routing ``t``."""
    if view.kind in THRESHOLD_KINDS:
        order = np.argsort(c, kind="stable")
        cs = c[order]
        ts = t[order]
        distinct = cs[1:] > cs[:-1]
        if not distinct.any():
            return None
        cum_t = np.cumsum(ts)[:-1]
        k = np.arange(1, n_both)
        # canonical orientation: values <= threshold go left
        agree = cum_t + ((n_both - k) - (t1 - cum_t))
        agree = np.where(distinct, agree, -1)
        best = int(np.argmax(agree))
        best_agree = int(agree[best])
        flipped = n_both - agree
        flipped = np.where(distinct, flipped, -1)
        best_f = int(np.argmax(flipped))
        best_f_agree = int(flipped[best_f])
        if best_f_agree > best_agree:
            use, flip, count = best_f, True, best_f_agree
        else:
            use, flip, count = best, False, best_agree
        left_n = int(k[use]) if not flip else n_both - int(k[use])
        split = Split(
            variable=view.name,
            threshold=float((cs[use] + cs[use + 1]) / 2.0),
            flip=flip,
            majority_direction="left" if left_n >= n_both - left_n else "right",
        )
        return split, count

    # nominal: each observed level routes with its own majority
    n_levels = len(view.levels)
    ci = c.astype(np.int64)
    n_l = np.bincount(ci, minlength=n_levels)
    t1_l = np.bincount(ci, weights=t, minlength=n_levels).astype(np.int64)
    observed = np.nonzero(n_l)[0]
    left_levels = [int(j) for j in observed if t1_l[j] * 2 > n_l[j]]
    if not left_levels or len(left_levels) == len(observed):
        return None
    agree_count = int(sum(max(t1_l[j], n_l[j] - t1_l[j]) for j in observed))
    left_n = int(sum(n_l[j] for j in left_levels))
    split = Split(
        variable=view.name,
        left_levels=frozenset(view.levels[j] for j in left_levels),
        majority_direction="left" if left_n >= n_both - left_n else "right",
    )
    return split, agree_count
