"""Binary classifier evaluation: confusion counts, error rate, Brier score,
ROC curves with trapezoidal AUC, and vertical averaging across repetitions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DataError


@dataclass(frozen=True)
class ConfusionMatrix:
    """2x2 counts; a probability at or above the threshold predicts class 1."""

    tn: int
    fp: int
    fn: int
    tp: int

    def __post_init__(self) -> None:
        for name in ("tn", "fp", "fn", "tp"):
            if getattr(self, name) < 0:
                raise DataError(f"confusion count {name} must be >= 0")

    @property
    def n(self) -> int:
        return self.tn + self.fp + self.fn + self.tp

    @property
    def error_rate(self) -> float:
        if self.n == 0:
            raise DataError("empty confusion matrix has no error rate")
        return (self.fn + self.fp) / self.n

    @property
    def accuracy(self) -> float:
        return 1.0 - self.error_rate

    @property
    def sensitivity(self) -> float:
        if self.tp + self.fn == 0:
            raise DataError("no positive cases; sensitivity undefined")
        return self.tp / (self.tp + self.fn)

    @property
    def specificity(self) -> float:
        if self.tn + self.fp == 0:
            raise DataError("no negative cases; specificity undefined")
        return self.tn / (self.tn + self.fp)

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.tn + other.tn,
            self.fp + other.fp,
            self.fn + other.fn,
            self.tp + other.tp,
        )


def _check_inputs(truth, probs):
    truth = np.asarray(truth)
    probs = np.asarray(probs, dtype=float)
    if truth.shape != probs.shape or truth.ndim != 1:
        raise DataError("truth and probabilities must be 1-d arrays of equal length")
    if truth.size == 0:
        raise DataError("empty input")
    if not np.isin(truth, (0, 1)).all():
        raise DataError("truth labels must be 0/1")
    if np.isnan(probs).any() or (probs < 0).any() or (probs > 1).any():
        raise DataError("probabilities must lie in [0, 1]")
    return truth.astype(int), probs


def confusion_matrix(truth, probs, threshold: float = 0.5) -> ConfusionMatrix:
    truth, probs = _check_inputs(truth, probs)
    pred = probs >= threshold
    return ConfusionMatrix(
        tn=int(np.sum((truth == 0) & ~pred)),
        fp=int(np.sum((truth == 0) & pred)),
        fn=int(np.sum((truth == 1) & ~pred)),
        tp=int(np.sum((truth == 1) & pred)),
    )


def error_rate(truth, probs, threshold: float = 0.5) -> float:
    return confusion_matrix(truth, probs, threshold).error_rate


def brier_score(truth, probs) -> float:
    """Mean squared difference between predicted probability and outcome."""
    truth, probs = _check_inputs(truth, probs)
    return float(np.mean((probs - truth) ** 2))


@dataclass(frozen=True)
class RocCurve:
    """Ordered (fpr, tpr) points from (0, 0) to (1, 1), both axes non-decreasing."""

    points: np.ndarray  # shape (k, 2)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise DataError("a ROC curve needs at least the two endpoint rows")
        if not (pts[0] == (0.0, 0.0)).all() or not (pts[-1] == (1.0, 1.0)).all():
            raise DataError("ROC curve must run from (0, 0) to (1, 1)")
        if (np.diff(pts[:, 0]) < 0).any() or (np.diff(pts[:, 1]) < 0).any():
            raise DataError("ROC coordinates must be non-decreasing")
        object.__setattr__(self, "points", pts)

    @property
    def fpr(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def tpr(self) -> np.ndarray:
        return self.points[:, 1]


def roc_curve(truth, probs) -> RocCurve:
    """ROC by sweeping the unique scores in descending order.

    Observations sharing a score move together, so tied scores produce a
    single diagonal segment rather than a staircase.
    """
    truth, probs = _check_inputs(truth, probs)
    n_pos = int(truth.sum())
    n_neg = truth.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC needs both classes present")
    order = np.argsort(-probs, kind="stable")
    sorted_truth = truth[order]
    sorted_probs = probs[order]
    cum_tp = np.cumsum(sorted_truth)
    cum_fp = np.cumsum(1 - sorted_truth)
    # indices where a score block ends
    last_of_block = np.nonzero(np.diff(sorted_probs, append=np.nan) != 0)[0]
    tpr = cum_tp[last_of_block] / n_pos
    fpr = cum_fp[last_of_block] / n_neg
    pts = np.vstack([[0.0, 0.0], np.column_stack([fpr, tpr])])
    if pts[-1, 0] != 1.0 or pts[-1, 1] != 1.0:
        pts = np.vstack([pts, [1.0, 1.0]])
    return RocCurve(pts)


def auc(curve: RocCurve) -> float:
    """Area under the curve by the trapezoid rule.

    Equals the Mann-Whitney concordance probability (ties at half credit) of
    the scores the curve was built from.
    """
    pts = curve.points
    return float(np.trapezoid(pts[:, 1], pts[:, 0]))


def _tpr_at(curve: RocCurve, grid: np.ndarray) -> np.ndarray:
    """TPR as a function of FPR; vertical segments evaluate to their top."""
    pts = curve.points
    fpr, keep = np.unique(pts[:, 0], return_index=True)
    # np.unique returns first occurrence; we want the max TPR at each FPR
    tpr = np.maximum.reduceat(pts[:, 1], keep)
    return np.interp(grid, fpr, tpr)


def aggregate_roc(curves: list[RocCurve], grid_size: int = 101) -> RocCurve:
    """Vertical averaging on a fixed FPR grid.

    Each input is interpolated at ``grid_size`` evenly spaced FPR values and
    the TPRs averaged.  The result starts at the pinned origin (0, 0); its
    value at FPR 0 is the average height of the input curves' initial
    vertical segments.
    """
    if not curves:
        raise DataError("nothing to aggregate")
    if grid_size < 2:
        raise DataError("grid needs at least the two endpoints")
    grid = np.linspace(0.0, 1.0, grid_size)
    mean_tpr = np.mean([_tpr_at(c, grid) for c in curves], axis=0)
    pts = np.column_stack([grid, mean_tpr])
    if not (pts[0] == (0.0, 0.0)).all():
        pts = np.vstack([[0.0, 0.0], pts])
    return RocCurve(pts)


def roc_table(curve: RocCurve, axes: str = "fpr-tpr") -> list[tuple[float, float]]:
    """Rows for a two-column export.

    ``fpr-tpr`` emits (fpr, tpr); ``spec-sens`` reflects the x axis and emits
    (specificity, sensitivity), the orientation used for plotting transition
    rates.
    """
    pts = curve.points
    if axes == "fpr-tpr":
        return [(float(x), float(y)) for x, y in pts]
    if axes == "spec-sens":
        return [(float(1.0 - x), float(y)) for x, y in pts[::-1]]
    raise DataError(f"unknown axis convention {axes!r}")
