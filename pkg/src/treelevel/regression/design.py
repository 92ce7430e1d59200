"""Design-matrix encoding for logistic models.

Numeric and binary columns enter as-is, ordinal columns as integer level
scores 1..k, nominal columns as dummies against the first declared level.
Rows with any missing predictor are dropped (complete cases); zero-variance
columns are dropped and logged.  An intercept column leads the matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..dataset import ColumnInfo, DataError, Dataset

log = logging.getLogger(__name__)

INTERCEPT = "(Intercept)"


@dataclass(frozen=True)
class Term:
    """Provenance of one design column."""

    label: str
    source: str
    encoding: str  # intercept | identity | ordinal-score | dummy
    level: str | None = None  # the dummy's level


@dataclass(frozen=True)
class DesignMatrix:
    matrix: np.ndarray  # (n_retained, p)
    terms: tuple[Term, ...]
    retained_rows: np.ndarray  # indices into the source dataset
    dropped_columns: tuple[str, ...]  # zero-variance labels
    predictors: tuple[str, ...]
    predictor_info: dict[str, ColumnInfo]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(t.label for t in self.terms)


def _columns_for(name: str, info: ColumnInfo, cells: list) -> list[tuple[Term, list]]:
    if info.kind in ("numeric", "binary"):
        values = [None if v is None else float(v) for v in cells]
        return [(Term(label=name, source=name, encoding="identity"), values)]
    if info.kind == "ordinal":
        code = {level: float(j + 1) for j, level in enumerate(info.levels)}
        values = [None if v is None else code[v] for v in cells]
        return [(Term(label=name, source=name, encoding="ordinal-score"), values)]
    if info.kind == "nominal":
        out = []
        for level in info.levels[1:]:
            values = [None if v is None else float(v == level) for v in cells]
            term = Term(
                label=f"{name}[{level}]", source=name, encoding="dummy", level=level
            )
            out.append((term, values))
        return out
    raise DataError(f"predictor {name!r} has unsupported scale {info.kind!r}")


def encode_design(ds: Dataset, predictors: list[str]) -> DesignMatrix:
    """Intercept-plus-predictors design over complete cases.

    An empty predictor list yields the intercept-only design (all rows
    retained), used when tree selection falls back to no variables.
    """
    info = {name: ds.column_info(name) for name in predictors}
    encoded = []
    for name in predictors:
        encoded.extend(_columns_for(name, info[name], ds.column(name)))

    n = ds.n_rows
    missing = np.zeros(n, dtype=bool)
    for _, values in encoded:
        missing |= np.array([v is None for v in values])
    retained = np.nonzero(~missing)[0]
    if retained.size == 0:
        raise DataError("no complete-case rows remain after encoding")

    kept_terms = [Term(label=INTERCEPT, source=INTERCEPT, encoding="intercept")]
    columns = [np.ones(retained.size)]
    dropped = []
    for term, values in encoded:
        col = np.array([values[i] for i in retained], dtype=float)
        if col.size and col.min() == col.max():
            dropped.append(term.label)
            log.info("design: dropping zero-variance column %s", term.label)
            continue
        kept_terms.append(term)
        columns.append(col)

    return DesignMatrix(
        matrix=np.column_stack(columns),
        terms=tuple(kept_terms),
        retained_rows=retained,
        dropped_columns=tuple(dropped),
        predictors=tuple(predictors),
        predictor_info=info,
    )


def encode_rows(
    design: DesignMatrix, ds: Dataset
) -> tuple[np.ndarray, np.ndarray]:
    """Encode new rows with a fitted design's terms.

    Returns (matrix, mask): the matrix has one row per input row and the mask
    marks rows that could be encoded; incomplete rows and rows with a level
    unseen by the training schema are masked out (and logged).
    """
    n = ds.n_rows
    p = len(design.terms)
    matrix = np.zeros((n, p))
    mask = np.ones(n, dtype=bool)
    unseen = 0
    cells = {name: ds.column(name) for name in design.predictors}
    info = design.predictor_info
    for j, term in enumerate(design.terms):
        if term.encoding == "intercept":
            matrix[:, j] = 1.0
            continue
        raw = cells[term.source]
        levels = info[term.source].levels
        for i in range(n):
            v = raw[i]
            if v is None:
                mask[i] = False
                continue
            if term.encoding == "identity":
                matrix[i, j] = float(v)
            elif term.encoding == "ordinal-score":
                if v not in levels:
                    mask[i] = False
                    unseen += 1
                    continue
                matrix[i, j] = float(levels.index(v) + 1)
            else:  # dummy
                if v not in levels:
                    mask[i] = False
                    unseen += 1
                    continue
                matrix[i, j] = float(v == term.level)
    if unseen:
        log.info("prediction: %d cells with unseen levels were masked", unseen)
    return matrix, mask
