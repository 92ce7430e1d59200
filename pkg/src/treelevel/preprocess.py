"""Questionnaire merging, response dichotomization, group-mean aggregation, and
predictor-set selection for nested data.

Aggregation appends ``var-aggCL`` (class means) and ``var-aggSL`` (school
means) columns.  Ordinal columns are averaged on their integer level codes
1..k, binary columns become group proportions, nominal columns are never
aggregated.  Aggregated columns are themselves excluded from further
aggregation, so nothing is chained.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from .dataset import (
    ColumnSchema,
    DataError,
    Dataset,
    LEVEL_ORDER,
    SchemaError,
)

log = logging.getLogger(__name__)

AGG_SUFFIX = {"class": "-aggCL", "school": "-aggSL"}
VARIABLE_SETS = ("Ind", "IndAgg", "IndMeta", "IndMetaAgg", "Edu")


@dataclass(frozen=True)
class MergePair:
    """One questionnaire item asked of both parents and students.

    ``parent`` and ``student`` name the two source columns; ``name`` is the
    merged output column.  The parent's answer wins whenever present,
    otherwise the student's, otherwise the cell stays missing.
    """

    parent: str
    student: str
    name: str


def merge_parent_student(ds: Dataset, pairs: list[MergePair]) -> Dataset:
    """Merge parent/student column pairs into single student-level columns.

    Both sources must share scale and level list.  Source columns stay in the
    dataset but their role is set to ``excluded``.
    """
    out = ds
    for pair in pairs:
        parent = out.schema(pair.parent)
        student = out.schema(pair.student)
        if parent.scale != student.scale or parent.levels != student.levels:
            raise SchemaError(
                f"merge {pair.name!r}: sources {pair.parent!r} and {pair.student!r}"
                " differ in scale or levels"
            )
        if out.has_column(pair.name):
            raise SchemaError(f"merge target {pair.name!r} already exists")
        p_cells = out.column(pair.parent)
        s_cells = out.column(pair.student)
        merged = [p if p is not None else s for p, s in zip(p_cells, s_cells)]
        schema = ColumnSchema(
            name=pair.name,
            scale=parent.scale,
            role="predictor",
            data_level="student",
            levels=parent.levels,
        )
        out = out.with_column(schema, merged)
        out = out.set_role(pair.parent, "excluded")
        out = out.set_role(pair.student, "excluded")
    return out


def dichotomize_response(ds: Dataset, column: str, positive_level: str) -> Dataset:
    """Replace a nominal column by the binary response it defines.

    ``positive_level`` maps to 1, every other level to 0.  Rows where the
    source is missing are dropped; their count is logged.
    """
    schema = ds.schema(column)
    if schema.scale != "nominal":
        raise SchemaError(f"response source {column!r} must be nominal")
    if positive_level not in schema.levels:
        raise SchemaError(
            f"positive level {positive_level!r} not among levels of {column!r}"
        )
    cells = ds.column(column)
    keep = [i for i, v in enumerate(cells) if v is not None]
    dropped = ds.n_rows - len(keep)
    if dropped:
        log.info("dichotomize %s: dropped %d rows with missing response", column, dropped)
    trimmed = ds.select_rows(keep)
    values = [int(v == positive_level) for v in trimmed.column(column)]
    new_schema = ColumnSchema(
        name=column,
        scale="binary",
        role="response",
        data_level="student",
    )
    return trimmed.replace_column(new_schema, values)


def _codes(cells: list, schema: ColumnSchema) -> list:
    """Numeric view of an aggregatable column; ordinal levels become 1..k."""
    if schema.scale == "ordinal":
        code = {level: float(i + 1) for i, level in enumerate(schema.levels)}
        return [None if v is None else code[v] for v in cells]
    return [None if v is None else float(v) for v in cells]


def aggregate_means(ds: Dataset, target_level: str) -> Dataset:
    """Append group-mean columns of every eligible lower-level predictor.

    Eligible: role ``predictor``, scale numeric/ordinal/binary, data level
    strictly below ``target_level`` in the student < class < school ordering.
    Group means ignore missing cells; a group with no observed value gets a
    missing aggregate.  The new column is numeric, constant within each group,
    and carries its source column name in the schema.
    """
    if target_level not in AGG_SUFFIX:
        raise SchemaError(f"aggregation target must be class or school, got {target_level!r}")
    id_col = ds.id_column(target_level)
    if id_col is None:
        raise SchemaError(f"no id column at level {target_level!r}")
    groups = ds.column(id_col)
    if any(g is None for g in groups):
        raise DataError(f"id column {id_col!r} has missing cells")

    out = ds
    rank = LEVEL_ORDER[target_level]
    for col in ds.columns:
        if col.role != "predictor" or col.scale == "nominal":
            continue
        if col.data_level not in LEVEL_ORDER or LEVEL_ORDER[col.data_level] >= rank:
            continue
        new_name = col.name + AGG_SUFFIX[target_level]
        if out.has_column(new_name):
            raise SchemaError(f"aggregated column {new_name!r} already exists")
        codes = _codes(ds.column(col.name), col)
        sums: dict[str, float] = {}
        counts: dict[str, int] = {}
        for g, v in zip(groups, codes):
            if v is None:
                continue
            sums[g] = sums.get(g, 0.0) + v
            counts[g] = counts.get(g, 0) + 1
        means = {g: sums[g] / counts[g] for g in sums}
        values = [means.get(g) for g in groups]
        schema = ColumnSchema(
            name=new_name,
            scale="numeric",
            role="predictor",
            data_level=f"aggregated-{target_level}",
            source=col.name,
        )
        out = out.with_column(schema, values)
    return out


def select_variable_set(
    ds: Dataset, set_name: str, edu_list: list[str] | None = None
) -> list[str]:
    """Resolve a named predictor set to an ordered list of column names.

    Sets: ``Ind`` (student-level predictors), ``IndAgg`` (Ind plus their
    aggregations), ``IndMeta`` (Ind plus class/school-level predictors),
    ``IndMetaAgg`` (IndMeta plus all aggregations), ``Edu`` (the caller's
    list, validated).  Order follows the schema, so downstream tie-breaking
    is deterministic.
    """
    if set_name not in VARIABLE_SETS:
        raise SchemaError(f"unknown variable set {set_name!r}")
    if set_name == "Edu":
        if not edu_list:
            raise SchemaError("variable set Edu requires a non-empty edu list")
        for name in edu_list:
            if ds.schema(name).role != "predictor":
                raise SchemaError(f"edu list column {name!r} is not a predictor")
        return list(edu_list)

    predictors = [c for c in ds.columns if c.role == "predictor"]
    ind = {c.name for c in predictors if c.data_level == "student"}
    meta = {c.name for c in predictors if c.data_level in ("class", "school")}
    aggregated = {c.name for c in predictors if c.data_level.startswith("aggregated-")}
    agg_of_ind = {
        c.name
        for c in predictors
        if c.data_level.startswith("aggregated-") and c.source in ind
    }
    chosen = {
        "Ind": ind,
        "IndAgg": ind | agg_of_ind,
        "IndMeta": ind | meta,
        "IndMetaAgg": ind | meta | aggregated,
    }[set_name]
    return [c.name for c in predictors if c.name in chosen]
