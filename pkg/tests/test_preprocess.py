"""Parent/student merging, dichotomization, group means, variable sets."""

import pytest

from treelevel import (
    ColumnSchema,
    DataError,
    Dataset,
    MergePair,
    SchemaError,
    aggregate_means,
    dichotomize_response,
    merge_parent_student,
    select_variable_set,
)


def nested_dataset():
    columns = [
        ColumnSchema(name="student", scale="nominal", role="id"),
        ColumnSchema(name="class", scale="nominal", role="id", data_level="class"),
        ColumnSchema(name="school", scale="nominal", role="id", data_level="school"),
        ColumnSchema(name="score", scale="numeric"),
        ColumnSchema(name="books", scale="ordinal", levels=("few", "some", "many")),
        ColumnSchema(name="flag", scale="binary"),
        ColumnSchema(name="origin", scale="nominal", levels=("x", "y")),
        ColumnSchema(name="size", scale="numeric", data_level="class"),
        ColumnSchema(
            name="track", scale="nominal", role="response", levels=("academic", "other")
        ),
    ]
    data = {
        "student": ["s1", "s2", "s3", "s4", "s5", "s6"],
        "class": ["c1", "c1", "c1", "c2", "c2", "c2"],
        "school": ["sch1", "sch1", "sch1", "sch1", "sch1", "sch1"],
        "score": [1.0, 2.0, None, 4.0, 6.0, 8.0],
        "books": ["few", "many", "some", None, "few", "many"],
        "flag": [1, 0, 1, 0, 0, 1],
        "origin": ["x", "y", "x", "y", "x", "y"],
        "size": [20.0, 20.0, 20.0, 30.0, 30.0, 30.0],
        "track": ["academic", "other", "academic", None, "other", "academic"],
    }
    return Dataset(columns, data)


def merge_dataset():
    columns = [
        ColumnSchema(name="eduP", scale="ordinal", levels=("low", "mid", "high")),
        ColumnSchema(name="eduS", scale="ordinal", levels=("low", "mid", "high")),
        ColumnSchema(name="jobP", scale="numeric"),
        ColumnSchema(name="jobS", scale="numeric"),
    ]
    data = {
        "eduP": ["low", None, None, "high"],
        "eduS": ["mid", "mid", None, "low"],
        "jobP": [1.0, None, 3.0, None],
        "jobS": [9.0, 2.0, 9.0, None],
    }
    return Dataset(columns, data)


def test_merge_prefers_parent_answers():
    merged = merge_parent_student(
        merge_dataset(),
        [MergePair("eduP", "eduS", "edu"), MergePair("jobP", "jobS", "job")],
    )
    assert merged.column("edu") == ["low", "mid", None, "high"]
    assert merged.column("job") == [1.0, 2.0, 3.0, None]
    assert merged.schema("edu").scale == "ordinal"
    assert merged.schema("edu").levels == ("low", "mid", "high")
    assert merged.schema("edu").role == "predictor"
    # sources stay but leave the predictor pool
    assert merged.schema("eduP").role == "excluded"
    assert merged.schema("eduS").role == "excluded"


def test_merge_validation():
    ds = merge_dataset()
    with pytest.raises(SchemaError, match="differ in scale"):
        merge_parent_student(ds, [MergePair("eduP", "jobS", "bad")])
    with pytest.raises(SchemaError, match="already exists"):
        merge_parent_student(ds, [MergePair("eduP", "eduS", "jobP")])


def test_dichotomize_maps_positive_level():
    ds = dichotomize_response(nested_dataset(), "track", "academic")
    assert ds.n_rows == 5  # the missing-response row is gone
    assert ds.column("track") == [1, 0, 1, 0, 1]
    schema = ds.schema("track")
    assert schema.scale == "binary"
    assert schema.role == "response"
    assert ds.column("student") == ["s1", "s2", "s3", "s5", "s6"]


def test_dichotomize_validation():
    ds = nested_dataset()
    with pytest.raises(SchemaError, match="must be nominal"):
        dichotomize_response(ds, "score", "academic")
    with pytest.raises(SchemaError, match="not among levels"):
        dichotomize_response(ds, "track", "BHS")


def test_aggregate_class_means():
    ds = aggregate_means(nested_dataset(), "class")
    # score: c1 mean of (1, 2) ignoring the missing cell, c2 mean of (4, 6, 8)
    assert ds.column("score-aggCL") == [1.5, 1.5, 1.5, 6.0, 6.0, 6.0]
    # books coded few=1 some=2 many=3: c1 (1+3+2)/3, c2 (1+3)/2
    assert ds.column("books-aggCL") == [2.0, 2.0, 2.0, 2.0, 2.0, 2.0]
    # binary becomes a group proportion
    assert ds.column("flag-aggCL") == pytest.approx(
        [2 / 3, 2 / 3, 2 / 3, 1 / 3, 1 / 3, 1 / 3]
    )
    # nominal, ids, response, and class-level columns are not aggregated
    for absent in ("origin-aggCL", "track-aggCL", "size-aggCL", "student-aggCL"):
        assert not ds.has_column(absent)
    schema = ds.schema("score-aggCL")
    assert schema.data_level == "aggregated-class"
    assert schema.source == "score"
    assert schema.scale == "numeric"


def test_aggregate_school_includes_class_level_columns():
    ds = aggregate_means(nested_dataset(), "school")
    # class-level size sits below school level, so it aggregates too
    assert ds.column("size-aggSL") == [25.0] * 6
    assert ds.schema("score-aggSL").data_level == "aggregated-school"
    assert ds.column("score-aggSL") == [4.2] * 6


def test_aggregation_does_not_chain():
    ds = aggregate_means(aggregate_means(nested_dataset(), "class"), "school")
    assert ds.has_column("score-aggSL")
    assert not ds.has_column("score-aggCL-aggSL")


def test_aggregate_group_with_no_observed_values():
    base = nested_dataset()
    cells = list(base.column("score"))
    cells[3] = cells[4] = cells[5] = None  # all of c2 missing
    ds = aggregate_means(
        base.replace_column(ColumnSchema(name="score", scale="numeric"), cells),
        "class",
    )
    assert ds.column("score-aggCL") == [1.5, 1.5, 1.5, None, None, None]


def test_aggregate_validation():
    ds = nested_dataset()
    with pytest.raises(SchemaError, match="class or school"):
        aggregate_means(ds, "student")
    no_ids = Dataset(
        [ColumnSchema(name="x", scale="numeric")], {"x": [1.0, 2.0]}
    )
    with pytest.raises(SchemaError, match="no id column"):
        aggregate_means(no_ids, "class")
    broken = ds.replace_column(
        ds.schema("class"), ["c1", None, "c1", "c2", "c2", "c2"]
    )
    with pytest.raises(DataError, match="missing cells"):
        aggregate_means(broken, "class")


def variable_set_dataset():
    ds = aggregate_means(aggregate_means(nested_dataset(), "class"), "school")
    return dichotomize_response(ds, "track", "academic")


def test_select_variable_sets():
    ds = variable_set_dataset()
    ind = select_variable_set(ds, "Ind")
    assert ind == ["score", "books", "flag", "origin"]
    ind_agg = select_variable_set(ds, "IndAgg")
    assert ind_agg == [
        "score", "books", "flag", "origin",
        "score-aggCL", "books-aggCL", "flag-aggCL",
        "score-aggSL", "books-aggSL", "flag-aggSL",
    ]
    ind_meta = select_variable_set(ds, "IndMeta")
    assert ind_meta == ["score", "books", "flag", "origin", "size"]
    ind_meta_agg = select_variable_set(ds, "IndMetaAgg")
    # everything, including the aggregate of the class-level size column
    assert ind_meta_agg == [
        "score", "books", "flag", "origin", "size",
        "score-aggCL", "books-aggCL", "flag-aggCL",
        "score-aggSL", "books-aggSL", "flag-aggSL", "size-aggSL",
    ]
    assert select_variable_set(ds, "Edu", ["books", "score"]) == ["books", "score"]


def test_select_variable_set_validation():
    ds = variable_set_dataset()
    with pytest.raises(SchemaError, match="unknown variable set"):
        select_variable_set(ds, "All")
    with pytest.raises(SchemaError, match="non-empty edu list"):
        select_variable_set(ds, "Edu")
    with pytest.raises(SchemaError, match="not a predictor"):
        select_variable_set(ds, "Edu", ["track"])
