"""Schema-aware loading, validation, and serialization of nested tabular data.

A dataset is a CSV file (RFC 4180, UTF-8, header row) plus a TOML sidecar
declaring one ``[[column]]`` table per column.  Cells are typed by the declared
scale; empty strings and a configurable token mark missing values.  Rows are
students; class and school membership is carried by id columns, one per
hierarchy level.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field, replace

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class TreelevelError(Exception):
    """Base class for errors raised by this package."""


class SchemaError(TreelevelError):
    """A column declaration is malformed or inconsistent with the data."""


class DataError(TreelevelError):
    """A cell, row, or model input violates its contract."""


SCALES = ("numeric", "ordinal", "nominal", "binary")
ROLES = ("predictor", "response", "id", "excluded")
DATA_LEVELS = ("student", "class", "school", "aggregated-class", "aggregated-school")

# Strict ordering used to decide which columns may be aggregated upward.
LEVEL_ORDER = {"student": 0, "class": 1, "school": 2}


@dataclass(frozen=True)
class ColumnSchema:
    """Declaration of one column: name, measurement scale, role, hierarchy level.

    ``levels`` is required for ordinal and nominal columns and gives the
    admissible categories; for ordinal columns the declared order defines the
    integer codes 1..k used downstream.  ``source`` is set on aggregated
    columns and names the column the group means were taken from.
    """

    name: str
    scale: str
    role: str = "predictor"
    data_level: str = "student"
    levels: tuple[str, ...] = ()
    source: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise SchemaError("column name must be non-empty")
        if self.scale not in SCALES:
            raise SchemaError(f"column {self.name!r}: unknown scale {self.scale!r}")
        if self.role not in ROLES:
            raise SchemaError(f"column {self.name!r}: unknown role {self.role!r}")
        if self.data_level not in DATA_LEVELS:
            raise SchemaError(
                f"column {self.name!r}: unknown level {self.data_level!r}"
            )
        if self.role == "id":
            # Ids are opaque strings; scale and levels are not interpreted.
            return
        if self.scale in ("ordinal", "nominal"):
            if len(self.levels) < 2:
                raise SchemaError(
                    f"column {self.name!r}: {self.scale} scale needs >= 2 levels"
                )
            if len(set(self.levels)) != len(self.levels):
                raise SchemaError(f"column {self.name!r}: duplicate levels")
        elif self.levels:
            raise SchemaError(
                f"column {self.name!r}: levels only allowed for ordinal/nominal"
            )


@dataclass(frozen=True)
class ColumnInfo:
    """Snapshot of the schema facts models need at prediction time."""

    kind: str  # numeric | ordinal | nominal | binary
    levels: tuple[str, ...] = ()
    source: str | None = None
    data_level: str = "student"


@dataclass(frozen=True)
class Issue:
    row: int | None
    column: str
    kind: str  # broken-nesting | duplicate-id
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[Issue, ...] = ()


class Dataset:
    """Immutable columnar table with an ordered schema.

    Cells are stored per column as Python lists: floats for numeric, level
    strings for ordinal/nominal, ints 0/1 for binary, opaque strings for ids,
    and ``None`` for missing.  All transforming operations return new
    datasets; nothing mutates in place.
    """

    def __init__(self, columns: list[ColumnSchema], data: dict[str, list]) -> None:
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate column names in schema")
        if set(data) != set(names):
            raise SchemaError("data columns do not match schema columns")
        lengths = {len(v) for v in data.values()}
        if len(lengths) > 1:
            raise SchemaError(f"ragged columns: lengths {sorted(lengths)}")
        self._columns = tuple(columns)
        self._by_name = {c.name: c for c in columns}
        self._data = {n: list(data[n]) for n in names}
        self._n_rows = lengths.pop() if lengths else 0

    @property
    def columns(self) -> tuple[ColumnSchema, ...]:
        return self._columns

    @property
    def n_rows(self) -> int:
        return self._n_rows

    def schema(self, name: str) -> ColumnSchema:
        try:
            return self._by_name[name]
        except KeyError:
            raise SchemaError(f"no such column: {name!r}") from None

    def has_column(self, name: str) -> bool:
        return name in self._by_name

    def column(self, name: str) -> list:
        self.schema(name)
        return list(self._data[name])

    def _raw(self, name: str) -> list:
        # Internal read-only access without the defensive copy.
        return self._data[name]

    def row(self, i: int) -> dict:
        return {c.name: self._data[c.name][i] for c in self._columns}

    def column_info(self, name: str) -> ColumnInfo:
        c = self.schema(name)
        return ColumnInfo(
            kind=c.scale, levels=c.levels, source=c.source, data_level=c.data_level
        )

    def id_column(self, level: str) -> str | None:
        """Name of the id-role column at ``level``, or None if absent."""
        if level not in LEVEL_ORDER:
            raise SchemaError(f"unknown hierarchy level {level!r}")
        found = [c.name for c in self._columns if c.role == "id" and c.data_level == level]
        if len(found) > 1:
            raise SchemaError(f"multiple id columns at level {level!r}: {found}")
        return found[0] if found else None

    def select_rows(self, indices) -> "Dataset":
        idx = list(indices)
        for i in idx:
            if not 0 <= i < self._n_rows:
                raise DataError(f"row index {i} out of range 0..{self._n_rows - 1}")
        data = {n: [col[i] for i in idx] for n, col in self._data.items()}
        return Dataset(list(self._columns), data)

    def with_column(self, schema: ColumnSchema, values: list) -> "Dataset":
        """New dataset with one column appended."""
        if schema.name in self._by_name:
            raise SchemaError(f"column {schema.name!r} already exists")
        if len(values) != self._n_rows:
            raise SchemaError(
                f"column {schema.name!r}: {len(values)} values for {self._n_rows} rows"
            )
        data = dict(self._data)
        data[schema.name] = list(values)
        return Dataset(list(self._columns) + [schema], data)

    def replace_column(self, schema: ColumnSchema, values: list | None = None) -> "Dataset":
        """New dataset with an existing column's schema (and optionally cells) swapped."""
        self.schema(schema.name)
        columns = [schema if c.name == schema.name else c for c in self._columns]
        data = dict(self._data)
        if values is not None:
            if len(values) != self._n_rows:
                raise SchemaError(
                    f"column {schema.name!r}: {len(values)} values for {self._n_rows} rows"
                )
            data[schema.name] = list(values)
        return Dataset(columns, data)

    def set_role(self, name: str, role: str) -> "Dataset":
        return self.replace_column(replace(self.schema(name), role=role))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self._columns == other._columns and self._data == other._data

    def __repr__(self) -> str:
        return f"Dataset({self._n_rows} rows, {len(self._columns)} columns)"


def _parse_schema_toml(text: str) -> list[ColumnSchema]:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SchemaError(f"schema sidecar is not valid TOML: {exc}") from None
    raw = doc.get("column")
    if not isinstance(raw, list) or not raw:
        raise SchemaError("schema sidecar must contain at least one [[column]] table")
    columns = []
    for entry in raw:
        if not isinstance(entry, dict):
            raise SchemaError("each [[column]] entry must be a table")
        known = {"name", "scale", "role", "level", "levels", "source"}
        extra = set(entry) - known
        if extra:
            raise SchemaError(f"unknown schema keys: {sorted(extra)}")
        try:
            name = entry["name"]
            scale = entry["scale"]
        except KeyError as exc:
            raise SchemaError(f"[[column]] entry missing required key {exc}") from None
        columns.append(
            ColumnSchema(
                name=name,
                scale=scale,
                role=entry.get("role", "predictor"),
                data_level=entry.get("level", "student"),
                levels=tuple(entry.get("levels", ())),
                source=entry.get("source"),
            )
        )
    return columns


def load_schema(path) -> list[ColumnSchema]:
    with open(path, "rb") as fh:
        return _parse_schema_toml(fh.read().decode("utf-8"))


def _parse_cell(raw: str, col: ColumnSchema, row_number: int, missing_token: str):
    if raw == "" or raw == missing_token:
        return None
    if col.scale == "numeric":
        try:
            return float(raw)
        except ValueError:
            raise DataError(
                f"row {row_number}, column {col.name!r}: {raw!r} is not numeric"
            ) from None
    if col.scale == "binary":
        if raw in ("0", "1"):
            return int(raw)
        raise DataError(
            f"row {row_number}, column {col.name!r}: {raw!r} is not 0/1"
        )
    if col.scale in ("ordinal", "nominal"):
        if raw in col.levels:
            return raw
        raise DataError(
            f"row {row_number}, column {col.name!r}: {raw!r} not among declared levels"
        )
    # role == id columns are declared with a scale too; ids short-circuit above
    raise SchemaError(f"column {col.name!r}: unhandled scale {col.scale!r}")


def load_dataset(data_path, schema_path, missing_token: str = "NA") -> Dataset:
    """Load a CSV file against its schema sidecar.

    The CSV header must contain exactly the declared column names (any order);
    cells are parsed by scale, with ``""`` and ``missing_token`` read as
    missing.  Id cells are kept as opaque strings.  Errors identify the
    offending data row (1-based, header excluded) and column.
    """
    columns = load_schema(schema_path)
    with open(data_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{data_path}: empty file, expected a header row") from None
        declared = [c.name for c in columns]
        if sorted(header) != sorted(declared):
            missing = sorted(set(declared) - set(header))
            extra = sorted(set(header) - set(declared))
            raise SchemaError(
                f"{data_path}: header does not match schema"
                f" (missing {missing}, unexpected {extra})"
            )
        position = {name: header.index(name) for name in declared}
        data: dict[str, list] = {name: [] for name in declared}
        for row_number, record in enumerate(reader, start=1):
            if len(record) != len(header):
                raise DataError(
                    f"row {row_number}: {len(record)} fields, expected {len(header)}"
                )
            for col in columns:
                raw = record[position[col.name]]
                if col.role == "id":
                    value = raw if raw != "" and raw != missing_token else None
                else:
                    value = _parse_cell(raw, col, row_number, missing_token)
                data[col.name].append(value)
    return Dataset(columns, data)


def _format_cell(value, col: ColumnSchema) -> str:
    if value is None:
        return ""
    if col.role == "id":
        return str(value)
    if col.scale == "numeric":
        return repr(float(value))
    if col.scale == "binary":
        return str(int(value))
    return str(value)


def write_dataset(ds: Dataset, data_path, schema_path=None) -> None:
    """Write the CSV (and optionally the schema sidecar).

    Numeric cells use shortest round-trip formatting, so load(write(ds))
    reproduces every cell exactly.
    """
    with open(data_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([c.name for c in ds.columns])
        for i in range(ds.n_rows):
            writer.writerow(
                [_format_cell(ds._raw(c.name)[i], c) for c in ds.columns]
            )
    if schema_path is not None:
        write_schema(list(ds.columns), schema_path)


def _toml_string(s: str) -> str:
    # JSON string escaping is valid for TOML basic strings.
    return json.dumps(s, ensure_ascii=False)


def write_schema(columns: list[ColumnSchema], path) -> None:
    out = io.StringIO()
    for c in columns:
        out.write("[[column]]\n")
        out.write(f"name = {_toml_string(c.name)}\n")
        out.write(f"scale = {_toml_string(c.scale)}\n")
        if c.role != "predictor":
            out.write(f"role = {_toml_string(c.role)}\n")
        if c.data_level != "student":
            out.write(f"level = {_toml_string(c.data_level)}\n")
        if c.levels:
            joined = ", ".join(_toml_string(lv) for lv in c.levels)
            out.write(f"levels = [{joined}]\n")
        if c.source is not None:
            out.write(f"source = {_toml_string(c.source)}\n")
        out.write("\n")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(out.getvalue())


def validate_hierarchy(ds: Dataset) -> ValidationReport:
    """Check nesting consistency of the id columns.

    Reports every classId observed under two or more schoolIds
    (``broken-nesting``, flagged at the first conflicting row) and every
    duplicated studentId (``duplicate-id``, flagged at each repeat).  Rows
    with a missing id are skipped by the corresponding check.
    """
    issues: list[Issue] = []

    class_col = ds.id_column("class")
    school_col = ds.id_column("school")
    if class_col is not None and school_col is not None:
        first_school: dict[str, str] = {}
        conflicted: set[str] = set()
        classes = ds._raw(class_col)
        schools = ds._raw(school_col)
        for i in range(ds.n_rows):
            cid, sid = classes[i], schools[i]
            if cid is None or sid is None:
                continue
            seen = first_school.setdefault(cid, sid)
            if sid != seen and cid not in conflicted:
                conflicted.add(cid)
                issues.append(
                    Issue(
                        row=i + 1,
                        column=class_col,
                        kind="broken-nesting",
                        message=(
                            f"class {cid!r} appears under school {sid!r}"
                            f" and school {seen!r}"
                        ),
                    )
                )

    student_col = ds.id_column("student")
    if student_col is not None:
        seen_ids: set[str] = set()
        students = ds._raw(student_col)
        for i in range(ds.n_rows):
            sid = students[i]
            if sid is None:
                continue
            if sid in seen_ids:
                issues.append(
                    Issue(
                        row=i + 1,
                        column=student_col,
                        kind="duplicate-id",
                        message=f"student id {sid!r} occurs more than once",
                    )
                )
            else:
                seen_ids.add(sid)

    return ValidationReport(ok=not issues, issues=tuple(issues))
