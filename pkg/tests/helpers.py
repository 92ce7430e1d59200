"""Shared dataset builders for the test suite."""

import numpy as np

from treelevel import ColumnSchema, Dataset

LEVEL_POOL = ("a", "b", "c", "d", "e")


def numeric_dataset(columns, response, response_name="y"):
    """Dataset from numeric predictor columns plus a 0/1 response."""
    schemas = []
    data = {}
    for name, values in columns.items():
        schemas.append(ColumnSchema(name=name, scale="numeric"))
        data[name] = [None if v is None else float(v) for v in values]
    schemas.append(ColumnSchema(name=response_name, scale="binary", role="response"))
    data[response_name] = [int(v) for v in response]
    return Dataset(schemas, data)


def random_column(rng, n, kind, n_levels=5, missing_rate=0.0):
    """One random predictor column; returns (schema kwargs, cells)."""
    if kind == "numeric":
        # two decimals so exact ties occur
        values = [float(v) for v in np.round(rng.normal(size=n), 2)]
        meta = {"scale": "numeric"}
    elif kind == "binary":
        values = [int(v) for v in rng.integers(0, 2, n)]
        meta = {"scale": "binary"}
    else:
        k = int(rng.integers(2, n_levels + 1))
        levels = LEVEL_POOL[:k]
        values = [levels[i] for i in rng.integers(0, k, n)]
        meta = {"scale": kind, "levels": levels}
    if missing_rate > 0.0:
        drop = rng.random(n) < missing_rate
        values = [None if d else v for d, v in zip(drop, values)]
    return meta, values


def random_instance(seed, max_n=100, max_p=8, missing_rate=0.0, min_n=20):
    """Random mixed-scale dataset with a 0/1 response."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(min_n, max_n + 1))
    p = int(rng.integers(1, max_p + 1))
    kinds = ["numeric", "ordinal", "nominal", "binary"]
    schemas = []
    data = {}
    for j in range(p):
        kind = kinds[int(rng.integers(0, len(kinds)))]
        meta, values = random_column(rng, n, kind, missing_rate=missing_rate)
        name = f"x{j}"
        schemas.append(ColumnSchema(name=name, **meta))
        data[name] = values
    schemas.append(ColumnSchema(name="y", scale="binary", role="response"))
    data["y"] = [int(v) for v in rng.integers(0, 2, n)]
    return Dataset(schemas, data)
