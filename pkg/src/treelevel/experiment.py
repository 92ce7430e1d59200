"""Repeated random-split comparison of tree and regression classifiers.

The harness repeats a train/test partition, grows classification trees on
the named variable sets, derives regression models from the variables the
trees selected, fits fixed-effect and random-intercept logistic models, and
scores everything on the held-out rows.  Results aggregate into summary
tables, summed confusion matrices, averaged ROC curves, and split-variable
importance counts.  A synthetic hierarchical generator with planted effects
provides benchmark data when no real dataset is available.

All outputs are pure functions of (dataset, config): per-repetition seeds
derive from the master seed and the repetition index, repetitions may run in
worker processes, and results are collected in repetition order, so reports
are byte-identical for any worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .cart import (
    GrowControls,
    SplitProfile,
    Tree,
    grow_tree,
    predict_tree,
    split_variable_profile,
)
from .cart.splitting import response_array
from .dataset import ColumnSchema, DataError, Dataset, SchemaError
from .metrics import (
    ConfusionMatrix,
    RocCurve,
    aggregate_roc,
    auc,
    brier_score,
    confusion_matrix,
    roc_curve,
)
from .preprocess import _codes, select_variable_set
from .regression import (
    MixedSpec,
    encode_design,
    fit_logistic_irls,
    fit_random_intercept_logistic,
    predict_glm,
    predict_glmm,
)

log = logging.getLogger(__name__)

MODEL_ROSTER = (
    "TreeInd",
    "TreeIndAgg",
    "TreeIndMeta",
    "TreeIndMetaAgg",
    "GLMInd",
    "GLMMInd.I",
    "GLMIndMeta",
    "GLMMIndMeta.I",
    "GLMedu",
    "GLMMedu.I",
)
TREE_SETS = {
    "TreeInd": "Ind",
    "TreeIndAgg": "IndAgg",
    "TreeIndMeta": "IndMeta",
    "TreeIndMetaAgg": "IndMetaAgg",
}
# Regression models inherit their predictors from these trees.
SELECTION_SOURCE = {
    "GLMInd": "TreeIndAgg",
    "GLMMInd.I": "TreeIndAgg",
    "GLMIndMeta": "TreeIndMetaAgg",
    "GLMMIndMeta.I": "TreeIndMetaAgg",
}
EDU_MODELS = ("GLMedu", "GLMMedu.I")
REFERENCE_SIZE = 8520
REFERENCE_TRAIN = 5000


@dataclass(frozen=True)
class ExperimentConfig:
    """Protocol settings for one experiment run."""

    repetitions: int = 50
    train_size: int | None = None  # None scales 5000/8520 to the data size
    cp: float = 0.004
    model_roster: tuple[str, ...] = MODEL_ROSTER
    edu_list: tuple[str, ...] = ()
    master_seed: int = 0
    min_split: int = 20
    min_bucket: int = 7
    max_depth: int = 30
    max_surrogate: int = 5
    recompute_aggregates: bool = False
    stratify_level: str | None = None

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise DataError("repetitions must be >= 1")
        if not 0.0 <= self.cp <= 1.0:
            raise DataError("cp must lie in [0, 1]")
        if not self.model_roster:
            raise DataError("model roster is empty")
        for model in self.model_roster:
            if model not in MODEL_ROSTER:
                raise DataError(f"unknown model {model!r}")
        if self.train_size is not None and self.train_size < 1:
            raise DataError("train size must be positive")
        if self.stratify_level not in (None, "class", "school"):
            raise DataError("stratify_level must be class, school, or omitted")

    def resolved_train_size(self, n: int) -> int:
        if self.train_size is not None:
            if not 0 < self.train_size < n:
                raise DataError(
                    f"train size {self.train_size} out of range for {n} rows"
                )
            return self.train_size
        size = int(round(n * REFERENCE_TRAIN / REFERENCE_SIZE))
        return max(1, min(n - 1, size))

    def controls(self, seed: int) -> GrowControls:
        return GrowControls(
            min_split=self.min_split,
            min_bucket=self.min_bucket,
            max_depth=self.max_depth,
            cp=self.cp,
            max_surrogate=self.max_surrogate,
            rng_seed=seed,
        )


@dataclass(frozen=True, eq=False)
class ModelScore:
    error_rate: float
    brier: float
    auc: float
    confusion: ConfusionMatrix
    scored_rows: int
    roc: RocCurve


@dataclass(frozen=True)
class SelectionRecord:
    fixed: tuple[str, ...]
    slope_candidates: tuple[str, ...] = ()
    fallback: bool = False


@dataclass(frozen=True, eq=False)
class RepetitionResult:
    rep_index: int
    seed: int
    scores: dict[str, ModelScore]
    selected: dict[str, SelectionRecord]
    split_profiles: dict[str, dict[str, SplitProfile]]
    failures: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class SummaryRow:
    model: str
    n_reps: int
    mean_error: float
    q1_error: float
    median_error: float
    q3_error: float
    mean_brier: float
    q1_brier: float
    median_brier: float
    q3_brier: float
    mean_auc: float
    q1_auc: float
    median_auc: float
    q3_auc: float


@dataclass(frozen=True)
class ImportanceRow:
    variable: str
    total: int
    first: int
    second: int
    third: int


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    config: ExperimentConfig
    response: str
    n_rows: int
    results: list[RepetitionResult]
    summary: list[SummaryRow]
    confusion_totals: dict[str, ConfusionMatrix]
    roc_curves: dict[str, RocCurve]
    importance: dict[str, list[ImportanceRow]]


def response_column(ds: Dataset) -> str:
    names = [c.name for c in ds.columns if c.role == "response"]
    if len(names) != 1:
        raise SchemaError(f"expected exactly one response column, found {names}")
    if ds.schema(names[0]).scale != "binary":
        raise SchemaError(f"response {names[0]!r} must be binary")
    return names[0]


def random_partition(
    ds: Dataset, train_size: int, seed: int, stratify: list | None = None
) -> tuple[Dataset, Dataset]:
    """Disjoint exhaustive train/test split by row sampling.

    With ``stratify`` (a per-row group label list), the train quota is
    allocated to groups by largest remainder and sampled within each group,
    so group proportions carry over.  Row order is preserved on both sides.
    """
    n = ds.n_rows
    if not 0 < train_size < n:
        raise DataError(f"train size {train_size} out of range for {n} rows")
    rng = np.random.default_rng(seed)
    if stratify is None:
        perm = rng.permutation(n)
        train_idx = np.sort(perm[:train_size])
    else:
        if len(stratify) != n:
            raise DataError("stratify labels do not match the row count")
        labels = np.asarray([str(v) for v in stratify])
        groups, inverse = np.unique(labels, return_inverse=True)
        sizes = np.bincount(inverse, minlength=groups.size)
        quotas = train_size * sizes / n
        base = np.floor(quotas).astype(int)
        remainder = train_size - int(base.sum())
        if remainder > 0:
            order = np.argsort(-(quotas - base), kind="stable")
            base[order[:remainder]] += 1
        picks = []
        for g in range(groups.size):
            rows = np.nonzero(inverse == g)[0]
            k = min(int(base[g]), rows.size)
            if k > 0:
                picks.append(rng.choice(rows, size=k, replace=False))
        train_idx = np.sort(np.concatenate(picks)) if picks else np.empty(0, int)
    mask = np.zeros(n, dtype=bool)
    mask[train_idx] = True
    test_idx = np.nonzero(~mask)[0]
    return ds.select_rows(train_idx.tolist()), ds.select_rows(test_idx.tolist())


def tree_select_predictors(tree: Tree) -> MixedSpec:
    """Turn a tree's primary splits into a mixed-model skeleton.

    Distinct split variables (first-use order) become fixed-effect
    predictors; a selected aggregated variable additionally pulls in its
    source variable and nominates it as a random-slope candidate (reported,
    never fitted).  A root-only tree yields the intercept-only fallback.
    """
    fixed: list[str] = []
    slopes: list[str] = []
    for node in tree.internal_nodes():
        name = node.split.variable
        if name in fixed:
            continue
        fixed.append(name)
        source = tree.predictor_info[name].source
        if source is not None:
            if source not in fixed:
                fixed.append(source)
            if source not in slopes:
                slopes.append(source)
    if not fixed:
        log.info("tree selected no variables; falling back to intercept-only")
        return MixedSpec(
            fixed_predictors=(), slope_candidates=(), fallback_intercept_only=True
        )
    return MixedSpec(fixed_predictors=tuple(fixed), slope_candidates=tuple(slopes))


def _accumulate_importance(
    profile_maps: list[dict[str, SplitProfile]],
) -> list[ImportanceRow]:
    totals: dict[str, list[int]] = {}
    for profiles in profile_maps:
        for name, profile in profiles.items():
            row = totals.setdefault(name, [0, 0, 0, 0])
            row[0] += profile.count
            for slot in profile.positions:
                row[slot] += 1
    rows = [
        ImportanceRow(name, t[0], t[1], t[2], t[3]) for name, t in totals.items()
    ]
    rows.sort(key=lambda r: (-r.total, r.variable))
    return rows


def count_split_variables(trees: list[Tree]) -> list[ImportanceRow]:
    """Primary-split counts summed over trees, with first/second/third
    split-slot tallies (root split and the two splits directly below it)."""
    if not trees:
        raise DataError("at least one tree is required")
    return _accumulate_importance([split_variable_profile(t) for t in trees])


# ---------------------------------------------------------------------------
# synthetic hierarchical data


@dataclass(frozen=True)
class SyntheticSpec:
    """Planted-effect generator settings.

    ``student_effect`` drives the dominant numeric predictor (mathScore),
    ``contextual_effect`` multiplies the true class mean of that predictor
    (so its class aggregate carries signal of its own), and the two standard
    deviations plant random intercepts.  The intercept is calibrated so the
    mean response probability hits ``target_rate``.
    """

    n_students: int = 2000
    n_schools: int = 10
    n_classes_per_school: int = 4
    student_effect: float = 1.2
    minor_effect: float = 0.3
    contextual_effect: float = 0.8
    class_sd: float = 0.5
    school_sd: float = 0.4
    between_class_sd: float = 0.6
    target_rate: float = 0.40
    missing_rate: "float | dict[str, float]" = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_students < 1 or self.n_schools < 1 or self.n_classes_per_school < 1:
            raise DataError("synthetic sizes must be positive")
        if not 0.0 < self.target_rate < 1.0:
            raise DataError("target rate must lie strictly inside (0, 1)")
        if self.class_sd < 0 or self.school_sd < 0 or self.between_class_sd < 0:
            raise DataError("standard deviations must be >= 0")

    def rate_for(self, column: str) -> float:
        if isinstance(self.missing_rate, dict):
            rate = float(self.missing_rate.get(column, 0.0))
        else:
            rate = float(self.missing_rate)
        if not 0.0 <= rate < 1.0:
            raise DataError(f"missing rate for {column!r} must lie in [0, 1)")
        return rate


@dataclass(frozen=True, eq=False)
class GroundTruth:
    intercept: float
    effects: dict[str, float]
    class_sd: float
    school_sd: float
    school_intercepts: dict[str, float]
    class_intercepts: dict[str, float]
    class_math_base: dict[str, float]
    dominant: str
    target_rate: float
    realized_rate: float


BOOK_LEVELS = ("0-10", "11-25", "26-100", "101-200", "200+")
MIGRATION_LEVELS = ("none", "first", "second")
SCHOOL_TYPES = ("urban", "rural")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def generate_synthetic(spec: SyntheticSpec) -> tuple[Dataset, GroundTruth]:
    """Hierarchical logistic benchmark data with known parameters.

    Students nest in classes nest in schools; mathScore carries the dominant
    planted effect plus a contextual effect through its true class mean;
    readScore, books, and migration carry minor effects; homework, classSize,
    and schoolType are noise/meta columns.  Missing cells are injected
    completely at random per predictor column.
    """
    rng = np.random.default_rng(spec.rng_seed)
    n = spec.n_students
    n_classes = spec.n_schools * spec.n_classes_per_school

    school_labels = [f"Sch{j + 1:02d}" for j in range(spec.n_schools)]
    class_labels = [
        f"{school_labels[j // spec.n_classes_per_school]}-C{j % spec.n_classes_per_school + 1}"
        for j in range(n_classes)
    ]
    perm = rng.permutation(n)
    class_of = np.empty(n, dtype=int)
    class_of[perm] = np.arange(n) % n_classes
    school_of = class_of // spec.n_classes_per_school

    u_school = rng.normal(0.0, spec.school_sd, spec.n_schools)
    u_class = rng.normal(0.0, spec.class_sd, n_classes)
    math_base = rng.normal(0.0, spec.between_class_sd, n_classes)

    math = math_base[class_of] + rng.normal(0.0, 1.0, n)
    read = rng.normal(0.0, 1.0, n)
    homework = rng.normal(0.0, 1.0, n)
    books = rng.integers(1, len(BOOK_LEVELS) + 1, n)
    migration = rng.choice(len(MIGRATION_LEVELS), size=n, p=(0.7, 0.15, 0.15))
    class_size = np.round(rng.normal(25.0, 3.0, n_classes))
    school_type = rng.integers(0, len(SCHOOL_TYPES), spec.n_schools)

    mig_shift = np.array([0.0, -0.5 * spec.minor_effect, -1.0 * spec.minor_effect])
    effects = {
        "mathScore": spec.student_effect,
        "readScore": spec.minor_effect,
        "books": 0.5 * spec.minor_effect,
        "migration[first]": float(mig_shift[1]),
        "migration[second]": float(mig_shift[2]),
        "mathScore-classmean": spec.contextual_effect,
    }
    eta = (
        spec.student_effect * math
        + spec.minor_effect * read
        + 0.5 * spec.minor_effect * (books - 3.0)
        + mig_shift[migration]
        + spec.contextual_effect * math_base[class_of]
        + u_class[class_of]
        + u_school[school_of]
    )

    def rate_gap(alpha: float) -> float:
        return float(np.mean(_sigmoid(alpha + eta))) - spec.target_rate

    alpha = float(brentq(rate_gap, -40.0, 40.0, xtol=1e-12))
    y = (rng.random(n) < _sigmoid(alpha + eta)).astype(int)

    def col(name, scale, role="predictor", level="student", levels=()):
        return ColumnSchema(
            name=name, scale=scale, role=role, data_level=level, levels=tuple(levels)
        )

    columns = [
        col("student", "nominal", role="id"),
        col("class", "nominal", role="id", level="class"),
        col("school", "nominal", role="id", level="school"),
        col("mathScore", "numeric"),
        col("readScore", "numeric"),
        col("homework", "numeric"),
        col("books", "ordinal", levels=BOOK_LEVELS),
        col("migration", "nominal", levels=MIGRATION_LEVELS),
        col("classSize", "numeric", level="class"),
        col("schoolType", "nominal", level="school", levels=SCHOOL_TYPES),
        col("response", "binary", role="response"),
    ]
    data = {
        "student": [f"St{i + 1:05d}" for i in range(n)],
        "class": [class_labels[c] for c in class_of],
        "school": [school_labels[s] for s in school_of],
        "mathScore": [float(v) for v in math],
        "readScore": [float(v) for v in read],
        "homework": [float(v) for v in homework],
        "books": [BOOK_LEVELS[b - 1] for b in books],
        "migration": [MIGRATION_LEVELS[m] for m in migration],
        "classSize": [float(class_size[c]) for c in class_of],
        "schoolType": [SCHOOL_TYPES[school_type[s]] for s in school_of],
        "response": [int(v) for v in y],
    }
    for schema in columns:
        if schema.role != "predictor":
            continue
        rate = spec.rate_for(schema.name)
        if rate <= 0.0:
            continue
        drop = rng.random(n) < rate
        data[schema.name] = [
            None if hit else v for hit, v in zip(drop, data[schema.name])
        ]

    truth = GroundTruth(
        intercept=alpha,
        effects=effects,
        class_sd=spec.class_sd,
        school_sd=spec.school_sd,
        school_intercepts={
            label: float(v) for label, v in zip(school_labels, u_school)
        },
        class_intercepts={label: float(v) for label, v in zip(class_labels, u_class)},
        class_math_base={label: float(v) for label, v in zip(class_labels, math_base)},
        dominant="mathScore",
        target_rate=spec.target_rate,
        realized_rate=float(np.mean(y)),
    )
    return Dataset(columns, data), truth


# ---------------------------------------------------------------------------
# repetition runner


def _score(y: np.ndarray, probs: np.ndarray, mask: np.ndarray | None = None) -> ModelScore:
    if mask is not None:
        y, probs = y[mask], probs[mask]
    if y.size == 0:
        raise DataError("no scorable rows")
    if int(y.min()) == int(y.max()):
        raise DataError("test outcome has a single class; scores are undefined")
    cm = confusion_matrix(y, probs)
    curve = roc_curve(y, probs)
    return ModelScore(
        error_rate=cm.error_rate,
        brier=brier_score(y, probs),
        auc=auc(curve),
        confusion=cm,
        scored_rows=int(y.size),
        roc=curve,
    )


def _refresh_aggregates(train: Dataset, test: Dataset) -> tuple[Dataset, Dataset]:
    """Recompute aggregated columns from the training rows only.

    Group means learned on the training part are broadcast to both parts;
    test rows of a group unseen in training get a missing aggregate.
    """
    for schema in train.columns:
        if not schema.data_level.startswith("aggregated-"):
            continue
        level = schema.data_level.split("-", 1)[1]
        id_col = train.id_column(level)
        if id_col is None:
            raise SchemaError(f"no id column at level {level!r}")
        source = train.schema(schema.source)
        codes = _codes(train.column(schema.source), source)
        sums: dict[str, float] = {}
        counts: dict[str, int] = {}
        for g, v in zip(train.column(id_col), codes):
            if v is None:
                continue
            sums[g] = sums.get(g, 0.0) + v
            counts[g] = counts.get(g, 0) + 1
        means = {g: sums[g] / counts[g] for g in sums}
        train = train.replace_column(
            schema, [means.get(g) for g in train.column(id_col)]
        )
        test = test.replace_column(schema, [means.get(g) for g in test.column(id_col)])
    return train, test


def _group_labels(ds: Dataset, factors: tuple[str, ...]) -> dict[str, list]:
    out = {}
    for factor in factors:
        id_col = ds.id_column(factor)
        if id_col is None:
            raise SchemaError(f"no id column for grouping factor {factor!r}")
        labels = ds.column(id_col)
        if any(v is None for v in labels):
            raise DataError(f"id column {id_col!r} has missing cells")
        out[factor] = labels
    return out


def _fit_rep(ds: Dataset, config: ExperimentConfig, rep: int) -> RepetitionResult:
    seed = int(np.random.SeedSequence((config.master_seed, rep)).generate_state(1)[0])
    response = response_column(ds)
    stratify = None
    if config.stratify_level is not None:
        id_col = ds.id_column(config.stratify_level)
        if id_col is None:
            raise SchemaError(f"no id column at level {config.stratify_level!r}")
        stratify = ds.column(id_col)
    train, test = random_partition(
        ds, config.resolved_train_size(ds.n_rows), seed, stratify
    )
    if config.recompute_aggregates:
        train, test = _refresh_aggregates(train, test)

    y_train = response_array(train, response)
    y_test = response_array(test, response)
    controls = config.controls(seed)

    wanted = set(config.model_roster)
    needed_trees = {m for m in wanted if m in TREE_SETS}
    needed_trees |= {SELECTION_SOURCE[m] for m in wanted if m in SELECTION_SOURCE}

    scores: dict[str, ModelScore] = {}
    selected: dict[str, SelectionRecord] = {}
    profiles: dict[str, dict[str, SplitProfile]] = {}
    failures: dict[str, str] = {}
    trees: dict[str, Tree] = {}

    for model in MODEL_ROSTER:
        if model not in needed_trees:
            continue
        try:
            predictors = select_variable_set(train, TREE_SETS[model])
            trees[model] = grow_tree(train, response, predictors, controls)
        except (DataError, SchemaError) as err:
            failures[model] = str(err)
            log.warning("rep %d: %s failed: %s", rep, model, err)

    for model in config.model_roster:
        try:
            if model in TREE_SETS:
                if model not in trees:
                    continue  # failure already recorded
                tree = trees[model]
                probs = predict_tree(tree, test, output="prob")
                scores[model] = _score(y_test, probs)
                split_vars = dict.fromkeys(
                    n.split.variable for n in tree.internal_nodes()
                )
                selected[model] = SelectionRecord(
                    fixed=tuple(split_vars), fallback=tree.root.is_leaf
                )
                profiles[model] = split_variable_profile(tree)
                continue

            if model in SELECTION_SOURCE:
                source_tree = trees.get(SELECTION_SOURCE[model])
                if source_tree is None:
                    failures[model] = (
                        f"selection source {SELECTION_SOURCE[model]} unavailable"
                    )
                    continue
                spec = tree_select_predictors(source_tree)
            else:  # Edu baselines
                if not config.edu_list:
                    failures[model] = "edu list is empty"
                    continue
                select_variable_set(train, "Edu", list(config.edu_list))
                spec = MixedSpec(fixed_predictors=tuple(config.edu_list))
            selected[model] = SelectionRecord(
                fixed=spec.fixed_predictors,
                slope_candidates=spec.slope_candidates,
                fallback=spec.fallback_intercept_only,
            )

            design = encode_design(train, list(spec.fixed_predictors))
            y_fit = y_train[design.retained_rows].astype(float)
            if model.startswith("GLMM"):
                labels = _group_labels(train, spec.intercept_groups)
                groups = {
                    f: [labels[f][i] for i in design.retained_rows]
                    for f in spec.intercept_groups
                }
                fit = fit_random_intercept_logistic(design, y_fit, groups)
                test_labels = _group_labels(test, spec.intercept_groups)
                probs, mask = predict_glmm(fit, test, test_labels, mode="conditional")
            else:
                fit = fit_logistic_irls(design, y_fit)
                probs, mask = predict_glm(fit, test)
            scores[model] = _score(y_test, probs, mask)
        except (DataError, SchemaError, np.linalg.LinAlgError) as err:
            failures[model] = str(err)
            log.warning("rep %d: %s failed: %s", rep, model, err)

    return RepetitionResult(
        rep_index=rep,
        seed=seed,
        scores=scores,
        selected=selected,
        split_profiles=profiles,
        failures=failures,
    )


_WORKER: dict = {}


def _init_worker(ds: Dataset, config: ExperimentConfig) -> None:
    _WORKER["ds"] = ds
    _WORKER["config"] = config


def _run_worker(rep: int) -> RepetitionResult:
    return _fit_rep(_WORKER["ds"], _WORKER["config"], rep)


def _quartiles(values: list[float]) -> tuple[float, float, float, float]:
    arr = np.asarray(values, dtype=float)
    q1, med, q3 = np.percentile(arr, [25.0, 50.0, 75.0])
    return float(np.mean(arr)), float(q1), float(med), float(q3)


def run_experiment(
    ds: Dataset, config: ExperimentConfig, jobs: int = 1
) -> ExperimentReport:
    """Run the full repetition protocol and aggregate the results.

    Individual model failures are recorded per repetition and excluded from
    that repetition's rows; they never abort the run.  ``jobs`` bounds worker
    processes; any value produces identical results.
    """
    response = response_column(ds)
    if any(m in EDU_MODELS for m in config.model_roster) and not config.edu_list:
        raise DataError("the model roster includes Edu models but edu_list is empty")
    config.resolved_train_size(ds.n_rows)

    reps = range(config.repetitions)
    if jobs <= 1 or config.repetitions == 1:
        results = [_fit_rep(ds, config, r) for r in reps]
    else:
        with ProcessPoolExecutor(
            max_workers=min(jobs, config.repetitions),
            initializer=_init_worker,
            initargs=(ds, config),
        ) as pool:
            results = list(pool.map(_run_worker, reps, chunksize=1))

    summary: list[SummaryRow] = []
    confusion_totals: dict[str, ConfusionMatrix] = {}
    roc_curves: dict[str, RocCurve] = {}
    importance: dict[str, list[ImportanceRow]] = {}
    for model in config.model_roster:
        rows = [r.scores[model] for r in results if model in r.scores]
        if not rows:
            continue
        err = _quartiles([s.error_rate for s in rows])
        bri = _quartiles([s.brier for s in rows])
        auc_q = _quartiles([s.auc for s in rows])
        summary.append(SummaryRow(model, len(rows), *err, *bri, *auc_q))
        total = rows[0].confusion
        for s in rows[1:]:
            total = total + s.confusion
        confusion_totals[model] = total
        roc_curves[model] = aggregate_roc([s.roc for s in rows])
        if model in TREE_SETS:
            importance[model] = _accumulate_importance(
                [r.split_profiles[model] for r in results if model in r.split_profiles]
            )

    return ExperimentReport(
        config=config,
        response=response,
        n_rows=ds.n_rows,
        results=results,
        summary=summary,
        confusion_totals=confusion_totals,
        roc_curves=roc_curves,
        importance=importance,
    )


# ---------------------------------------------------------------------------
# report files


def _format(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def config_digest(config: ExperimentConfig) -> str:
    payload = json.dumps(asdict(config), sort_keys=True, default=list)
    return hashlib.sha256(payload.encode()).hexdigest()


def write_reports(report: ExperimentReport, outdir: "str | Path") -> list[Path]:
    """Write the canonical report files; returns the paths written.

    Files: metrics.csv (long format), summary.csv, confusion_total.csv,
    roc_aggregate.csv, importance.csv, selected_predictors.csv, and
    manifest.json.  Content is a pure function of (dataset, config): no
    timestamps, fixed row order, shortest round-trip float formatting.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, header: list[str], rows: list[list]) -> None:
        path = outdir / name
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_format(v) for v in row])
        written.append(path)

    roster = report.config.model_roster
    rows = []
    for result in report.results:
        for model in roster:
            score = result.scores.get(model)
            if score is None:
                continue
            rows.append([result.rep_index, model, "error_rate", score.error_rate])
            rows.append([result.rep_index, model, "brier", score.brier])
            rows.append([result.rep_index, model, "auc", score.auc])
            rows.append([result.rep_index, model, "n_scored", score.scored_rows])
    emit("metrics.csv", ["rep", "model", "metric", "value"], rows)

    rows = [
        [
            s.model,
            s.n_reps,
            s.mean_error,
            s.q1_error,
            s.median_error,
            s.q3_error,
            s.mean_brier,
            s.q1_brier,
            s.median_brier,
            s.q3_brier,
            s.mean_auc,
            s.q1_auc,
            s.median_auc,
            s.q3_auc,
        ]
        for s in report.summary
    ]
    emit(
        "summary.csv",
        [
            "model",
            "n_reps",
            "mean_error",
            "q1_error",
            "median_error",
            "q3_error",
            "mean_brier",
            "q1_brier",
            "median_brier",
            "q3_brier",
            "mean_auc",
            "q1_auc",
            "median_auc",
            "q3_auc",
        ],
        rows,
    )

    rows = []
    for model in roster:
        cm = report.confusion_totals.get(model)
        if cm is not None:
            rows.append([model, cm.tn, cm.fp, cm.fn, cm.tp, cm.n])
    emit("confusion_total.csv", ["model", "tn", "fp", "fn", "tp", "total"], rows)

    rows = []
    for model in roster:
        curve = report.roc_curves.get(model)
        if curve is None:
            continue
        for f, t in zip(curve.fpr, curve.tpr):
            rows.append([model, float(f), float(t)])
    emit("roc_aggregate.csv", ["model", "fpr", "tpr"], rows)

    rows = []
    for model in roster:
        for imp in report.importance.get(model, []):
            rows.append(
                [model, imp.variable, imp.total, imp.first, imp.second, imp.third]
            )
    emit(
        "importance.csv",
        ["model", "variable", "total_splits", "first", "second", "third"],
        rows,
    )

    rows = []
    for result in report.results:
        for model in roster:
            record = result.selected.get(model)
            if record is None:
                continue
            rows.append(
                [
                    result.rep_index,
                    model,
                    int(record.fallback),
                    ";".join(record.fixed),
                    ";".join(record.slope_candidates),
                ]
            )
    emit(
        "selected_predictors.csv",
        ["rep", "model", "fallback", "fixed", "slope_candidates"],
        rows,
    )

    manifest = {
        "config": asdict(report.config),
        "config_sha256": config_digest(report.config),
        "master_seed": report.config.master_seed,
        "dataset": {"rows": report.n_rows, "response": report.response},
        "repetition_seeds": [r.seed for r in report.results],
        "failures": {
            str(r.rep_index): r.failures for r in report.results if r.failures
        },
        "versions": _versions(),
    }
    path = outdir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=list)
        fh.write("\n")
    written.append(path)
    return written


def _versions() -> dict[str, str]:
    import scipy

    from importlib.metadata import PackageNotFoundError, version

    try:
        own = version("treelevel")
    except PackageNotFoundError:
        own = "0.0.0"
    return {
        "treelevel": own,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": sys.version.split()[0],
    }
