"""Command-line front end for the multilevel classification pipeline.

Subcommands cover the whole workflow: schema-driven ingestion and
preprocessing, tree growing, cross-validated complexity selection, pruning,
prediction, tree-based variable selection, fixed and mixed logistic fits,
evaluation, the repeated-split experiment, the cp sweep, and tree export.

Every run writes a ``manifest.json`` with the resolved parameters, their
hash, and the seed, sufficient to reproduce the outputs exactly.  Options
may come from a TOML config file (``--config``); explicit command-line
values win.  Exit codes: 0 success, 1 usage error, 2 data or model error.
"""

from __future__ import annotations

import csv
import hashlib
import json
import sys
from dataclasses import asdict
from pathlib import Path

import click
import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .cart import (
    GrowControls,
    cost_complexity_sequence,
    cp_sweep,
    cross_validate_cp,
    export_tree,
    grow_tree,
    import_tree,
    predict_tree,
    prune,
)
from .cart.splitting import response_array
from .dataset import TreelevelError, load_dataset, validate_hierarchy, write_dataset
from .experiment import (
    MODEL_ROSTER,
    ExperimentConfig,
    _group_labels,
    _versions,
    run_experiment,
    tree_select_predictors,
    write_reports,
)
from .metrics import auc, brier_score, confusion_matrix, roc_curve, roc_table
from .preprocess import (
    MergePair,
    aggregate_means,
    dichotomize_response,
    merge_parent_student,
    select_variable_set,
)
from .regression import (
    encode_design,
    fit_logistic_irls,
    fit_random_intercept_logistic,
    predict_glm,
    predict_glmm,
)


def _namelist(value) -> list[str]:
    """Comma-separated string or a config list → list of names."""
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [part.strip() for part in str(value).split(",") if part.strip()]


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _merged(ctx: click.Context, config_path) -> dict:
    """Resolved parameters: config fills in options the command line left at
    their defaults; explicit command-line values always win."""
    cfg = _load_config(config_path)
    params = dict(ctx.params)
    for key, value in cfg.items():
        name = key.replace("-", "_")
        if name not in params:
            raise click.UsageError(f"unknown config key {key!r}")
        source = ctx.get_parameter_source(name)
        if source is None or source.name == "DEFAULT":
            params[name] = value
    return params


def _jsonable(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    return value


def _write_manifest(outdir: Path, command: str, params: dict, seed=None) -> None:
    doc = {
        "command": command,
        "parameters": _jsonable(params),
        "seed": seed,
        "versions": _versions(),
    }
    payload = json.dumps(doc["parameters"], sort_keys=True, default=str)
    doc["config_sha256"] = hashlib.sha256(payload.encode()).hexdigest()
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _write_json(path: Path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    def fmt(v):
        return repr(float(v)) if isinstance(v, float) else str(v)

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve_predictors(ds, predictors, var_set, edu) -> list[str]:
    names = _namelist(predictors)
    if names and var_set:
        raise click.UsageError("give either --predictors or --var-set, not both")
    if names:
        return names
    if var_set:
        return select_variable_set(ds, var_set, _namelist(edu) or None)
    raise click.UsageError("one of --predictors or --var-set is required")


def _controls(opts: dict) -> GrowControls:
    return GrowControls(
        min_split=opts["min_split"],
        min_bucket=opts["min_bucket"],
        max_depth=opts["max_depth"],
        cp=opts["cp"],
        max_surrogate=opts["max_surrogate"],
        cv_folds=opts.get("folds", 10),
        rng_seed=opts.get("seed", 0),
    )


def data_options(f):
    f = click.option(
        "--data", required=True, type=click.Path(exists=True, dir_okay=False),
        help="CSV data file.",
    )(f)
    f = click.option(
        "--schema", required=True, type=click.Path(exists=True, dir_okay=False),
        help="TOML schema sidecar describing the columns.",
    )(f)
    return f


def grow_options(f):
    for opt in reversed(
        [
            click.option("--response", required=True, help="Binary response column."),
            click.option(
                "--predictors", default=None,
                help="Comma-separated predictor columns.",
            ),
            click.option(
                "--var-set", default=None,
                type=click.Choice(["Ind", "IndAgg", "IndMeta", "IndMetaAgg", "Edu"]),
                help="Named variable set instead of an explicit predictor list.",
            ),
            click.option(
                "--edu", default=None,
                help="Comma-separated columns for the Edu variable set.",
            ),
            click.option("--cp", default=0.01, show_default=True, type=float,
                         help="Complexity parameter (pre-pruning bar)."),
            click.option("--min-split", default=20, show_default=True, type=int,
                         help="Smallest node that may be split."),
            click.option("--min-bucket", default=7, show_default=True, type=int,
                         help="Smallest admissible child node."),
            click.option("--max-depth", default=30, show_default=True, type=int,
                         help="Maximum tree depth."),
            click.option("--max-surrogate", default=5, show_default=True, type=int,
                         help="Surrogate splits kept per node."),
        ]
    ):
        f = opt(f)
    return f


config_option = click.option(
    "--config", "config_path", default=None,
    type=click.Path(exists=True, dir_okay=False),
    help="TOML file supplying defaults for any option of this command.",
)
out_option = click.option(
    "--out", required=True, type=click.Path(file_okay=False),
    help="Output directory (created if absent).",
)


@click.group()
@click.version_option(package_name="treelevel", prog_name="treelevel")
def cli() -> None:
    """Recursive-partitioning toolkit for multilevel binary classification."""


@cli.command()
@data_options
@config_option
@out_option
@click.option(
    "--merge", "merges", multiple=True,
    help="parent:student:merged column triple; repeatable.",
)
@click.option("--response", default=None, help="Nominal column to dichotomize.")
@click.option("--positive", default=None, help="Level mapped to class 1.")
@click.option(
    "--aggregate", "aggregates", multiple=True,
    type=click.Choice(["class", "school"]),
    help="Append group means at this level; repeatable.",
)
@click.option("--missing-token", default="NA", show_default=True,
              help="Cell token read as missing.")
@click.pass_context
def preprocess(ctx, **kwargs) -> None:
    """Merge parent/student columns, dichotomize, aggregate, write back."""
    opts = _merged(ctx, kwargs["config_path"])
    ds = load_dataset(opts["data"], opts["schema"], opts["missing_token"])
    report = validate_hierarchy(ds)
    if not report.ok:
        first = report.issues[0]
        raise TreelevelError(f"hierarchy validation failed: {first.message}")
    pairs = []
    for item in opts["merges"]:
        parts = [p.strip() for p in str(item).split(":")]
        if len(parts) != 3 or not all(parts):
            raise click.UsageError(f"--merge needs parent:student:merged, got {item!r}")
        pairs.append(MergePair(*parts))
    if pairs:
        ds = merge_parent_student(ds, pairs)
    if (opts["response"] is None) != (opts["positive"] is None):
        raise click.UsageError("--response and --positive go together")
    if opts["response"] is not None:
        ds = dichotomize_response(ds, opts["response"], opts["positive"])
    for level in opts["aggregates"]:
        ds = aggregate_means(ds, level)
    out = _outdir(opts["out"])
    write_dataset(ds, out / "processed.csv", out / "processed.schema.toml")
    _write_manifest(out, "preprocess", opts)
    click.echo(f"wrote {ds.n_rows} rows x {len(ds.columns)} columns to {out}")


@cli.command()
@data_options
@grow_options
@config_option
@out_option
@click.pass_context
def grow(ctx, **kwargs) -> None:
    """Grow a classification tree and write its JSON and text forms."""
    opts = _merged(ctx, kwargs["config_path"])
    ds = load_dataset(opts["data"], opts["schema"])
    predictors = _resolve_predictors(ds, opts["predictors"], opts["var_set"], opts["edu"])
    tree = grow_tree(ds, opts["response"], predictors, _controls(opts))
    cost_complexity_sequence(tree)
    out = _outdir(opts["out"])
    (out / "tree.json").write_text(export_tree(tree, "json"))
    (out / "tree.txt").write_text(export_tree(tree, "text"))
    _write_manifest(out, "grow", opts)
    click.echo(f"grew tree: {tree.n_splits} splits, {len(tree.leaves())} leaves")


@cli.command()
@data_options
@grow_options
@config_option
@out_option
@click.option("--folds", default=10, show_default=True, type=int,
              help="Cross-validation folds.")
@click.option("--seed", default=0, show_default=True, type=int,
              help="Fold-assignment seed.")
@click.option("--one-se", is_flag=True,
              help="Pick the smallest tree within one standard error.")
@click.pass_context
def cv(ctx, **kwargs) -> None:
    """Cross-validate the complexity parameter and report the cp table."""
    opts = _merged(ctx, kwargs["config_path"])
    ds = load_dataset(opts["data"], opts["schema"])
    predictors = _resolve_predictors(ds, opts["predictors"], opts["var_set"], opts["edu"])
    result = cross_validate_cp(
        ds, opts["response"], predictors, _controls(opts), one_se=opts["one_se"]
    )
    out = _outdir(opts["out"])
    _write_csv(
        out / "cptable.csv",
        ["cp", "n_splits", "rel_error", "x_error", "x_std"],
        [[r.cp, r.n_splits, r.rel_error, r.x_error, r.x_std] for r in result.table],
    )
    _write_json(
        out / "selected.json",
        {
            "selected_cp": result.selected_cp,
            "n_splits": result.selected_row.n_splits,
            "x_error": result.selected_row.x_error,
            "x_std": result.selected_row.x_std,
            "one_se": result.one_se,
            "fold_seed": result.fold_seed,
        },
    )
    _write_manifest(out, "cv", opts, seed=opts["seed"])
    click.echo(f"selected cp = {result.selected_cp!r}")


@cli.command("prune")
@click.option("--tree", "tree_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Tree JSON produced by grow/export-tree.")
@click.option("--cp", required=True, type=float, help="Pruning threshold.")
@config_option
@out_option
@click.pass_context
def prune_cmd(ctx, **kwargs) -> None:
    """Prune a stored tree at a cp value."""
    opts = _merged(ctx, kwargs["config_path"])
    tree = import_tree(Path(opts["tree_path"]).read_text())
    pruned = prune(tree, opts["cp"])
    out = _outdir(opts["out"])
    (out / "tree.json").write_text(export_tree(pruned, "json"))
    (out / "tree.txt").write_text(export_tree(pruned, "text"))
    _write_manifest(out, "prune", opts)
    click.echo(f"pruned to {pruned.n_splits} splits at cp={opts['cp']!r}")


@cli.command()
@click.option("--tree", "tree_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Tree JSON produced by grow/export-tree.")
@data_options
@config_option
@out_option
@click.pass_context
def predict(ctx, **kwargs) -> None:
    """Route rows through a stored tree; never drops a row."""
    opts = _merged(ctx, kwargs["config_path"])
    tree = import_tree(Path(opts["tree_path"]).read_text())
    ds = load_dataset(opts["data"], opts["schema"])
    probs = predict_tree(tree, ds, output="prob")
    classes = predict_tree(tree, ds, output="class")
    nodes = predict_tree(tree, ds, output="node")
    id_col = ds.id_column("student")
    header = ["row", "prob", "class", "node"]
    rows = [
        [i, float(probs[i]), int(classes[i]), int(nodes[i])] for i in range(ds.n_rows)
    ]
    if id_col is not None:
        header = ["row", id_col, "prob", "class", "node"]
        ids = ds.column(id_col)
        rows = [[r[0], ids[r[0]], *r[1:]] for r in rows]
    out = _outdir(opts["out"])
    _write_csv(out / "predictions.csv", header, rows)
    _write_manifest(out, "predict", opts)
    click.echo(f"predicted {ds.n_rows} rows")


@cli.command("select-vars")
@click.option("--tree", "tree_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Tree JSON produced by grow/export-tree.")
@config_option
@out_option
@click.pass_context
def select_vars(ctx, **kwargs) -> None:
    """Derive a regression-model skeleton from a tree's split variables."""
    opts = _merged(ctx, kwargs["config_path"])
    tree = import_tree(Path(opts["tree_path"]).read_text())
    spec = tree_select_predictors(tree)
    out = _outdir(opts["out"])
    _write_json(
        out / "selection.json",
        {
            "fixed_predictors": list(spec.fixed_predictors),
            "intercept_groups": list(spec.intercept_groups),
            "slope_candidates": list(spec.slope_candidates),
            "fallback_intercept_only": spec.fallback_intercept_only,
        },
    )
    _write_manifest(out, "select-vars", opts)
    if spec.fallback_intercept_only:
        click.echo("root-only tree: intercept-only fallback")
    else:
        click.echo("fixed: " + ", ".join(spec.fixed_predictors))
        if spec.slope_candidates:
            click.echo("slope candidates: " + ", ".join(spec.slope_candidates))


@cli.command("fit-glm")
@data_options
@config_option
@out_option
@click.option("--response", required=True, help="Binary response column.")
@click.option("--predictors", required=True,
              help="Comma-separated predictor columns.")
@click.pass_context
def fit_glm(ctx, **kwargs) -> None:
    """Fit a fixed-effect logistic model on complete cases."""
    opts = _merged(ctx, kwargs["config_path"])
    ds = load_dataset(opts["data"], opts["schema"])
    design = encode_design(ds, _namelist(opts["predictors"]))
    y = response_array(ds, opts["response"])[design.retained_rows].astype(float)
    fit = fit_logistic_irls(design, y)
    out = _outdir(opts["out"])
    _write_json(
        out / "glm.json",
        {
            "coefficients": {
                label: float(v) for label, v in zip(fit.labels, fit.coefficients)
            },
            "deviance": fit.deviance,
            "converged": fit.converged,
            "iterations": fit.iterations,
            "separation": fit.separation,
            "dropped_columns": list(design.dropped_columns),
            "rows_used": int(design.retained_rows.size),
        },
    )
    _write_manifest(out, "fit-glm", opts)
    click.echo(
        f"deviance {fit.deviance:.4f} on {design.retained_rows.size} rows"
        + (" (separation suspected)" if fit.separation else "")
    )


@cli.command("fit-glmm")
@data_options
@config_option
@out_option
@click.option("--response", required=True, help="Binary response column.")
@click.option("--predictors", required=True,
              help="Comma-separated predictor columns.")
@click.option("--groups", default="class,school", show_default=True,
              help="Comma-separated grouping factors for random intercepts.")
@click.pass_context
def fit_glmm(ctx, **kwargs) -> None:
    """Fit a random-intercept logistic model (Laplace approximation)."""
    opts = _merged(ctx, kwargs["config_path"])
    ds = load_dataset(opts["data"], opts["schema"])
    design = encode_design(ds, _namelist(opts["predictors"]))
    y = response_array(ds, opts["response"])[design.retained_rows].astype(float)
    factors = tuple(_namelist(opts["groups"]))
    labels = _group_labels(ds, factors)
    groups = {
        f: [labels[f][i] for i in design.retained_rows] for f in factors
    }
    fit = fit_random_intercept_logistic(design, y, groups)
    out = _outdir(opts["out"])
    _write_json(
        out / "glmm.json",
        {
            "fixed_coefficients": {
                label: float(v)
                for label, v in zip(design.labels, fit.fixed_coefficients)
            },
            "variance_components": fit.variance_components,
            "conditional_modes": fit.conditional_modes,
            "laplace_deviance": fit.laplace_deviance,
            "converged": fit.converged,
            "outer_evaluations": fit.outer_evaluations,
            "rows_used": int(design.retained_rows.size),
        },
    )
    _write_manifest(out, "fit-glmm", opts)
    variances = ", ".join(
        f"{k}={v:.4f}" for k, v in fit.variance_components.items()
    )
    click.echo(f"Laplace deviance {fit.laplace_deviance:.4f}; variances {variances}")


@cli.command()
@data_options
@config_option
@out_option
@click.option("--response", required=True, help="Binary response column.")
@click.option("--predictions", "predictions_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="CSV with a row column and a probability column.")
@click.option("--prob-column", default="prob", show_default=True,
              help="Name of the probability column.")
@click.option("--threshold", default=0.5, show_default=True, type=float,
              help="Class-1 decision threshold.")
@click.option("--roc-axes", default="fpr-tpr", show_default=True,
              type=click.Choice(["fpr-tpr", "spec-sens"]),
              help="Axis convention of the ROC table.")
@click.pass_context
def evaluate(ctx, **kwargs) -> None:
    """Score stored predictions against the observed response."""
    opts = _merged(ctx, kwargs["config_path"])
    ds = load_dataset(opts["data"], opts["schema"])
    y = response_array(ds, opts["response"])
    with open(opts["predictions_path"], newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or opts["prob_column"] not in reader.fieldnames:
            raise TreelevelError(
                f"predictions file lacks a {opts['prob_column']!r} column"
            )
        has_row = "row" in reader.fieldnames
        pairs = []
        skipped = 0
        for i, record in enumerate(reader):
            idx = int(record["row"]) if has_row else i
            if not 0 <= idx < ds.n_rows:
                raise TreelevelError(f"prediction row index {idx} out of range")
            raw = record[opts["prob_column"]].strip()
            value = float(raw) if raw else float("nan")
            if np.isnan(value):
                skipped += 1
                continue
            pairs.append((idx, value))
    if not pairs:
        raise TreelevelError("no scorable predictions")
    idx = np.array([p[0] for p in pairs])
    probs = np.array([p[1] for p in pairs])
    truth = y[idx]
    cm = confusion_matrix(truth, probs, opts["threshold"])
    curve = roc_curve(truth, probs)
    doc = {
        "n_scored": int(idx.size),
        "n_skipped": skipped,
        "threshold": opts["threshold"],
        "confusion": {"tn": cm.tn, "fp": cm.fp, "fn": cm.fn, "tp": cm.tp},
        "error_rate": cm.error_rate,
        "sensitivity": cm.sensitivity,
        "specificity": cm.specificity,
        "brier": brier_score(truth, probs),
        "auc": auc(curve),
    }
    out = _outdir(opts["out"])
    _write_json(out / "metrics.json", doc)
    axes = opts["roc_axes"].split("-")
    _write_csv(
        out / "roc.csv", axes, [[a, b] for a, b in roc_table(curve, opts["roc_axes"])]
    )
    _write_manifest(out, "evaluate", opts)
    click.echo(
        f"error {cm.error_rate:.5f}  brier {doc['brier']:.5f}  auc {doc['auc']:.5f}"
    )


@cli.command()
@data_options
@config_option
@out_option
@click.option("--seed", default=0, show_default=True, type=int,
              help="Master seed; repetition seeds derive from it.")
@click.option("--repetitions", default=50, show_default=True, type=int,
              help="Number of random train/test splits.")
@click.option("--train-size", default=None, type=int,
              help="Training rows per split (default scales 5000/8520).")
@click.option("--cp", default=0.004, show_default=True, type=float,
              help="Complexity parameter for all grown trees.")
@click.option("--roster", default=None,
              help="Comma-separated model subset (default: all models).")
@click.option("--edu", default=None,
              help="Comma-separated columns for the Edu baselines.")
@click.option("--jobs", default=1, show_default=True, type=int,
              help="Worker processes; any value gives identical results.")
@click.option("--recompute-aggregates", is_flag=True,
              help="Recompute group means on each training part.")
@click.option("--stratify", default=None, type=click.Choice(["class", "school"]),
              help="Allocate the train quota proportionally within groups.")
@click.pass_context
def experiment(ctx, **kwargs) -> None:
    """Run the repeated-split model comparison and write all reports."""
    opts = _merged(ctx, kwargs["config_path"])
    ds = load_dataset(opts["data"], opts["schema"])
    roster = tuple(_namelist(opts["roster"])) or MODEL_ROSTER
    config = ExperimentConfig(
        repetitions=opts["repetitions"],
        train_size=opts["train_size"],
        cp=opts["cp"],
        model_roster=roster,
        edu_list=tuple(_namelist(opts["edu"])),
        master_seed=opts["seed"],
        recompute_aggregates=opts["recompute_aggregates"],
        stratify_level=opts["stratify"],
    )
    report = run_experiment(ds, config, jobs=opts["jobs"])
    out = _outdir(opts["out"])
    write_reports(report, out)
    for row in report.summary:
        click.echo(
            f"{row.model}: error {row.mean_error:.4f}  brier {row.mean_brier:.4f}"
            f"  auc {row.mean_auc:.4f}  ({row.n_reps} reps)"
        )


@cli.command("cp-sweep")
@data_options
@grow_options
@config_option
@out_option
@click.option("--cp-from", default=0.0, show_default=True, type=float,
              help="Grid start.")
@click.option("--cp-to", default=0.1, show_default=True, type=float,
              help="Grid end (inclusive).")
@click.option("--cp-step", default=0.001, show_default=True, type=float,
              help="Grid step.")
@click.option("--folds", default=10, show_default=True, type=int,
              help="Cross-validation folds.")
@click.option("--seed", default=0, show_default=True, type=int,
              help="Fold-assignment seed.")
@click.pass_context
def cp_sweep_cmd(ctx, **kwargs) -> None:
    """Training and cross-validated error along a cp grid."""
    opts = _merged(ctx, kwargs["config_path"])
    if opts["cp_step"] <= 0:
        raise click.UsageError("--cp-step must be positive")
    ds = load_dataset(opts["data"], opts["schema"])
    predictors = _resolve_predictors(ds, opts["predictors"], opts["var_set"], opts["edu"])
    grid = []
    value = opts["cp_from"]
    while value <= opts["cp_to"] + 1e-12:
        grid.append(round(value, 12))
        value += opts["cp_step"]
    rows = cp_sweep(ds, opts["response"], predictors, _controls(opts), grid)
    out = _outdir(opts["out"])
    _write_csv(
        out / "sweep.csv",
        ["cp", "n_splits", "rel_error", "x_error", "x_std"],
        [[r.cp, r.n_splits, r.rel_error, r.x_error, r.x_std] for r in rows],
    )
    _write_manifest(out, "cp-sweep", opts, seed=opts["seed"])
    best = min(rows, key=lambda r: (r.x_error, r.n_splits))
    click.echo(f"lowest cross-validated error {best.x_error!r} at cp={best.cp!r}")


@cli.command("export-tree")
@click.option("--tree", "tree_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Tree JSON produced by grow/export-tree.")
@click.option("--format", "fmt", default="text", show_default=True,
              type=click.Choice(["text", "dot", "json"]),
              help="Rendering format.")
@config_option
@out_option
@click.pass_context
def export_tree_cmd(ctx, **kwargs) -> None:
    """Render a stored tree as text, DOT, or canonical JSON."""
    opts = _merged(ctx, kwargs["config_path"])
    tree = import_tree(Path(opts["tree_path"]).read_text())
    suffix = {"text": "txt", "dot": "dot", "json": "json"}[opts["fmt"]]
    out = _outdir(opts["out"])
    target = out / f"tree.{suffix}"
    target.write_text(export_tree(tree, opts["fmt"]))
    _write_manifest(out, "export-tree", opts)
    click.echo(f"wrote {target}")


def main(argv=None) -> int:
    """Console entry point mapping exceptions to documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except (TreelevelError, np.linalg.LinAlgError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
