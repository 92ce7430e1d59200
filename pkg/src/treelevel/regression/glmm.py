"""Random-intercept logistic models via the Laplace approximation.

The model adds independent Gaussian intercepts for each grouping factor to
the fixed linear predictor.  For given variance components, conditional
modes of the random intercepts (and the fixed effects) are found by
penalized iteratively reweighted least squares; the Laplace-approximate
deviance adds the log-determinant correction evaluated at the modes.  A
bounded quasi-Newton search over the standard deviations minimizes that
deviance; exact zeros remove a factor, so the fit degrades gracefully to the
plain logistic model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..dataset import DataError, Dataset
from .design import DesignMatrix, encode_rows
from .glm import PROB_FLOOR, fit_logistic_irls

log = logging.getLogger(__name__)

GROUP_FACTORS = ("class", "school")
SIGMA_BOUND = 50.0


@dataclass(frozen=True)
class MixedSpec:
    """Model skeleton produced by tree-driven variable selection.

    ``slope_candidates`` names variables whose group-mean aggregate was
    selected; they are reported for model criticism but random slopes are
    never fitted here.  ``fallback_intercept_only`` marks a selection that
    came back empty (root-only tree): callers fit an intercept-only model.
    """

    fixed_predictors: tuple[str, ...]
    intercept_groups: tuple[str, ...] = GROUP_FACTORS
    slope_candidates: tuple[str, ...] = ()
    fallback_intercept_only: bool = False

    def __post_init__(self) -> None:
        for factor in self.intercept_groups:
            if factor not in GROUP_FACTORS:
                raise DataError(f"unknown grouping factor {factor!r}")


@dataclass(frozen=True)
class GlmmFit:
    fixed_coefficients: np.ndarray
    design: DesignMatrix | None
    variance_components: dict[str, float]  # factor -> sigma squared
    conditional_modes: dict[str, dict[str, float]]
    laplace_deviance: float
    converged: bool
    outer_evaluations: int


class _Factor:
    def __init__(self, name: str, labels) -> None:
        labels = np.asarray([str(v) for v in labels])
        self.name = name
        self.levels, self.codes = np.unique(labels, return_inverse=True)
        self.q = self.levels.size
        z = np.zeros((labels.size, self.q))
        z[np.arange(labels.size), self.codes] = 1.0
        self.z = z


class _LaplaceProblem:
    """Penalized IRLS and the Laplace deviance for one data configuration."""

    def __init__(self, mat: np.ndarray, y: np.ndarray, factors: list[_Factor]) -> None:
        self.mat = mat
        self.y = y
        self.factors = factors
        self.p = mat.shape[1]
        self.beta = np.zeros(self.p)
        self.modes = {f.name: np.zeros(f.q) for f in factors}
        self.inner_ok = True

    def _assemble(self, sigmas: dict[str, float]):
        active = [f for f in self.factors if sigmas[f.name] > 0.0]
        blocks = [self.mat] + [f.z for f in active]
        a = np.hstack(blocks) if len(blocks) > 1 else self.mat
        penalty = np.zeros(a.shape[1])
        offset = self.p
        for f in active:
            penalty[offset : offset + f.q] = 1.0 / sigmas[f.name]
            offset += f.q
        start = np.concatenate([self.beta] + [self.modes[f.name] for f in active])
        return active, a, penalty, start

    def deviance(self, sigmas: dict[str, float]) -> float:
        active, a, penalty, w = self._assemble(sigmas)
        y = self.y
        eta = a @ w
        mu = 1.0 / (1.0 + np.exp(-eta))

        def penalized(dev_w, vec):
            return dev_w + float(np.sum(penalty * vec * vec))

        mu_c = np.clip(mu, PROB_FLOOR, 1.0 - PROB_FLOOR)
        dev_cond = float(-2.0 * np.sum(y * np.log(mu_c) + (1 - y) * np.log(1 - mu_c)))
        current = penalized(dev_cond, w)
        self.inner_ok = False
        for _ in range(80):
            weight = np.clip(mu * (1.0 - mu), 1e-10, None)
            grad = a.T @ (y - mu) - penalty * w
            h = (a.T * weight) @ a
            h[np.diag_indices_from(h)] += penalty
            try:
                step = np.linalg.solve(h, grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(h, grad, rcond=None)[0]
            improved = None
            for _ in range(40):
                trial = w + step
                eta = a @ trial
                mu_t = 1.0 / (1.0 + np.exp(-eta))
                mu_c = np.clip(mu_t, PROB_FLOOR, 1.0 - PROB_FLOOR)
                dev_t = float(-2.0 * np.sum(y * np.log(mu_c) + (1 - y) * np.log(1 - mu_c)))
                pen_t = penalized(dev_t, trial)
                if pen_t <= current + 1e-12:
                    improved = (trial, mu_t, dev_t, pen_t)
                    break
                step = step / 2.0
            if improved is None:
                # no improving step at machine precision: at the optimum
                self.inner_ok = bool(np.max(np.abs(grad)) < 1e-4)
                break
            w, mu, dev_cond, new_current = improved
            if abs(current - new_current) <= 1e-12 * (abs(new_current) + 1.0):
                current = new_current
                self.inner_ok = True
                break
            current = new_current

        # store modes for warm starts and reporting
        self.beta = w[: self.p].copy()
        offset = self.p
        for f in self.factors:
            if f in active:
                self.modes[f.name] = w[offset : offset + f.q].copy()
                offset += f.q
            else:
                self.modes[f.name] = np.zeros(f.q)

        # log det(I + S Z'WZ S) over the active random coordinates
        logdet = 0.0
        if active:
            weight = np.clip(mu * (1.0 - mu), 1e-10, None)
            z = np.hstack([f.z for f in active])
            scale = np.concatenate(
                [np.full(f.q, np.sqrt(sigmas[f.name])) for f in active]
            )
            m = (z.T * weight) @ z
            b = np.eye(scale.size) + (m * scale[None, :]) * scale[:, None]
            sign, val = np.linalg.slogdet(b)
            if sign <= 0:
                raise DataError("Laplace determinant is not positive definite")
            logdet = float(val)

        penalty_term = current - dev_cond
        return dev_cond + penalty_term + logdet


def fit_random_intercept_logistic(
    X: DesignMatrix | np.ndarray,
    y,
    groups: dict[str, "np.ndarray | list"],
    tol: float = 1e-8,
    max_iter: int = 200,
    fixed_variances: dict[str, float] | None = None,
) -> GlmmFit:
    """Fit the random-intercept logistic model.

    ``groups`` maps factor names to per-row group labels aligned with the
    design rows.  Variances in ``fixed_variances`` are held at the given
    value (0 removes the factor; used for the reduction-to-GLM check).
    Initialization is deterministic: fixed effects from the plain logistic
    fit, free variance components at 0.5.
    """
    design = X if isinstance(X, DesignMatrix) else None
    mat = X.matrix if design is not None else np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if mat.ndim != 2 or y.shape != (mat.shape[0],):
        raise DataError("design matrix and response are incompatible")
    if not groups:
        raise DataError("at least one grouping factor is required")
    for name, labels in groups.items():
        if len(labels) != mat.shape[0]:
            raise DataError(f"group labels for {name!r} do not match the design rows")
    fixed_variances = dict(fixed_variances or {})
    for name, value in fixed_variances.items():
        if name not in groups:
            raise DataError(f"fixed variance for unknown factor {name!r}")
        if value < 0:
            raise DataError("variance components must be >= 0")

    factor_names = sorted(groups)
    factors = [_Factor(name, groups[name]) for name in factor_names]
    problem = _LaplaceProblem(mat, y, factors)

    glm = fit_logistic_irls(mat, y, tol=tol)
    problem.beta = glm.coefficients.copy()

    free = [name for name in factor_names if name not in fixed_variances]

    def sigmas_from(theta: np.ndarray) -> dict[str, float]:
        out = dict(fixed_variances)
        for name, t in zip(free, theta):
            out[name] = float(t) ** 2
        return out

    evaluations = 0

    def objective(theta: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        return problem.deviance(sigmas_from(theta))

    if free:
        x0 = np.full(len(free), np.sqrt(0.5))
        result = minimize(
            objective,
            x0,
            method="L-BFGS-B",
            bounds=[(0.0, SIGMA_BOUND)] * len(free),
            options={
                "maxiter": max_iter,
                "ftol": 1e-11,
                "gtol": 1e-8,
                "eps": 1e-6,
            },
        )
        theta_hat = result.x
        outer_ok = bool(result.success)
        final_deviance = problem.deviance(sigmas_from(theta_hat))
    else:
        theta_hat = np.empty(0)
        outer_ok = True
        final_deviance = problem.deviance(sigmas_from(theta_hat))

    sigmas = sigmas_from(theta_hat)
    modes = {
        f.name: {str(level): float(value) for level, value in zip(f.levels, problem.modes[f.name])}
        for f in factors
    }
    return GlmmFit(
        fixed_coefficients=problem.beta.copy(),
        design=design,
        variance_components={name: sigmas[name] for name in factor_names},
        conditional_modes=modes,
        laplace_deviance=float(final_deviance),
        converged=outer_ok and problem.inner_ok,
        outer_evaluations=evaluations,
    )


def predict_glmm(
    fit: GlmmFit,
    ds: Dataset,
    groups: dict[str, "np.ndarray | list"],
    mode: str = "conditional",
) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities for new rows.

    ``conditional`` adds each row's group modes when the group was seen in
    training (unseen groups contribute 0); ``marginal-zero`` sets all random
    effects to zero.  Returns (probabilities, mask) like the GLM predictor.
    """
    if mode not in ("conditional", "marginal-zero"):
        raise DataError(f"unknown prediction mode {mode!r}")
    if fit.design is None:
        raise DataError("fit has no design metadata; predict needs an encoded fit")
    matrix, mask = encode_rows(fit.design, ds)
    eta = np.full(ds.n_rows, np.nan)
    eta[mask] = matrix[mask] @ fit.fixed_coefficients
    if mode == "conditional":
        for factor, modes in fit.conditional_modes.items():
            if factor not in groups:
                raise DataError(f"missing group labels for factor {factor!r}")
            labels = groups[factor]
            if len(labels) != ds.n_rows:
                raise DataError(f"group labels for {factor!r} do not match the rows")
            offsets = np.array(
                [modes.get(str(v), 0.0) for v in labels], dtype=float
            )
            eta[mask] += offsets[mask]
    probs = np.full(ds.n_rows, np.nan)
    probs[mask] = 1.0 / (1.0 + np.exp(-eta[mask]))
    return probs, mask
