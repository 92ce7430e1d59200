"""Logistic regression by iteratively reweighted least squares."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..dataset import DataError, Dataset
from .design import DesignMatrix, encode_rows

log = logging.getLogger(__name__)

# |standardized coefficient| beyond this suggests quasi-separation
SEPARATION_BOUND = 15.0
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class GlmFit:
    coefficients: np.ndarray
    design: DesignMatrix | None  # None when fitted from a raw matrix
    deviance: float
    converged: bool
    iterations: int
    separation: bool

    @property
    def labels(self) -> tuple[str, ...]:
        if self.design is None:
            return tuple(f"x{j}" for j in range(self.coefficients.size))
        return self.design.labels


def _bernoulli_deviance(y: np.ndarray, mu: np.ndarray) -> float:
    mu = np.clip(mu, PROB_FLOOR, 1.0 - PROB_FLOOR)
    return float(-2.0 * np.sum(y * np.log(mu) + (1 - y) * np.log(1 - mu)))


def _solve_weighted(X, w, z):
    xtw = X.T * w
    lhs = xtw @ X
    rhs = xtw @ z
    try:
        return np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(lhs, rhs, rcond=None)[0]


def fit_logistic_irls(
    X: DesignMatrix | np.ndarray,
    y,
    tol: float = 1e-8,
    max_iter: int = 100,
) -> GlmFit:
    """Maximum-likelihood logistic fit.

    Each step solves the weighted least-squares normal equations on the
    working response; steps that would increase the deviance are halved.
    Convergence is declared when the relative deviance change or the largest
    score component falls below ``tol``.  Divergent standardized coefficients
    set the ``separation`` flag; the fit is still returned.
    """
    design = X if isinstance(X, DesignMatrix) else None
    mat = X.matrix if design is not None else np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if mat.ndim != 2 or y.shape != (mat.shape[0],):
        raise DataError("design matrix and response are incompatible")
    if not np.isin(y, (0.0, 1.0)).all():
        raise DataError("response must be 0/1")
    n, p = mat.shape
    if n < p:
        raise DataError(f"{n} rows cannot identify {p} coefficients")

    beta = np.zeros(p)
    mu = np.full(n, 0.5)
    eta = np.zeros(n)
    deviance = _bernoulli_deviance(y, mu)
    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        w = np.clip(mu * (1.0 - mu), PROB_FLOOR, None)
        z = eta + (y - mu) / w
        proposal = _solve_weighted(mat, w, z)
        step = proposal - beta
        # step-halving keeps the deviance non-increasing
        new_deviance = None
        for _ in range(40):
            trial = beta + step
            trial_eta = mat @ trial
            trial_mu = 1.0 / (1.0 + np.exp(-trial_eta))
            trial_dev = _bernoulli_deviance(y, trial_mu)
            if trial_dev <= deviance + 1e-12:
                new_deviance = trial_dev
                break
            step /= 2.0
        if new_deviance is None:
            break
        beta = beta + step
        eta = mat @ beta
        mu = 1.0 / (1.0 + np.exp(-eta))
        score = mat.T @ (y - mu)
        rel_change = abs(deviance - new_deviance) / (abs(new_deviance) + 0.1)
        deviance = new_deviance
        if rel_change < tol or np.max(np.abs(score)) < tol:
            converged = True
            break

    scale = mat.std(axis=0)
    standardized = np.abs(beta) * np.where(scale > 0, scale, 1.0)
    separation = bool((standardized[1:] > SEPARATION_BOUND).any()) if p > 1 else False
    if separation:
        log.warning("quasi-separation suspected: standardized coefficient beyond %g", SEPARATION_BOUND)
    return GlmFit(
        coefficients=beta,
        design=design,
        deviance=deviance,
        converged=converged,
        iterations=iteration,
        separation=separation,
    )


def predict_glm(fit: GlmFit, ds: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Class-1 probabilities for new rows.

    Returns (probabilities, mask); rows that cannot be encoded (incomplete or
    unseen level) are masked out and carry NaN.
    """
    if fit.design is None:
        raise DataError("fit has no design metadata; predict needs an encoded fit")
    matrix, mask = encode_rows(fit.design, ds)
    probs = np.full(ds.n_rows, np.nan)
    eta = matrix[mask] @ fit.coefficients
    probs[mask] = 1.0 / (1.0 + np.exp(-eta))
    return probs, mask
