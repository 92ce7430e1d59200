"""Logistic regression: fixed-effects IRLS and random-intercept Laplace fits."""

from .design import DesignMatrix, Term, encode_design, encode_rows
from .glm import GlmFit, fit_logistic_irls, predict_glm
from .glmm import (
    GROUP_FACTORS,
    GlmmFit,
    MixedSpec,
    fit_random_intercept_logistic,
    predict_glmm,
)

__all__ = [
    "DesignMatrix",
    "Term",
    "encode_design",
    "encode_rows",
    "GlmFit",
    "fit_logistic_irls",
    "predict_glm",
    "GROUP_FACTORS",
    "GlmmFit",
    "MixedSpec",
    "fit_random_intercept_logistic",
    "predict_glmm",
]
