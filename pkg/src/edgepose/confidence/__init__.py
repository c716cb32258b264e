"""Confidence-score distributions: parametric beta and empirical step CDFs."""

from .io import describe_samples, fit_beta_moments, fit_empirical, load_samples, model_from_spec
from .models import BetaConfidence, ConfidenceModel, ConfidenceQuad, EmpiricalConfidence

__all__ = [
    "BetaConfidence",
    "ConfidenceModel",
    "ConfidenceQuad",
    "EmpiricalConfidence",
    "describe_samples",
    "fit_beta_moments",
    "fit_empirical",
    "load_samples",
    "model_from_spec",
]
