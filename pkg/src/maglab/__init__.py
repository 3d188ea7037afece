"""Homogeneous binary multiplicative attribute graphs: sampling, exact
isolated-node moments, zero-one-law regimes and Monte Carlo sweeps."""

from .asymptotics import RegimeReport, ScalingSpec, classify_regime, g_value, ln_g, nu_star
from .model import AffinityMatrix, AttributePmf, AttributeVector, MagParams, ParameterError
from .moments import moment_report
from .sampler import estimate_prob_no_isolated, isolation_census, sample_graph

__all__ = [
    "AffinityMatrix", "AttributePmf", "AttributeVector", "MagParams", "ParameterError",
    "RegimeReport", "ScalingSpec", "classify_regime", "g_value", "ln_g", "nu_star",
    "moment_report", "estimate_prob_no_isolated", "isolation_census", "sample_graph",
]
