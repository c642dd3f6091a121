"""Exact Bayesian inference for the Bingham distribution.

Rejection sampling from an angular central Gaussian envelope gives exact
Bingham draws; the exchange algorithm uses them to sample the posterior of
the concentration parameters without ever evaluating the normalising constant.
"""

__version__ = "0.1.0"

from .errors import BinghamError, DataValidationError, EnvelopeViolation, NumericalFailure
from .model import (
    LambdaVector,
    SufficientStats,
    UnitVector,
    canonicalize,
    eigen_decompose,
    log_unnorm_bingham,
    log_unnorm_lik,
    sufficient_stats,
)
from .rng import RngState
from .samplers import (
    EnvelopeParams,
    acg_log_unnorm,
    acg_sample,
    bingham_sample,
    bingham_sample_n,
    envelope_for,
    tune_b,
)
from .inference import Chain, ChainConfig, PriorSpec, exchange_log_ratio, log_prior, propose, run_exchange
from .diagnostics import RegionTestResult, SummaryReport, acf, difference_region_test, summarize

__all__ = [
    "BinghamError", "DataValidationError", "EnvelopeViolation", "NumericalFailure",
    "LambdaVector", "SufficientStats", "UnitVector", "canonicalize", "eigen_decompose",
    "log_unnorm_bingham", "log_unnorm_lik", "sufficient_stats", "RngState",
    "EnvelopeParams", "acg_log_unnorm", "acg_sample", "bingham_sample", "bingham_sample_n",
    "envelope_for", "tune_b", "Chain", "ChainConfig", "PriorSpec", "exchange_log_ratio",
    "log_prior", "propose", "run_exchange", "RegionTestResult", "SummaryReport", "acf",
    "difference_region_test", "summarize",
]
