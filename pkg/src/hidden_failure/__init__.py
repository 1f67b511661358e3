"""Bayesian evidence aggregation when measurements may share a hidden failure state.

A hypothesis is tested repeatedly by exchangeable binary measurements.  A rare
latent failure state changes how measurements respond, so that unanimous
support can end up lowering confidence.  The package computes exact
posteriors, analyses posterior-vs-n curves, reproduces the pot, line-up,
Sanhedrin and Rabin-Miller scenarios, models hardware fault floors for
primality testing, handles a continuous coin-bias posterior, and ships a
rejection-sampling oracle that checks the analytic results independently.
"""

from .errors import (
    ConvergenceError,
    DegenerateEvidenceError,
    HiddenFailureError,
    ModelError,
    OracleBudgetError,
    UndefinedLimitError,
)
from .model import (
    Evidence,
    FailureModel,
    PosteriorCurve,
    PosteriorResult,
    log_binomial_pmf,
    posterior,
    posterior_curve,
)
from .presets import (
    SCENARIOS,
    build_scenario,
    lineup_model,
    pot_asymmetric_prior_model,
    pot_asymmetric_response_model,
    pot_model,
    rabin_miller_model,
    sanhedrin_model,
)
from .curves import (
    CurveSummary,
    asymptote,
    confidence_ceiling,
    conviction_band,
    extend_curve,
    find_peak,
    summarize,
)
from .crypto import (
    FaultScenario,
    bit_flip_probability,
    false_acceptance_rate,
    google_lambda,
    log2_false_acceptance_rate,
    security_gap,
)
from .coin import BiasPosterior, BiasPrior, coin_posterior, fair_mass
from .oracle import OracleEstimate, estimate_posterior

__version__ = "0.1.0"

__all__ = [
    "BiasPosterior",
    "BiasPrior",
    "ConvergenceError",
    "CurveSummary",
    "DegenerateEvidenceError",
    "Evidence",
    "FailureModel",
    "FaultScenario",
    "HiddenFailureError",
    "ModelError",
    "OracleBudgetError",
    "OracleEstimate",
    "PosteriorCurve",
    "PosteriorResult",
    "SCENARIOS",
    "UndefinedLimitError",
    "asymptote",
    "bit_flip_probability",
    "build_scenario",
    "coin_posterior",
    "confidence_ceiling",
    "conviction_band",
    "estimate_posterior",
    "extend_curve",
    "fair_mass",
    "false_acceptance_rate",
    "find_peak",
    "google_lambda",
    "lineup_model",
    "log2_false_acceptance_rate",
    "log_binomial_pmf",
    "posterior",
    "posterior_curve",
    "pot_asymmetric_prior_model",
    "pot_asymmetric_response_model",
    "pot_model",
    "rabin_miller_model",
    "sanhedrin_model",
    "security_gap",
    "summarize",
]
