"""Recovery-probability toolkit for broadcasts relayed by drone clusters.

Exact finite-field and combinatorial kernels, closed-form recovery and
mission-success probabilities for data-carousel and systematic-RLNC
broadcasting, and a seedable Monte Carlo simulator to validate them.
"""

from .analytic import (CAROUSEL, INTERCONNECTED, ISOLATED, RLNC,
                       CapExceededError, MetricSpec, NakagamiLink,
                       ProbResult, Scenario, Scheme, analytic_metric,
                       base_full_recovery, base_partial_recovery,
                       carousel_full_recovery, carousel_partial_recovery,
                       equivalent_erasure, min_transmissions,
                       mission_interconnected, mission_isolated,
                       mission_success, nakagami_erasure,
                       rlnc_full_recovery, rlnc_partial_recovery)
from .gf import GaloisField, GfMatrix
from .kernels import binom, full_recovery_given_n, gauss_binom, partial_recovery_given_n
from .sim import SimEstimate, TrialOutcome, estimate, estimate_many, run_trial, trial_rng

__all__ = [
    "CAROUSEL", "INTERCONNECTED", "ISOLATED", "RLNC",
    "CapExceededError", "GaloisField", "GfMatrix", "MetricSpec",
    "NakagamiLink", "ProbResult", "Scenario", "Scheme", "SimEstimate",
    "TrialOutcome", "analytic_metric", "base_full_recovery",
    "base_partial_recovery", "binom", "carousel_full_recovery",
    "carousel_partial_recovery", "equivalent_erasure",
    "estimate", "estimate_many", "full_recovery_given_n", "gauss_binom",
    "min_transmissions", "mission_interconnected", "mission_isolated",
    "mission_success", "nakagami_erasure", "partial_recovery_given_n",
    "rlnc_full_recovery", "rlnc_partial_recovery", "run_trial", "trial_rng",
]
