"""Particle filters and pseudo-marginal MCMC for low-count hospital occupancy chains."""

from lifebelt.model import (
    Dataset,
    LatentPath,
    OutcomeProbs,
    cumulative_cfr,
    epidemic_pulse,
    exact_loglik,
    simulate,
    transition_logpmf,
    x0_prior,
)

__all__ = [
    "Dataset",
    "LatentPath",
    "OutcomeProbs",
    "cumulative_cfr",
    "epidemic_pulse",
    "exact_loglik",
    "simulate",
    "transition_logpmf",
    "x0_prior",
]

__version__ = "0.1.0"
