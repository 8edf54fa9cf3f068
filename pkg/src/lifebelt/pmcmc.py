"""Grouped independence Metropolis-Hastings over the outcome probabilities.

The chain targets the posterior of (p_h, p_d, p_r) under a uniform prior on
the probability simplex, using a particle filter's likelihood estimate in
place of the intractable likelihood (pseudo-marginal MCMC).  With an
unbiased likelihood estimator the stationary distribution is the exact
posterior regardless of the particle count; the particle count only affects
mixing.

Parameterisation: the simplex is mapped to an unconstrained plane by

    gamma_1 = logit( p_d / (p_d + p_r) )   (death share of the exits)
    gamma_2 = logit( p_d + p_r )           (total exit probability)

and the random-walk proposal is an isotropic normal on gamma.  The prior
density carries the Jacobian of this map so that the chain still targets the
uniform-simplex prior.

The likelihood estimate of the current state is recycled: it is drawn once,
when the state is accepted, and reused in every later acceptance ratio.
Re-estimating it each iteration would break the pseudo-marginal property.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, log_expit, logit

from .filters import FilterConfig, run_filter
from .model import Dataset, OutcomeProbs

__all__ = [
    "to_gamma",
    "from_gamma",
    "log_prior_gamma",
    "proposal_in_support",
    "GimhState",
    "StepRecord",
    "ChainTrace",
    "gimh_step",
    "run_pmcmc",
    "longest_rejection_run",
]

LOG_SIMPLEX_DENSITY = np.log(2.0)  # uniform density over the unit 2-simplex


def to_gamma(probs: OutcomeProbs) -> np.ndarray:
    """Map interior outcome probabilities to the unconstrained plane."""
    exit_prob = probs.p_d + probs.p_r
    if not (0.0 < exit_prob < 1.0) or not (0.0 < probs.p_d < exit_prob):
        raise ValueError("outcome probabilities must be interior to the simplex")
    return np.array([logit(probs.p_d / exit_prob), logit(exit_prob)])


def from_gamma(gamma) -> OutcomeProbs:
    """Inverse of ``to_gamma``.

    Extreme coordinates can push a component to exactly 0.0 or 1.0 in
    floating point; callers who need interior values must check
    ``proposal_in_support``.
    """
    gamma = np.asarray(gamma, dtype=float)
    death_share = expit(gamma[0])
    exit_prob = expit(gamma[1])
    p_d = death_share * exit_prob
    p_r = (1.0 - death_share) * exit_prob
    p_h = 1.0 - exit_prob
    return OutcomeProbs(p_h=p_h, p_d=p_d, p_r=p_r)


def log_prior_gamma(gamma) -> float:
    """Log density on the gamma plane of the uniform simplex prior.

    Uniform density 2 on the simplex times the Jacobian
    a(1-a) s^2 (1-s) of the (logit share, logit exit) map, written with
    ``log_expit`` so the tails stay finite.
    """
    gamma = np.asarray(gamma, dtype=float)
    g1, g2 = gamma[0], gamma[1]
    return float(
        LOG_SIMPLEX_DENSITY
        + log_expit(g1)
        + log_expit(-g1)
        + 2.0 * log_expit(g2)
        + log_expit(-g2)
    )


def proposal_in_support(probs: OutcomeProbs) -> bool:
    """True when every outcome probability is strictly positive in float.

    A proposal that underflows to a hard zero would break the guarantees the
    filters rely on (the lifebelt path needs positive density), so such
    proposals are rejected outright; their prior mass is zero anyway up to
    rounding.
    """
    return probs.p_h > 0.0 and probs.p_d > 0.0 and probs.p_r > 0.0


@dataclass
class GimhState:
    """Current chain state with its recycled likelihood estimate."""

    gamma: np.ndarray
    probs: OutcomeProbs
    loglik: float


@dataclass
class StepRecord:
    """Diagnostics of one chain iteration, about the proposal it evaluated."""

    accepted: bool
    evaluated: bool
    prop_loglik: float
    prop_mean_ess: float
    prop_final_ess: float
    prop_attempts: int
    prop_collapsed: bool
    prop_saturated: bool


_EMPTY_RECORD = dict(
    prop_mean_ess=np.nan,
    prop_final_ess=np.nan,
    prop_attempts=0,
    prop_collapsed=False,
    prop_saturated=False,
)


def _record_from_result(result, accepted: bool) -> StepRecord:
    return StepRecord(
        accepted=accepted,
        evaluated=True,
        prop_loglik=result.loglik,
        prop_mean_ess=result.mean_ess,
        prop_final_ess=result.final_ess,
        prop_attempts=result.total_attempts,
        prop_collapsed=result.collapsed_at is not None,
        prop_saturated=result.saturated,
    )


def gimh_step(
    state: GimhState,
    dataset: Dataset,
    config: FilterConfig,
    scale: float,
    chain_rng: np.random.Generator,
    filter_rng: np.random.Generator,
) -> tuple[GimhState, StepRecord]:
    """One random-walk pseudo-marginal update.

    The proposal's likelihood is estimated with a fresh filter run on
    ``filter_rng``; the current state keeps the estimate from the iteration
    that accepted it.
    """
    gamma_prop = state.gamma + scale * chain_rng.standard_normal(2)

    if np.array_equal(gamma_prop, state.gamma):
        # Identical proposal (scale 0): the ratio is exactly 1 because prior
        # and recycled estimate cancel, so accept without a filter run.
        return state, StepRecord(
            accepted=True, evaluated=False, prop_loglik=state.loglik, **_EMPTY_RECORD
        )

    probs_prop = from_gamma(gamma_prop)
    if not proposal_in_support(probs_prop):
        return state, StepRecord(
            accepted=False, evaluated=False, prop_loglik=-np.inf, **_EMPTY_RECORD
        )

    result = run_filter(dataset, probs_prop, config, rng=filter_rng)
    log_accept = (
        result.loglik
        + log_prior_gamma(gamma_prop)
        - state.loglik
        - log_prior_gamma(state.gamma)
    )
    accepted = result.loglik > -np.inf and np.log(chain_rng.uniform()) < log_accept
    if accepted:
        state = GimhState(gamma=gamma_prop, probs=probs_prop, loglik=result.loglik)
    return state, _record_from_result(result, accepted)


@dataclass
class ChainTrace:
    """Chain output: row 0 is the initial state, rows 1..n the iterations.

    ``loglik`` is the recycled estimate attached to the state occupying each
    row; ``prop_*`` describe the proposal examined at that iteration (row 0
    describes the initialising filter run).  ``evaluated`` is False where no
    filter ran (out-of-support or identical proposals).
    """

    gamma: np.ndarray
    probs: np.ndarray
    loglik: np.ndarray
    log_prior: np.ndarray
    accepted: np.ndarray
    evaluated: np.ndarray
    prop_loglik: np.ndarray
    prop_mean_ess: np.ndarray
    prop_final_ess: np.ndarray
    prop_attempts: np.ndarray
    prop_collapsed: np.ndarray
    prop_saturated: np.ndarray
    scale: float
    seed: Optional[int]
    variant: str

    @property
    def n_iterations(self) -> int:
        return len(self.loglik) - 1

    @property
    def acceptance_rate(self) -> float:
        return float(np.mean(self.accepted[1:]))

    def kept_rows(self, burn_in_fraction: float = 0.1, thin: int = 1) -> np.ndarray:
        """Row indices surviving burn-in and thinning (row 0 never kept)."""
        if not (0.0 <= burn_in_fraction < 1.0):
            raise ValueError("burn_in_fraction must be in [0, 1)")
        if thin < 1:
            raise ValueError("thin must be a positive integer")
        start = 1 + int(np.floor(self.n_iterations * burn_in_fraction))
        return np.arange(start, self.n_iterations + 1, thin)

    def posterior_interval(
        self,
        component: int,
        level: float = 0.95,
        burn_in_fraction: float = 0.1,
        thin: int = 1,
    ) -> tuple[float, float]:
        """Equal-tailed credible interval for one outcome probability."""
        half = (1.0 - level) / 2.0
        draws = self.probs[self.kept_rows(burn_in_fraction, thin), component]
        lo, hi = np.quantile(draws, [half, 1.0 - half])
        return float(lo), float(hi)


def longest_rejection_run(accepted) -> int:
    """Length of the longest streak of consecutive rejections."""
    longest = current = 0
    for a in np.asarray(accepted, dtype=bool):
        current = 0 if a else current + 1
        longest = max(longest, current)
    return longest


def run_pmcmc(
    dataset: Dataset,
    n_iterations: int,
    config: FilterConfig,
    scale: float = 0.3,
    seed: Optional[int] = None,
    init_probs: Optional[OutcomeProbs] = None,
    max_init_tries: int = 100,
) -> ChainTrace:
    """Run the pseudo-marginal chain.

    The master seed is split into a chain stream (proposals and accept
    coins) and a family of per-run filter streams, so likelihood estimates
    are independent across iterations and the whole trace is reproducible.
    Initialisation draws from the prior until the filter returns a finite
    estimate (or uses ``init_probs`` directly, which must be viable).
    """
    if n_iterations < 1:
        raise ValueError("need at least one iteration")
    config.validate_for(dataset.T)
    root = np.random.SeedSequence(seed)
    chain_ss, filter_parent = root.spawn(2)
    chain_rng = np.random.default_rng(chain_ss)

    def fresh_filter_rng() -> np.random.Generator:
        return np.random.default_rng(filter_parent.spawn(1)[0])

    init_record: Optional[StepRecord] = None
    state: Optional[GimhState] = None
    for _ in range(max_init_tries):
        if init_probs is not None:
            probs0 = init_probs
        else:
            probs0 = OutcomeProbs(*chain_rng.dirichlet(np.ones(3)))
            if not proposal_in_support(probs0):
                continue
        result = run_filter(dataset, probs0, config, rng=fresh_filter_rng())
        if result.loglik > -np.inf:
            state = GimhState(gamma=to_gamma(probs0), probs=probs0, loglik=result.loglik)
            init_record = _record_from_result(result, accepted=True)
            break
    if state is None:
        raise RuntimeError(
            f"no initialisation achieved a finite likelihood estimate in "
            f"{max_init_tries} tries; try a different starting point or filter "
            f"configuration"
        )

    n_rows = n_iterations + 1
    trace = ChainTrace(
        gamma=np.empty((n_rows, 2)),
        probs=np.empty((n_rows, 3)),
        loglik=np.empty(n_rows),
        log_prior=np.empty(n_rows),
        accepted=np.zeros(n_rows, dtype=bool),
        evaluated=np.zeros(n_rows, dtype=bool),
        prop_loglik=np.empty(n_rows),
        prop_mean_ess=np.full(n_rows, np.nan),
        prop_final_ess=np.full(n_rows, np.nan),
        prop_attempts=np.zeros(n_rows, dtype=np.int64),
        prop_collapsed=np.zeros(n_rows, dtype=bool),
        prop_saturated=np.zeros(n_rows, dtype=bool),
        scale=scale,
        seed=seed,
        variant=config.variant,
    )

    def write_row(i: int, st: GimhState, rec: StepRecord) -> None:
        trace.gamma[i] = st.gamma
        trace.probs[i] = st.probs.as_array()
        trace.loglik[i] = st.loglik
        trace.log_prior[i] = log_prior_gamma(st.gamma)
        trace.accepted[i] = rec.accepted
        trace.evaluated[i] = rec.evaluated
        trace.prop_loglik[i] = rec.prop_loglik
        trace.prop_mean_ess[i] = rec.prop_mean_ess
        trace.prop_final_ess[i] = rec.prop_final_ess
        trace.prop_attempts[i] = rec.prop_attempts
        trace.prop_collapsed[i] = rec.prop_collapsed
        trace.prop_saturated[i] = rec.prop_saturated

    write_row(0, state, init_record)
    for i in range(1, n_rows):
        state, record = gimh_step(
            state, dataset, config, scale, chain_rng, fresh_filter_rng()
        )
        write_row(i, state, record)
    return trace
