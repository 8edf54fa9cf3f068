"""Particle filters for the hospitalisation-death chain-multinomial model.

Four variants share one likelihood target:

* ``bpf``: plain sequential importance resampling.  Each particle proposes
  the surviving occupancy from the death-conditioned binomial kernel; a
  particle whose ancestor cannot produce the observed deaths gets zero
  weight.  Total collapse is a legitimate outcome (likelihood estimate 0).
* ``lbpf``: same swarm plus one persistent "lifebelt" particle pinned to the
  deterministic zero-recovery path, which by construction can always absorb
  the observed death series.  The persistent particle never resamples; the
  swarm and the lifebelt are combined by deterministic-mixture importance
  weights on the extended (ancestor, state) space, which keeps the
  likelihood estimate exactly unbiased.
* ``lbpf_fleet``: a fleet of persistent particles that start on the
  zero-recovery path and peel off one per step onto the stochastic kernel,
  populating the neighbourhood of the path instead of a single atom.
* ``apf``: alive filter.  Proposals are retried until the target number of
  finite-weight particles is collected, with a negative-binomial style
  correction that keeps the estimate unbiased in the number of attempts.

All weights live in log space; ``-inf`` means a dead particle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from .model import Dataset, OutcomeProbs, transition_logpmf, x0_prior
from .smc import accumulate_loglik, ess, multinomial_resample, normalize_logweights

__all__ = [
    "FilterInvariantError",
    "FilterConfig",
    "FilterResult",
    "Trajectories",
    "VARIANTS",
    "lifebelt_init",
    "survivor_fraction",
    "validate_filter_probs",
    "propose_remaining",
    "remaining_logpmf",
    "step_logweight",
    "boundary_path",
    "persistent_on_boundary",
    "run_filter",
    "run_bpf",
    "run_lbpf",
    "run_lbpf_fleet",
    "run_apf",
]

VARIANTS = ("bpf", "lbpf", "lbpf_fleet", "apf")

GROUP_RESAMPLED = "resampled"
GROUP_FLEET = "fleet"
GROUP_LIFEBELT = "lifebelt"

# The alive filter draws proposals in fixed-size batches so that the random
# stream advances the same way no matter where the stopping attempt lands.
APF_FIRST_CHUNK = 2048
APF_CHUNK = 16384


class FilterInvariantError(RuntimeError):
    """A guarantee of the lifebelt construction was violated at run time.

    The persistent particle is built so that it always carries positive
    weight; losing every particle in a lifebelt variant therefore means the
    inputs break an assumption (for example a boundary outcome probability
    of exactly zero) and the run aborts rather than reporting a zero
    likelihood it cannot certify.
    """


def survivor_fraction(probs: OutcomeProbs) -> float:
    """Probability of remaining hospitalised given survival of the interval."""
    denom = probs.p_h + probs.p_r
    if denom <= 0.0:
        return 0.0
    return probs.p_h / denom


def validate_filter_probs(probs: OutcomeProbs) -> None:
    """Reject outcome probabilities the filters cannot run on.

    The death-conditioned proposal needs ``p_d < 1`` (otherwise its success
    probability is 0/0) and the zero-recovery fallback path needs
    ``p_h > 0`` to be reachable.  Other boundaries (``p_d = 0``, ``p_r = 0``)
    are legitimate degenerate models and stay allowed.
    """
    if probs.p_d >= 1.0:
        raise ValueError(
            "filters need p_d < 1: conditioning on survival is undefined when "
            "every individual dies"
        )
    if probs.p_h <= 0.0:
        raise ValueError(
            "filters need p_h > 0: with no probability of remaining "
            "hospitalised the fallback path has zero density"
        )


def lifebelt_init(dataset: Dataset) -> int:
    """Smallest initial occupancy from which the zero-recovery path stays
    non-negative through every observed death count."""
    deficit = np.cumsum(dataset.y.astype(np.int64) - dataset.h.astype(np.int64))
    return int(max(0, deficit.max()))


def boundary_path(dataset: Dataset, x0: Optional[int] = None) -> np.ndarray:
    """Occupancy path under zero recoveries, ``x_t = x_{t-1} + h_{t-1} - y_t``.

    Returns the length ``T + 1`` path starting from ``x0`` (the minimal safe
    start by default).
    """
    start = lifebelt_init(dataset) if x0 is None else int(x0)
    steps = dataset.h.astype(np.int64) - dataset.y.astype(np.int64)
    path = np.concatenate([[start], start + np.cumsum(steps)])
    return path


def propose_remaining(rng, x_prev, h_prev, deaths, probs: OutcomeProbs):
    """Sample survivors-remaining from ``Binomial(n - deaths, p_h/(p_h+p_r))``.

    Returns ``(x_new, alive)``.  Ancestors with fewer individuals than
    observed deaths cannot propose at all: they come back with the sentinel
    value 0 and ``alive=False``.
    """
    x_prev = np.asarray(x_prev, dtype=np.int64)
    m = x_prev + np.int64(h_prev) - np.int64(deaths)
    alive = m >= 0
    draws = rng.binomial(np.maximum(m, 0), survivor_fraction(probs))
    x_new = np.where(alive, draws, 0).astype(np.int64)
    return x_new[()], alive[()]


def remaining_logpmf(x_new, x_prev, h_prev, deaths, probs: OutcomeProbs):
    """Log-pmf of the proposal kernel used by ``propose_remaining``."""
    x_new = np.asarray(x_new, dtype=np.int64)
    x_prev = np.asarray(x_prev, dtype=np.int64)
    m = x_prev + np.int64(h_prev) - np.int64(deaths)
    p = survivor_fraction(probs)
    feasible = (m >= 0) & (x_new >= 0) & (x_new <= m)
    ms = np.where(feasible, m, 0)
    xs = np.where(feasible, x_new, 0)
    logp = (
        gammaln(ms + 1.0)
        - gammaln(xs + 1.0)
        - gammaln(ms - xs + 1.0)
        + xlogy(xs, p)
        + xlogy(ms - xs, 1.0 - p)
    )
    out = np.where(feasible, logp, -np.inf)
    return out[()]


def step_logweight(x_prev, h_prev, x_new, deaths, probs: OutcomeProbs):
    """Incremental log-weight ``log p(x_new, deaths | x_prev) - log q(x_new)``.

    Only meaningful where ``x_new`` lies in the proposal support; outside it
    the transition term is ``-inf`` and so is the result.
    """
    num = transition_logpmf(x_prev, h_prev, x_new, deaths, probs)
    den = remaining_logpmf(x_new, x_prev, h_prev, deaths, probs)
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.where(np.isneginf(num), -np.inf, num - den)
    return out[()]


def persistent_on_boundary(t: int, n_persistent: int) -> np.ndarray:
    """Which persistent slots still follow the zero-recovery point mass at
    step ``t``.

    Slot layout within the persistent block: slots ``0 .. n_persistent - 2``
    are fleet members, slot ``j`` staying on the path through step ``j + 1``
    and proposing stochastically afterwards; the last slot is the permanent
    lifebelt and never leaves the path.
    """
    if t < 1:
        raise ValueError("steps are numbered from 1")
    mask = np.zeros(n_persistent, dtype=bool)
    if n_persistent:
        mask[-1] = True
        fleet = np.arange(n_persistent - 1)
        mask[:-1] = t <= fleet + 1
    return mask


@dataclass(frozen=True)
class FilterConfig:
    """Settings shared by every filter variant.

    ``exact_t0_weights`` replaces the uniform initial weighting with exact
    mixture importance weights against the occupancy prior (plus the matching
    day-0 likelihood factor).  It only changes behaviour for lifebelt
    variants, where the persistent particles are injected atoms rather than
    prior draws; with it the likelihood estimate is unbiased, without it the
    initial swarm over-represents the injected states by ``O(1/N)``.
    """

    variant: str = "lbpf"
    n_particles: int = 500
    apf_cap: int = 1_000_000
    exact_t0_weights: bool = False
    record_trajectories: bool = False
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown filter variant {self.variant!r}; pick one of {VARIANTS}")
        if int(self.n_particles) != self.n_particles or self.n_particles < 1:
            raise ValueError("n_particles must be a positive integer")
        if self.variant == "apf" and self.n_particles < 2:
            raise ValueError("the alive filter needs at least 2 particles")
        if int(self.apf_cap) != self.apf_cap or self.apf_cap < 1:
            raise ValueError("apf_cap must be a positive integer")

    def n_persistent(self, T: int) -> int:
        if self.variant == "lbpf":
            return 1
        if self.variant == "lbpf_fleet":
            return T + 1
        return 0

    def validate_for(self, T: int) -> None:
        """Check constraints that depend on the series length."""
        n_pers = self.n_persistent(T)
        if self.n_particles < n_pers + 1:
            raise ValueError(
                f"variant {self.variant!r} on a length-{T} series keeps {n_pers} "
                f"persistent particles and needs n_particles >= {n_pers + 1}, "
                f"got {self.n_particles}"
            )
        if self.variant == "apf" and self.apf_cap < self.n_particles:
            raise ValueError("apf_cap must be at least n_particles")


@dataclass
class Trajectories:
    """Flat per-(step, particle) record of the swarm, for plotting.

    ``resampled_from`` holds the ancestor index in the previous swarm, the
    particle's own index when it persisted without resampling, and ``-1`` for
    the initial generation.
    """

    t: np.ndarray
    particle: np.ndarray
    x: np.ndarray
    norm_w: np.ndarray
    group: np.ndarray
    resampled_from: np.ndarray


class _TrajectoryRecorder:
    def __init__(self, enabled: bool) -> None:
        self.enabled = enabled
        self.rows: list[tuple] = []

    def add(self, t, x, norm_w, groups, resampled_from) -> None:
        if not self.enabled:
            return
        n = len(x)
        self.rows.append(
            (
                np.full(n, t, dtype=np.int64),
                np.arange(n, dtype=np.int64),
                np.asarray(x, dtype=np.int64).copy(),
                np.asarray(norm_w, dtype=float).copy(),
                np.asarray(groups, dtype=object).copy(),
                np.asarray(resampled_from, dtype=np.int64).copy(),
            )
        )

    def build(self) -> Optional[Trajectories]:
        if not self.enabled:
            return None
        cols = [np.concatenate(c) for c in zip(*self.rows)]
        return Trajectories(*cols)


@dataclass
class FilterResult:
    """Outcome of one filter run.

    ``ess_per_t`` has one entry per time index 0..T: the effective sample
    size of the initial weights followed by the post-update ESS at each
    step.  ``collapsed_at`` is the step at which every particle died (plain
    and alive variants only); entries after a collapse stay zero.
    ``attempts_per_t`` is alive-filter specific: proposals spent per step,
    zero after an early stop.  ``persistent_log_norm_w`` (lifebelt variants
    only) tracks the permanent particle's log normalised weight at each
    time index; the safety guarantee is exactly that every entry is finite.
    """

    loglik: float
    ess_per_t: np.ndarray
    collapsed_at: Optional[int]
    attempts_per_t: Optional[np.ndarray]
    seed: Optional[int]
    variant: str
    n_particles: int
    saturated: bool = False
    persistent_log_norm_w: Optional[np.ndarray] = None
    trajectories: Optional[Trajectories] = None

    @property
    def collapsed(self) -> bool:
        return self.collapsed_at is not None

    @property
    def total_attempts(self) -> int:
        """Proposals spent over the whole run.

        The alive filter's attempt count is random; every other variant
        proposes exactly once per particle per step.
        """
        if self.attempts_per_t is not None:
            return int(self.attempts_per_t.sum())
        return self.n_particles * (len(self.ess_per_t) - 1)

    @property
    def final_ess(self) -> float:
        return float(self.ess_per_t[-1])

    @property
    def mean_ess(self) -> float:
        return float(np.mean(self.ess_per_t))

    def to_json_dict(self) -> dict:
        out = {
            "variant": self.variant,
            "n_particles": self.n_particles,
            "loglik": self.loglik,
            "collapsed_at": self.collapsed_at,
            "ess_per_t": [float(v) for v in self.ess_per_t],
            "total_attempts": self.total_attempts,
            "seed": self.seed,
        }
        if self.attempts_per_t is not None:
            out["attempts_per_t"] = [int(v) for v in self.attempts_per_t]
            out["saturated"] = self.saturated
        if self.persistent_log_norm_w is not None:
            out["persistent_log_norm_w"] = [
                float(v) for v in self.persistent_log_norm_w
            ]
        return out


def _init_swarm(dataset, config, rng, recorder):
    """Initial generation: prior draws plus persistent atoms at the lifebelt
    start.  Returns ``(x, norm_w, log_mean0, groups)``."""
    T = dataset.T
    N = config.n_particles
    n_pers = config.n_persistent(T)
    n_res = N - n_pers
    prior = x0_prior(dataset.x0_rate)

    x = np.empty(N, dtype=np.int64)
    x[:n_res] = prior.sample(rng, n_res)
    groups = np.array([GROUP_RESAMPLED] * N, dtype=object)
    if n_pers:
        x[n_res:] = lifebelt_init(dataset)
        groups[n_res:-1] = GROUP_FLEET
        groups[-1] = GROUP_LIFEBELT

    if config.exact_t0_weights and n_pers:
        # Mixture importance weights: n_res prior draws pooled with n_pers
        # injected atoms, targeting the prior itself.  The log-mean enters
        # the likelihood as a day-0 factor with unit expectation.
        prior_logp = prior.logpmf(x)
        atom_logp = np.where(x == x[-1], 0.0, -np.inf)
        log_mix = np.logaddexp(
            np.log(n_res) + prior_logp, np.log(n_pers) + atom_logp
        ) - np.log(N)
        with np.errstate(invalid="ignore"):
            logw0 = np.where(np.isneginf(prior_logp), -np.inf, prior_logp - log_mix)
        norm_w, log_mean0 = normalize_logweights(logw0)
        if log_mean0 == -np.inf:
            raise FilterInvariantError(
                "initial weights collapsed: the occupancy prior puts no mass "
                "anywhere the initial swarm landed"
            )
    else:
        norm_w = np.full(N, 1.0 / N)
        log_mean0 = 0.0

    recorder.add(0, x, norm_w, groups, np.full(N, -1, dtype=np.int64))
    return x, norm_w, log_mean0, groups


def _run_conditional_filter(dataset, probs, config, rng) -> FilterResult:
    """Shared engine for ``bpf``, ``lbpf`` and ``lbpf_fleet``.

    Each step resamples ancestors for the non-persistent block, advances the
    persistent block along its own dynamics, and weights every particle
    against the pooled proposal density on the (ancestor, state) space:

        w = w_prev(a) * p(x, y | x_a) / q_mix(a, x)
        q_mix(a, x) = (n_res * w_prev(a) * q1(x | x_a)
                       + 1[a persistent] * q_dyn_a(x | x_a)) / N

    where ``q1`` is the death-conditioned binomial kernel and ``q_dyn_a`` the
    persistent particle's own kernel (point mass on the zero-recovery path,
    or ``q1`` after a fleet member peels off).  Matching the denominator to
    the realised ancestor keeps the likelihood estimate exactly unbiased even
    though persistent particles never resample.
    """
    T = dataset.T
    N = config.n_particles
    n_pers = config.n_persistent(T)
    n_res = N - n_pers
    log_n_res = np.log(n_res)
    recorder = _TrajectoryRecorder(config.record_trajectories)

    x, norm_w, log_mean0, groups = _init_swarm(dataset, config, rng, recorder)
    # Weights are carried between steps in log form: the persistent block
    # must survive even when its normalised weight underflows the linear
    # float range, which happens under extreme model-data mismatch.
    with np.errstate(divide="ignore"):
        log_norm_w = np.log(norm_w)
    increments = [log_mean0]
    ess_per_t = np.zeros(T + 1)
    ess_per_t[0] = ess(norm_w)
    belt_logw = None
    if n_pers:
        belt_logw = np.full(T + 1, -np.inf)
        belt_logw[0] = log_norm_w[-1]

    for t in range(1, T + 1):
        h_prev = int(dataset.h[t - 1])
        deaths = int(dataset.y[t - 1])
        resample_now = not (config.variant == "bpf" and t == 1)

        if resample_now:
            anc = np.empty(N, dtype=np.int64)
            anc[:n_res] = multinomial_resample(rng, norm_w, n_res)
            anc[n_res:] = np.arange(n_res, N)
        else:
            anc = np.arange(N, dtype=np.int64)
        x_anc = x[anc]

        x_new = np.empty(N, dtype=np.int64)
        x_new[:n_res], _ = propose_remaining(rng, x_anc[:n_res], h_prev, deaths, probs)
        if n_pers:
            on_path = persistent_on_boundary(t, n_pers)
            atoms = x[n_res:] + h_prev - deaths
            if np.any(atoms[on_path] < 0):
                raise FilterInvariantError(
                    "zero-recovery path went negative for an on-path particle; "
                    "the lifebelt start should have prevented this"
                )
            pers_x = np.where(atoms >= 0, atoms, 0)
            off_path = ~on_path
            if np.any(off_path):
                drawn, _ = propose_remaining(
                    rng, x[n_res:][off_path], h_prev, deaths, probs
                )
                pers_x[off_path] = drawn
            x_new[n_res:] = pers_x

        log_w_anc = log_norm_w[anc]
        target = transition_logpmf(x_anc, h_prev, x_new, deaths, probs)
        numerator = log_w_anc + target

        if resample_now:
            q1_at_draw = remaining_logpmf(x_new, x_anc, h_prev, deaths, probs)
            term_resample = log_n_res + log_w_anc + q1_at_draw
            term_dyn = np.full(N, -np.inf)
            if n_pers:
                pers_anc = anc >= n_res
                slot = anc[pers_anc] - n_res
                anc_on_path = on_path[slot]
                anc_atom = atoms[slot]
                dyn = np.where(
                    anc_on_path,
                    np.where(x_new[pers_anc] == anc_atom, 0.0, -np.inf),
                    q1_at_draw[pers_anc],
                )
                term_dyn[pers_anc] = dyn
            log_mix = np.logaddexp(term_resample, term_dyn) - np.log(N)
        else:
            # No resampling this step: slot n proposes from its own kernel,
            # so the pooled density is (1/N) q1(x | x_n).
            log_mix = remaining_logpmf(x_new, x_anc, h_prev, deaths, probs) - np.log(N)

        with np.errstate(invalid="ignore"):
            logw = np.where(np.isneginf(numerator), -np.inf, numerator - log_mix)

        norm_w, log_mean = normalize_logweights(logw)
        if log_mean == -np.inf:
            if n_pers:
                raise FilterInvariantError(
                    f"every particle died at step {t} despite the lifebelt; "
                    "check for boundary outcome probabilities"
                )
            increments.append(-np.inf)
            recorder.add(t, x_new, norm_w, groups, anc)
            return FilterResult(
                loglik=-np.inf,
                ess_per_t=ess_per_t,
                collapsed_at=t,
                attempts_per_t=None,
                seed=config.seed,
                variant=config.variant,
                n_particles=N,
                trajectories=recorder.build(),
            )

        increments.append(log_mean)
        ess_per_t[t] = ess(norm_w)
        log_norm_w = logw - (log_mean + np.log(N))
        if belt_logw is not None:
            belt_logw[t] = log_norm_w[-1]
        x = x_new
        recorder.add(t, x, norm_w, groups, anc)

    return FilterResult(
        loglik=accumulate_loglik(increments),
        ess_per_t=ess_per_t,
        collapsed_at=None,
        attempts_per_t=None,
        seed=config.seed,
        variant=config.variant,
        n_particles=N,
        persistent_log_norm_w=belt_logw,
        trajectories=recorder.build(),
    )


def _apf_chunks(cap: int):
    used = 0
    size = APF_FIRST_CHUNK
    while used < cap:
        step = min(size, cap - used)
        yield step
        used += step
        size = APF_CHUNK


def _run_apf(dataset, probs, config, rng) -> FilterResult:
    """Alive filter: retry proposals until ``N`` particles survive.

    Per step, ancestors are drawn one per proposal from the current weights
    and pushed through the binomial kernel until the ``N``-th finite-weight
    proposal appears at attempt ``n_t``; the likelihood increment averages
    the weights of the first ``n_t - 1`` attempts, which is unbiased for the
    same target the other variants estimate.  If the attempt cap is hit the
    increment falls back to the mean over all attempts and the swarm carries
    whatever survived (a flagged, slightly biased rescue); if nothing
    survived the run reports a collapse.
    """
    T = dataset.T
    N = config.n_particles
    cap = config.apf_cap
    recorder = _TrajectoryRecorder(config.record_trajectories)
    prior = x0_prior(dataset.x0_rate)

    x = prior.sample(rng, N).astype(np.int64)
    norm_w = np.full(N, 1.0 / N)
    groups_full = np.array([GROUP_RESAMPLED] * N, dtype=object)
    recorder.add(0, x, norm_w, groups_full, np.full(N, -1, dtype=np.int64))

    increments = [0.0]
    ess_per_t = np.zeros(T + 1)
    ess_per_t[0] = ess(norm_w)
    attempts_per_t = np.zeros(T, dtype=np.int64)
    hit_cap = False

    for t in range(1, T + 1):
        h_prev = int(dataset.h[t - 1])
        deaths = int(dataset.y[t - 1])

        parents_all = []
        x_all = []
        logw_all = []
        alive_total = 0
        attempts = 0
        stop_attempt = None

        for chunk in _apf_chunks(cap):
            parents = multinomial_resample(rng, norm_w, chunk)
            x_prop, _ = propose_remaining(rng, x[parents], h_prev, deaths, probs)
            logw = step_logweight(x[parents], h_prev, x_prop, deaths, probs)
            logw = np.atleast_1d(np.asarray(logw, dtype=float))
            parents_all.append(parents)
            x_all.append(x_prop)
            logw_all.append(logw)
            alive = ~np.isneginf(logw)
            new_alive = int(alive.sum())
            if alive_total + new_alive >= N and stop_attempt is None:
                needed = N - alive_total
                kth_in_chunk = np.flatnonzero(alive)[needed - 1]
                stop_attempt = attempts + int(kth_in_chunk) + 1
                attempts = stop_attempt
                alive_total = N
                break
            alive_total += new_alive
            attempts += chunk

        parents_all = np.concatenate(parents_all)
        x_all = np.concatenate(x_all)
        logw_all = np.concatenate(logw_all)

        if stop_attempt is not None:
            attempts_per_t[t - 1] = stop_attempt
            increment = float(logsumexp(logw_all[: stop_attempt - 1]) - np.log(stop_attempt - 1))
            alive_idx = np.flatnonzero(~np.isneginf(logw_all[:stop_attempt]))[:N]
        else:
            attempts_per_t[t - 1] = cap
            hit_cap = True
            alive_idx = np.flatnonzero(~np.isneginf(logw_all))
            if alive_idx.size == 0:
                increments.append(-np.inf)
                ess_per_t[t] = 0.0
                return FilterResult(
                    loglik=-np.inf,
                    ess_per_t=ess_per_t,
                    collapsed_at=t,
                    attempts_per_t=attempts_per_t,
                    seed=config.seed,
                    variant=config.variant,
                    n_particles=N,
                    saturated=True,
                    trajectories=recorder.build(),
                )
            increment = float(logsumexp(logw_all) - np.log(cap))

        increments.append(increment)
        x = x_all[alive_idx]
        norm_w, _ = normalize_logweights(logw_all[alive_idx])
        ess_per_t[t] = ess(norm_w)
        recorder.add(
            t,
            x,
            norm_w,
            np.array([GROUP_RESAMPLED] * x.size, dtype=object),
            parents_all[alive_idx],
        )

    return FilterResult(
        loglik=accumulate_loglik(increments),
        ess_per_t=ess_per_t,
        collapsed_at=None,
        attempts_per_t=attempts_per_t,
        seed=config.seed,
        variant=config.variant,
        n_particles=N,
        saturated=hit_cap,
        trajectories=recorder.build(),
    )


def run_filter(
    dataset: Dataset,
    probs: OutcomeProbs,
    config: FilterConfig,
    rng: Optional[np.random.Generator] = None,
) -> FilterResult:
    """Run the configured filter variant and return its result.

    ``rng`` overrides the config seed, which callers running many filters
    (grids, chains) use to hand out independent streams.
    """
    config.validate_for(dataset.T)
    validate_filter_probs(probs)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    if config.variant == "apf":
        return _run_apf(dataset, probs, config, rng)
    return _run_conditional_filter(dataset, probs, config, rng)


def run_bpf(dataset, probs, n_particles=500, seed=None, **kw) -> FilterResult:
    return run_filter(
        dataset, probs, FilterConfig(variant="bpf", n_particles=n_particles, seed=seed, **kw)
    )


def run_lbpf(dataset, probs, n_particles=500, seed=None, **kw) -> FilterResult:
    return run_filter(
        dataset, probs, FilterConfig(variant="lbpf", n_particles=n_particles, seed=seed, **kw)
    )


def run_lbpf_fleet(dataset, probs, n_particles=500, seed=None, **kw) -> FilterResult:
    return run_filter(
        dataset,
        probs,
        FilterConfig(variant="lbpf_fleet", n_particles=n_particles, seed=seed, **kw),
    )


def run_apf(dataset, probs, n_particles=500, seed=None, **kw) -> FilterResult:
    return run_filter(
        dataset, probs, FilterConfig(variant="apf", n_particles=n_particles, seed=seed, **kw)
    )
