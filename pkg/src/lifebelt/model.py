"""Chain-multinomial model of hospital occupancy with fully observed deaths.

During interval t the ``x_{t-1}`` patients still in hospital plus the
``h_{t-1}`` new admissions each independently stay, die or recover with
probabilities ``(p_h, p_d, p_r)``, so

    (X_t, Y_t, Z_t) | x_{t-1}, h_{t-1}  ~  Multinomial(x_{t-1} + h_{t-1}, (p_h, p_d, p_r)).

Deaths ``y_t`` are observed, occupancy ``x_t`` and recoveries ``z_t`` are
latent, and recoveries are always recovered from the conservation identity
``x_t + y_t + z_t = x_{t-1} + h_{t-1}`` rather than stored.  The initial
occupancy has a Poisson prior with configurable rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import gammaln, logsumexp, xlogy

__all__ = [
    "OutcomeProbs",
    "Dataset",
    "LatentPath",
    "X0Prior",
    "x0_prior",
    "transition_logpmf",
    "simulate",
    "cumulative_cfr",
    "exact_loglik",
    "epidemic_pulse",
]

_SIMPLEX_ATOL = 1e-12


@dataclass(frozen=True)
class OutcomeProbs:
    """Per-interval outcome probabilities for one hospitalised patient.

    Attributes:
        p_h: probability of staying in hospital through the interval.
        p_d: probability of dying during the interval.
        p_r: probability of recovering (discharged) during the interval.
    """

    p_h: float
    p_d: float
    p_r: float

    def __post_init__(self) -> None:
        for name in ("p_h", "p_d", "p_r"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0) or not math.isfinite(p):
                raise ValueError(f"{name}={p!r} is outside [0, 1]")
        total = self.p_h + self.p_d + self.p_r
        if abs(total - 1.0) > _SIMPLEX_ATOL:
            raise ValueError(f"outcome probabilities sum to {total!r}, expected 1")

    @property
    def interior(self) -> bool:
        """True when all three probabilities are strictly positive."""
        return self.p_h > 0.0 and self.p_d > 0.0 and self.p_r > 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.p_h, self.p_d, self.p_r])


def _as_count_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(arr)
        if not np.all(np.isfinite(arr)) or np.any(rounded != arr):
            raise ValueError(f"{name} must contain integers")
        arr = rounded
    arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise ValueError(f"{name} must be non-negative")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Dataset:
    """Observed admission and death series.

    ``h[t]`` counts admissions entering during interval t for t = 0..T-1
    (present from the start of interval t+1); ``y[t-1]`` counts the deaths
    observed during interval t for t = 1..T.  The two arrays therefore have
    equal length T and the transition into interval t is driven by
    ``(x_{t-1}, h[t-1], y[t-1])``.

    ``x0_rate`` is the Poisson prior rate for the initial occupancy;
    ``x0_rate == 0.0`` means the prior is the point mass at zero.
    """

    h: np.ndarray
    y: np.ndarray
    x0_rate: float = 1.5

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", _as_count_array(self.h, "h"))
        object.__setattr__(self, "y", _as_count_array(self.y, "y"))
        if len(self.h) != len(self.y):
            raise ValueError(
                f"admissions ({len(self.h)}) and deaths ({len(self.y)}) must have equal length"
            )
        if len(self.h) == 0:
            raise ValueError("series must contain at least one interval")
        if not (math.isfinite(self.x0_rate) and self.x0_rate >= 0.0):
            raise ValueError(f"x0_rate={self.x0_rate!r} must be a non-negative real")

    @property
    def T(self) -> int:
        return len(self.h)


@dataclass(frozen=True)
class LatentPath:
    """A latent trajectory: occupancy ``x[0..T]`` and recoveries ``z[1..T]``."""

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _as_count_array(self.x, "x"))
        object.__setattr__(self, "z", _as_count_array(self.z, "z"))
        if len(self.x) != len(self.z) + 1:
            raise ValueError("x must have one more entry than z")

    def conserves(self, dataset: Dataset) -> bool:
        """Check ``x_t + y_t + z_t == x_{t-1} + h_{t-1}`` at every step."""
        sizes = self.x[:-1] + dataset.h
        return bool(np.all(self.x[1:] + dataset.y + self.z == sizes))


def transition_logpmf(x_prev, h_prev, x_new, deaths, probs: OutcomeProbs):
    """Log-probability of one occupancy transition with its observed deaths.

    Returns ``log P(X_t = x_new, Y_t = deaths | x_prev, h_prev)`` under the
    multinomial split of ``n = x_prev + h_prev`` individuals; recoveries are
    implied as ``z = n - x_new - deaths``.  Infeasible combinations
    (negative counts or ``x_new + deaths > n``) get ``-inf``.  All count
    arguments broadcast.
    """
    x_prev = np.asarray(x_prev, dtype=np.int64)
    h_prev = np.asarray(h_prev, dtype=np.int64)
    x_new = np.asarray(x_new, dtype=np.int64)
    deaths = np.asarray(deaths, dtype=np.int64)
    n = x_prev + h_prev
    z = n - x_new - deaths
    feasible = (x_new >= 0) & (deaths >= 0) & (z >= 0) & (x_prev >= 0) & (h_prev >= 0)
    xs = np.where(feasible, x_new, 0)
    ys = np.where(feasible, deaths, 0)
    zs = np.where(feasible, z, 0)
    ns = xs + ys + zs
    logp = (
        gammaln(ns + 1.0)
        - gammaln(xs + 1.0)
        - gammaln(ys + 1.0)
        - gammaln(zs + 1.0)
        + xlogy(xs, probs.p_h)
        + xlogy(ys, probs.p_d)
        + xlogy(zs, probs.p_r)
    )
    out = np.where(feasible, logp, -np.inf)
    return out[()]


@dataclass(frozen=True)
class X0Prior:
    """Poisson prior over the initial occupancy (rate 0 = point mass at 0)."""

    rate: float

    def logpmf(self, k):
        return stats.poisson.logpmf(np.asarray(k), mu=self.rate)[()]

    def sample(self, rng: np.random.Generator, size=None):
        return rng.poisson(self.rate, size=size)


def x0_prior(rate: float) -> X0Prior:
    """Prior for the day-0 occupancy.  Rejects negative rates."""
    if not (math.isfinite(rate) and rate >= 0.0):
        raise ValueError(f"x0 rate must be a non-negative real, got {rate!r}")
    return X0Prior(rate)


def simulate(
    probs: OutcomeProbs,
    h,
    T: int | None = None,
    x0_rate: float = 1.5,
    seed: int | np.random.Generator | None = None,
) -> tuple[Dataset, LatentPath]:
    """Draw one synthetic death series and its latent path.

    Args:
        probs: outcome probabilities used for every interval.
        h: admission counts for intervals 0..T-1.
        T: optional length check against ``len(h)``.
        x0_rate: Poisson rate of the initial-occupancy prior.
        seed: int seed or a ``numpy.random.Generator``.

    Returns:
        ``(dataset, path)`` where the dataset holds ``(h, y, x0_rate)`` and the
        path the latent occupancies and recoveries.  Identical seeds give
        bit-identical output.
    """
    h = _as_count_array(h, "h")
    if T is not None and T != len(h):
        raise ValueError(f"T={T} does not match len(h)={len(h)}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    prior = x0_prior(x0_rate)
    steps = len(h)
    x = np.empty(steps + 1, dtype=np.int64)
    y = np.empty(steps, dtype=np.int64)
    z = np.empty(steps, dtype=np.int64)
    x[0] = prior.sample(rng)
    pvals = probs.as_array()
    for t in range(1, steps + 1):
        n = int(x[t - 1] + h[t - 1])
        x[t], y[t - 1], z[t - 1] = rng.multinomial(n, pvals)
    dataset = Dataset(h=h, y=y, x0_rate=x0_rate)
    return dataset, LatentPath(x=x, z=z)


def cumulative_cfr(dataset: Dataset) -> np.ndarray:
    """Cumulative deaths over cumulative admissions, per interval.

    The crude fatality ratio ``sum(y[:t]) / sum(h[:t])`` systematically
    misses patients still in hospital.  Entries with zero cumulative
    admissions are undefined and returned as NaN.
    """
    cum_y = np.cumsum(dataset.y, dtype=float)
    cum_h = np.cumsum(dataset.h, dtype=float)
    out = np.full(dataset.T, np.nan)
    np.divide(cum_y, cum_h, out=out, where=cum_h > 0)
    return out


def _x0_cap(rate: float, tail_mass: float) -> int:
    """Smallest k with ``P(X0 > k) < tail_mass``."""
    if rate == 0.0:
        return 0
    k = int(stats.poisson.ppf(1.0 - tail_mass, mu=rate))
    while stats.poisson.sf(k, mu=rate) >= tail_mass:
        k += 1
    return k


def exact_loglik(
    dataset: Dataset,
    probs: OutcomeProbs,
    tail_mass: float = 1e-12,
    max_states: int = 200_000,
) -> float:
    """Exact log-likelihood of the death series by forward summation.

    Marginalises the latent occupancy over a truncated support: the initial
    state is capped where the Poisson upper tail drops below ``tail_mass``
    and every later state is bounded by the cap plus all admissions.  The
    discarded prior mass is below ``tail_mass``, so halving it perturbs the
    result far below any testing tolerance.

    Raises:
        ValueError: if the truncated support exceeds ``max_states`` states
            (the message names the required size).
    """
    if not (0.0 < tail_mass < 1.0):
        raise ValueError("tail_mass must lie in (0, 1)")
    cap0 = _x0_cap(dataset.x0_rate, tail_mass)
    m_max = cap0 + int(dataset.h.sum())
    if m_max + 1 > max_states:
        raise ValueError(
            f"truncated support needs {m_max + 1} states, exceeding max_states={max_states}; "
            "raise max_states or tail_mass"
        )
    states = np.arange(m_max + 1)
    log_alpha = np.full(m_max + 1, -np.inf)
    log_alpha[: cap0 + 1] = stats.poisson.logpmf(states[: cap0 + 1], mu=dataset.x0_rate)
    for t in range(1, dataset.T + 1):
        # A[i, j] = log P(X_t = j, Y_t = y_t | X_{t-1} = i)
        trans = transition_logpmf(
            states[:, None], int(dataset.h[t - 1]), states[None, :], int(dataset.y[t - 1]), probs
        )
        log_alpha = logsumexp(log_alpha[:, None] + trans, axis=0)
    return float(logsumexp(log_alpha))


def epidemic_pulse(
    T: int,
    peak: float,
    center: float,
    width: float,
    seed: int | np.random.Generator | None = None,
) -> np.ndarray:
    """Synthetic epidemic-shaped admission series.

    A Gaussian bump ``peak * exp(-(t - center)^2 / (2 width^2))`` evaluated at
    t = 0..T-1, rounded to counts.  With a seed, each entry is instead drawn
    Poisson around the bump, which produces the spikier series used in the
    bundled experiments.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    if peak < 0 or width <= 0:
        raise ValueError("peak must be non-negative and width positive")
    t = np.arange(T, dtype=float)
    bump = peak * np.exp(-((t - center) ** 2) / (2.0 * width**2))
    if seed is None:
        return np.rint(bump).astype(np.int64)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.poisson(bump).astype(np.int64)
