"""Log-domain weight algebra shared by all filters.

Everything operates on log-weights end to end; ``-inf`` is a first-class
value meaning zero weight.  The mixture-weighting helpers implement
deterministic-mixture importance sampling: when component g contributes a
fixed number N_g of draws, each draw is weighted against the pooled density
``(1/N) sum_g N_g q_g`` instead of its own component, which keeps the pooled
estimator exact as long as the component supports jointly cover the target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

__all__ = [
    "ParticleCollapseError",
    "normalize_logweights",
    "ess",
    "multinomial_resample",
    "dmis_logweight",
    "persistent_logweight",
    "accumulate_loglik",
    "MixtureComponent",
    "mixture_covers",
    "dmis_static_estimate",
]


class ParticleCollapseError(RuntimeError):
    """Raised when an operation needs positive weight mass and none is left."""


def normalize_logweights(logw) -> tuple[np.ndarray, float]:
    """Normalise log-weights.

    Returns ``(norm_w, log_mean)`` where ``norm_w`` sums to one and
    ``log_mean = log((1/N) sum exp(logw))`` is the likelihood increment.
    An all ``-inf`` input signals collapse: the weights come back as zeros
    and the log-mean as ``-inf``.
    """
    logw = np.asarray(logw, dtype=float)
    if logw.size == 0:
        raise ValueError("cannot normalise an empty weight vector")
    total = logsumexp(logw)
    if total == -np.inf:
        return np.zeros_like(logw), -np.inf
    return np.exp(logw - total), float(total - np.log(logw.size))


def ess(norm_w) -> float:
    """Effective sample size ``1 / sum(w^2)`` of normalised weights (0 if collapsed)."""
    w = np.asarray(norm_w, dtype=float)
    denom = float(np.sum(w * w))
    return 0.0 if denom == 0.0 else 1.0 / denom


def multinomial_resample(rng: np.random.Generator, norm_w, n_draws: int) -> np.ndarray:
    """Draw ``n_draws`` ancestor indices proportional to the normalised weights."""
    if n_draws < 0:
        raise ValueError("n_draws must be non-negative")
    if n_draws == 0:
        return np.empty(0, dtype=np.int64)
    w = np.asarray(norm_w, dtype=float)
    total = w.sum()
    if total <= 0.0:
        raise ParticleCollapseError("all weights are zero; nothing to resample")
    return rng.choice(len(w), size=n_draws, p=w / total).astype(np.int64)


def dmis_logweight(target_logp, counts, component_logp):
    """Log importance weight of draws against a deterministic mixture.

    Args:
        target_logp: log target density at each draw, shape ``(...,)``.
        counts: number of draws allocated to each component, shape ``(G,)``.
        component_logp: log density of each component at each draw, shape
            ``(G, ...)``; point masses contribute ``0.0`` at their atom and
            ``-inf`` elsewhere.

    A draw where every component density vanishes gets ``-inf``: the mixture
    could never have produced it, which indicates a coverage bug upstream.
    """
    target_logp = np.asarray(target_logp, dtype=float)
    counts = np.asarray(counts, dtype=float)
    component_logp = np.asarray(component_logp, dtype=float)
    if counts.ndim != 1 or counts.shape[0] != component_logp.shape[0]:
        raise ValueError("counts must align with the leading axis of component_logp")
    if np.any(counts <= 0):
        raise ValueError("every mixture component needs a positive draw count")
    n_total = counts.sum()
    shape = (counts.shape[0],) + (1,) * (component_logp.ndim - 1)
    log_mix = logsumexp(np.log(counts).reshape(shape) + component_logp, axis=0) - np.log(n_total)
    log_mix = np.asarray(log_mix, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.where(
            np.isneginf(target_logp) | np.isneginf(log_mix), -np.inf, target_logp - log_mix
        )
    return out[()]


def persistent_logweight(dmis_logw, prev_norm_w):
    """Weight update for particles that skip resampling: multiply by the
    previous normalised weight, in log domain."""
    dmis_logw = np.asarray(dmis_logw, dtype=float)
    prev = np.asarray(prev_norm_w, dtype=float)
    with np.errstate(divide="ignore"):
        log_prev = np.log(prev)
    with np.errstate(invalid="ignore"):
        out = np.where(np.isneginf(dmis_logw) | np.isneginf(log_prev), -np.inf, dmis_logw + log_prev)
    return out[()]


def accumulate_loglik(log_means) -> float:
    """Combine per-step log-mean weights into the likelihood estimate."""
    log_means = np.asarray(log_means, dtype=float)
    if np.any(np.isneginf(log_means)):
        return -np.inf
    return float(np.sum(log_means))


@dataclass(frozen=True)
class MixtureComponent:
    """One block of a deterministic mixture proposal.

    Attributes:
        count: number of draws this component contributes.
        sample: ``sample(rng, size) -> ndarray`` drawing from the component.
        logpmf: log density evaluable at arbitrary points (``0.0`` at the atom
            for a point mass, ``-inf`` off it).
        resample: whether draws from this component pass through resampling;
            persistent components keep their index and previous weight.
    """

    count: int
    sample: Callable[[np.random.Generator, int], np.ndarray]
    logpmf: Callable[[np.ndarray], np.ndarray]
    resample: bool = True

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("component count must be at least 1")


def mixture_covers(components, support, target_logpmf) -> bool:
    """Exhaustively check joint coverage on a finite support.

    True when every point with positive target density gets positive density
    from at least one component.  Individual components may miss points; only
    the union matters.
    """
    support = np.asarray(support)
    target = np.asarray(target_logpmf(support), dtype=float)
    mix = np.full(support.shape, -np.inf)
    for comp in components:
        mix = np.logaddexp(mix, np.asarray(comp.logpmf(support), dtype=float))
    return bool(np.all(np.isneginf(target) | ~np.isneginf(mix)))


def dmis_static_estimate(h, target_logpmf, components, rng: np.random.Generator) -> float:
    """One pooled importance-sampling estimate of ``E_target[h(X)]``.

    Each component contributes exactly its ``count`` draws; all draws are
    weighted against the pooled mixture density and averaged together.
    """
    if not components:
        raise ValueError("need at least one mixture component")
    draws = np.concatenate([np.asarray(c.sample(rng, c.count)) for c in components])
    counts = np.array([c.count for c in components], dtype=float)
    comp_logp = np.stack([np.asarray(c.logpmf(draws), dtype=float) for c in components])
    logw = dmis_logweight(np.asarray(target_logpmf(draws), dtype=float), counts, comp_logp)
    weights = np.exp(logw)
    return float(np.mean(weights * np.asarray(h(draws), dtype=float)))
