"""Power-mean pooling of priors and the induced posteriors/predictives.

The degree-t pool of densities π₁..π_k with simplex weights α is the
normalized weighted power mean

    π_{t,α} ∝ (Σ α_i π_i^t)^{1/t}      (finite t ≠ 0)
    π_{0,α} ∝ Π π_i^{α_i}              (geometric)
    π_{±∞,α} ∝ max/min over i          (independent of α)

A single fact drives the posterior/predictive code: the posterior under the
pooled prior is proportional to the same power mean applied to the vector
(m_i(x)·π_i(θ|x))_i.  For t=1 this reduces to mixing the individual
posteriors with weights α_i m_i(x)/m_{1,α}(x); for t=0 the m_i factors
cancel on normalization.  Plain max/min of the posteriors alone would be
wrong for t=±∞.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .distributions import (
    DEFAULT_NODES,
    FiniteDensity,
    FiniteModel,
    GridDensity,
    NormalConjugateSpec,
    normal_posterior,
    prior_predictive_xbar,
)
from .numerics import integrate_trapezoid

__all__ = [
    "PoolSpec",
    "GridLikelihood",
    "InferenceBase",
    "power_mean",
    "pool_constant",
    "pool_priors",
    "pooled_posterior",
    "posterior_pool_weights",
    "pooled_predictive",
    "normal_location_bases",
]

SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class PoolSpec:
    """Pooling degree t (extended real; ±math.inf allowed) and simplex weights α.

    All power-mean evaluations branch on t==0 / isinf(t) before any
    exponentiation, so no floating-infinity arithmetic ever runs.
    """

    t: float
    alpha: np.ndarray

    def __post_init__(self):
        t = float(self.t)
        alpha = np.asarray(self.alpha, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "alpha", alpha)
        if math.isnan(t):
            raise ValueError("t must be an extended real, not NaN")
        if alpha.ndim != 1 or alpha.size < 1:
            raise ValueError("alpha must be a non-empty vector")
        if np.any(alpha < 0):
            raise ValueError("alpha components must be non-negative")
        if abs(alpha.sum() - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"alpha must sum to 1, got {alpha.sum()!r}")


@dataclass(frozen=True)
class GridLikelihood:
    """Likelihood of the observed data evaluated on the prior grid."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("likelihood values must be finite and non-negative")


@dataclass(frozen=True)
class InferenceBase:
    """One analyst's triple (data, model, prior) plus the cached predictive m_i(x)."""

    model: object  # FiniteModel | GridLikelihood
    prior: object  # FiniteDensity | GridDensity
    x: object = None  # observed-data reference (used for shared-data checks)
    m_x: float = field(default=None)

    def __post_init__(self):
        m = _predictive_value(self.model, self.prior, self.x)
        if self.m_x is None:
            object.__setattr__(self, "m_x", m)
        elif not (self.m_x > 0) or abs(self.m_x - m) > 1e-8 * max(1.0, abs(m)):
            raise ValueError(f"cached m_i(x)={self.m_x} disagrees with the integral {m}")
        if not self.m_x > 0:
            raise ValueError("prior predictive m_i(x) must be positive")

    def likelihood_values(self) -> np.ndarray:
        if isinstance(self.model, FiniteModel):
            return self.model.likelihood(self.x)
        return self.model.values

    def posterior(self):
        lik = self.likelihood_values()
        if isinstance(self.prior, FiniteDensity):
            return FiniteDensity.normalized(self.prior.labels, self.prior.masses * lik)
        w = self.prior.values * lik
        peak = w.max()  # scale out before normalizing so tiny products keep precision
        if peak > 0:
            w = w / peak
        return GridDensity.normalized(self.prior.grid, w)


def _predictive_value(model, prior, x) -> float:
    if isinstance(model, FiniteModel):
        if not isinstance(prior, FiniteDensity):
            raise TypeError("finite model requires a finite prior")
        if prior.labels != model.theta_labels:
            raise ValueError("prior labels must match the model's parameter labels")
        return float(prior.masses @ model.likelihood(x))
    if isinstance(model, GridLikelihood):
        if not isinstance(prior, GridDensity):
            raise TypeError("grid likelihood requires a grid prior")
        if model.values.shape != prior.values.shape:
            raise ValueError("likelihood values must live on the prior grid")
        return integrate_trapezoid(prior.values * model.values, prior.step)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def power_mean(alpha, t: float, values: np.ndarray) -> np.ndarray:
    """Unnormalized weighted power mean of rows of `values` (k × m, ≥ 0).

    Components with α_i = 0 are excluded for every t (for t ≥ 0 this agrees
    with the formula; for t < 0 and t = ±∞ it is the stated convention, since
    the weighted limits are otherwise undefined).
    """
    alpha = np.asarray(alpha, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != alpha.size:
        raise ValueError("values must be a (k, m) matrix matching alpha")
    if np.any(values < 0):
        raise ValueError("power mean is defined for non-negative values")
    keep = alpha > 0
    alpha, values = alpha[keep], values[keep]
    if math.isinf(t):
        return values.max(axis=0) if t > 0 else values.min(axis=0)
    with np.errstate(divide="ignore"):
        logv = np.log(values)
    if t == 0.0:
        out = alpha @ logv  # -inf wherever any component vanishes
        return np.where(np.isfinite(out), np.exp(out), 0.0)
    # log of (Σ α_i v_i^t)^{1/t}; zeros propagate correctly through ±inf logs
    # (a zero value with t<0 makes the column +inf, masked to mean 0 below)
    with np.errstate(invalid="ignore", over="ignore"):
        lm = logsumexp(np.log(alpha)[:, None] + t * logv, axis=0) / t
    return np.where(np.isfinite(lm), np.exp(lm), 0.0)


def _density_matrix(densities):
    if len(densities) == 0:
        raise ValueError("need at least one density to pool")
    first = densities[0]
    if isinstance(first, FiniteDensity):
        for d in densities[1:]:
            if not isinstance(d, FiniteDensity) or d.labels != first.labels:
                raise ValueError("all densities must share one label set")
        return np.vstack([d.masses for d in densities]), ("finite", first.labels)
    if isinstance(first, GridDensity):
        for d in densities[1:]:
            if (
                not isinstance(d, GridDensity)
                or d.values.size != first.values.size
                or not math.isclose(d.lo, first.lo, rel_tol=1e-12, abs_tol=1e-12)
                or not math.isclose(d.hi, first.hi, rel_tol=1e-12, abs_tol=1e-12)
            ):
                raise ValueError("all densities must share one grid")
        return np.vstack([d.values for d in densities]), ("grid", first)
    raise TypeError(f"unsupported density type {type(first).__name__}")


def _normalize_on(kind, mean_values):
    tag, ref = kind
    total = mean_values.sum() if tag == "finite" else integrate_trapezoid(mean_values, ref.step)
    if not total > 0:
        raise ValueError("pooled density has zero total mass (t=0 with disjoint supports?)")
    if tag == "finite":
        return FiniteDensity(ref, mean_values / total)
    return GridDensity(ref.lo, ref.hi, mean_values / total, ref.step)


def _check_t_gt1_tails(mean_values: np.ndarray, t: float):
    # On a bare grid we cannot extend the range, so flag non-negligible mass
    # in the outermost 2.5% of nodes as a sign the mean may not normalize.
    edge = max(1, int(0.025 * mean_values.size))
    total = mean_values.sum()
    if total > 0 and (mean_values[:edge].sum() > 1e-6 * total or mean_values[-edge:].sum() > 1e-6 * total):
        raise ValueError(
            f"degree-{t} pool carries non-negligible mass at the grid boundary; "
            "the power mean may not be normalizable on an extended range"
        )


def pool_priors(priors, spec: PoolSpec):
    """Normalized degree-t pool of the given densities."""
    matrix, kind = _density_matrix(priors)
    if matrix.shape[0] != spec.alpha.size:
        raise ValueError("one weight per prior required")
    mean = power_mean(spec.alpha, spec.t, matrix)
    if kind[0] == "grid" and spec.t > 1:
        _check_t_gt1_tails(mean, spec.t)
    return _normalize_on(kind, mean)


def pool_constant(priors, spec: PoolSpec) -> float:
    """Normalizing constant c_t(α, π·) = 1 / ∫ (degree-t power mean)."""
    matrix, kind = _density_matrix(priors)
    mean = power_mean(spec.alpha, spec.t, matrix)
    tag, ref = kind
    total = mean.sum() if tag == "finite" else integrate_trapezoid(mean, ref.step)
    if not total > 0:
        raise ValueError("power mean has zero total mass; c_t undefined")
    return 1.0 / total


def _check_common_context(bases, require_common_model: bool):
    """Same observed data always; same sampling model unless t=1.

    The linear pool is the one degree that stays meaningful when the bases
    carry different (e.g. prior-integrated) likelihoods — it is Jeffrey
    conditionalization of the mixture prior, with weights α_i m_i(x).
    """
    if len(bases) == 0:
        raise ValueError("need at least one inference base")
    first = bases[0]
    lik0 = first.likelihood_values()
    for b in bases[1:]:
        if b.x != first.x:
            raise ValueError("bases must observe the same data")
        if not require_common_model:
            continue
        if type(b.model) is not type(first.model):
            raise ValueError("bases must share one model type to pool with t != 1")
        if isinstance(b.model, FiniteModel):
            same = (
                b.model.theta_labels == first.model.theta_labels
                and b.model.x_labels == first.model.x_labels
                and np.array_equal(b.model.table, first.model.table)
            )
        else:
            same = np.array_equal(b.likelihood_values(), lik0)
        if not same:
            raise ValueError(
                "bases must share one sampling model for degrees t != 1"
            )


def pooled_posterior(bases, spec: PoolSpec):
    """Posterior under the degree-t pooled prior (shared model and data).

    Equals the normalized power mean of (m_i(x)·π_i(θ|x))_i, which for t=1
    is the mixture of the individual posteriors with weights
    α_i m_i(x)/m_{1,α}(x).
    """
    _check_common_context(bases, require_common_model=spec.t != 1.0)
    priors = [b.prior for b in bases]
    matrix, kind = _density_matrix(priors)
    if matrix.shape[0] != spec.alpha.size:
        raise ValueError("one weight per base required")
    liks = np.vstack([b.likelihood_values() for b in bases])
    scaled = matrix * liks  # rows ∝ m_i(x)·π_i(θ|x)
    mean = power_mean(spec.alpha, spec.t, scaled)
    return _normalize_on(kind, mean)


def posterior_pool_weights(bases, spec: PoolSpec) -> np.ndarray:
    """Mixture weights α_i m_i(x) / m_{1,α}(x) of the t=1 pooled posterior."""
    if len(bases) != spec.alpha.size:
        raise ValueError("one weight per base required")
    raw = spec.alpha * np.array([b.m_x for b in bases])
    return raw / raw.sum()


def pooled_predictive(bases, spec: PoolSpec) -> float:
    """Prior predictive m_{t,α}(x) of the observed data under the pooled prior."""
    _check_common_context(bases, require_common_model=spec.t != 1.0)
    if spec.t == 1.0:
        if len(bases) != spec.alpha.size:
            raise ValueError("one weight per base required")
        return float(spec.alpha @ np.array([b.m_x for b in bases]))
    pooled_prior = pool_priors([b.prior for b in bases], spec)
    lik = bases[0].likelihood_values()
    if isinstance(pooled_prior, FiniteDensity):
        return float(pooled_prior.masses @ lik)
    return integrate_trapezoid(pooled_prior.values * lik, pooled_prior.step)


def normal_location_bases(specs, nodes: int = DEFAULT_NODES, span: float = 8.0):
    """Bases for normal-location analysts sharing one sampling model and data set.

    Builds a common grid covering every prior and likelihood bulk
    (means ± `span` standard deviations), then returns one InferenceBase per
    spec with the N(μ_i, τ_i²) prior and the x̄ likelihood on that grid.
    """
    specs = list(specs)
    if not specs:
        raise ValueError("need at least one conjugate spec")
    s0 = specs[0]
    if any(s.sigma0_sq != s0.sigma0_sq or s.n != s0.n or s.xbar != s0.xbar for s in specs):
        raise ValueError("all specs must share sigma0_sq, n and xbar")
    lik_sd = math.sqrt(s0.sigma0_sq / s0.n)
    lows = [s.mu - span * math.sqrt(s.tau2) for s in specs] + [s0.xbar - span * lik_sd]
    highs = [s.mu + span * math.sqrt(s.tau2) for s in specs] + [s0.xbar + span * lik_sd]
    grid = np.linspace(min(lows), max(highs), nodes)
    lik = GridLikelihood(
        np.exp(-0.5 * (s0.xbar - grid) ** 2 / lik_sd**2) / math.sqrt(2 * math.pi * lik_sd**2)
    )
    bases = []
    for s in specs:
        prior = GridDensity.normalized(
            grid, np.exp(-0.5 * (grid - s.mu) ** 2 / s.tau2) / math.sqrt(2 * math.pi * s.tau2)
        )
        bases.append(InferenceBase(model=lik, prior=prior, x=("xbar", s0.xbar, s0.n)))
    return bases


def conjugate_cross_check(spec: NormalConjugateSpec, base: InferenceBase) -> tuple[float, float]:
    """Exact (posterior mean, m_i(x̄)) pair for validating a grid base."""
    mean, _ = normal_posterior(spec)
    return mean, prior_predictive_xbar(spec)
