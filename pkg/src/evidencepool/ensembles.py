"""Combining analysts who share data but not necessarily a sampling model.

With one common data set x and possibly different models, evidence about a
common quantity ψ combines by the linear rule

    RB*(ψ|x) = Σ w_i · RB_i(ψ|x),   w_i ∝ α_i m_i(x),

and belief updates by Jeffrey conditionalization:

    π*(ψ|x) = Σ w_i · π_i(ψ|x).

The weights admit two refinements.  When each model has an ancillary A(x),
conditioning replaces m_i(x) by m_i(L(x)|A(x)) — the RB functions themselves
are unaffected, only the weights move.  When the bases share a discretization
into cells with model-specific cell probabilities, the condition-★ adjustment
divides out the multinomial cell-count mass: w_i ∝ (α*_i/f_i(n̆))·m_i(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import stats

from .distributions import (
    DEFAULT_NODES,
    FiniteDensity,
    GridDensity,
    NormalConjugateSpec,
    normal_posterior,
)
from .evidence import (
    EvidenceFunction,
    EvidenceSummary,
    combine_evidence_linear,
    relative_belief,
    summarize,
)
from .numerics import integrate_trapezoid, uniform_grid
from .pooling import InferenceBase, normal_location_bases

__all__ = [
    "HeterogeneousEnsemble",
    "AncillarySpec",
    "ConditionStarSpec",
    "conjugate_ensemble",
    "resolve_weights",
    "mixture_rb",
    "jeffrey_posterior",
    "ancillary_weights",
    "condition_star_weights",
    "location_ancillary_predictive",
    "load_location_sample",
    "predict",
    "prediction_full_rb",
]


@dataclass(frozen=True)
class AncillarySpec:
    """Ancillary conditioning for the weights: w_i ∝ α_i·m_i(L(x)|A(x)).

    `ancillary` and `location` document the split x ↔ (L(x), A(x)); only the
    per-base conditional predictive evaluators enter the computation.  That
    A(x) is ancillary for each base's model is an analytic obligation of the
    caller (for location families, A(x) = x − x̄·1), not a runtime check.
    """

    conditional_predictives: tuple  # per base: callable x -> m_i(L(x)|A(x))
    ancillary: object = None  # optional callable x -> A(x), documentation
    location: object = None  # optional callable x -> L(x), documentation


@dataclass(frozen=True)
class ConditionStarSpec:
    """Shared-cell discretization: counts n_j over m cells, per-base cell
    probabilities p_ij, and the analysts' own weights α*."""

    cell_probs: np.ndarray  # k × m rows, each summing to 1
    counts: np.ndarray  # observed cell counts, length m
    alpha_star: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.cell_probs, dtype=float))
        counts = np.asarray(self.counts)
        a = np.asarray(self.alpha_star, dtype=float)
        object.__setattr__(self, "cell_probs", p)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "alpha_star", a)
        if np.any(p < 0) or np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("each base's cell probabilities must sum to 1")
        if counts.ndim != 1 or counts.size != p.shape[1] or np.any(counts < 0):
            raise ValueError("need one non-negative count per cell")
        if np.any(counts != np.round(counts)):
            raise ValueError("cell counts must be integers")
        if a.size != p.shape[0] or np.any(a < 0) or abs(a.sum() - 1.0) > 1e-12:
            raise ValueError("alpha_star must be a simplex with one weight per base")


@dataclass(frozen=True)
class HeterogeneousEnsemble:
    """k inference bases over one data set and one interest support.

    `constant_mss` records the caller's assertion that the minimal sufficient
    statistic has a common form across bases (needed by `predict`); it is
    never verified.
    """

    bases: tuple
    alpha: np.ndarray
    ancillary: AncillarySpec = None
    condition_star: ConditionStarSpec = None
    conjugate_specs: tuple = None  # set when the bases are conjugate-normal
    constant_mss: bool = True

    def __post_init__(self):
        bases = tuple(self.bases)
        alpha = np.asarray(self.alpha, dtype=float)
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "alpha", alpha)
        if len(bases) == 0:
            raise ValueError("need at least one inference base")
        if alpha.size != len(bases) or np.any(alpha < 0) or abs(alpha.sum() - 1.0) > 1e-12:
            raise ValueError("alpha must be a simplex with one weight per base")
        first = bases[0]
        for b in bases[1:]:
            if b.x != first.x:
                raise ValueError(
                    "bases with distinct data sets cannot be combined; "
                    "only the shared-data case is supported"
                )
            if not _same_interest_support(first.prior, b.prior):
                raise ValueError("bases must share one interest support")


def _same_interest_support(p, q) -> bool:
    if isinstance(p, FiniteDensity) and isinstance(q, FiniteDensity):
        return p.labels == q.labels
    if isinstance(p, GridDensity) and isinstance(q, GridDensity):
        return p.values.size == q.values.size and math.isclose(
            p.lo, q.lo, rel_tol=1e-12, abs_tol=1e-12
        ) and math.isclose(p.hi, q.hi, rel_tol=1e-12, abs_tol=1e-12)
    return False


def conjugate_ensemble(specs, alpha=None, nodes: int = DEFAULT_NODES, span: float = 8.0):
    """Ensemble of normal-location analysts (one model, one data set)."""
    specs = tuple(specs)
    if alpha is None:
        alpha = np.ones(len(specs)) / len(specs)
    bases = normal_location_bases(specs, nodes=nodes, span=span)
    return HeterogeneousEnsemble(tuple(bases), alpha, conjugate_specs=specs)


def resolve_weights(ens: HeterogeneousEnsemble) -> np.ndarray:
    """Posterior base weights: plain α_i·m_i(x), ancillary-conditioned, or
    condition-★ adjusted, normalized to a simplex."""
    if ens.condition_star is not None:
        return condition_star_weights(ens.condition_star, [b.m_x for b in ens.bases])
    if ens.ancillary is not None:
        return ancillary_weights(ens, ens.ancillary)
    raw = ens.alpha * np.array([b.m_x for b in ens.bases])
    total = raw.sum()
    if not total > 0:
        raise ValueError("all prior predictives vanish at the observed data")
    return raw / total


def mixture_rb(ens: HeterogeneousEnsemble) -> EvidenceFunction:
    """RB* = Σ w_i RB_i — the linear evidence rule across the ensemble."""
    w = resolve_weights(ens)
    rbs = [relative_belief(b.prior, b.posterior()) for b in ens.bases]
    if len(rbs) == 1:
        return rbs[0]
    return combine_evidence_linear(rbs, w)


def jeffrey_posterior(ens: HeterogeneousEnsemble):
    """Jeffrey update of the ensemble: Σ w_i π_i(ψ|x), a density over ψ."""
    w = resolve_weights(ens)
    posts = [b.posterior() for b in ens.bases]
    if isinstance(posts[0], FiniteDensity):
        mixed = sum(wi * p.masses for wi, p in zip(w, posts))
        return FiniteDensity.normalized(posts[0].labels, mixed)
    mixed = sum(wi * p.values for wi, p in zip(w, posts))
    return GridDensity.normalized(posts[0].grid, mixed)


def ancillary_weights(ens: HeterogeneousEnsemble, spec: AncillarySpec) -> np.ndarray:
    """Weights ∝ α_i·m_i(L(x)|A(x)) from the supplied conditional evaluators."""
    evals = tuple(spec.conditional_predictives)
    if len(evals) != len(ens.bases):
        raise ValueError("one conditional predictive evaluator per base required")
    x = ens.bases[0].x
    cond = np.array([float(f(x)) for f in evals])
    if np.any(cond < 0) or not np.all(np.isfinite(cond)):
        raise ValueError("conditional predictives must be finite and non-negative")
    raw = ens.alpha * cond
    total = raw.sum()
    if not total > 0:
        raise ValueError("all conditional predictives vanish at the observed data")
    return raw / total


def condition_star_weights(spec: ConditionStarSpec, m_values, log_scale: bool = False) -> np.ndarray:
    """Weights ∝ (α*_i / f_i(n̆))·m_i, where f_i is the multinomial mass of the
    observed cell counts under base i's cell probabilities.

    With ``log_scale=True`` the entries of `m_values` are log m_i and the ratio
    is formed in the log domain; long records underflow the raw predictives.
    """
    m_values = np.asarray(m_values, dtype=float)
    k = spec.cell_probs.shape[0]
    if m_values.size != k:
        raise ValueError("one predictive value per base required")
    n = int(spec.counts.sum())
    with np.errstate(divide="ignore"):
        logf = np.array(
            [stats.multinomial.logpmf(spec.counts, n, spec.cell_probs[i]) for i in range(k)]
        )
    if np.all(np.isneginf(logf)):
        raise ValueError("observed cell counts are impossible under every base")
    if log_scale:
        with np.errstate(divide="ignore"):
            score = np.log(spec.alpha_star) - logf + m_values
        score = np.where(np.isneginf(logf), -np.inf, score)
        if not np.any(np.isfinite(score)):
            raise ValueError("condition-star weights vanish for every base")
        raw = np.exp(score - np.max(score[np.isfinite(score)]))
        raw[~np.isfinite(score)] = 0.0
        return raw / raw.sum()
    f = np.exp(logf)
    with np.errstate(divide="ignore"):
        raw = np.where(f > 0, spec.alpha_star * m_values / np.where(f > 0, f, 1.0), 0.0)
    total = raw.sum()
    if not total > 0:
        raise ValueError("condition-star weights vanish for every base")
    return raw / total


def location_ancillary_predictive(x, logpdf, prior: GridDensity, shift_nodes: int = 2**14 + 1):
    """m(x̄ | A(x)) for a location family with noise log-density `logpdf`.

    For data x_j = θ + ε_j the configuration A(x) = x − x̄·1 is ancillary and
    the conditional predictive of x̄ given A(x) evaluates to

        ∫ π(θ) Π_j g(x_j − θ) dθ  /  ∫ Π_j g(u + a_j) du,

    with a_j = x_j − x̄.  Numerator over the prior grid; denominator over a
    wide shift grid centred so u=x̄−θ covers the same range.
    """
    x = np.asarray(x, dtype=float)
    xbar = float(x.mean())
    grid = prior.grid
    num_vals = prior.values * np.exp(
        np.sum(logpdf(x[None, :] - grid[:, None]), axis=1)
    )
    numerator = integrate_trapezoid(num_vals, prior.step)
    a = x - xbar
    u, du = uniform_grid(xbar - prior.hi, xbar - prior.lo, shift_nodes)
    den_vals = np.exp(np.sum(logpdf(u[:, None] + a[None, :]), axis=1))
    denominator = integrate_trapezoid(den_vals, du)
    if not denominator > 0:
        raise ValueError("configuration density integrates to zero on the working range")
    return numerator / denominator


def load_location_sample() -> np.ndarray:
    """The shipped five-observation heavy-tailed location sample."""
    text = resources.files("evidencepool").joinpath("data/location_sample.txt").read_text()
    vals = [
        float(line)
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    return np.array(vals)


def _predictive_pairs(ens: HeterogeneousEnsemble, mode: str, mu_limit):
    """Per-base (prior predictive, posterior predictive) parameters for y."""
    specs = ens.conjugate_specs
    pairs = []
    for s in specs:
        prior_var = s.sigma0_sq + s.tau2
        if mode == "finite":
            pm, pv = normal_posterior(s)
            pairs.append(((s.mu, prior_var), (pm, pv + s.sigma0_sq)))
        else:
            pairs.append(((s.mu, prior_var), (mu_limit, s.sigma0_sq)))
    return pairs


def _limit_weights(ens: HeterogeneousEnsemble, mu_limit: float) -> np.ndarray:
    # n→∞: x̄→μ and σ₀²/n→0, so α_i·N(x̄; μ_i, σ₀²/n+τ_i²) → α_i·N(μ; μ_i, τ_i²)
    raw = np.array(
        [
            a * math.exp(-0.5 * (mu_limit - s.mu) ** 2 / s.tau2) / math.sqrt(s.tau2)
            for a, s in zip(ens.alpha, ens.conjugate_specs)
        ]
    )
    return raw / raw.sum()


def predict(
    ens: HeterogeneousEnsemble,
    mode: str = "finite",
    mu_limit: float = None,
    nodes: int = 2**13 + 1,
    span: float = 8.0,
    y_range: tuple = None,
    psi0: float = None,
):
    """Evidence about a future observation y: RB* mixture and its summary.

    mode="finite" uses each base's posterior predictive and the shared-data
    weights; mode="limit" is the large-sample regime at true location
    `mu_limit` (weights ∝ α_i·N(μ; μ_i, τ_i²), posterior predictive N(μ, σ₀²)).
    """
    if ens.conjugate_specs is None:
        raise TypeError(
            "prediction requires conjugate-normal bases (or numeric predictive "
            "evaluators, which this ensemble does not carry)"
        )
    if not ens.constant_mss:
        raise ValueError("prediction requires the constant-mss assertion on the ensemble")
    if mode not in ("finite", "limit"):
        raise ValueError(f"mode must be 'finite' or 'limit', got {mode!r}")
    if mode == "limit":
        if mu_limit is None:
            raise ValueError("limit mode needs the limiting location mu_limit")
        w = _limit_weights(ens, mu_limit)
    else:
        w = resolve_weights(ens)

    pairs = _predictive_pairs(ens, mode, mu_limit)
    if y_range is None:
        los = [m - span * math.sqrt(v) for (m, v), _ in pairs]
        los += [m - span * math.sqrt(v) for _, (m, v) in pairs]
        his = [m + span * math.sqrt(v) for (m, v), _ in pairs]
        his += [m + span * math.sqrt(v) for _, (m, v) in pairs]
        y_range = (min(los), max(his))
    y, step = uniform_grid(y_range[0], y_range[1], nodes)

    rb_mix = np.zeros_like(y)
    jeffrey_vals = np.zeros_like(y)
    prior_vals = np.zeros_like(y)
    for wi, ai, ((m0, v0), (m1, v1)) in zip(w, ens.alpha, pairs):
        prior_pred = stats.norm.pdf(y, m0, math.sqrt(v0))
        post_pred = stats.norm.pdf(y, m1, math.sqrt(v1))
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(
                prior_pred > 0, post_pred / np.where(prior_pred > 0, prior_pred, 1.0), math.nan
            )
        rb_mix += wi * ratio
        jeffrey_vals += wi * post_pred
        prior_vals += ai * prior_pred
    evfn = EvidenceFunction(y, rb_mix, step=step)
    prior_mix = GridDensity.normalized(y, prior_vals)
    jeffrey_mix = GridDensity.normalized(y, jeffrey_vals)
    summary = summarize(evfn, prior_mix, jeffrey_mix, psi0=psi0)
    return evfn, summary


def prediction_full_rb(ens: HeterogeneousEnsemble, evfn: EvidenceFunction):
    """Diagnostic alternative: RB of the full mixture predictives, i.e. the
    ratio (Σ w_i m_i(y|x)) / (Σ α_i m_i(y)).  Not the evidence rule — returned
    only to exhibit that it differs from RB*."""
    if ens.conjugate_specs is None:
        raise TypeError("diagnostic requires conjugate-normal bases")
    w = resolve_weights(ens)
    y = evfn.support
    num = np.zeros_like(y)
    den = np.zeros_like(y)
    for wi, ai, s in zip(w, ens.alpha, ens.conjugate_specs):
        pm, pv = normal_posterior(s)
        num += wi * stats.norm.pdf(y, pm, math.sqrt(pv + s.sigma0_sq))
        den += ai * stats.norm.pdf(y, s.mu, math.sqrt(s.sigma0_sq + s.tau2))
    return EvidenceFunction(y, num / den, step=evfn.step)
