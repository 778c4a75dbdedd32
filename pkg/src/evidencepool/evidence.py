"""Relative-belief evidence: RB functions, summaries, combination, auditing.

Evidence about ψ is carried by RB(ψ|x) = posterior(ψ)/prior(ψ): values above 1
are evidence in favor, below 1 evidence against.  Combination across bases
uses either the linear rule Σ w_i RB_i (w_i ∝ α_i m_i(x)) or, for a general
pooling degree t, the scaling identity

    RB_{t,α}(θ|x) = (m_{1,α}(x)/m_{t,α}(x)) · RB_{1,α}(θ|x),

both of which reduce to the likelihood ratio f_θ(x)/m_{t,α}(x) when the bases
share one model.  That form stays defined even at prior-zero labels, where the
posterior/prior ratio is 0/0 (kept as NaN by `relative_belief`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import FiniteDensity, GridDensity
from .numerics import integrate_trapezoid
from .pooling import PoolSpec, _check_common_context, pooled_predictive

__all__ = [
    "EvidenceFunction",
    "EvidenceSummary",
    "AuditRecord",
    "ConsensusAudit",
    "relative_belief",
    "combine_evidence_linear",
    "rb_power_mean",
    "summarize",
    "consensus_audit",
]

VERDICT_EPS = 1e-9
STRENGTH_SLACK = 1e-9  # relative slack closing the event {RB ≤ RB(ψ₀)}


@dataclass(frozen=True)
class EvidenceFunction:
    """RB values over finite labels or a uniform grid (step set iff grid).

    NaN marks labels where both prior and posterior vanish (RB undefined).
    """

    support: object  # tuple of labels, or ndarray of grid nodes
    values: np.ndarray
    epsilon: float = VERDICT_EPS
    step: float = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if isinstance(self.support, tuple):
            if len(self.support) != values.size:
                raise ValueError("one RB value per label required")
        else:
            support = np.asarray(self.support, dtype=float)
            object.__setattr__(self, "support", support)
            if support.size != values.size:
                raise ValueError("one RB value per grid node required")
            if self.step is None:
                object.__setattr__(self, "step", float(support[1] - support[0]))
        defined = values[~np.isnan(values)]
        if np.any(defined < 0) or np.any(np.isinf(defined)):
            raise ValueError("RB values must be finite and non-negative")

    @property
    def is_grid(self) -> bool:
        return not isinstance(self.support, tuple)

    def verdicts(self) -> tuple:
        """Per-label classification: favor / against / none (none where undefined)."""
        out = []
        for v in self.values:
            if math.isnan(v) or abs(v - 1.0) <= self.epsilon:
                out.append("none")
            else:
                out.append("favor" if v > 1.0 else "against")
        return tuple(out)

    def at(self, point) -> float:
        if self.is_grid:
            idx = int(np.argmin(np.abs(self.support - point)))
        else:
            idx = self.support.index(point)
        return float(self.values[idx])


@dataclass(frozen=True)
class EvidenceSummary:
    estimate: object  # label/node with maximal RB; None when uninformative
    plausible: object  # label tuple (finite) or tuple of (lo, hi) intervals (grid)
    prior_content: float
    posterior_content: float
    strength: float = None
    verdicts: tuple = ()
    uninformative: bool = False

    def __post_init__(self):
        if not (0.0 <= self.posterior_content <= 1.0 + 1e-12):
            raise ValueError("posterior content must lie in [0, 1]")


def _support_of(density):
    if isinstance(density, FiniteDensity):
        return density.labels
    return density.grid


def _same_support(a, b) -> bool:
    if isinstance(a, tuple) and isinstance(b, tuple):
        return a == b
    if isinstance(a, tuple) or isinstance(b, tuple):
        return False
    return a.size == b.size and np.allclose(a, b, rtol=1e-12, atol=1e-12)


def relative_belief(prior, posterior, epsilon: float = VERDICT_EPS) -> EvidenceFunction:
    """RB = posterior/prior on the shared support of a matched pair."""
    sup_p, sup_q = _support_of(prior), _support_of(posterior)
    if not _same_support(sup_p, sup_q):
        raise ValueError("prior and posterior must share one support")
    p = prior.masses if isinstance(prior, FiniteDensity) else prior.values
    q = posterior.masses if isinstance(posterior, FiniteDensity) else posterior.values
    bad = (p == 0) & (q > 0)
    if np.any(bad):
        raise ValueError("prior has mass 0 where the posterior is positive")
    with np.errstate(invalid="ignore", divide="ignore"):
        rb = np.where(p > 0, q / np.where(p > 0, p, 1.0), math.nan)
    step = None if isinstance(prior, FiniteDensity) else prior.step
    return EvidenceFunction(sup_p, rb, epsilon, step)


def combine_evidence_linear(evfns, posterior_weights) -> EvidenceFunction:
    """Pointwise Σ w_i RB_i with posterior weights w_i = α_i m_i(x)/m_{1,α}(x)."""
    evfns = list(evfns)
    w = np.asarray(posterior_weights, dtype=float)
    if len(evfns) == 0:
        raise ValueError("need at least one evidence function")
    if w.size != len(evfns):
        raise ValueError("one weight per evidence function required")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("posterior weights must form a simplex")
    first = evfns[0]
    for ef in evfns[1:]:
        if not _same_support(first.support, ef.support):
            raise ValueError("evidence functions must share one support")
    if len(evfns) == 1:
        return first
    combined = sum(wi * ef.values for wi, ef in zip(w, evfns))
    return EvidenceFunction(first.support, combined, first.epsilon, first.step)


def rb_power_mean(bases, spec: PoolSpec) -> EvidenceFunction:
    """RB of the degree-t pooled inference: f_θ(x)/m_{t,α}(x) on a common model.

    Equals (m_{1,α}/m_{t,α})·RB_{1,α}; defined at every label, including those
    some individual prior excludes.
    """
    _check_common_context(bases, require_common_model=True)  # single f_θ(x) needed
    m_t = pooled_predictive(bases, spec)
    lik = np.asarray(bases[0].likelihood_values(), dtype=float)
    prior = bases[0].prior
    if isinstance(prior, FiniteDensity):
        return EvidenceFunction(prior.labels, lik / m_t)
    return EvidenceFunction(prior.grid, lik / m_t, VERDICT_EPS, prior.step)


def _grid_runs(mask: np.ndarray):
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return []
    splits = np.flatnonzero(np.diff(idx) > 1)
    return np.split(idx, splits + 1)


def _content_over_runs(values: np.ndarray, runs, step: float) -> float:
    total = 0.0
    for run in runs:
        if run.size == 1:  # isolated node: give it one step of width
            total += float(values[run[0]]) * step
        else:
            total += integrate_trapezoid(values[run], step)
    return min(float(total), 1.0)


def summarize(evfn: EvidenceFunction, prior, posterior, psi0=None) -> EvidenceSummary:
    """Estimate (argmax RB), plausible region {RB > 1}, contents, strength at ψ₀."""
    if not _same_support(evfn.support, _support_of(posterior)):
        raise ValueError("evidence function and posterior must share one support")
    values = evfn.values
    defined = ~np.isnan(values)
    eps = evfn.epsilon
    p = prior.masses if isinstance(prior, FiniteDensity) else prior.values
    q = posterior.masses if isinstance(posterior, FiniteDensity) else posterior.values

    strength = None
    if psi0 is not None:
        rb0 = evfn.at(psi0)
        if math.isnan(rb0):
            raise ValueError("RB is undefined at the hypothesised value")
        mask0 = defined & (values <= rb0 * (1.0 + STRENGTH_SLACK))
        if evfn.is_grid:
            strength = _content_over_runs(q, _grid_runs(mask0), evfn.step)
        else:
            strength = float(q[mask0].sum())

    if np.all(np.abs(values[defined] - 1.0) <= eps):
        return EvidenceSummary(
            estimate=None,
            plausible=(),
            prior_content=0.0,
            posterior_content=0.0,
            strength=strength,
            verdicts=evfn.verdicts(),
            uninformative=True,
        )

    masked = np.where(defined, values, -math.inf)
    argmax = int(np.argmax(masked))  # first max: leftmost node / earliest label
    mask = defined & (values > 1.0 + eps)
    if evfn.is_grid:
        runs = _grid_runs(mask)
        plausible = tuple((float(evfn.support[r[0]]), float(evfn.support[r[-1]])) for r in runs)
        prior_content = _content_over_runs(p, runs, evfn.step)
        posterior_content = _content_over_runs(q, runs, evfn.step)
        estimate = float(evfn.support[argmax])
    else:
        plausible = tuple(lab for lab, m in zip(evfn.support, mask) if m)
        prior_content = float(p[mask].sum())
        posterior_content = float(q[mask].sum())
        estimate = evfn.support[argmax]
    return EvidenceSummary(
        estimate=estimate,
        plausible=plausible,
        prior_content=prior_content,
        posterior_content=posterior_content,
        strength=strength,
        verdicts=evfn.verdicts(),
    )


@dataclass(frozen=True)
class AuditRecord:
    label: object
    pattern: str  # favor-consensus | against-consensus | agnostic | mixed | n/a
    combined_verdict: str
    preserved: object  # True/False, or None when no constraint applies


@dataclass(frozen=True)
class ConsensusAudit:
    records: tuple
    aggregate: str  # pass | violation | none

    @property
    def violations(self) -> tuple:
        return tuple(r for r in self.records if r.preserved is False)


def consensus_audit(evfns, combined: EvidenceFunction) -> ConsensusAudit:
    """Check the combined RB against unanimous favor/against/agnostic inputs.

    A label where every defined input agrees (all ≥ 1 with one strict, all
    ≤ 1 with one strict, or all = 1 within ε) constrains the combined verdict;
    mixed inputs constrain nothing, undefined inputs make the label n/a.
    """
    evfns = list(evfns)
    if not evfns:
        raise ValueError("need at least one evidence function")
    for ef in list(evfns) + [combined]:
        if not _same_support(evfns[0].support, ef.support):
            raise ValueError("audit requires one common support")
    eps = combined.epsilon
    labels = (
        evfns[0].support
        if isinstance(evfns[0].support, tuple)
        else tuple(float(v) for v in evfns[0].support)
    )
    comb_verdicts = combined.verdicts()
    records = []
    for j, lab in enumerate(labels):
        rbs = np.array([ef.values[j] for ef in evfns])
        cv = comb_verdicts[j]
        if np.any(np.isnan(rbs)) or math.isnan(combined.values[j]):
            records.append(AuditRecord(lab, "n/a", cv, None))
            continue
        if np.all(np.abs(rbs - 1.0) <= eps):
            records.append(AuditRecord(lab, "agnostic", cv, cv == "none"))
        elif np.any(rbs > 1.0 + eps) and np.all(rbs >= 1.0 - eps):
            records.append(AuditRecord(lab, "favor-consensus", cv, cv == "favor"))
        elif np.any(rbs < 1.0 - eps) and np.all(rbs <= 1.0 + eps):
            records.append(AuditRecord(lab, "against-consensus", cv, cv == "against"))
        else:
            records.append(AuditRecord(lab, "mixed", cv, None))
    checked = [r for r in records if r.preserved is not None]
    if not checked:
        aggregate = "none"
    elif any(r.preserved is False for r in checked):
        aggregate = "violation"
    else:
        aggregate = "pass"
    return ConsensusAudit(tuple(records), aggregate)
