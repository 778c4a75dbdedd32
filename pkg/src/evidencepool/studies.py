"""Sensitivity and large-sample studies for pooled inferences.

Two kinds of study live here:

* ``weight_robustness`` re-runs a linear-pool analysis under Dirichlet
  perturbations of the weight vector (mode at the analyst's α₀, sharpness set
  by a concentration parameter) and tallies how often the verdict at a
  hypothesised value survives the perturbation.

* ``asymptotics_context1`` / ``asymptotics_context2`` simulate growing iid
  records from finite sampling models and track weight / relative-belief /
  posterior-mass trajectories against their declared long-record limits —
  the first for several analysts sharing one model, the second for analysts
  holding genuinely different models (optionally re-weighted through a
  discretized ancillary partition).

Everything n-dependent runs in the log domain: a record of a few thousand
cell probabilities underflows double precision long before it stops being
statistically interesting.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .distributions import FiniteDensity, FiniteModel
from .ensembles import ConditionStarSpec, condition_star_weights
from .evidence import relative_belief, rb_power_mean, summarize
from .numerics import SeededGenerator, sample
from .pooling import PoolSpec, pool_priors, pooled_posterior

__all__ = [
    "RobustnessReport",
    "ConvergenceTrajectory",
    "weight_robustness",
    "asymptotics_context1",
    "asymptotics_context2",
]


@dataclass(frozen=True)
class RobustnessReport:
    """Outcome of a Dirichlet weight-perturbation sweep.

    Histograms are stored as ``(bin_edges, counts)`` for numeric values and
    as a ``{label: count}`` tally when the estimates are parameter labels.
    """

    alpha0: np.ndarray
    concentration: float
    replicates: int
    verdicts: tuple  # per replicate, at the hypothesised value
    strengths: np.ndarray
    baseline_verdict: str
    agreement: float  # fraction of replicate verdicts equal to the α₀ verdict
    verdict_proportions: dict
    estimate_histogram: object
    prior_content_histogram: tuple
    posterior_content_histogram: tuple
    weight_draws: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha0", np.asarray(self.alpha0, dtype=float))
        object.__setattr__(self, "strengths", np.asarray(self.strengths, dtype=float))
        object.__setattr__(self, "weight_draws", np.asarray(self.weight_draws, dtype=float))
        if self.replicates < 1:
            raise ValueError("need at least one replicate")
        if len(self.verdicts) != self.replicates:
            raise ValueError("one verdict per replicate required")
        total = sum(self.verdict_proportions.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"verdict proportions sum to {total!r}, not 1")
        if not (0.0 <= self.agreement <= 1.0):
            raise ValueError("agreement must lie in [0, 1]")


@dataclass(frozen=True)
class ConvergenceTrajectory:
    """Per-replicate trajectories along a growing-n schedule, plus the limits
    they are expected to approach.

    ``posterior_mass`` is the strength of the tracked value in the
    shared-model study and the mixture-posterior mass at the true interest
    value in the model-uncertainty study.  ``true_indices`` lists which
    bases/models carry the true distribution.
    """

    n_schedule: tuple
    weights: np.ndarray  # (replicates, len(schedule), k)
    rb_tracked: np.ndarray  # (replicates, len(schedule))
    posterior_mass: np.ndarray  # (replicates, len(schedule))
    weight_limits: np.ndarray
    rb_limit: float
    mass_limit: float
    true_indices: tuple
    tracked_psi: object
    t_grid: tuple = ()
    predictive_ratios: np.ndarray = None  # (replicates, len(schedule), len(t_grid))
    ratio_limits: np.ndarray = None

    def __post_init__(self):
        schedule = tuple(int(n) for n in self.n_schedule)
        object.__setattr__(self, "n_schedule", schedule)
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "rb_tracked", np.asarray(self.rb_tracked, dtype=float))
        object.__setattr__(self, "posterior_mass", np.asarray(self.posterior_mass, dtype=float))
        object.__setattr__(self, "weight_limits", np.asarray(self.weight_limits, dtype=float))
        if len(schedule) == 0 or any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise ValueError("the n schedule must be strictly increasing")
        if schedule[0] < 1:
            raise ValueError("sample sizes must be positive")
        if w.ndim != 3 or w.shape[1] != len(schedule):
            raise ValueError("weights must have shape (replicates, len(schedule), k)")
        if np.any(w < -1e-12) or np.any(np.abs(w.sum(axis=2) - 1.0) > 1e-9):
            raise ValueError("weights must lie in the simplex at every n")
        if self.rb_tracked.shape != w.shape[:2] or self.posterior_mass.shape != w.shape[:2]:
            raise ValueError("per-n trajectories must be (replicates, len(schedule)) arrays")
        if (self.predictive_ratios is None) != (self.ratio_limits is None):
            raise ValueError("predictive ratios and their limits come together")
        if self.predictive_ratios is not None:
            r = np.asarray(self.predictive_ratios, dtype=float)
            object.__setattr__(self, "predictive_ratios", r)
            object.__setattr__(self, "ratio_limits", np.asarray(self.ratio_limits, dtype=float))
            if r.shape != (w.shape[0], w.shape[1], len(self.t_grid)):
                raise ValueError("one predictive ratio per (replicate, n, degree) required")

    @property
    def replicates(self) -> int:
        return self.weights.shape[0]

    def terminal_weight_hit_rate(self, tol: float = 0.05) -> float:
        """Fraction of replicates whose final-n weights all sit within
        `tol` of the declared limits."""
        dev = np.abs(self.weights[:, -1, :] - self.weight_limits).max(axis=1)
        return float(np.mean(dev <= tol))

    def table(self):
        """(header, rows) with one row per (replicate, n), ready to serialize."""
        k = self.weights.shape[2]
        header = ["replicate", "n"] + [f"w{i + 1}" for i in range(k)]
        header += ["rb_tracked", "posterior_mass"]
        header += [f"m1_over_m_t{t:g}" for t in self.t_grid]
        rows = []
        for r in range(self.weights.shape[0]):
            for j, n in enumerate(self.n_schedule):
                row = [r, n] + [float(x) for x in self.weights[r, j]]
                row += [float(self.rb_tracked[r, j]), float(self.posterior_mass[r, j])]
                if self.predictive_ratios is not None:
                    row += [float(x) for x in self.predictive_ratios[r, j]]
                rows.append(tuple(row))
        return tuple(header), rows


def _verdict_at(evfn, psi0) -> str:
    v = evfn.at(psi0)
    if np.isnan(v) or abs(v - 1.0) <= evfn.epsilon:
        return "none"
    return "favor" if v > 1.0 else "against"


def _numeric_histogram(values, bins: int, lo: float, hi: float):
    arr = np.asarray(values, dtype=float)
    counts, edges = np.histogram(arr, bins=bins, range=(lo, hi))
    return tuple(float(e) for e in edges), tuple(int(c) for c in counts)


def _estimate_histogram(estimates, bins: int = 10):
    present = [e for e in estimates if e is not None]
    if not present:
        return ((), ())
    if all(isinstance(e, (int, float, np.floating)) for e in present):
        arr = np.asarray(present, dtype=float)
        lo, hi = float(arr.min()), float(arr.max())
        if hi == lo:  # all replicates landed on one node
            return ((lo, hi), (len(present),))
        return _numeric_histogram(arr, bins, lo, hi)
    tally = {}
    for e in present:
        tally[e] = tally.get(e, 0) + 1
    return tally


def _evaluate_at_alpha(bases, alpha, psi0):
    spec = PoolSpec(1.0, alpha)
    evfn = rb_power_mean(bases, spec)
    prior = pool_priors([b.prior for b in bases], spec)
    posterior = pooled_posterior(bases, spec)
    summary = summarize(evfn, prior, posterior, psi0)
    return _verdict_at(evfn, psi0), summary


def weight_robustness(
    bases, alpha0, concentration: float, replicates: int, psi0, seed: int
) -> RobustnessReport:
    """Re-run the linear-pool analysis under Dirichlet-perturbed weights.

    The perturbing Dirichlet has parameters 1 + concentration·α₀, so its mode
    is α₀ and large concentrations pin the draws to it.  For each draw the
    verdict and strength at `psi0` are recorded, together with how often the
    verdict matches the one obtained at α₀ itself.
    """
    bases = list(bases)
    alpha0 = np.asarray(alpha0, dtype=float)
    if alpha0.shape != (len(bases),):
        raise ValueError("one weight per base required")
    if np.any(alpha0 <= 0) or abs(alpha0.sum() - 1.0) > 1e-9:
        raise ValueError(
            "alpha0 must lie strictly inside the simplex; boundary points "
            "have no mode-at-alpha0 Dirichlet"
        )
    if not concentration > 0:
        raise ValueError("concentration must be positive")
    if replicates < 1:
        raise ValueError("need at least one replicate")

    draws = sample(
        SeededGenerator(seed), ("dirichlet", 1.0 + concentration * alpha0), replicates
    )
    baseline_verdict, _ = _evaluate_at_alpha(bases, alpha0, psi0)

    verdicts, strengths, estimates, prior_cont, post_cont = [], [], [], [], []
    for r in range(replicates):
        verdict, summary = _evaluate_at_alpha(bases, draws[r], psi0)
        verdicts.append(verdict)
        strengths.append(summary.strength)
        estimates.append(summary.estimate)
        prior_cont.append(summary.prior_content)
        post_cont.append(summary.posterior_content)

    proportions = {
        kind: verdicts.count(kind) / replicates for kind in ("favor", "against", "none")
    }
    agreement = verdicts.count(baseline_verdict) / replicates
    return RobustnessReport(
        alpha0=alpha0,
        concentration=float(concentration),
        replicates=replicates,
        verdicts=tuple(verdicts),
        strengths=np.array(strengths),
        baseline_verdict=baseline_verdict,
        agreement=agreement,
        verdict_proportions=proportions,
        estimate_histogram=_estimate_histogram(estimates),
        prior_content_histogram=_numeric_histogram(prior_cont, 10, 0.0, 1.0),
        posterior_content_histogram=_numeric_histogram(post_cont, 10, 0.0, 1.0),
        weight_draws=draws,
    )


def _check_schedule(n_schedule):
    if len(n_schedule) == 0 or n_schedule[0] < 1:
        raise ValueError("the n schedule must contain positive sample sizes")
    if any(b <= a for a, b in zip(n_schedule, n_schedule[1:])):
        raise ValueError("the n schedule must be strictly increasing")


def _interest_matrix(theta_labels, psi_map):
    """Aggregation matrix U (interest × parameter) for a label-to-label map."""
    if psi_map is None:
        return tuple(theta_labels), np.eye(len(theta_labels))
    missing = [lab for lab in theta_labels if lab not in psi_map]
    if missing:
        raise ValueError(f"psi_map must cover every parameter label; missing {missing!r}")
    psi_labels = tuple(dict.fromkeys(psi_map[lab] for lab in theta_labels))
    U = np.zeros((len(psi_labels), len(theta_labels)))
    for s, lab in enumerate(theta_labels):
        U[psi_labels.index(psi_map[lab]), s] = 1.0
    return psi_labels, U


def _log_likelihood(log_table, counts):
    """Σ_x count(x)·log f(x|θ) over observed cells only (0·(-inf) is not 0)."""
    obs = counts > 0
    return log_table[:, obs] @ counts[obs].astype(float)


def _softmax(scores):
    finite = np.isfinite(scores)
    if not np.any(finite):
        raise ValueError("the observed record is impossible under every base")
    shifted = np.where(finite, scores - scores[finite].max(), -np.inf)
    w = np.exp(shifted)
    return w / w.sum()


def asymptotics_context1(
    model: FiniteModel,
    priors,
    alpha,
    theta_true,
    n_schedule,
    replicates: int,
    seed: int,
    *,
    psi0=None,
    psi_map=None,
    t_grid=(0.0, 2.0),
) -> ConvergenceTrajectory:
    """Growing-record study for analysts sharing one finite sampling model.

    Simulates iid records from f(·|θ_true) along `n_schedule` and tracks, per
    replicate: the mixture weights against α_iπ_i(θ_true)/π_{1,α}(θ_true); the
    relative belief at `psi0` (default: the interest value of θ_true) against
    1{ψ₀=ψ_true}/π_{1,α,Ψ}(ψ₀), with its strength; and the linear-to-degree-t
    predictive ratios m_{1,α}/m_{t,α} against π_{1,α}(θ_true)/π_{t,α}(θ_true).
    """
    if not isinstance(model, FiniteModel):
        raise TypeError("need a finite sampling model")
    priors = list(priors)
    k = len(priors)
    for p in priors:
        if not isinstance(p, FiniteDensity) or p.labels != model.theta_labels:
            raise ValueError("each prior must sit on the model's parameter labels")
        if np.any(p.masses <= 0):
            raise ValueError("priors must be strictly positive on the whole parameter space")
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (k,) or np.any(alpha < 0) or abs(alpha.sum() - 1.0) > 1e-9:
        raise ValueError("alpha must be a simplex with one weight per prior")
    if theta_true not in model.theta_labels:
        raise ValueError(f"theta_true {theta_true!r} is not a parameter label of the model")
    n_schedule = tuple(int(n) for n in n_schedule)
    _check_schedule(n_schedule)
    if replicates < 1:
        raise ValueError("need at least one replicate")

    idx_true = model.theta_labels.index(theta_true)
    P = np.vstack([p.masses for p in priors])
    pi1 = pool_priors(priors, PoolSpec(1.0, alpha)).masses
    t_grid = tuple(float(t) for t in t_grid)
    pit = [pool_priors(priors, PoolSpec(t, alpha)).masses for t in t_grid]

    psi_labels, U = _interest_matrix(model.theta_labels, psi_map)
    psi_true = psi_labels[int(np.argmax(U[:, idx_true]))]
    if psi0 is None:
        psi0 = psi_true
    if psi0 not in psi_labels:
        raise ValueError(f"psi0 {psi0!r} is not one of the interest labels")
    prior_psi = FiniteDensity(psi_labels, U @ pi1)

    w_lim = alpha * P[:, idx_true]
    w_lim = w_lim / w_lim.sum()
    rb_lim = (1.0 if psi0 == psi_true else 0.0) / prior_psi.mass(psi0)
    mass_lim = 1.0 if psi0 == psi_true else 0.0
    ratio_lim = np.array([pi1[idx_true] / m[idx_true] for m in pit])

    true_row = np.asarray(model.table[idx_true], dtype=float)
    with np.errstate(divide="ignore"):
        logF = np.log(model.table)
        log_alpha = np.log(alpha)
    logP = np.log(P)
    logpi1 = np.log(pi1)
    logpit = [np.log(m) for m in pit]

    T, M = len(n_schedule), len(model.x_labels)
    W = np.empty((replicates, T, k))
    RB = np.empty((replicates, T))
    MS = np.empty((replicates, T))
    RT = np.empty((replicates, T, len(t_grid)))
    root = SeededGenerator(seed)
    for r in range(replicates):
        seq = sample(root.spawn(r + 1), ("categorical", true_row), n_schedule[-1])
        for j, n in enumerate(n_schedule):
            counts = np.bincount(seq[:n], minlength=M)
            loglik = _log_likelihood(logF, counts)
            W[r, j] = _softmax(log_alpha + logsumexp(logP + loglik, axis=1))
            logm1 = logsumexp(logpi1 + loglik)
            post = np.exp(logpi1 + loglik - logm1)
            post_fd = FiniteDensity.normalized(psi_labels, U @ post)
            evfn = relative_belief(prior_psi, post_fd)
            RB[r, j] = evfn.at(psi0)
            MS[r, j] = summarize(evfn, prior_psi, post_fd, psi0).strength
            for u, lpt in enumerate(logpit):
                RT[r, j, u] = np.exp(logm1 - logsumexp(lpt + loglik))

    return ConvergenceTrajectory(
        n_schedule=n_schedule,
        weights=W,
        rb_tracked=RB,
        posterior_mass=MS,
        weight_limits=w_lim,
        rb_limit=float(rb_lim),
        mass_limit=mass_lim,
        true_indices=tuple(range(k)),
        tracked_psi=psi0,
        t_grid=t_grid,
        predictive_ratios=RT,
        ratio_limits=ratio_lim,
    )


def _partition_cells(models, partition):
    """Column indices per cell plus each model's (parameter-free) cell masses."""
    x_labels = models[0].x_labels
    flat = [lab for cell in partition for lab in cell]
    if sorted(map(str, flat)) != sorted(map(str, x_labels)) or len(flat) != len(x_labels):
        raise ValueError("partition cells must cover the sample space exactly once")
    cell_idx = [np.array([x_labels.index(lab) for lab in cell]) for cell in partition]
    cell_probs = []
    for i, m in enumerate(models):
        per_theta = np.column_stack([m.table[:, idx].sum(axis=1) for idx in cell_idx])
        if np.ptp(per_theta, axis=0).max() > 1e-12:
            raise ValueError(
                f"cell masses vary with the parameter in model {i}; "
                "the partition is not ancillary there"
            )
        cell_probs.append(per_theta[0])
    return cell_idx, np.vstack(cell_probs)


def asymptotics_context2(
    models,
    priors,
    alpha,
    true_probs,
    n_schedule,
    replicates: int,
    seed: int,
    *,
    partition=None,
) -> ConvergenceTrajectory:
    """Growing-record study for analysts holding different finite models.

    Simulates iid records from `true_probs` (which must match at least one
    row of at least one model) and tracks the mixture weights against their
    long-record limits — concentration on the truth-carrying models in
    proportion to α_iπ_i(θ_true) — together with the mixture relative belief
    and mixture-posterior mass at the true interest value.

    With `partition` (a tuple of label groups, ancillary for every model) the
    weights are instead α_i/f_i(cell counts)-corrected before mixing, and
    `alpha` plays the role of the analysts' own weights α*.
    """
    models = list(models)
    priors = list(priors)
    k = len(models)
    if k < 1:
        raise ValueError("need at least one model")
    if len(priors) != k:
        raise ValueError("one prior per model required")
    first = models[0]
    for m in models:
        if not isinstance(m, FiniteModel):
            raise TypeError("need finite sampling models")
        if m.x_labels != first.x_labels:
            raise ValueError("models must share one sample space")
        if m.theta_labels != first.theta_labels:
            raise ValueError("models must share one parameter label set (the common interest space)")
    for m, p in zip(models, priors):
        if not isinstance(p, FiniteDensity) or p.labels != m.theta_labels:
            raise ValueError("each prior must sit on its model's parameter labels")
        if np.any(p.masses <= 0):
            raise ValueError("priors must be strictly positive on the whole parameter space")
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (k,) or np.any(alpha < 0) or abs(alpha.sum() - 1.0) > 1e-9:
        raise ValueError("alpha must be a simplex with one weight per model")
    true_probs = np.asarray(true_probs, dtype=float)
    if true_probs.shape != (len(first.x_labels),) or np.any(true_probs < 0):
        raise ValueError("true_probs must be a distribution over the shared sample space")
    if abs(true_probs.sum() - 1.0) > 1e-9:
        raise ValueError("true_probs must sum to 1")
    n_schedule = tuple(int(n) for n in n_schedule)
    _check_schedule(n_schedule)
    if replicates < 1:
        raise ValueError("need at least one replicate")

    true_idx = {}
    for i, m in enumerate(models):
        match = np.where(np.all(np.abs(m.table - true_probs) <= 1e-12, axis=1))[0]
        if match.size:
            true_idx[i] = int(match[0])
    if not true_idx:
        raise ValueError("no model contains the true distribution")
    true_labels = {first.theta_labels[s] for s in true_idx.values()}
    if len(true_labels) > 1:
        raise ValueError(
            f"models containing the truth disagree on its parameter label: {sorted(true_labels)!r}"
        )
    psi_true = next(iter(true_labels))
    idx = first.theta_labels.index(psi_true)

    w_lim = np.zeros(k)
    for i, s in true_idx.items():
        w_lim[i] = alpha[i] * priors[i].masses[s]
    w_lim = w_lim / w_lim.sum()
    rb_lim = float(sum(w_lim[i] / priors[i].masses[idx] for i in true_idx))

    cell_idx = cell_probs = None
    if partition is not None:
        cell_idx, cell_probs = _partition_cells(models, partition)

    with np.errstate(divide="ignore"):
        log_tables = [np.log(m.table) for m in models]
        log_alpha = np.log(alpha)
    logP = [np.log(p.masses) for p in priors]

    T, M = len(n_schedule), len(first.x_labels)
    W = np.empty((replicates, T, k))
    RB = np.empty((replicates, T))
    MS = np.empty((replicates, T))
    root = SeededGenerator(seed)
    for r in range(replicates):
        seq = sample(root.spawn(r + 1), ("categorical", true_probs), n_schedule[-1])
        for j, n in enumerate(n_schedule):
            counts = np.bincount(seq[:n], minlength=M)
            logm = np.empty(k)
            post = np.zeros((k, len(first.theta_labels)))
            for i in range(k):
                loglik = _log_likelihood(log_tables[i], counts)
                score = logP[i] + loglik
                logm[i] = logsumexp(score)
                if np.isfinite(logm[i]):
                    post[i] = np.exp(score - logm[i])
            if partition is None:
                W[r, j] = _softmax(log_alpha + logm)
            else:
                spec = ConditionStarSpec(
                    cell_probs=cell_probs,
                    counts=np.array([counts[ci].sum() for ci in cell_idx]),
                    alpha_star=alpha,
                )
                W[r, j] = condition_star_weights(spec, logm, log_scale=True)
            MS[r, j] = float(W[r, j] @ post[:, idx])
            RB[r, j] = float(
                sum(W[r, j, i] * post[i, idx] / priors[i].masses[idx] for i in range(k))
            )

    return ConvergenceTrajectory(
        n_schedule=n_schedule,
        weights=W,
        rb_tracked=RB,
        posterior_mass=MS,
        weight_limits=w_lim,
        rb_limit=rb_lim,
        mass_limit=1.0,
        true_indices=tuple(sorted(true_idx)),
        tracked_psi=psi_true,
    )
