"""Density representations and the closed-form families used throughout.

Two density containers cover everything downstream: :class:`FiniteDensity`
for finite parameter spaces and :class:`GridDensity` for continuous ones
discretized on a uniform grid.  Pointwise operations never renormalize
silently; use the explicit ``normalized`` constructors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import integrate_trapezoid

__all__ = [
    "FiniteDensity",
    "GridDensity",
    "FiniteModel",
    "NormalConjugateSpec",
    "InterestMapping",
    "marginalize",
    "normal_posterior",
    "prior_predictive_xbar",
    "standardized_t_density",
    "cauchy_location_scale",
    "kl_divergence",
]

MASS_TOL = 1e-12
GRID_MASS_TOL = 1e-8
DEFAULT_NODES = 2**12 + 1


@dataclass(frozen=True)
class FiniteDensity:
    """Probability masses over distinct parameter labels."""

    labels: tuple
    masses: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        masses = np.asarray(self.masses, dtype=float)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "masses", masses)
        if len(labels) != len(set(labels)):
            raise ValueError("labels must be distinct")
        if masses.shape != (len(labels),):
            raise ValueError("one mass per label required")
        if np.any(masses < 0) or np.any(masses > 1):
            raise ValueError("masses must lie in [0, 1]")
        if abs(masses.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {masses.sum()!r}, not 1")

    @classmethod
    def normalized(cls, labels, weights) -> "FiniteDensity":
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if total <= 0:
            raise ValueError("cannot normalize non-positive total mass")
        return cls(tuple(labels), w / total)

    def mass(self, label) -> float:
        return float(self.masses[self.labels.index(label)])


@dataclass(frozen=True)
class GridDensity:
    """Density values on a uniform grid over [lo, hi], trapezoid-normalized."""

    lo: float
    hi: float
    values: np.ndarray
    step: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("need at least 2 node values")
        if not (self.hi > self.lo):
            raise ValueError("need hi > lo")
        expected = (self.hi - self.lo) / (values.size - 1)
        if not math.isclose(self.step, expected, rel_tol=1e-9):
            raise ValueError(f"step {self.step} inconsistent with bounds/nodes ({expected})")
        if np.any(values < 0):
            raise ValueError("density values must be non-negative")
        total = integrate_trapezoid(values, self.step)
        if abs(total - 1.0) > GRID_MASS_TOL:
            raise ValueError(f"grid density integrates to {total!r}, not 1")

    @classmethod
    def normalized(cls, grid, values) -> "GridDensity":
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        step = (grid[-1] - grid[0]) / (grid.size - 1)
        total = integrate_trapezoid(values, step)
        if total <= 0:
            raise ValueError("cannot normalize non-positive total mass")
        return cls(float(grid[0]), float(grid[-1]), values / total, step)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.values.size)

    def integral(self) -> float:
        return integrate_trapezoid(self.values, self.step)


@dataclass(frozen=True)
class FiniteModel:
    """Likelihood table f_θ(x) over finite parameter and sample spaces."""

    theta_labels: tuple
    x_labels: tuple
    table: np.ndarray  # rows: θ, columns: x

    def __post_init__(self):
        theta_labels = tuple(self.theta_labels)
        x_labels = tuple(self.x_labels)
        table = np.asarray(self.table, dtype=float)
        object.__setattr__(self, "theta_labels", theta_labels)
        object.__setattr__(self, "x_labels", x_labels)
        object.__setattr__(self, "table", table)
        if len(theta_labels) != len(set(theta_labels)) or len(x_labels) != len(set(x_labels)):
            raise ValueError("labels must be distinct")
        if table.shape != (len(theta_labels), len(x_labels)):
            raise ValueError("table shape must be (len Θ, len 𝒳)")
        if np.any(table < 0):
            raise ValueError("likelihood values must be non-negative")
        rows = table.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > MASS_TOL):
            raise ValueError(f"each row of f must sum to 1; got {rows}")

    def likelihood(self, x_label) -> np.ndarray:
        """Column f_·(x) as a vector over θ labels."""
        return self.table[:, self.x_labels.index(x_label)]


@dataclass(frozen=True)
class NormalConjugateSpec:
    """One analyst's normal-location setup: N(θ, σ₀²) sampling, N(μ, τ²) prior."""

    mu: float
    tau2: float
    sigma0_sq: float
    n: int
    xbar: float

    def __post_init__(self):
        if not (self.tau2 > 0 and self.sigma0_sq > 0):
            raise ValueError("variances must be strictly positive")
        if self.n < 1:
            raise ValueError("n must be >= 1")


@dataclass(frozen=True)
class InterestMapping:
    """Surjection Ψ onto interest labels plus the conditional priors Π(·|ψ)."""

    mapping: dict  # parameter label -> interest label
    conditionals: dict  # interest label -> FiniteDensity over parameter labels

    def __post_init__(self):
        psi_labels = set(self.mapping.values())
        if set(self.conditionals) != psi_labels:
            raise ValueError("need exactly one conditional prior per interest label")
        for psi, cond in self.conditionals.items():
            if any(self.mapping[lab] != psi for lab in cond.labels):
                raise ValueError(f"conditional for {psi!r} carries labels outside Ψ⁻¹({psi!r})")

    @classmethod
    def from_prior(cls, mapping: dict, prior: FiniteDensity) -> "InterestMapping":
        """Build the conditionals Π(θ|ψ) = π(θ)/π_Ψ(ψ) implied by a prior."""
        conditionals = {}
        for psi in sorted(set(mapping.values()), key=str):
            labs = [lab for lab in prior.labels if mapping[lab] == psi]
            w = np.array([prior.mass(lab) for lab in labs])
            if w.sum() <= 0:
                raise ValueError(f"prior puts no mass on Ψ⁻¹({psi!r})")
            conditionals[psi] = FiniteDensity.normalized(labs, w)
        return cls(mapping, conditionals)

    def interest_labels(self) -> tuple:
        return tuple(sorted(set(self.mapping.values()), key=str))


def marginalize(base, im: InterestMapping):
    """Collapse a finite inference base to the quantity of interest.

    The returned base has model {m_ψ(x) = Σ_θ Π(θ|ψ) f_θ(x)} and prior π_Ψ;
    its posterior is the Ψ-pushforward of the original posterior, so inference
    about ψ may be run at either level.
    """
    from .pooling import InferenceBase  # local import to avoid a cycle

    if not isinstance(base.model, FiniteModel):
        raise TypeError("marginalize operates on finite inference bases")
    missing = [lab for lab in base.model.theta_labels if lab not in im.mapping]
    if missing:
        raise ValueError(f"interest mapping does not cover parameter labels {missing}")

    prior = base.prior
    psi_labels = im.interest_labels()
    # marginal prior on ψ
    psi_mass = np.array(
        [sum(prior.mass(lab) for lab in prior.labels if im.mapping[lab] == psi) for psi in psi_labels]
    )
    # consistency of the supplied conditionals with the base prior
    for j, psi in enumerate(psi_labels):
        cond = im.conditionals[psi]
        for lab in cond.labels:
            if abs(cond.mass(lab) * psi_mass[j] - prior.mass(lab)) > 1e-9:
                raise ValueError(
                    "conditional priors are inconsistent with the base prior "
                    f"at label {lab!r}"
                )

    theta_index = {lab: k for k, lab in enumerate(base.model.theta_labels)}
    rows = []
    for psi in psi_labels:
        cond = im.conditionals[psi]
        row = np.zeros(len(base.model.x_labels))
        for lab in cond.labels:
            row += cond.mass(lab) * base.model.table[theta_index[lab]]
        rows.append(row)
    model = FiniteModel(psi_labels, base.model.x_labels, np.array(rows))
    return InferenceBase(model=model, prior=FiniteDensity(psi_labels, psi_mass), x=base.x)


def normal_posterior(spec: NormalConjugateSpec) -> tuple[float, float]:
    """Exact conjugate posterior (mean, variance) for a normal location."""
    precision = spec.n / spec.sigma0_sq + 1.0 / spec.tau2
    mean = (spec.n * spec.xbar / spec.sigma0_sq + spec.mu / spec.tau2) / precision
    return mean, 1.0 / precision


def prior_predictive_xbar(spec: NormalConjugateSpec) -> float:
    """Prior predictive density of the sample mean: N(μ, σ₀²/n + τ²) at x̄."""
    var = spec.sigma0_sq / spec.n + spec.tau2
    return float(np.exp(-0.5 * (spec.xbar - spec.mu) ** 2 / var) / np.sqrt(2 * np.pi * var))


def standardized_t_density(lam: float, z):
    """Density of T/√(λ/(λ−2)) at z, T ~ Student-t(λ).  Unit variance; λ > 2."""
    if not lam > 2:
        raise ValueError(f"standardized t requires λ > 2, got {lam}")
    z = np.asarray(z, dtype=float)
    c = math.sqrt(lam / (lam - 2.0))
    x = z * c
    from scipy.special import gammaln

    log_pdf = (
        gammaln((lam + 1) / 2.0)
        - gammaln(lam / 2.0)
        - 0.5 * math.log(lam * math.pi)
        - (lam + 1) / 2.0 * np.log1p(x * x / lam)
        + math.log(c)
    )
    out = np.exp(log_pdf)
    return float(out) if out.ndim == 0 else out


def cauchy_location_scale(sigma0: float, coverage: float = 0.6827) -> float:
    """Scale η₀ making the Cauchy(0, η₀) probability of (−σ₀, σ₀) equal `coverage`.

    Solves (2/π)·arctan(σ₀/η₀) = coverage exactly.
    """
    if not sigma0 > 0:
        raise ValueError("σ₀ must be positive")
    if not 0 < coverage < 1:
        raise ValueError("coverage must lie in (0, 1)")
    return sigma0 / math.tan(coverage * math.pi / 2.0)


def kl_divergence(p: FiniteDensity, q: FiniteDensity) -> float:
    """Σ p log(p/q).  Returns math.inf when p puts mass where q has none
    (a signal value the asymptotics harness aggregates over, not an error)."""
    if p.labels != q.labels:
        raise ValueError("densities must share the same label set")
    pm, qm = p.masses, q.masses
    support = pm > 0
    if np.any(qm[support] == 0):
        return math.inf
    return float(np.sum(pm[support] * np.log(pm[support] / qm[support])))
