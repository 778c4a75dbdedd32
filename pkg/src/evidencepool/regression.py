"""Two-coefficient regression with competing error shapes.

The centered response decomposes as y <-> (b, s, a): least-squares
coefficients b = (mean(y), x'y) for the design (1, x) with standardized
predictor x, residual norm s = ||y - fit||, and the unit residual
configuration a = (y - fit)/s.  For a location-scale error family the
distribution of a is parameter-free, so a can be held fixed when weighing
error shapes against each other; the conditional density of (b, s) given a is

    s**(n-3) * sigma**(-n) * prod_j f((b1-beta1)/sigma
                                      + ((b2-beta2)/sigma) * x_j
                                      + (s/sigma) * a_j)

up to a configuration constant that depends only on (a, f).  Model weights
for competing unit-variance error shapes integrate this kernel against the
elicited prior (importance sampling with the prior itself as proposal) and
divide by the configuration constant, estimated with a heavy-tailed
product-t proposal on shared draws so the across-family comparison is low
variance.  Reported standard errors treat the per-family log estimates as
independent, which is conservative for shared draws.
"""

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import special, stats

from .distributions import GridDensity
from .elicitation import RegressionPrior
from .evidence import EvidenceFunction, EvidenceSummary, summarize
from .numerics import SeededGenerator

_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class ErrorFamily:
    """Unit-variance standardized error shape: normal, or Student t with
    lam > 2 rescaled by sqrt((lam-2)/lam) so its variance is 1."""

    kind: str
    lam: float = math.nan

    def __post_init__(self):
        if self.kind == "normal":
            if not math.isnan(self.lam):
                raise ValueError("normal errors take no degrees-of-freedom parameter")
        elif self.kind == "student":
            if not self.lam > 2.0:
                raise ValueError("student errors need lam > 2 for a finite variance")
        else:
            raise ValueError(f"unknown error family kind: {self.kind!r}")

    @staticmethod
    def normal() -> "ErrorFamily":
        return ErrorFamily("normal")

    @staticmethod
    def student(lam: float) -> "ErrorFamily":
        return ErrorFamily("student", float(lam))

    @property
    def label(self) -> str:
        if self.kind == "normal":
            return "normal"
        lam = self.lam
        return f"t{lam:g}"

    def log_density(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "normal":
            return -0.5 * z * z - 0.5 * math.log(2.0 * math.pi)
        lam = self.lam
        c = math.sqrt(lam / (lam - 2.0))  # z*c is plain t_lam
        x = z * c
        return (
            special.gammaln((lam + 1.0) / 2.0)
            - special.gammaln(lam / 2.0)
            - 0.5 * math.log(lam * math.pi)
            - (lam + 1.0) / 2.0 * np.log1p(x * x / lam)
            + math.log(c)
        )


@dataclass(frozen=True)
class RegressionData:
    """Centered response with its least-squares reduction.

    `design` holds the orthonormal columns (1/sqrt(n), x); `b` holds the
    coefficients of the per-observation parameterization (1, x) — so b[0] is
    the mean of the centered response — which is what the conditional
    density kernel uses.
    """

    design: np.ndarray
    y: np.ndarray
    b: np.ndarray
    s: float
    a: np.ndarray

    def __post_init__(self):
        design = np.asarray(self.design, dtype=float)
        y = np.asarray(self.y, dtype=float)
        b = np.asarray(self.b, dtype=float)
        a = np.asarray(self.a, dtype=float)
        n = y.size
        if design.shape != (n, 2) or b.shape != (2,) or a.shape != (n,):
            raise ValueError("inconsistent shapes in regression reduction")
        if n < 4:
            raise ValueError("need at least 4 observations")
        gram = design.T @ design
        if np.max(np.abs(gram - np.eye(2))) > _ORTHO_TOL:
            raise ValueError("design columns must be orthonormal")
        if self.s < 0:
            raise ValueError("residual norm must be non-negative")
        if self.s > 0:
            if abs(np.linalg.norm(a) - 1.0) > _ORTHO_TOL:
                raise ValueError("residual configuration must have unit norm")
            if np.max(np.abs(a @ design)) > 1e-8:
                raise ValueError("residual configuration must be orthogonal to the design")
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def x_std(self) -> np.ndarray:
        return self.design[:, 1]


def preprocess(raw_y, raw_x, center) -> RegressionData:
    """Center the response by `center` = (intercept, slope) applied to the raw
    predictor, standardize the predictor, and compute the (b, s, a) reduction."""
    raw_y = np.asarray(raw_y, dtype=float)
    raw_x = np.asarray(raw_x, dtype=float)
    if raw_y.shape != raw_x.shape or raw_y.ndim != 1:
        raise ValueError("response and predictor must be equal-length vectors")
    n = raw_y.size
    if n < 4:
        raise ValueError("need at least 4 observations")
    y = raw_y - center[0] - center[1] * raw_x
    xc = raw_x - raw_x.mean()
    norm = np.linalg.norm(xc)
    if norm <= 1e-12 * max(1.0, float(np.max(np.abs(raw_x)))):
        raise ValueError("constant predictor: the slope is not identifiable")
    x = xc / norm
    b = np.array([y.mean(), x @ y])
    resid = y - b[0] - b[1] * x
    s = float(np.linalg.norm(resid))
    if s <= 1e-12 * max(1.0, float(np.linalg.norm(y))):
        # exact fit: the residual direction is pure rounding noise
        s = 0.0
    a = resid / s if s > 0 else np.zeros(n)
    design = np.column_stack([np.full(n, 1.0 / math.sqrt(n)), x])
    return RegressionData(design=design, y=y, b=b, s=s, a=a)


def log_conditional_density_bs(b, s, a, x, beta, sigma, fam: ErrorFamily):
    """Log of the unnormalized conditional density of (b, s) given a.

    Vectorized over a leading draw axis: beta may be (2,) or (m, 2) and sigma
    scalar or (m,).  x is the standardized predictor column matching a.
    """
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    beta = np.atleast_2d(np.asarray(beta, dtype=float))
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    n = a.size
    if not s > 0:
        raise ValueError("s must be positive")
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    z = (
        ((b[0] - beta[:, 0]) / sigma)[:, None]
        + ((b[1] - beta[:, 1]) / sigma)[:, None] * x[None, :]
        + (s / sigma)[:, None] * a[None, :]
    )
    return fam.log_density(z).sum(axis=1) + (n - 3) * math.log(s) - n * np.log(sigma)


def conditional_density_bs(b, s, a, x, beta, sigma, fam: ErrorFamily) -> float:
    return float(np.exp(log_conditional_density_bs(b, s, a, x, beta, sigma, fam))[0])


@dataclass(frozen=True)
class MonteCarloConfig:
    """Draw count, seed, and the effective-sample-size floor below which the
    importance-sampling estimate is refused."""

    draws: int = 100_000
    seed: int = 0
    ess_floor: float = 500.0

    def __post_init__(self):
        if self.draws < 2:
            raise ValueError("need at least 2 draws")
        if self.ess_floor < 0:
            raise ValueError("ess_floor must be non-negative")


@dataclass(frozen=True)
class WeightEstimate:
    labels: tuple
    weights: np.ndarray
    standard_errors: np.ndarray
    ess: np.ndarray
    den_ess: np.ndarray


def _log_mean_stats(logw):
    """(log mean, relative se, ess) for the plain mean of exp(logw)."""
    m = float(np.max(logw))
    if not np.isfinite(m):
        raise ValueError("all draws land where the integrand vanishes")
    w = np.exp(logw - m)
    s1 = float(w.sum())
    s2 = float((w * w).sum())
    n = logw.size
    est = m + math.log(s1 / n)
    rel_se = math.sqrt(max(s2 / (s1 * s1) - 1.0 / n, 0.0))
    return est, rel_se, s1 * s1 / s2


def _draw_prior(prior: RegressionPrior, draws: int, gen: SeededGenerator):
    rng = gen.numpy_generator()
    precision = rng.gamma(prior.alpha1, 1.0 / prior.alpha2, size=draws)
    sigma = 1.0 / np.sqrt(precision)
    beta = rng.normal(0.0, 1.0, size=(draws, 2)) * (prior.tau0 * sigma)[:, None]
    return beta, sigma


def _log_t4(x):
    return (
        special.gammaln(2.5)
        - special.gammaln(2.0)
        - 0.5 * math.log(4.0 * math.pi)
        - 2.5 * np.log1p(x * x / 4.0)
    )


def _configuration_constants(a, x, fams, draws: int, gen: SeededGenerator):
    """Per-family (log value, relative se, ess) of the configuration integral

        integral s'**(n-3) prod_j f(q1 + q2*x_j + s'*a_j) dq1 dq2 ds'

    on shared heavy-tailed draws (t4 for q1 scaled 1/sqrt(n), t4 for q2,
    log-t4 for s' centered at log sqrt(n-2)), so polynomial-tailed
    integrands stay dominated."""
    n = a.size
    rng = gen.numpy_generator()
    t1 = rng.standard_t(4, size=draws)
    t2 = rng.standard_t(4, size=draws)
    tu = rng.standard_t(4, size=draws)
    sc1 = 1.0 / math.sqrt(n)
    q1 = t1 * sc1
    q2 = t2
    u = math.log(math.sqrt(n - 2.0)) + 0.5 * tu
    sv = np.exp(u)
    logq = (_log_t4(t1) - math.log(sc1)) + _log_t4(t2) + (_log_t4(tu) - math.log(0.5)) - u
    z = q1[:, None] + q2[:, None] * x[None, :] + sv[:, None] * a[None, :]
    out = []
    for fam in fams:
        ll = fam.log_density(z).sum(axis=1) + (n - 3) * u
        out.append(_log_mean_stats(ll - logq))
    return out


def _require_ess(ess: float, mc: MonteCarloConfig, what: str):
    if ess < mc.ess_floor:
        needed = int(math.ceil(mc.draws * mc.ess_floor / max(ess, 1.0)))
        raise ValueError(
            f"{what} effective sample size {ess:.0f} is below the floor "
            f"{mc.ess_floor:.0f}; rerun with more draws (roughly {needed:,})"
        )


def model_weights_regression(
    data: RegressionData,
    prior: RegressionPrior,
    fams,
    alpha,
    mc: MonteCarloConfig = MonteCarloConfig(),
) -> WeightEstimate:
    """Posterior weights over error families, proportional to
    alpha_i * (prior integral of the conditional kernel) / (configuration
    constant), both integrals estimated by importance sampling."""
    fams = tuple(fams)
    if len(fams) < 2:
        raise ValueError("need at least two error families to weigh")
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (len(fams),):
        raise ValueError("need one prior weight per family")
    if np.any(alpha <= 0) or abs(alpha.sum() - 1.0) > 1e-12:
        raise ValueError("family weights must be a positive simplex vector")
    if not data.s > 0:
        raise ValueError("degenerate zero-residual data")

    beta, sigma = _draw_prior(prior, mc.draws, SeededGenerator(mc.seed, 1))
    n = data.n
    z = (
        ((data.b[0] - beta[:, 0]) / sigma)[:, None]
        + ((data.b[1] - beta[:, 1]) / sigma)[:, None] * data.x_std[None, :]
        + (data.s / sigma)[:, None] * data.a[None, :]
    )
    per_draw = (n - 3) * math.log(data.s) - n * np.log(sigma)

    nums = []
    for fam in fams:
        nums.append(_log_mean_stats(fam.log_density(z).sum(axis=1) + per_draw))
    dens = _configuration_constants(
        data.a, data.x_std, fams, mc.draws, SeededGenerator(mc.seed, 2)
    )
    for fam, (_, _, ess_n), (_, _, ess_d) in zip(fams, nums, dens):
        _require_ess(ess_n, mc, f"{fam.label} numerator")
        _require_ess(ess_d, mc, f"{fam.label} configuration-constant")

    log_scores = np.array(
        [math.log(ai) + ln - ld for ai, (ln, _, _), (ld, _, _) in zip(alpha, nums, dens)]
    )
    w = np.exp(log_scores - log_scores.max())
    w /= w.sum()
    var_log = np.array(
        [rn * rn + rd * rd for (_, rn, _), (_, rd, _) in zip(nums, dens)]
    )
    jac = np.diag(w) - np.outer(w, w)  # d w_i / d log-score_j
    se = np.sqrt((jac**2) @ var_log)
    return WeightEstimate(
        labels=tuple(f.label for f in fams),
        weights=w,
        standard_errors=se,
        ess=np.array([e for (_, _, e) in nums]),
        den_ess=np.array([e for (_, _, e) in dens]),
    )


def _default_beta2_grid(prior: RegressionPrior, nodes: int = 2**12 + 1):
    # wide enough that the scaled-t prior's tail mass outside is < 1e-8, so
    # the grid-restricted prior still integrates to 1 within tolerance
    half = float(stats.t.isf(2.5e-9, 2.0 * prior.alpha1)) * prior.interest_scale() * 1.05
    return np.linspace(-half, half, nodes)


def beta2_evidence(
    data: RegressionData,
    prior: RegressionPrior,
    fam: ErrorFamily,
    grid=None,
    mc: MonteCarloConfig = MonteCarloConfig(),
    psi0: float = None,
):
    """Evidence about the slope: scaled-t prior on the grid, posterior by
    Rao-Blackwellized Monte Carlo (draw (beta1, sigma) from the prior,
    average kernel * slope-prior-density per grid node), summarized through
    the usual relative-belief machinery.  Returns (evidence fn, summary)."""
    if grid is None:
        grid = _default_beta2_grid(prior)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise ValueError("need a slope grid with at least 3 nodes")
    steps = np.diff(grid)
    if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
        raise ValueError("slope grid must be uniform and increasing")

    prior_vals = prior.interest_prior_density(grid)
    covered = np.trapezoid(prior_vals, dx=float(steps[0]))
    if abs(covered - 1.0) > 1e-8:
        raise ValueError(
            f"slope grid too narrow: the coefficient prior keeps mass "
            f"{1.0 - covered:.2e} outside it; widen the grid"
        )
    prior_density = GridDensity(float(grid[0]), float(grid[-1]), prior_vals, float(steps[0]))

    beta, sigma = _draw_prior(prior, mc.draws, SeededGenerator(mc.seed, 3))
    beta1 = beta[:, 0]
    n = data.n
    base = ((data.b[0] - beta1) / sigma)[:, None] + (data.s / sigma)[:, None] * data.a[None, :]
    per_draw = (n - 3) * math.log(data.s) - n * np.log(sigma)
    tausd = prior.tau0 * sigma
    log_post = np.empty(grid.size)
    peak_ess = 0.0
    for i, g in enumerate(grid):
        zz = base + ((data.b[1] - g) / sigma)[:, None] * data.x_std[None, :]
        ll = (
            fam.log_density(zz).sum(axis=1)
            + per_draw
            - 0.5 * np.log(2.0 * math.pi * tausd * tausd)
            - g * g / (2.0 * tausd * tausd)
        )
        est, _, ess = _log_mean_stats(ll)
        log_post[i] = est
        if i == 0 or est > log_post[: i + 1].max() - 1e-12:
            peak_ess = ess
    _require_ess(peak_ess, mc, "slope-posterior")

    posterior = GridDensity.normalized(grid, np.exp(log_post - log_post.max()))
    evfn = EvidenceFunction(grid, posterior.values / prior_density.values)
    summary = summarize(evfn, prior_density, posterior, psi0)
    return evfn, summary


def load_zellner():
    """The shipped 20-row annual (year, income, investment) fixture."""
    text = resources.files("evidencepool").joinpath("data/zellner.txt").read_text()
    rows = [
        line.split()
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    year, income, investment = (np.array(col, dtype=float) for col in zip(*rows))
    return year, income, investment
