"""Cauchy vs. normal error model for the bundled location sample.

The two inference bases share the observed sample but disagree about the
error law and the prior.  Because the sampling models differ, the pool
weights condition on the within-sample spread (a location-free statistic)
and weigh each model's conditional predictive for it.  The sample contains
a clear outlier, so the heavy-tailed model should carry most of the weight.
"""

import math

import numpy as np
from scipy import stats

from evidencepool import (
    GridDensity,
    GridLikelihood,
    HeterogeneousEnsemble,
    InferenceBase,
    PoolSpec,
    jeffrey_posterior,
    load_location_sample,
    mixture_rb,
    pool_priors,
    resolve_weights,
    summarize,
)
from evidencepool.ensembles import AncillarySpec, location_ancillary_predictive


def cauchy_logpdf(z):
    return -np.log(math.pi) - np.log1p(z * z)


def normal_logpdf(z):
    return -0.5 * math.log(2 * math.pi) - 0.5 * z * z


x = load_location_sample()
print(f"sample (n={x.size}): min {x.min():.2f}, median {np.median(x):.2f}, max {x.max():.2f}")

grid = np.linspace(-16.0, 16.0, 2**13 + 1)
prior_c = GridDensity.normalized(grid, stats.norm.pdf(grid, 0.0, 2.0))
prior_n = GridDensity.normalized(grid, stats.norm.pdf(grid, 0.0, 1.0))
lik_c = GridLikelihood(np.exp(np.sum(cauchy_logpdf(x[None, :] - grid[:, None]), axis=1)))
lik_n = GridLikelihood(np.exp(np.sum(normal_logpdf(x[None, :] - grid[:, None]), axis=1)))
bases = (
    InferenceBase(model=lik_c, prior=prior_c, x=("d", tuple(x))),
    InferenceBase(model=lik_n, prior=prior_n, x=("d", tuple(x))),
)
anc = AncillarySpec(
    conditional_predictives=(
        lambda _: location_ancillary_predictive(x, cauchy_logpdf, prior_c),
        lambda _: location_ancillary_predictive(x, normal_logpdf, prior_n),
    )
)
ens = HeterogeneousEnsemble(bases, np.array([0.5, 0.5]), ancillary=anc)

w = resolve_weights(ens)
print(f"conditional weights: cauchy {w[0]:.4f}, normal {w[1]:.4f}")

evfn = mixture_rb(ens)
post = jeffrey_posterior(ens)
prior = pool_priors([b.prior for b in ens.bases], PoolSpec(1.0, ens.alpha))
s = summarize(evfn, prior, post)
lo, hi = s.plausible[0]
print(f"combined location estimate {s.estimate:.4f}, plausible ({lo:.4f}, {hi:.4f})")
