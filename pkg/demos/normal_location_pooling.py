"""Three conjugate priors for a normal mean, combined by linear pooling.

Each expert supplies a N(mu_i, tau2_i) prior for the mean of a N(theta, 1)
sample.  As the record grows the data-driven pool weights and the combined
plausible interval tighten around the truth (theta = 10 here).
"""

import numpy as np

from evidencepool import (
    NormalConjugateSpec,
    PoolSpec,
    normal_location_bases,
    pool_priors,
    pooled_posterior,
    posterior_pool_weights,
    rb_power_mean,
    summarize,
)

CASES = [(5, 10.92), (10, 9.87), (25, 9.96), (100, 10.12)]


def specs(n, xbar):
    return [
        NormalConjugateSpec(12.0, 2.0, 1.0, n, xbar),
        NormalConjugateSpec(9.0, 1.0, 1.0, n, xbar),
        NormalConjugateSpec(11.0, 4.0, 1.0, n, xbar),
    ]


def main():
    spec = PoolSpec(1.0, np.ones(3) / 3)
    print(f"{'n':>4} {'xbar':>6}  {'w1':>6} {'w2':>6} {'w3':>6}   interval (content)")
    for n, xbar in CASES:
        bases = normal_location_bases(specs(n, xbar))
        w = posterior_pool_weights(bases, spec)
        s = summarize(
            rb_power_mean(bases, spec),
            pool_priors([b.prior for b in bases], spec),
            pooled_posterior(bases, spec),
        )
        lo, hi = s.plausible[0]
        print(
            f"{n:>4} {xbar:>6.2f}  {w[0]:6.3f} {w[1]:6.3f} {w[2]:6.3f}"
            f"   ({lo:.2f}, {hi:.2f})  ({s.posterior_content:.3f})"
        )


if __name__ == "__main__":
    main()
