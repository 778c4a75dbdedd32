"""Two experts, two states, one observation.

Expert 1 holds prior (1/4, 3/4) over {a, b}; expert 2 is certain of a.
Both share the sampling model below and observe x = 0.  Linear pooling
(degree 1) keeps every verdict that the experts agree on.  The geometric
(degree 0) and minimum (degree -inf) pools collapse onto expert 2's point
mass, so evidence *against* a reported by expert 1 disappears — the audit
at the bottom flags exactly that.
"""

import math

import numpy as np

from evidencepool import (
    FiniteDensity,
    FiniteModel,
    InferenceBase,
    PoolSpec,
    consensus_audit,
    pool_priors,
    pooled_posterior,
    rb_power_mean,
    relative_belief,
)

model = FiniteModel(("a", "b"), (0, 1), [[0.25, 0.75], [1 / 3, 2 / 3]])
priors = [
    FiniteDensity(("a", "b"), [0.25, 0.75]),
    FiniteDensity(("a", "b"), [1.0, 0.0]),
]
bases = [InferenceBase(model=model, prior=p, x=0) for p in priors]
alpha = np.array([0.5, 0.5])

base_rb = [relative_belief(b.prior, b.posterior()) for b in bases]
print("per-expert relative belief at a after x = 0:")
for i, ef in enumerate(base_rb, start=1):
    print(f"  expert {i}: RB(a) = {ef.at('a'):.6f}  ({ef.verdicts()[0]})")

print()
print(f"{'degree':>8}  {'prior(a)':>9}  {'post(a)':>9}  {'RB(a)':>9}  verdict")
for t in (1.0, 0.0, -math.inf):
    spec = PoolSpec(t, alpha)
    prior = pool_priors(priors, spec)
    post = pooled_posterior(bases, spec)
    ef = rb_power_mean(bases, spec)
    label = "-inf" if math.isinf(t) else f"{t:g}"
    print(
        f"{label:>8}  {prior.masses[0]:9.6f}  {post.masses[0]:9.6f}"
        f"  {ef.at('a'):9.6f}  {ef.verdicts()[0]}"
    )

print()
for t in (1.0, 0.0, -math.inf):
    audit = consensus_audit(base_rb, rb_power_mean(bases, PoolSpec(t, alpha)))
    label = "-inf" if math.isinf(t) else f"{t:g}"
    print(f"degree {label:>4}: audit -> {audit.aggregate}")
