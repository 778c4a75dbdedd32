"""Combined prediction of the next observation.

Builds the same three-expert normal-mean ensemble as
normal_location_pooling.py but targets the next data point instead of the
mean.  The per-expert weights are conditioned on the observed record;
"limit" mode shows the large-record endpoint where the weights depend only
on each prior's density at the limiting mean.
"""

import numpy as np

from evidencepool import NormalConjugateSpec, conjugate_ensemble, predict, resolve_weights


def specs(n, xbar):
    return [
        NormalConjugateSpec(12.0, 2.0, 1.0, n, xbar),
        NormalConjugateSpec(9.0, 1.0, 1.0, n, xbar),
        NormalConjugateSpec(11.0, 4.0, 1.0, n, xbar),
    ]


def row(label, ens, **kw):
    evfn, s = predict(ens, y_range=(-15.0, 35.0), nodes=2**13 + 1, **kw)
    w = resolve_weights(ens) if not kw else None
    lo, hi = s.plausible[0]
    wtxt = "  ".join(f"{x:.3f}" for x in w) if w is not None else "  (limit weights)"
    print(f"{label:>6}  [{wtxt}]  ({lo:7.4f}, {hi:7.4f})  content {s.posterior_content:.4f}")


def main():
    print("next-observation plausible intervals, alpha = (1/3, 1/3, 1/3)")
    for n, xbar in [(5, 10.92), (10, 9.87), (25, 9.96), (100, 10.12)]:
        row(f"n={n}", conjugate_ensemble(specs(n, xbar)))
    row("limit", conjugate_ensemble(specs(100, 10.12)), mode="limit", mu_limit=10.0)


if __name__ == "__main__":
    main()
