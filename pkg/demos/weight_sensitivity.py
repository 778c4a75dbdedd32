"""How stable is the combined verdict under weight perturbation?

Draws Dirichlet(c * alpha0) replacements for the pool weights and re-runs
the full analysis each time.  Higher concentration c keeps the draws near
alpha0; the agreement rate says how often the perturbed verdict for the
hypothesis matches the baseline.
"""

from evidencepool import NormalConjugateSpec, normal_location_bases, weight_robustness

bases = normal_location_bases(
    [
        NormalConjugateSpec(12.0, 2.0, 1.0, 10, 9.87),
        NormalConjugateSpec(9.0, 1.0, 1.0, 10, 9.87),
        NormalConjugateSpec(11.0, 4.0, 1.0, 10, 9.87),
    ]
)

print("hypothesis: mean = 10;  alpha0 = (1/3, 1/3, 1/3), 200 replicates")
print(f"{'concentration':>14}  {'baseline':>8}  {'agreement':>9}  favor/against/none")
for c in (5.0, 25.0, 1e3, 1e6):
    rep = weight_robustness(bases, (1 / 3, 1 / 3, 1 / 3), c, 200, 10.0, seed=42)
    p = rep.verdict_proportions
    print(
        f"{c:>14.0f}  {rep.baseline_verdict:>8}  {rep.agreement:9.3f}"
        f"  {p.get('favor', 0.0):.2f}/{p.get('against', 0.0):.2f}/{p.get('none', 0.0):.2f}"
    )
