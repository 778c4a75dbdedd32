"""Growing-record behaviour of the combined analysis (shared model).

Two priors over a three-point parameter, data from the middle value.  As n
grows the pool weights converge to the priors' relative mass at the truth,
the relative belief ratio at the truth diverges to its limit, the combined
posterior piles up on the truth, and the degree-t predictive ratios
m_1/m_t settle at 1 — i.e. the choice of pooling degree stops mattering.
Medians over replicates are printed per step.
"""

import numpy as np

from evidencepool import FiniteDensity, FiniteModel, asymptotics_context1

model = FiniteModel(
    ("low", "mid", "high"),
    (0, 1, 2),
    [[0.65, 0.25, 0.10], [0.30, 0.40, 0.30], [0.10, 0.30, 0.60]],
)
priors = [FiniteDensity(model.theta_labels, row) for row in ([0.5, 0.3, 0.2], [0.1, 0.6, 0.3])]

traj = asymptotics_context1(
    model, priors, (0.6, 0.4), "mid", (4, 16, 64, 256, 1024, 4096), 30, 20260814,
    t_grid=(0.0, 2.0),
)

print(f"limits: weights {np.round(traj.weight_limits, 4)}, "
      f"RB({traj.tracked_psi}) -> {traj.rb_limit:.4f}, mass -> {traj.mass_limit:.0f}")
print(f"{'n':>5}  {'w1':>6}  {'RB(mid)':>8}  {'post mass':>9}  {'m1/m_t0':>8}  {'m1/m_t2':>8}")
for j, n in enumerate(traj.n_schedule):
    w1 = np.median(traj.weights[:, j, 0])
    rb = np.median(traj.rb_tracked[:, j])
    mass = np.median(traj.posterior_mass[:, j])
    r0 = np.median(traj.predictive_ratios[:, j, 0])
    r2 = np.median(traj.predictive_ratios[:, j, 1])
    print(f"{n:>5}  {w1:6.4f}  {rb:8.4f}  {mass:9.4f}  {r0:8.4f}  {r2:8.4f}")
