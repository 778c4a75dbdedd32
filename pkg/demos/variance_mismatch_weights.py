"""Weight paths when one candidate model cannot reach the truth.

Two two-parameter finite models share a 3-outcome sample space.  Data come
i.i.d. from (0.2, 0.3, 0.5) — the first row of model 1.  When model 2 misses
that distribution its pool weight dies off as the record grows; when model 2
contains it too, the weights settle on the prior odds of the truth-carrying
parameter values.
"""

import numpy as np

from evidencepool import FiniteDensity, FiniteModel, asymptotics_context2

SCHEDULE = (4, 16, 64, 256, 1024, 4096)
TRUTH = np.array([0.2, 0.3, 0.5])
M1 = FiniteModel(("p", "q"), (0, 1, 2), [[0.2, 0.3, 0.5], [0.6, 0.2, 0.2]])
M2_OFF = FiniteModel(("p", "q"), (0, 1, 2), [[0.4, 0.4, 0.2], [0.25, 0.5, 0.25]])
M2_ON = FiniteModel(("p", "q"), (0, 1, 2), [[0.2, 0.3, 0.5], [0.3, 0.45, 0.25]])
PRIORS = [FiniteDensity(("p", "q"), [0.7, 0.3]), FiniteDensity(("p", "q"), [0.4, 0.6])]


def run(label, m2):
    traj = asymptotics_context2([M1, m2], PRIORS, (0.5, 0.5), TRUTH, SCHEDULE, 20, 7)
    print(f"{label}: limit weights = {np.round(traj.weight_limits, 4)}")
    med = np.median(traj.weights, axis=0)
    for j, n in enumerate(SCHEDULE):
        print(f"  n={n:>5}: median weights = {np.round(med[j], 4)}")


run("model 2 misses the truth", M2_OFF)
print()
run("model 2 contains the truth", M2_ON)
