"""Solve for the conjugate regression prior from interval judgements.

Inputs: a gamma-probability interval for the response at the centred
covariate (so only the intercept matters there), a pair of bounds s1 < s2
on the residual standard deviation, and the tail ratio zeta0 controlling
how hard the s-bounds are enforced.  Output: the N(0, tau0^2/w) slope prior
and the gamma(alpha1, alpha2) precision prior, plus the implied scale of
the slope's marginal prior (a scaled Student with 2*alpha1 dof).
"""

import math

from evidencepool import ElicitationInput, elicit

inp = ElicitationInput(gamma=0.99, m0=30.0, s1=10.0, s2=40.0, zeta0=math.sqrt(2.0))
prior = elicit(inp)

print(f"inputs: gamma={inp.gamma}, m0={inp.m0}, s in ({inp.s1}, {inp.s2}), zeta0={inp.zeta0:.4f}")
print(f"tau0   = {prior.tau0:.4f}")
print(f"alpha1 = {prior.alpha1:.4f}")
print(f"alpha2 = {prior.alpha2:.4f}")
print(f"implied slope scale tau0*sqrt(alpha2/alpha1) = {prior.interest_scale():.4f}")
