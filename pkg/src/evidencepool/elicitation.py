"""Interval-judgment elicitation of the regression prior hyperparameters.

The analyst states a virtual-certainty level gamma, a half-width m0 for the
plausible response range, and bounds (s1, s2) on the half-length of a
gamma-coverage interval for a single response.  Together with the predictor
range factor zeta0 these pin down a normal-inverse-gamma prior:

* the coefficient scale tau0 = m0 / (s2 * zeta0), and
* the inverse-gamma hyperparameters (alpha1, alpha2) for the error variance,
  solved from two gamma-CDF equations:

      G(alpha1, 1, alpha2 * z**2 / s1**2) = (1 + gamma) / 2
      G(alpha1, 1, alpha2 * z**2 / s2**2) = (1 - gamma) / 2

  with z the standard-normal (1+gamma)/2 quantile.  (The lower-tail quantile
  appears squared, so the two z's coincide.)  For fixed alpha1 the first
  equation determines alpha2 in closed form through the gamma quantile; the
  residual of the second is monotone in alpha1, which the solver verifies on
  a dense log grid before bisecting.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import gammainc, gammaincinv

from .numerics import find_root_monotone


@dataclass(frozen=True)
class ElicitationInput:
    """Virtual-certainty judgments: gamma level, response half-width m0,
    interval half-length bounds 0 < s1 < s2, predictor factor zeta0."""

    gamma: float
    m0: float
    s1: float
    s2: float
    zeta0: float

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.m0 <= 0.0:
            raise ValueError("m0 must be positive")
        if not 0.0 < self.s1 < self.s2:
            raise ValueError("need 0 < s1 < s2")
        if not 1.0 < self.zeta0 <= math.sqrt(2.0) + 1e-12:
            raise ValueError("zeta0 must lie in (1, sqrt(2)]")


@dataclass(frozen=True)
class RegressionPrior:
    """Elicited hyperparameters: coefficient scale tau0 and the
    inverse-gamma pair (alpha1 shape, alpha2 rate) for the error variance."""

    tau0: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        if min(self.tau0, self.alpha1, self.alpha2) <= 0.0:
            raise ValueError("tau0, alpha1, alpha2 must all be positive")

    def interest_scale(self) -> float:
        """Scale of the marginal prior on a single coefficient: the marginal
        is this scale times a Student t with 2*alpha1 degrees of freedom."""
        return self.tau0 * math.sqrt(self.alpha2 / self.alpha1)

    def interest_prior_density(self, psi):
        s = self.interest_scale()
        return stats.t.pdf(np.asarray(psi, dtype=float) / s, 2.0 * self.alpha1) / s


def normal_quantile(p: float) -> float:
    """Standard-normal quantile by inverting the CDF with bisection."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    return find_root_monotone(
        lambda z: 0.5 * (1.0 + math.erf(z / math.sqrt(2.0))) - p, -40.0, 40.0
    )


def gamma_cdf(shape: float, rate: float, x) -> float:
    """G(shape, rate, x): CDF of a gamma with the rate parameterization.

    Satisfies G(a, r, x) = G(a, 1, r*x), which is how the solver uses it.
    """
    return gammainc(shape, rate * np.asarray(x, dtype=float))


def elicit_tau0(inp: ElicitationInput) -> float:
    return inp.m0 / (inp.s2 * inp.zeta0)


def _alpha2_given(alpha1: float, inp: ElicitationInput, z_sq: float) -> float:
    # first equation: alpha2 * z**2 / s1**2 is the (1+gamma)/2 gamma quantile
    q = gammaincinv(alpha1, (1.0 + inp.gamma) / 2.0)
    return float(q) * inp.s1**2 / z_sq


def _second_equation_residual(alpha1: float, inp: ElicitationInput, z_sq: float) -> float:
    alpha2 = _alpha2_given(alpha1, inp, z_sq)
    return float(gammainc(alpha1, alpha2 * z_sq / inp.s2**2)) - (1.0 - inp.gamma) / 2.0


def elicit_gamma(inp: ElicitationInput, tol: float = 1e-9):
    """Solve the two gamma-CDF equations for (alpha1, alpha2).

    Fixing alpha1 solves the first equation exactly; bisection then drives
    the second equation's residual below `tol`.  The residual's monotonicity
    over the bracket is verified on a dense log grid first, so a decrease /
    increase rule is guaranteed to converge.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    z = normal_quantile((1.0 + inp.gamma) / 2.0)
    z_sq = z * z

    lo, hi = 0.1, 100.0
    for _ in range(60):
        if _second_equation_residual(lo, inp, z_sq) > 0 > _second_equation_residual(
            hi, inp, z_sq
        ):
            break
        lo, hi = lo / 2.0, hi * 2.0
    else:
        raise ValueError("could not bracket the second elicitation equation")

    probe = np.geomspace(lo, hi, 200)
    resid = np.array([_second_equation_residual(a, inp, z_sq) for a in probe])
    if np.any(np.diff(resid) > 1e-12):
        raise ValueError("second-equation residual is not monotone on the bracket")

    alpha1 = find_root_monotone(
        lambda a: _second_equation_residual(a, inp, z_sq), lo, hi, tol=1e-12
    )
    alpha2 = _alpha2_given(alpha1, inp, z_sq)
    if abs(_second_equation_residual(alpha1, inp, z_sq)) > tol:
        raise ValueError("elicitation solve did not converge to tolerance")
    return float(alpha1), float(alpha2)


def elicit(inp: ElicitationInput, tol: float = 1e-9) -> RegressionPrior:
    """Full elicitation: tau0 plus the (alpha1, alpha2) solve."""
    alpha1, alpha2 = elicit_gamma(inp, tol)
    return RegressionPrior(elicit_tau0(inp), alpha1, alpha2)
