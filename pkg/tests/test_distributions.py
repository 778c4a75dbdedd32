import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from evidencepool.distributions import (
    FiniteDensity,
    FiniteModel,
    GridDensity,
    InterestMapping,
    NormalConjugateSpec,
    cauchy_location_scale,
    kl_divergence,
    marginalize,
    normal_posterior,
    prior_predictive_xbar,
    standardized_t_density,
)
from evidencepool.numerics import SeededGenerator, integrate_trapezoid, sample
from evidencepool.pooling import InferenceBase, normal_location_bases


class TestFiniteDensity:
    def test_masses_must_sum_to_one(self):
        with pytest.raises(ValueError):
            FiniteDensity(("a", "b"), [0.5, 0.6])

    def test_labels_must_be_distinct(self):
        with pytest.raises(ValueError):
            FiniteDensity(("a", "a"), [0.5, 0.5])

    def test_normalized_rescales_weights(self):
        d = FiniteDensity.normalized(("a", "b", "c"), [2.0, 1.0, 1.0])
        assert d.mass("a") == 0.5
        assert math.isclose(d.masses.sum(), 1.0)

    def test_zero_total_weight_rejected(self):
        with pytest.raises(ValueError):
            FiniteDensity.normalized(("a", "b"), [0.0, 0.0])


class TestGridDensity:
    def test_unnormalized_values_rejected(self):
        grid = np.linspace(0.0, 1.0, 101)
        with pytest.raises(ValueError):
            GridDensity(0.0, 1.0, np.full(101, 2.0), grid[1] - grid[0])

    def test_normalized_integrates_to_one(self):
        grid = np.linspace(-8.0, 8.0, 2001)
        d = GridDensity.normalized(grid, np.exp(-0.5 * grid**2))
        assert abs(d.integral() - 1.0) < 1e-12
        assert np.allclose(d.grid, grid)

    def test_negative_values_rejected(self):
        grid = np.linspace(0.0, 1.0, 11)
        vals = np.full(11, 1.0)
        vals[3] = -0.1
        with pytest.raises(ValueError):
            GridDensity.normalized(grid, vals)


class TestFiniteModel:
    def test_rows_must_be_densities_over_x(self):
        with pytest.raises(ValueError):
            FiniteModel(("a",), (0, 1), [[0.3, 0.3]])

    def test_likelihood_is_a_column(self):
        m = FiniteModel(("a", "b"), (0, 1), [[0.25, 0.75], [0.5, 0.5]])
        assert np.allclose(m.likelihood(0), [0.25, 0.5])
        assert np.allclose(m.likelihood(1), [0.75, 0.5])


def _four_label_base():
    model = FiniteModel(
        ("a", "b", "c", "d"),
        (0, 1),
        [[0.25, 0.75], [0.5, 0.5], [0.9, 0.1], [0.2, 0.8]],
    )
    prior = FiniteDensity(("a", "b", "c", "d"), [0.1, 0.2, 0.3, 0.4])
    return InferenceBase(model=model, prior=prior, x=0)


class TestMarginalize:
    def test_identity_mapping_changes_nothing(self):
        base = _four_label_base()
        im = InterestMapping.from_prior({lab: lab for lab in base.prior.labels}, base.prior)
        out = marginalize(base, im)
        assert out.prior.labels == base.prior.labels
        assert np.allclose(out.prior.masses, base.prior.masses)
        assert np.allclose(out.model.table, base.model.table)
        assert math.isclose(out.m_x, base.m_x, rel_tol=1e-12)

    def test_two_group_collapse_matches_hand_computation(self):
        base = _four_label_base()
        im = InterestMapping.from_prior({"a": "L", "b": "L", "c": "R", "d": "R"}, base.prior)
        out = marginalize(base, im)
        assert out.prior.labels == ("L", "R")
        assert np.allclose(out.prior.masses, [0.3, 0.7])
        # m_L(0) = (1/3)(0.25) + (2/3)(0.5), m_R(0) = (3/7)(0.9) + (4/7)(0.2)
        assert np.allclose(out.model.likelihood(0), [0.25 / 3 + 1.0 / 3, 2.7 / 7 + 0.8 / 7])
        # predictive is preserved and the posterior is the pushforward
        assert math.isclose(out.m_x, base.m_x, rel_tol=1e-12)
        post = base.posterior()
        collapsed = out.posterior()
        assert math.isclose(collapsed.mass("L"), post.mass("a") + post.mass("b"), rel_tol=1e-12)

    def test_non_covering_mapping_rejected(self):
        base = _four_label_base()
        prior_ab = FiniteDensity.normalized(("a", "b"), [1.0, 2.0])
        im = InterestMapping.from_prior({"a": "L", "b": "L"}, prior_ab)
        with pytest.raises(ValueError, match="cover"):
            marginalize(base, im)

    def test_inconsistent_conditionals_rejected(self):
        base = _four_label_base()
        im = InterestMapping(
            {"a": "L", "b": "L", "c": "R", "d": "R"},
            {
                "L": FiniteDensity(("a", "b"), [0.5, 0.5]),  # prior says (1/3, 2/3)
                "R": FiniteDensity(("c", "d"), [3.0 / 7.0, 4.0 / 7.0]),
            },
        )
        with pytest.raises(ValueError, match="inconsistent"):
            marginalize(base, im)


class TestNormalConjugate:
    def test_posterior_moments(self):
        spec = NormalConjugateSpec(mu=9.0, tau2=1.0, sigma0_sq=1.0, n=10, xbar=9.87)
        mean, var = normal_posterior(spec)
        assert abs(mean - 9.7909) < 1e-4
        assert abs(var - 0.0909) < 1e-4

    def test_diffuse_prior_recovers_sampling_distribution(self):
        spec = NormalConjugateSpec(mu=0.0, tau2=1e12, sigma0_sq=4.0, n=25, xbar=3.3)
        mean, var = normal_posterior(spec)
        assert abs(mean - 3.3) < 1e-9
        assert abs(var - 4.0 / 25) < 1e-9

    def test_sequential_updates_telescope(self):
        # updating on (n1, x̄1) then (n2, x̄2) equals one update on the pooled sample
        mu, tau2, s2 = 1.0, 2.5, 3.0
        n1, x1, n2, x2 = 4, 0.7, 9, 1.9
        m1, v1 = normal_posterior(NormalConjugateSpec(mu, tau2, s2, n1, x1))
        m12, v12 = normal_posterior(NormalConjugateSpec(m1, v1, s2, n2, x2))
        xall = (n1 * x1 + n2 * x2) / (n1 + n2)
        m_full, v_full = normal_posterior(NormalConjugateSpec(mu, tau2, s2, n1 + n2, xall))
        assert math.isclose(m12, m_full, rel_tol=1e-12)
        assert math.isclose(v12, v_full, rel_tol=1e-12)

    def test_prior_predictive_value(self):
        spec = NormalConjugateSpec(mu=12.0, tau2=2.0, sigma0_sq=1.0, n=5, xbar=10.92)
        assert abs(prior_predictive_xbar(spec) - 0.2063) < 1e-3

    def test_prior_predictive_peaks_at_prior_mean(self):
        at_mu = prior_predictive_xbar(NormalConjugateSpec(12.0, 2.0, 1.0, 5, xbar=12.0))
        for xbar in (9.0, 11.0, 13.0, 15.0):
            assert prior_predictive_xbar(NormalConjugateSpec(12.0, 2.0, 1.0, 5, xbar=xbar)) < at_mu

    def test_prior_predictive_matches_grid_convolution(self):
        spec = NormalConjugateSpec(mu=12.0, tau2=2.0, sigma0_sq=1.0, n=5, xbar=10.92)
        theta = np.linspace(12.0 - 12 * math.sqrt(2.0), 12.0 + 12 * math.sqrt(2.0), 2**15 + 1)
        lik_sd = math.sqrt(spec.sigma0_sq / spec.n)
        integrand = (
            np.exp(-0.5 * (spec.xbar - theta) ** 2 / lik_sd**2)
            / math.sqrt(2 * math.pi * lik_sd**2)
            * np.exp(-0.5 * (theta - spec.mu) ** 2 / spec.tau2)
            / math.sqrt(2 * math.pi * spec.tau2)
        )
        numeric = integrate_trapezoid(integrand, theta[1] - theta[0])
        assert abs(numeric - prior_predictive_xbar(spec)) < 1e-6

    @settings(max_examples=25, deadline=None)
    @given(
        mu=st.floats(-20.0, 20.0),
        tau2=st.floats(0.05, 10.0),
        sigma0_sq=st.floats(0.05, 10.0),
        n=st.integers(1, 100),
        xbar=st.floats(-20.0, 20.0),
    )
    def test_grid_bayes_matches_conjugate_formulas(self, mu, tau2, sigma0_sq, n, xbar):
        # inputs with astronomical prior-data conflict are out of contract
        # (m(x̄) underflows double precision); cap the standardized distance
        assume((xbar - mu) ** 2 / (tau2 + sigma0_sq / n) < 600.0)
        spec = NormalConjugateSpec(mu, tau2, sigma0_sq, n, xbar)
        (base,) = normal_location_bases([spec], nodes=2**14 + 1)
        post = base.posterior()
        grid = post.grid
        mean_num = integrate_trapezoid(grid * post.values, post.step)
        var_num = integrate_trapezoid(grid**2 * post.values, post.step) - mean_num**2
        mean_ex, var_ex = normal_posterior(spec)
        scale = max(1.0, abs(mean_ex))
        assert abs(mean_num - mean_ex) < 1e-6 * scale
        assert abs(var_num - var_ex) < 1e-6 * max(1.0, var_ex)
        assert abs(base.m_x - prior_predictive_xbar(spec)) < 1e-6 * max(1e-12, base.m_x)


class TestStandardizedT:
    def test_small_degrees_of_freedom_rejected(self):
        for lam in (2.0, 1.0, -3.0):
            with pytest.raises(ValueError):
                standardized_t_density(lam, 0.0)

    def test_large_lambda_approaches_standard_normal(self):
        assert abs(standardized_t_density(1e6, 0.0) - 0.3989) < 1e-3

    def test_unit_variance_by_quadrature(self):
        for lam in (5.0, 30.0):
            z = np.linspace(-150.0, 150.0, 2**17 + 1)
            second = integrate_trapezoid(z**2 * standardized_t_density(lam, z), z[1] - z[0])
            assert abs(second - 1.0) < 2e-3

    def test_unit_variance_by_simulation(self):
        lam = 5.0
        gen = SeededGenerator(2024)
        draws = sample(gen, ("student_t", lam), 200_000) * math.sqrt((lam - 2.0) / lam)
        assert abs(draws.var() - 1.0) < 0.02

    def test_vector_evaluation(self):
        z = np.array([-1.0, 0.0, 1.0])
        out = standardized_t_density(10.0, z)
        assert out.shape == (3,)
        assert out[0] == out[2]  # symmetry


class TestCauchyLocationScale:
    def test_unit_sigma_value(self):
        assert abs(cauchy_location_scale(1.0) - 0.544244512927) < 1e-9

    def test_coverage_equation_holds(self):
        for sigma0 in (0.5, 1.0, 171.7):
            eta = cauchy_location_scale(sigma0)
            achieved = (2.0 / math.pi) * math.atan(sigma0 / eta)
            assert abs(achieved - 0.6827) < 1e-9

    def test_scale_equivariance(self):
        unit = cauchy_location_scale(1.0)
        for sigma0 in (0.25, 3.0, 171.7):
            assert math.isclose(cauchy_location_scale(sigma0), sigma0 * unit, rel_tol=1e-12)

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            cauchy_location_scale(0.0)
        with pytest.raises(ValueError):
            cauchy_location_scale(1.0, coverage=1.0)


class TestKLDivergence:
    def test_identical_densities_have_zero_divergence(self):
        p = FiniteDensity(("a", "b", "c"), [0.2, 0.3, 0.5])
        assert kl_divergence(p, p) == 0.0

    def test_bernoulli_value(self):
        p = FiniteDensity((0, 1), [0.5, 0.5])
        q = FiniteDensity((0, 1), [0.25, 0.75])
        assert abs(kl_divergence(p, q) - 0.1438) < 1e-4

    def test_support_mismatch_signals_infinity(self):
        p = FiniteDensity(("a", "b"), [0.5, 0.5])
        q = FiniteDensity(("a", "b"), [1.0, 0.0])
        assert kl_divergence(p, q) == math.inf

    def test_label_mismatch_rejected(self):
        p = FiniteDensity(("a", "b"), [0.5, 0.5])
        q = FiniteDensity(("a", "c"), [0.5, 0.5])
        with pytest.raises(ValueError):
            kl_divergence(p, q)
