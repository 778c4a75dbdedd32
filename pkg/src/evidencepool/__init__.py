"""Tools for pooling Bayesian inference bases and combining statistical evidence.

The core objects are densities over a shared support (`FiniteDensity`,
`GridDensity`), inference bases pairing a model with a prior and data
(`InferenceBase`, `HeterogeneousEnsemble`), power-mean prior pools
(`PoolSpec`, `pool_priors`), and relative-belief evidence functions with
their summaries (`relative_belief`, `summarize`).  On top sit weight
elicitation and regression error-model comparison, plus simulation studies
that track pooled weights and evidence along growing records.
"""

from .distributions import (
    FiniteDensity,
    FiniteModel,
    GridDensity,
    InterestMapping,
    NormalConjugateSpec,
    marginalize,
    normal_posterior,
)
from .elicitation import ElicitationInput, RegressionPrior, elicit
from .ensembles import (
    HeterogeneousEnsemble,
    conjugate_ensemble,
    jeffrey_posterior,
    mixture_rb,
    predict,
    resolve_weights,
)
from .evidence import (
    EvidenceFunction,
    EvidenceSummary,
    combine_evidence_linear,
    consensus_audit,
    rb_power_mean,
    relative_belief,
    summarize,
)
from .numerics import SeededGenerator, sample
from .pooling import (
    InferenceBase,
    PoolSpec,
    normal_location_bases,
    pool_constant,
    pool_priors,
    pooled_posterior,
    pooled_predictive,
    posterior_pool_weights,
)
from .regression import (
    ErrorFamily,
    MonteCarloConfig,
    beta2_evidence,
    load_zellner,
    model_weights_regression,
    preprocess,
)
from .studies import (
    ConvergenceTrajectory,
    RobustnessReport,
    asymptotics_context1,
    asymptotics_context2,
    weight_robustness,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceTrajectory",
    "ElicitationInput",
    "ErrorFamily",
    "EvidenceFunction",
    "EvidenceSummary",
    "FiniteDensity",
    "FiniteModel",
    "GridDensity",
    "HeterogeneousEnsemble",
    "InferenceBase",
    "InterestMapping",
    "MonteCarloConfig",
    "NormalConjugateSpec",
    "PoolSpec",
    "RegressionPrior",
    "RobustnessReport",
    "SeededGenerator",
    "asymptotics_context1",
    "asymptotics_context2",
    "beta2_evidence",
    "combine_evidence_linear",
    "conjugate_ensemble",
    "consensus_audit",
    "elicit",
    "jeffrey_posterior",
    "load_zellner",
    "marginalize",
    "mixture_rb",
    "model_weights_regression",
    "normal_location_bases",
    "normal_posterior",
    "pool_constant",
    "pool_priors",
    "pooled_posterior",
    "pooled_predictive",
    "posterior_pool_weights",
    "predict",
    "preprocess",
    "rb_power_mean",
    "relative_belief",
    "resolve_weights",
    "sample",
    "summarize",
    "weight_robustness",
]
