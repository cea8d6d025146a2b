"""Strong-mixing bound calculators and coupling experiments for discrete-valued
time series with exogenous covariates.

The heavy lifting lives in the C++ core; this package re-exports the bound
calculators, the exact alpha/minorization helpers, and the experiment runner.
"""

from ._mixsim import (
    ConfigError,
    DecaySequence,
    alpha_exact,
    alpha_markov_exact,
    bstar_certified,
    bstar_sequence,
    cor_mixing_bound,
    dobrushin_coefficient,
    doeblin_decompose,
    experiments,
    geometric_block_sum,
    lemma_ult3_bound,
    lemma_ult_bound,
    markov_alpha_envelope,
    max_minorization_mass,
    omega_value,
    poisson_coupling_distance,
    poisson_inv_cdf,
    rate_schedule,
    run_config,
    run_config_file,
    run_experiment,
    schedule_j,
    stationary,
    thm1_bound,
    thm2_bound,
    thm3_bound,
    tv_distance,
)

__all__ = [
    "ConfigError",
    "DecaySequence",
    "alpha_exact",
    "alpha_markov_exact",
    "bstar_certified",
    "bstar_sequence",
    "cor_mixing_bound",
    "dobrushin_coefficient",
    "doeblin_decompose",
    "experiments",
    "geometric_block_sum",
    "lemma_ult3_bound",
    "lemma_ult_bound",
    "markov_alpha_envelope",
    "max_minorization_mass",
    "omega_value",
    "poisson_coupling_distance",
    "poisson_inv_cdf",
    "rate_schedule",
    "run_config",
    "run_config_file",
    "run_experiment",
    "schedule_j",
    "stationary",
    "thm1_bound",
    "thm2_bound",
    "thm3_bound",
    "tv_distance",
]
