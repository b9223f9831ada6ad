"""Consensus dynamics on activity-driven temporal networks.

Closed-form expected heat kernels, certified geometric decay bounds for
the sparse and fast-switching regimes, a reproducible Monte Carlo
survival-curve estimator, and exact enumeration oracles that gate all of
the closed forms.
"""

from .adn_model import (
    ModelParams,
    Snapshot,
    TieBreakRule,
    UNIFORM_TIE_BREAK,
    generate_fastswitch_snapshot,
    generate_snapshot,
    generate_sparse_snapshot,
    snapshot_count,
    snapshot_laplacian,
)
from .closed_form import (
    activation_expectation,
    sparse_expected_exponential,
    star_exponential,
    weighted_expected_exponential,
)
from .graph_core import (
    StarSpec,
    expm_sym,
    star_laplacian,
    star_laplacian_power,
    symmetrize,
)
from .mc_sim import (
    DecayFit,
    SurvivalCurve,
    fit_decay_rate,
    fit_decay_stats,
    off_consensus_sq,
    project_off_consensus,
    run_paths,
    step,
)
from .spectral import (
    DecayBound,
    convergence_bound,
    gamma_fs,
    gamma_sp,
    lambda_second_deflated,
    lambda_second_largest,
    poisson_binomial_pmf,
    survivor_rates,
)
from .validation import (
    FastSwitchReport,
    GapSample,
    enumerate_expected_exponential,
    enumeration_size,
    verify_fast_switch_inequality,
)

__all__ = [
    "DecayBound",
    "DecayFit",
    "FastSwitchReport",
    "GapSample",
    "ModelParams",
    "Snapshot",
    "StarSpec",
    "SurvivalCurve",
    "TieBreakRule",
    "UNIFORM_TIE_BREAK",
    "activation_expectation",
    "convergence_bound",
    "enumerate_expected_exponential",
    "enumeration_size",
    "expm_sym",
    "fit_decay_rate",
    "fit_decay_stats",
    "gamma_fs",
    "gamma_sp",
    "generate_fastswitch_snapshot",
    "generate_snapshot",
    "generate_sparse_snapshot",
    "lambda_second_deflated",
    "lambda_second_largest",
    "off_consensus_sq",
    "poisson_binomial_pmf",
    "project_off_consensus",
    "run_paths",
    "snapshot_count",
    "snapshot_laplacian",
    "sparse_expected_exponential",
    "star_exponential",
    "star_laplacian",
    "star_laplacian_power",
    "step",
    "survivor_rates",
    "symmetrize",
    "verify_fast_switch_inequality",
    "weighted_expected_exponential",
]
