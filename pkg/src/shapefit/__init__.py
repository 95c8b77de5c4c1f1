"""Shape-constrained estimation for censored data.

Step MLEs via greatest convex minorants for the current status model
and for an incubation-time model equivalent to mixed-case interval
censoring, kernel-smoothed estimators with boundary reflection,
smoothed-bootstrap bandwidth selection and confidence bands, parametric
comparators, and integral-equation asymptotic variances for smooth
functionals.
"""

__version__ = "0.1.0"

from .bandwidth import BandwidthPlan, select_bandwidth_global, select_bandwidth_local
from .confidence import ConfidenceBand, coverage_experiment, cs_ci_studentized, incubation_ci
from .current_status import CurrentStatusData, SmleCurve, cs_mle, smle_curve, smle_eval
from .functionals import (
    asymptotic_variance_mean,
    c_e_constant,
    mean_of_mle,
    smle_asymptotic_variance,
    smle_quantile,
    solve_phi,
)
from .gcm import CusumDiagram, gcm_slopes, pava_weighted
from .incubation import (
    IncubationData,
    fenchel_gap,
    g_process,
    inc_mle,
    reduce_to_interval_censoring,
    w_process,
)
from .kernels import TRIWEIGHT, KernelSpec, kernel_eval
from .parametric import LogNormalParams, WeibullTruncParams, fit_parametric, lognormal_cdf, weibull_trunc_cdf
from .sim import ExperimentConfig, experiment_mean, experiment_percentile, gen_current_status, gen_incubation
from .stepdist import StepDistribution

__all__ = [
    "BandwidthPlan",
    "ConfidenceBand",
    "CurrentStatusData",
    "CusumDiagram",
    "ExperimentConfig",
    "IncubationData",
    "KernelSpec",
    "LogNormalParams",
    "SmleCurve",
    "StepDistribution",
    "TRIWEIGHT",
    "WeibullTruncParams",
    "asymptotic_variance_mean",
    "c_e_constant",
    "coverage_experiment",
    "cs_ci_studentized",
    "cs_mle",
    "experiment_mean",
    "experiment_percentile",
    "fenchel_gap",
    "fit_parametric",
    "g_process",
    "gcm_slopes",
    "gen_current_status",
    "gen_incubation",
    "inc_mle",
    "incubation_ci",
    "kernel_eval",
    "lognormal_cdf",
    "mean_of_mle",
    "pava_weighted",
    "reduce_to_interval_censoring",
    "select_bandwidth_global",
    "select_bandwidth_local",
    "smle_asymptotic_variance",
    "smle_curve",
    "smle_eval",
    "smle_quantile",
    "solve_phi",
    "w_process",
    "weibull_trunc_cdf",
]
