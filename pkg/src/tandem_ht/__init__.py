"""Heavy-traffic laboratory for the two-node tandem queue with reused services.

Solvers for the busy-period-maximum fixed point and the limit function
kappa(y), the limit CDF and its semigroup/generator checks, and event-driven
plus Markov-chain Monte Carlo for cross-validation, all under infinite-
variance (Pareto) service laws.
"""

from ._backend import active_backend
from .boxma import (GridSpec, MaxServiceCdf, SteadyStateLaw, fixed_point_residual,
                    sample_max, solve_m_at, steady_state_cdf, tabulate)
from .chain import (ChainState, HeavyTrafficSchedule, idle_sum_flatness,
                    run_scaled, scaled_max_cdf_probe, schedule, shifted_probe,
                    step)
from .config import Profile, Tolerances, get_profile
from .heavytail import (ServiceDistribution, TailConstant, gamma_one_minus,
                        pareto_laplace, tail_constant_value)
from .kappa import (KappaFunction, KappaParams, LimitCdf, kappa_residual,
                    kappa_upper_bound, regular_variation_exponent, solve_kappa)
from .limits import (EmpiricalDistribution, TestFunction, bump_test_function,
                     discrete_generator, generator_apply, generator_limit_check,
                     iterate_representation_check, ks_distance, semigroup_apply,
                     semigroup_property)
from .tandemsim import (BusyPeriodRecord, JobRecord, SimulationResult,
                        WorkloadPath, max_representation, q2_sojourn_max,
                        simulate, verify_recursion, work_conservation_max_error)

__version__ = "0.1.0"

__all__ = [
    "ServiceDistribution", "TailConstant", "gamma_one_minus", "pareto_laplace",
    "tail_constant_value",
    "GridSpec", "MaxServiceCdf", "SteadyStateLaw", "solve_m_at", "tabulate",
    "sample_max", "steady_state_cdf", "fixed_point_residual",
    "KappaParams", "KappaFunction", "LimitCdf", "solve_kappa", "kappa_residual",
    "kappa_upper_bound", "regular_variation_exponent",
    "simulate", "verify_recursion", "q2_sojourn_max", "max_representation",
    "work_conservation_max_error", "BusyPeriodRecord", "JobRecord",
    "SimulationResult", "WorkloadPath",
    "HeavyTrafficSchedule", "ChainState", "schedule", "step", "run_scaled",
    "scaled_max_cdf_probe", "shifted_probe", "idle_sum_flatness",
    "TestFunction", "bump_test_function", "EmpiricalDistribution", "ks_distance",
    "semigroup_apply", "semigroup_property", "generator_apply",
    "generator_limit_check", "discrete_generator", "iterate_representation_check",
    "Tolerances", "Profile", "get_profile", "active_backend",
]
