"""Single tolerance record shared by the verification checks and the CLI.

The "full" profile carries the acceptance-grade scales; "fast" shrinks the
Monte Carlo sizes for smoke runs (tolerances widen where noise floors move).
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    fixed_point_residual: float = 1e-10
    kappa_residual: float = 1e-10
    kappa_constant_spread: float = 1e-10
    slope_tolerance: float = 0.05
    recursion_rel: float = 1e-9
    pathwise_rel: float = 1e-9
    semigroup_identity: float = 1e-8
    semigroup_property: float = 1e-6
    theorem1_final_rel: float = 0.05
    ks_m_vs_simulation: float = 0.005
    ks_steady_state: float = 0.01
    ks_theorem2: float = 0.03
    ks_max_convolution: float = 0.01
    ks_iterates: float = 0.02
    ks_sampler: float = 0.01
    mc_sigmas: float = 3.0


@dataclass(frozen=True)
class Profile:
    """Scales for the experiment kinds, by profile name."""

    name: str
    tolerances: Tolerances
    des_busy_periods: int = 1_000_000
    recursion_busy_periods: int = 10_000
    steady_state_steps: int = 1_000_000
    chain_reps: int = 10_000
    mc_draws: int = 100_000


def get_profile(name):
    if name == "full":
        return Profile(name="full", tolerances=Tolerances())
    if name == "fast":
        tol = replace(Tolerances(), ks_m_vs_simulation=0.02, ks_steady_state=0.05,
                      ks_max_convolution=0.03, ks_iterates=0.05)
        return Profile(name="fast", tolerances=tol, des_busy_periods=50_000,
                       recursion_busy_periods=2_000, steady_state_steps=100_000,
                       chain_reps=2_000, mc_draws=20_000)
    raise ValueError(f"unknown profile {name!r} (expected 'fast' or 'full')")
