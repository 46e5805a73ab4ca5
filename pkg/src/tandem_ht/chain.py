"""Embedded chain of downstream workloads under the heavy-traffic schedule.

The n-th system runs at rho_n = 1 - gamma n F-bar(n) exactly, so the rate
constant gamma is realized at every scale, not only in the limit.  The chain
steps by value <- max(value - I/n, M/n) with I exponential at rate lambda_n
and M a busy-period maximum at lambda_n; replications own counter-based
Philox streams keyed by (master_seed, replication index), which makes every
ensemble reproducible for any worker partition.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend, boxma
from .heavytail import ServiceDistribution

_REP_CHUNK = 512
_PATH_BLOCK = 1 << 17


@dataclass(frozen=True)
class HeavyTrafficSchedule:
    """Parameters of the n-th system on the critical approach."""

    dist: ServiceDistribution
    gamma: float
    n: int

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.n < 1:
            raise ValueError(f"scale index must be >= 1, got {self.n}")
        if self.gamma * self.n * self.dist.tail(float(self.n)) >= 1.0:
            raise ValueError(
                f"n={self.n} too small for gamma={self.gamma}: "
                "the scheduled traffic intensity would be nonpositive")

    @property
    def rho_n(self):
        return 1.0 - self.gamma * self.n * self.dist.tail(float(self.n))

    @property
    def lambda_n(self):
        return self.rho_n / self.dist.mean

    @property
    def lambda_limit(self):
        return 1.0 / self.dist.mean


def schedule(dist, gamma, n):
    """Construct the n-th system's schedule; rejects n too small for gamma."""
    return HeavyTrafficSchedule(dist=dist, gamma=gamma, n=n)


@dataclass(frozen=True)
class ChainState:
    value: float
    step: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("chain lives in [0, inf)")


def rep_rng(master_seed, rep_index):
    """Counter-based stream for one replication: Philox keyed by (seed, rep)."""
    return np.random.Generator(
        np.random.Philox(key=np.uint64([master_seed, rep_index])))


def default_max_table(sched, points=None, w_max=None):
    """Tabulated busy-period-maximum law at lambda_n for inverse-CDF sampling.

    The grid reaches past n so that draws at the scale of the probe window
    interpolate rather than extrapolate.
    """
    b = sched.dist.scale
    if w_max is None:
        w_max = max(boxma.DEFAULT_GRID_SPAN * b, 10.0 * sched.n * b)
    spec = boxma.GridSpec(w_max=w_max,
                          points=points or boxma.DEFAULT_GRID_POINTS)
    return boxma.tabulate(sched.lambda_n, sched.dist, spec)


def step(state, sched, m_sampler, rng):
    """One kernel step: max(value - I/n, M/n) with I ~ Exp(lambda_n)."""
    idle = rng.standard_exponential() / sched.lambda_n
    m_draw = m_sampler.sample(rng) if hasattr(m_sampler, "sample") else m_sampler(rng)
    value = max(state.value - idle / sched.n, m_draw / sched.n)
    return ChainState(value=value, step=state.step + 1)


def run_scaled(sched, t, x0, reps, master_seed, maxcdf=None,
               rep_offset=0, rep_chunk=_REP_CHUNK):
    """Terminal values of X_n(t) = Y_n([nt]) over independent replications.

    Each replication r uses the stream keyed (master_seed, rep_offset + r) and
    consumes, in order, [nt] exponential draws then [nt] uniforms.  Returns an
    array of ``reps`` terminal values (all equal to x0 when [nt] = 0).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if x0 < 0:
        raise ValueError("x0 must be nonnegative")
    steps = int(math.floor(sched.n * t))
    out = np.full(reps, float(x0))
    if steps == 0 or reps == 0:
        return out
    if maxcdf is None:
        maxcdf = default_max_table(sched)
    inv_nu = 1.0 / sched.dist.nu
    for lo in range(0, reps, rep_chunk):
        hi = min(lo + rep_chunk, reps)
        k = hi - lo
        E = np.empty((k, steps))
        U = np.empty((k, steps))
        for r in range(k):
            rng = rep_rng(master_seed, rep_offset + lo + r)
            E[r] = rng.standard_exponential(steps)
            U[r] = rng.random(steps)
        x = np.full(k, float(x0))
        _backend.chain_terminal_block(x, E, U, sched.lambda_n, float(sched.n),
                                      maxcdf.grid, maxcdf.values, inv_nu)
        out[lo:hi] = x
    return out


def chain_path(lam, maxcdf, steps, x0, rng, n_scale=1.0, block=_PATH_BLOCK):
    """Full trajectory of one chain at fixed arrival rate (n_scale = 1 default).

    Used for long-run steady-state sampling; draws are consumed in blocks of
    (exponentials, uniforms).
    """
    out = np.empty(steps)
    x = float(x0)
    inv_nu = 1.0 / maxcdf.dist.nu
    done = 0
    while done < steps:
        k = min(block, steps - done)
        E = rng.standard_exponential(k)
        U = rng.random(k)
        seg = _backend.chain_path_block(x, E, U, lam, float(n_scale),
                                        maxcdf.grid, maxcdf.values, inv_nu)
        out[done:done + k] = seg
        x = float(seg[-1])
        done += k
    return out


def scaled_max_cdf_probe(sched, y_grid):
    """n (1 - m^(n)(n y)) for each y: the quantity converging to kappa(y)/y."""
    out = np.empty(len(y_grid))
    for i, y in enumerate(y_grid):
        if y <= 0:
            raise ValueError("probe grid must be bounded away from zero")
        out[i] = sched.n * (1.0 - boxma.solve_m_at(
            sched.lambda_n, sched.dist, sched.n * y))
    return out


def shifted_probe(sched, y, b_shift):
    """n (1 - m^(n)(n y + b_shift)): same limit as the unshifted probe."""
    if y <= 0:
        raise ValueError("y must be positive")
    w = sched.n * y + b_shift
    return sched.n * (1.0 - boxma.solve_m_at(sched.lambda_n, sched.dist, w))


def idle_sum_flatness(sched, t, reps, master_seed, rep_chunk=_REP_CHUNK):
    """Mean over replications of (1/n) max_k |sum_(i<=k) (I_i - 1/lambda_n)|.

    The statistic vanishes as n grows; it quantifies how well idle sums track
    their mean over the [nt]-step window.
    """
    steps = int(math.floor(sched.n * t))
    if steps == 0:
        return 0.0
    acc = 0.0
    for lo in range(0, reps, rep_chunk):
        hi = min(lo + rep_chunk, reps)
        k = hi - lo
        E = np.empty((k, steps))
        for r in range(k):
            rng = rep_rng(master_seed, lo + r)
            E[r] = rng.standard_exponential(steps)
        centered = E / sched.lambda_n - 1.0 / sched.lambda_n
        dev = np.abs(np.cumsum(centered, axis=1)).max(axis=1)
        acc += float(dev.sum())
    return acc / (reps * sched.n)
