"""Fixed point for the busy-period-maximum CDF and the pre-limit steady state.

For an M/G/1 queue with arrival rate lambda and service law F, the CDF m of
the largest service time in a busy period is the unique solution of Boxma's
equation

    m(w) = integral_0^w exp(-lambda t (1 - m(w))) dF(t),

and the steady-state law of the embedded downstream workload is
m(w) exp(-lambda integral_w^inf (1 - m(y)) dy) when rho < 1.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import _backend
from .heavytail import ServiceDistribution, exp_tail_integral

#: default tabulation grid: log-spaced, 512 points, [b, 1e4 b]
DEFAULT_GRID_POINTS = 512
DEFAULT_GRID_SPAN = 1e4


@dataclass(frozen=True)
class GridSpec:
    """Log-spaced abscissae for tabulating m, from the support endpoint up."""

    w_max: float
    points: int = DEFAULT_GRID_POINTS

    def abscissae(self, dist):
        b = dist.scale
        if self.w_max <= b:
            raise ValueError("grid must extend beyond the support endpoint")
        return np.logspace(math.log10(b), math.log10(self.w_max), self.points)


def _check_rho(lam, dist, strict=False):
    rho = lam * dist.mean
    if lam <= 0:
        raise ValueError(f"arrival rate must be positive, got {lam}")
    if strict and rho >= 1.0:
        raise ValueError(f"steady state requires rho < 1, got rho={rho}")
    if rho > 1.0 + 1e-12:
        raise ValueError(f"busy-period maxima are defective for rho={rho} > 1")
    return rho


def exp_service_integral(c, dist, w):
    """int_b^w e^{-c t} dF(t) by adaptive quadrature in log scale.

    The substitution t = e^u flattens the integrand across the decades of a
    wide integration range; this is the solver-side integrator (the residual
    recheck uses the independent closed form in ``heavytail``).
    """
    nu, b = dist.nu, dist.scale
    if w <= b:
        return 0.0
    coef = nu * b ** nu
    val, _ = quad(lambda u: coef * math.exp(-nu * u - c * math.exp(u)),
                  math.log(b), math.log(w),
                  epsabs=1e-13, epsrel=1e-12, limit=400)
    return val


def solve_m_at(lam, dist, w):
    """Unique root m in [0, 1] of Boxma's equation at abscissa w.

    Bracketed root-finding: g(m) = integral - m has g(0) >= 0 and
    g(1) = F(w) - 1 <= 0.  Residual after convergence is ~1e-12.
    """
    _check_rho(lam, dist)
    if w <= dist.scale:
        return 0.0

    def g(mval):
        return exp_service_integral(lam * (1.0 - mval), dist, w) - mval

    return brentq(g, 0.0, 1.0, xtol=1e-13, rtol=8.9e-16, maxiter=200)


def fixed_point_residual(lam, dist, w, m):
    """|integral_0^w e^{-lam t (1-m)} dF(t) - m| via the closed-form integrator.

    Independent of the solver's adaptive quadrature.
    """
    if w <= dist.scale:
        return abs(m)
    return abs(exp_tail_integral(lam * (1.0 - m), dist, w) - m)


@dataclass(frozen=True)
class MaxServiceCdf:
    """Tabulated m on a monotone grid, with power-law tail extrapolation."""

    lam: float
    dist: ServiceDistribution
    grid: np.ndarray
    values: np.ndarray

    @property
    def w_max(self):
        return float(self.grid[-1])

    @property
    def mbar_last(self):
        return 1.0 - float(self.values[-1])

    def cdf(self, w):
        """m(w): 0 below support, interpolated on-grid, power-law tail beyond."""
        w = np.asarray(w, dtype=float)
        out = np.interp(w, self.grid, self.values, left=0.0)
        t = w > self.grid[-1]
        if np.any(t):
            out[t] = 1.0 - self.mbar_last * (w[t] / self.w_max) ** (-self.dist.nu)
        if out.ndim == 0:
            return float(out)
        return out

    def mbar(self, w):
        return 1.0 - self.cdf(w)

    def sample(self, rng, size=None):
        """Inverse-CDF draws; beyond the grid the regular-variation tail is used."""
        u = rng.random(size if size is not None else ())
        scalar = u.ndim == 0
        out = _backend.invcdf(np.atleast_1d(u), self.grid, self.values,
                              1.0 / self.dist.nu)
        return float(out[0]) if scalar else out

    def residuals(self):
        """Independently recomputed fixed-point residual at every node."""
        return np.array([fixed_point_residual(self.lam, self.dist, w, m)
                         for w, m in zip(self.grid, self.values)])


def tabulate(lam, dist, grid_spec=None):
    """Solve Boxma's equation across a grid and package the monotone table."""
    if grid_spec is None:
        grid_spec = GridSpec(w_max=DEFAULT_GRID_SPAN * dist.scale)
    grid = grid_spec.abscissae(dist)
    values = np.empty_like(grid)
    for i, w in enumerate(grid):
        try:
            values[i] = solve_m_at(lam, dist, w)
        except Exception as exc:
            raise RuntimeError(f"fixed-point solve failed at w={w}") from exc
    # clamp tiny non-monotonicities from independent per-point solves
    values = np.maximum.accumulate(values)
    values[0] = 0.0
    return MaxServiceCdf(lam=lam, dist=dist, grid=grid, values=values)


def sample_max(maxcdf, rng, size=None):
    """Module-level alias for MaxServiceCdf.sample."""
    return maxcdf.sample(rng, size)


@dataclass(frozen=True)
class SteadyStateLaw:
    """Steady-state CDF of the embedded downstream workload for rho < 1."""

    maxcdf: MaxServiceCdf
    tail_integral_nodes: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_maxcdf(cls, maxcdf):
        _check_rho(maxcdf.lam, maxcdf.dist, strict=True)
        grid = maxcdf.grid
        mbar = 1.0 - maxcdf.values
        seg = (mbar[1:] + mbar[:-1]) / 2.0 * np.diff(grid)
        nodes = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
        nu = maxcdf.dist.nu
        nodes = nodes + maxcdf.mbar_last * maxcdf.w_max / (nu - 1.0)
        return cls(maxcdf=maxcdf, tail_integral_nodes=nodes)

    def tail_integral(self, w):
        """integral_w^inf (1 - m(y)) dy: exact for the piecewise-linear table."""
        mc = self.maxcdf
        w = np.asarray(w, dtype=float)
        out = np.empty(w.shape)
        nu = mc.dist.nu
        below = w <= mc.grid[0]
        out[below] = self.tail_integral_nodes[0] + (mc.grid[0] - w[below])
        above = w >= mc.grid[-1]
        mbar_t = mc.mbar_last * (w[above] / mc.w_max) ** (-nu)
        out[above] = mbar_t * w[above] / (nu - 1.0)
        mid = ~(below | above)
        if np.any(mid):
            j = np.searchsorted(mc.grid, w[mid], side="right") - 1
            j = np.clip(j, 0, len(mc.grid) - 2)
            mbar_w = 1.0 - np.interp(w[mid], mc.grid, mc.values)
            mbar_j1 = 1.0 - mc.values[j + 1]
            out[mid] = (self.tail_integral_nodes[j + 1]
                        + (mc.grid[j + 1] - w[mid]) * (mbar_w + mbar_j1) / 2.0)
        if out.ndim == 0:
            return float(out)
        return out

    def cdf(self, w):
        """m(w) exp(-lambda integral_w^inf (1 - m)); a proper CDF for rho < 1."""
        w = np.asarray(w, dtype=float)
        out = self.maxcdf.cdf(w) * np.exp(-self.maxcdf.lam * self.tail_integral(w))
        if out.ndim == 0:
            return float(out)
        return out


def steady_state_cdf(law, w):
    """Module-level alias for SteadyStateLaw.cdf."""
    return law.cdf(w)
