"""The limit function kappa(y), the limit CDF Phi(t, x), and its sampler.

kappa(y) is the unique positive root of

    C_nu E[exp(-lambda kappa T_nu)] - kappa gamma y^(nu-1) C_nu = (lambda kappa)^nu,

with C_nu = -1/Gamma(1-nu) and T_nu a standard Pareto(nu) variable.  The root
is constant in y when gamma = 0 and regularly varying with index 1-nu when
gamma > 0, bounded by (1/lambda) C_nu^(1/nu).

The limit CDF is Phi(t, x) = exp(-lambda int_x^{x+t/lambda} kappa(y)/y dy) for
x, t > 0, which collapses to (1 + t/(x lambda))^(-lambda kappa) when gamma = 0.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .heavytail import pareto_laplace, tail_constant_value

# cache defaults: log grid over [1e-3, 1e6], 1024 nodes
CACHE_Y_LO = 1e-3
CACHE_Y_HI = 1e6
CACHE_POINTS = 1024

_ROOT_EPS = 1e-14


@dataclass(frozen=True)
class KappaParams:
    """Rate lambda (= 1/mean service in the limit regime), tail index, gamma."""

    lam: float
    nu: float
    gamma: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        tail_constant_value(self.nu)  # validates nu

    @property
    def c_nu(self):
        return tail_constant_value(self.nu)


def kappa_upper_bound(params):
    """(1/lambda) C_nu^(1/nu); the root never exceeds this."""
    return (1.0 / params.lam) * params.c_nu ** (1.0 / params.nu)


def kappa_residual(params, y, kap):
    """Signed defect of the defining equation at a candidate root."""
    lhs = (params.c_nu * pareto_laplace(params.lam * kap, params.nu)
           - kap * params.gamma * y ** (params.nu - 1.0) * params.c_nu)
    return lhs - (params.lam * kap) ** params.nu


def solve_kappa(params, y):
    """Unique positive root of the limit equation at spatial argument y.

    The left side is strictly decreasing and positive at 0 (= C_nu), the right
    side strictly increasing from 0, so a bracket on
    (0, (1/lambda) C_nu^(1/nu)] always contains exactly one sign change.
    """
    if y <= 0:
        raise ValueError(f"y must be positive, got {y}")
    ub = kappa_upper_bound(params)
    return brentq(lambda k: kappa_residual(params, y, k),
                  _ROOT_EPS, ub, xtol=1e-15, rtol=8.9e-16, maxiter=300)


@dataclass(frozen=True)
class KappaFunction:
    """kappa solved on a log grid, with the antiderivative of kappa(y)/y.

    Interpolation is linear in log-log coordinates (monotone, positive); below
    the grid kappa is extended flat (the root converges to the gamma = 0 root
    as y -> 0), above it by the regular-variation power law y^(1-nu).
    Off-range point queries via :meth:`value` solve the equation fresh.
    """

    params: KappaParams
    y_grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    _logy: np.ndarray = field(repr=False)
    _logk: np.ndarray = field(repr=False)
    _slopes: np.ndarray = field(repr=False)
    _J_nodes: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, params, y_lo=CACHE_Y_LO, y_hi=CACHE_Y_HI, points=CACHE_POINTS):
        logy = np.linspace(math.log(y_lo), math.log(y_hi), points)
        y = np.exp(logy)
        if params.gamma == 0.0:
            k = np.full(points, solve_kappa(params, 1.0))
        else:
            k = np.array([solve_kappa(params, yi) for yi in y])
        logk = np.log(k)
        slopes = np.diff(logk) / np.diff(logy)
        dly = np.diff(logy)
        flat = np.abs(slopes) < 1e-14
        safe = np.where(flat, 1.0, slopes)
        seg = np.where(flat, k[:-1] * dly,
                       k[:-1] / safe * (np.exp(slopes * dly) - 1.0))
        J = np.concatenate([[0.0], np.cumsum(seg)])
        return cls(params=params, y_grid=y, values=k, _logy=logy, _logk=logk,
                   _slopes=slopes, _J_nodes=J)

    def value(self, y):
        """kappa at a single point, solved fresh (not interpolated)."""
        return solve_kappa(self.params, y)

    def interp(self, y):
        """Vectorized cached interpolant (the one integrated by J)."""
        y = np.asarray(y, dtype=float)
        out = np.empty(y.shape)
        lo = y <= self.y_grid[0]
        hi = y >= self.y_grid[-1]
        mid = ~(lo | hi)
        out[lo] = self.values[0]
        out[hi] = self.values[-1] * (y[hi] / self.y_grid[-1]) ** (1.0 - self.params.nu)
        if np.any(mid):
            ly = np.log(y[mid])
            j = np.clip(np.searchsorted(self._logy, ly, side="right") - 1,
                        0, len(self._logy) - 2)
            out[mid] = np.exp(self._logk[j] + self._slopes[j] * (ly - self._logy[j]))
        if out.ndim == 0:
            return float(out)
        return out

    def J(self, y):
        """integral of kappa(u)/u du from the first grid node to y (vectorized).

        Exact for the log-log-linear interpolant; extended by the flat value
        below the grid and the closed-form power-law tail above it.
        """
        y = np.asarray(y, dtype=float)
        out = np.empty(y.shape)
        lo = y <= self.y_grid[0]
        hi = y >= self.y_grid[-1]
        mid = ~(lo | hi)
        with np.errstate(divide="ignore"):
            out[lo] = -self.values[0] * (math.log(self.y_grid[0]) - np.log(y[lo]))
        nu = self.params.nu
        r = (y[hi] / self.y_grid[-1]) ** (1.0 - nu)
        out[hi] = self._J_nodes[-1] + self.values[-1] / (1.0 - nu) * (r - 1.0)
        if np.any(mid):
            ly = np.log(y[mid])
            j = np.clip(np.searchsorted(self._logy, ly, side="right") - 1,
                        0, len(self._logy) - 2)
            dl = ly - self._logy[j]
            s = self._slopes[j]
            flat = np.abs(s) < 1e-14
            safe = np.where(flat, 1.0, s)
            seg = np.where(flat, self.values[j] * dl,
                           self.values[j] / safe * (np.exp(s * dl) - 1.0))
            out[mid] = self._J_nodes[j] + seg
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def J_inf(self):
        """Limit of J at infinity; finite only when gamma > 0."""
        if self.params.gamma == 0.0:
            return math.inf
        return float(self._J_nodes[-1] + self.values[-1] / (self.params.nu - 1.0))

    def residuals(self):
        """Defining-equation residual at every cached node."""
        return np.array([abs(kappa_residual(self.params, y, k))
                         for y, k in zip(self.y_grid, self.values)])


def regular_variation_exponent(kappa_fn, y_lo, y_hi, points=33):
    """Least-squares slope of log kappa against log y over [y_lo, y_hi].

    Requires gamma > 0 (the exponent is undefined for the constant solution)
    and a span of at least two decades.
    """
    if kappa_fn.params.gamma == 0.0:
        raise ValueError("regular-variation exponent undefined for gamma = 0")
    if y_hi / y_lo < 100.0:
        raise ValueError("span must cover at least two decades")
    ys = np.logspace(math.log10(y_lo), math.log10(y_hi), points)
    ks = np.array([solve_kappa(kappa_fn.params, y) for y in ys])
    return float(np.polyfit(np.log(ys), np.log(ks), 1)[0])


@dataclass(frozen=True)
class LimitCdf:
    """The limit CDF Phi(t, .) of the scaled embedded workload, and its sampler."""

    kappa_fn: KappaFunction

    @property
    def params(self):
        return self.kappa_fn.params

    def phi(self, t, x):
        """Phi(t, x) with the boundary conventions:

        Phi(t, x) = 0 for x < 0; Phi(t, 0) = 0 for t > 0; Phi(0, x) = 1 for
        x >= 0.  gamma = 0 uses the closed form; gamma > 0 integrates the
        cached kappa.
        """
        if t < 0:
            raise ValueError("t must be nonnegative")
        x = np.asarray(x, dtype=float)
        if t == 0.0:
            out = np.where(x >= 0.0, 1.0, 0.0)
            return float(out) if out.ndim == 0 else out
        p = self.params
        out = np.zeros(x.shape)
        pos = x > 0.0
        if p.gamma == 0.0:
            k0 = self.kappa_fn.values[0]
            out[pos] = (1.0 + t / (x[pos] * p.lam)) ** (-p.lam * k0)
        else:
            expo = self.kappa_fn.J(x[pos] + t / p.lam) - self.kappa_fn.J(x[pos])
            out[pos] = np.exp(-p.lam * expo)
        if out.ndim == 0:
            return float(out)
        return out

    def phi_via_integral(self, t, x):
        """Integral-form evaluation regardless of gamma (cross-check twin)."""
        if t < 0:
            raise ValueError("t must be nonnegative")
        x = np.asarray(x, dtype=float)
        if t == 0.0:
            out = np.where(x >= 0.0, 1.0, 0.0)
            return float(out) if out.ndim == 0 else out
        out = np.zeros(x.shape)
        pos = x > 0.0
        p = self.params
        expo = self.kappa_fn.J(x[pos] + t / p.lam) - self.kappa_fn.J(x[pos])
        out[pos] = np.exp(-p.lam * expo)
        if out.ndim == 0:
            return float(out)
        return out

    def phi_infinity(self, x):
        """Large-t limit exp(-lambda int_x^inf kappa/y dy); 0 when gamma = 0.

        For gamma = 0 the integrand is constant/y, the integral diverges, and
        the degenerate value 0 is returned for every x.
        """
        p = self.params
        x = np.asarray(x, dtype=float)
        if p.gamma == 0.0:
            out = np.zeros(x.shape)
            return float(out) if out.ndim == 0 else out
        out = np.zeros(x.shape)
        pos = x > 0.0
        out[pos] = np.exp(-p.lam * (self.kappa_fn.J_inf - self.kappa_fn.J(x[pos])))
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def diverges_at_infinity(self):
        """True when gamma = 0 (the large-t limit is the degenerate 0)."""
        return self.params.gamma == 0.0

    def pdf(self, t, x):
        """dPhi/dx from the analytic exponent derivative (no differencing)."""
        if t <= 0:
            raise ValueError("density defined for t > 0")
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        pos = x > 0.0
        p = self.params
        xp = x[pos]
        kx = self.kappa_fn.interp(xp)
        kxt = self.kappa_fn.interp(xp + t / p.lam)
        out[pos] = (self.phi_via_integral(t, xp) * p.lam
                    * (kx / xp - kxt / (xp + t / p.lam)))
        if out.ndim == 0:
            return float(out)
        return out

    def quantile(self, t, u):
        """x with Phi(t, x) = u, by closed form (gamma = 0) or log bisection."""
        if t <= 0:
            raise ValueError("quantile defined for t > 0")
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        if np.any((u < 0) | (u >= 1)):
            raise ValueError("u must lie in [0, 1)")
        p = self.params
        if p.gamma == 0.0:
            k0 = self.kappa_fn.values[0]
            with np.errstate(divide="ignore", over="ignore"):
                out = (t / p.lam) / (u ** (-1.0 / (p.lam * k0)) - 1.0)
            out[u == 0.0] = 0.0
        else:
            lo = np.full(u.shape, -200.0)
            hi = np.full(u.shape, math.log(max(1.0, 2.0 * t / p.lam)))
            for _ in range(200):
                bad = self.phi_via_integral(t, np.exp(hi)) <= u
                if not bad.any():
                    break
                hi[bad] += 1.0
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                below = self.phi_via_integral(t, np.exp(mid)) < u
                lo[below] = mid[below]
                hi[~below] = mid[~below]
            out = np.exp(0.5 * (lo + hi))
            out[u == 0.0] = 0.0
        return float(out[0]) if scalar else out

    def sample_z(self, t, rng, size=None):
        """Inverse-CDF draw of the limit variable at scaled time t."""
        u = rng.random(size if size is not None else ())
        scalar = np.ndim(u) == 0
        out = self.quantile(t, np.atleast_1d(u))
        return float(out[0]) if scalar else out
