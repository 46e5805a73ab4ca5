# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: busy-period extraction and embedded-chain stepping.

The numpy fallback in ``_kernels_py`` implements the same contracts; both
consume pre-drawn variate arrays so that results are reproducible and
backend-independent up to last-ulp rounding.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def process_jobs(double[::1] A, double[::1] V, carry, Py_ssize_t max_bp,
                 Py_ssize_t job_cap):
    """Advance the tandem busy-period scan over one chunk of jobs.

    A, V: interarrival and service draws for consecutive jobs.
    carry: (started, u, mx, cnt, z, t, t_comp, bp_start) scan state.
    Returns (M, I, R, njobs, t_last, t_tilde, start, new_carry, consumed).
    Stops after closing ``max_bp`` periods; the closing job (which opens the
    next period) is consumed. Raises if a single period exceeds ``job_cap``.
    """
    cdef Py_ssize_t n = A.shape[0]
    cdef bint started = carry[0]
    cdef double u = carry[1], mx = carry[2]
    cdef Py_ssize_t cnt = carry[3]
    cdef double z = carry[4], t = carry[5], t_comp = carry[6]
    cdef double bp_start = carry[7]

    out_M = np.empty(max_bp); out_I = np.empty(max_bp); out_R = np.empty(max_bp)
    out_N = np.empty(max_bp, dtype=np.int64)
    out_T = np.empty(max_bp); out_TT = np.empty(max_bp); out_S = np.empty(max_bp)
    cdef double[::1] M_v = out_M, I_v = out_I, R_v = out_R
    cdef long long[::1] N_v = out_N
    cdef double[::1] T_v = out_T, TT_v = out_TT, S_v = out_S

    cdef Py_ssize_t i = 0, done = 0
    cdef double a, v, idle, y, s

    while i < n:
        a = A[i]; v = V[i]
        if not started:
            # Kahan step: t += a
            y = a - t_comp; s = t + y; t_comp = (s - t) - y; t = s
            started = True
            u = v; mx = v; cnt = 1; z = v; bp_start = t
        elif a < u:
            y = a - t_comp; s = t + y; t_comp = (s - t) - y; t = s
            u = u - a + v
            if v > mx:
                mx = v
            cnt += 1
            z = z - v
            if z < 0.0:
                z = 0.0
            z = z + v
        else:
            idle = a - u
            M_v[done] = mx; I_v[done] = idle; R_v[done] = z
            N_v[done] = cnt; T_v[done] = t; TT_v[done] = t + u; S_v[done] = bp_start
            done += 1
            y = a - t_comp; s = t + y; t_comp = (s - t) - y; t = s
            u = v; mx = v; cnt = 1; bp_start = t
            z = z - (idle + v)
            if z < 0.0:
                z = 0.0
            z = z + v
            if done == max_bp:
                i += 1
                break
        if cnt > job_cap:
            raise RuntimeError(
                f"busy period exceeded job cap {job_cap}; "
                "traffic intensity is too close to (or above) one for this horizon")
        i += 1

    new_carry = (bool(started), u, mx, cnt, z, t, t_comp, bp_start)
    return (out_M[:done], out_I[:done], out_R[:done], out_N[:done],
            out_T[:done], out_TT[:done], out_S[:done], new_carry, i)


cdef inline double _invcdf_one(double u, double[::1] grid, double[::1] vals,
                               double w_last, double m_last, double mbar_last,
                               double inv_nu) noexcept:
    """Inverse-CDF draw from a tabulated monotone CDF with power-law tail.

    Matches the numpy fallback expression order exactly.
    """
    cdef Py_ssize_t lo, hi, mid
    cdef double slope
    if u >= m_last:
        return w_last * (mbar_last / (1.0 - u)) ** inv_nu
    lo = 0; hi = vals.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if vals[mid] <= u:
            lo = mid + 1
        else:
            hi = mid
    # lo = first index with vals[lo] > u; vals[0] = 0 <= u guarantees lo >= 1
    slope = (grid[lo] - grid[lo - 1]) / (vals[lo] - vals[lo - 1])
    return grid[lo - 1] + (u - vals[lo - 1]) * slope


def invcdf(double[::1] U, double[::1] grid, double[::1] vals, double inv_nu):
    """Vectorized inverse-CDF draws from a tabulated busy-period-maximum law."""
    cdef Py_ssize_t n = U.shape[0], i
    cdef double w_last = grid[grid.shape[0] - 1]
    cdef double m_last = vals[vals.shape[0] - 1]
    cdef double mbar_last = 1.0 - m_last
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = _invcdf_one(U[i], grid, vals, w_last, m_last, mbar_last, inv_nu)
    return out


def chain_terminal_block(double[::1] x, double[:, ::1] E, double[:, ::1] U,
                         double lam_n, double n_scale,
                         double[::1] grid, double[::1] vals, double inv_nu):
    """Advance a block of chain replications by E.shape[1] kernel steps.

    x is modified in place: x_r <- max(x_r - I/n, M/n) per step, with
    I = E[r,s]/lam_n exponential and M drawn by inverse CDF from U[r,s].
    """
    cdef Py_ssize_t reps = E.shape[0], steps = E.shape[1], r, s
    cdef double w_last = grid[grid.shape[0] - 1]
    cdef double m_last = vals[vals.shape[0] - 1]
    cdef double mbar_last = 1.0 - m_last
    cdef double xr, ii, mm
    for r in range(reps):
        xr = x[r]
        for s in range(steps):
            ii = E[r, s] / lam_n
            mm = _invcdf_one(U[r, s], grid, vals, w_last, m_last, mbar_last, inv_nu)
            ii = xr - ii / n_scale
            mm = mm / n_scale
            xr = ii if ii > mm else mm
        x[r] = xr
    return np.asarray(x)


def chain_path_block(double x0, double[::1] E, double[::1] U, double lam_n,
                     double n_scale, double[::1] grid, double[::1] vals,
                     double inv_nu):
    """Full trajectory of one chain over a block of steps; returns the path."""
    cdef Py_ssize_t steps = E.shape[0], s
    cdef double w_last = grid[grid.shape[0] - 1]
    cdef double m_last = vals[vals.shape[0] - 1]
    cdef double mbar_last = 1.0 - m_last
    cdef double xr = x0, ii, mm
    out = np.empty(steps)
    cdef double[::1] o = out
    for s in range(steps):
        ii = E[s] / lam_n
        mm = _invcdf_one(U[s], grid, vals, w_last, m_last, mbar_last, inv_nu)
        ii = xr - ii / n_scale
        mm = mm / n_scale
        xr = ii if ii > mm else mm
        o[s] = xr
    return out
