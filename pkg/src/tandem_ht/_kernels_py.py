"""Pure-numpy fallback for the compiled kernels.

Same contracts as ``_kernels``: busy periods come out of a vectorized
descending-ladder scan of the workload walk instead of a per-job loop, and the
chain advances step-major across a block of replications.  Extended precision
(long double) is used for the walk and for arrival epochs so that the chunked
vectorized arithmetic stays within last-ulp agreement with the sequential
compiled loop.
"""

import numpy as np

BACKEND = "python"

_LD = np.longdouble


def invcdf(U, grid, vals, inv_nu):
    """Inverse-CDF draws from a tabulated CDF with a power-law tail.

    Expression order matches the compiled kernel bit for bit.
    """
    U = np.asarray(U, dtype=float)
    out = np.empty(U.shape)
    w_last = grid[-1]
    m_last = vals[-1]
    mbar_last = 1.0 - m_last
    tail = U >= m_last
    if tail.any():
        out[tail] = w_last * (mbar_last / (1.0 - U[tail])) ** inv_nu
    core = ~tail
    if core.any():
        j = np.searchsorted(vals, U[core], side="right")
        slope = (grid[j] - grid[j - 1]) / (vals[j] - vals[j - 1])
        out[core] = grid[j - 1] + (U[core] - vals[j - 1]) * slope
    return out


def chain_terminal_block(x, E, U, lam_n, n_scale, grid, vals, inv_nu):
    """Advance a block of replications by E.shape[1] kernel steps, in place."""
    for s in range(E.shape[1]):
        I = E[:, s] / lam_n
        M = invcdf(U[:, s], grid, vals, inv_nu)
        np.maximum(x - I / n_scale, M / n_scale, out=x)
    return x


def chain_path_block(x0, E, U, lam_n, n_scale, grid, vals, inv_nu):
    """Trajectory of one chain over a block of steps.

    Uses the exact unrolled form of the recursion
    x_k = max(x_{k-1} - I_k, M_k) = max(x_0, max_{j<=k}(M_j + S_j)) - S_k
    with S the idle prefix sums; identical to sequential stepping up to
    last-ulp rounding.
    """
    I = E / lam_n / n_scale
    M = invcdf(U, grid, vals, inv_nu) / n_scale
    S = np.cumsum(I)
    return np.maximum(x0, np.maximum.accumulate(M + S)) - S


def process_jobs(A, V, carry, max_bp, job_cap):
    """Vectorized busy-period scan over one chunk of jobs.

    Busy-period closures are the strict descending-ladder epochs of the
    workload walk D_i = u0 + sum_{j<=i}(V_j - A_j) - V_i relative to the
    running minimum (floored at zero for the carried-in period).
    """
    started, u0, mx0, cnt0, z0, t_hi, t_lo, bp_start0 = carry
    A = np.asarray(A, dtype=float)
    V = np.asarray(V, dtype=float)
    consumed_head = 0
    T0 = _LD(t_hi) + _LD(t_lo)

    if not started:
        T0 = T0 + _LD(A[0])
        u0 = V[0]
        mx0 = V[0]
        cnt0 = 1
        z0 = V[0]
        bp_start0 = float(T0)
        A = A[1:]
        V = V[1:]
        consumed_head = 1
        started = True

    m = len(A)
    empty = np.empty(0)
    if m == 0:
        new_carry = (True, u0, mx0, cnt0, z0, float(T0), float(T0 - _LD(float(T0))), bp_start0)
        return (empty, empty, empty, np.empty(0, dtype=np.int64), empty, empty,
                empty, new_carry, consumed_head)

    Ald = A.astype(_LD)
    Vld = V.astype(_LD)
    P = np.cumsum(Vld - Ald)
    D = _LD(u0) + P - Vld
    runmin_prev = np.minimum.accumulate(np.concatenate((np.zeros(1, dtype=_LD), D)))[:-1]
    clos = np.flatnonzero(D < runmin_prev)

    K = min(len(clos), max_bp)
    c = clos[:K]
    if K < len(clos):
        consumed = int(c[-1]) + 1
    else:
        consumed = m

    epochs = T0 + np.cumsum(Ald)

    if K == 0:
        cnt_open = cnt0 + m
        if cnt_open > job_cap:
            _raise_cap(job_cap)
        u_open = float(D[m - 1] + Vld[m - 1])
        mx_open = max(mx0, float(V.max()))
        t_new = epochs[m - 1]
        new_carry = (True, u_open, mx_open, cnt_open, z0,
                     float(t_new), float(t_new - _LD(float(t_new))), bp_start0)
        return (empty, empty, empty, np.empty(0, dtype=np.int64), empty, empty,
                empty, new_carry, consumed_head + consumed)

    base = np.concatenate((np.zeros(1, dtype=_LD), D[c[:-1]]))
    out_I = np.asarray(base - D[c], dtype=float)

    # per-period job counts; the first period also carries jobs from earlier chunks
    cnt_chunk = np.diff(np.concatenate(([0], c)))
    out_N = cnt_chunk.astype(np.int64)
    out_N[0] += cnt0

    # per-period maxima over chunk jobs; reduceat over closure starts gives
    # periods 2..K plus the open tail
    seg_max = np.maximum.reduceat(V, c)
    out_M = np.empty(K)
    out_M[0] = max(mx0, float(V[:c[0]].max())) if c[0] > 0 else mx0
    if K > 1:
        out_M[1:] = seg_max[: K - 1]

    # workload just after the last arrival of each period (for t-tilde)
    j_last = c - 1
    u_last = np.asarray(D[j_last] + Vld[j_last] - base, dtype=float)
    t_last = np.asarray(epochs[j_last], dtype=float)
    if c[0] == 0:
        u_last[0] = u0
        t_last[0] = float(T0)
    out_TT = t_last + u_last

    out_S = np.empty(K)
    out_S[0] = bp_start0
    if K > 1:
        out_S[1:] = np.asarray(epochs[c[:-1]], dtype=float)

    if np.any(out_N > job_cap):
        _raise_cap(job_cap)

    # Q2 level scan across closures: R_k = max(level after opener, max service)
    out_R = np.empty(K)
    z = z0
    Vf = V[c]
    for k in range(K):
        mk = out_M[k]
        r = z if z > mk else mk
        out_R[k] = r
        z = r - (out_I[k] + Vf[k])
        if z < 0.0:
            z = 0.0
        z = z + Vf[k]

    # carry for the period left open at the end of the consumed range
    opener = int(c[K - 1])
    if consumed == opener + 1:
        u_open = V[opener]
        mx_open = V[opener]
        cnt_open = 1
        t_new = epochs[opener]
        bp_start_new = float(t_new)
    else:
        u_open = float(D[m - 1] + Vld[m - 1] - D[opener])
        mx_open = float(seg_max[-1])
        cnt_open = m - opener
        if cnt_open > job_cap:
            _raise_cap(job_cap)
        t_new = epochs[m - 1]
        bp_start_new = float(epochs[opener])

    new_carry = (True, u_open, mx_open, int(cnt_open), z,
                 float(t_new), float(t_new - _LD(float(t_new))), bp_start_new)
    return (out_M, out_I, out_R, out_N, t_last, out_TT, out_S, new_carry,
            consumed_head + consumed)


def _raise_cap(job_cap):
    raise RuntimeError(
        f"busy period exceeded job cap {job_cap}; "
        "traffic intensity is too close to (or above) one for this horizon")
