"""Event simulation of the two-queue tandem with reused service times.

The upstream queue is M/G/1; each job carries its service time to the
downstream queue, so downstream arrivals are upstream departures with no new
randomness.  Per busy period k of the upstream queue the simulation records
the largest service time M_k, the idle gap I_k that follows, and the
downstream workload R_k observed when the last job of the period reaches the
second queue.

Two execution paths produce identical results for the same seed: a chunked
kernel path (compiled or vectorized numpy, selected at import) used for large
horizons, and a plain per-job reference path that additionally materializes
job records and the workload path.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .heavytail import ServiceDistribution

DEFAULT_JOB_CAP = 100_000_000
_CHUNK = 1 << 17


@dataclass(frozen=True)
class BusyPeriodRecord:
    """Observables of one upstream busy period."""

    index: int
    start: float
    last_arrival: float
    last_q2_arrival: float
    max_service: float
    idle_after: float
    r_value: float
    n_jobs: int


@dataclass(frozen=True)
class JobRecord:
    """One job's passage through both queues (reference path only)."""

    index: int
    arrival_q1: float
    service: float
    arrival_q2: float
    sojourn_q2: float


class BusyPeriodSample:
    """Columnar container of busy-period observables."""

    def __init__(self, max_service, idle_after, r_value, n_jobs,
                 last_arrival, last_q2_arrival, start):
        self.max_service = np.asarray(max_service)
        self.idle_after = np.asarray(idle_after)
        self.r_value = np.asarray(r_value)
        self.n_jobs = np.asarray(n_jobs)
        self.last_arrival = np.asarray(last_arrival)
        self.last_q2_arrival = np.asarray(last_q2_arrival)
        self.start = np.asarray(start)

    def __len__(self):
        return len(self.max_service)

    def __getitem__(self, k):
        return BusyPeriodRecord(
            index=k + 1,
            start=float(self.start[k]),
            last_arrival=float(self.last_arrival[k]),
            last_q2_arrival=float(self.last_q2_arrival[k]),
            max_service=float(self.max_service[k]),
            idle_after=float(self.idle_after[k]),
            r_value=float(self.r_value[k]),
            n_jobs=int(self.n_jobs[k]),
        )

    def __iter__(self):
        return (self[k] for k in range(len(self)))


class JobTable:
    """Columnar job log from the reference path."""

    def __init__(self, arrival_q1, service, arrival_q2, sojourn_q2, w1_after,
                 period_index):
        self.arrival_q1 = np.asarray(arrival_q1)
        self.service = np.asarray(service)
        self.arrival_q2 = np.asarray(arrival_q2)
        self.sojourn_q2 = np.asarray(sojourn_q2)
        self.w1_after = np.asarray(w1_after)
        self.period_index = np.asarray(period_index)

    def __len__(self):
        return len(self.service)

    def __getitem__(self, i):
        return JobRecord(
            index=i + 1,
            arrival_q1=float(self.arrival_q1[i]),
            service=float(self.service[i]),
            arrival_q2=float(self.arrival_q2[i]),
            sojourn_q2=float(self.sojourn_q2[i]),
        )


@dataclass
class WorkloadPath:
    """Right-continuous workload processes sampled at their jump epochs.

    Between events both workloads decay at unit rate while positive; the
    arrays store the post-jump values.
    """

    q1_times: np.ndarray
    q1_values: np.ndarray
    q2_times: np.ndarray
    q2_values: np.ndarray

    @staticmethod
    def _eval(times, values, t):
        j = np.searchsorted(times, t, side="right") - 1
        if j < 0:
            return 0.0
        return max(values[j] - (t - times[j]), 0.0)

    def w1(self, t):
        return self._eval(self.q1_times, self.q1_values, t)

    def w2(self, t):
        return self._eval(self.q2_times, self.q2_values, t)


@dataclass
class SimulationResult:
    records: BusyPeriodSample
    jobs: JobTable = None
    path: WorkloadPath = None


def _draw_chunk(rng, dist, lam, size):
    """One chunk of (interarrival, service) draws; fixed consumption order."""
    A = rng.standard_exponential(size) / lam
    V = dist.scale * rng.random(size) ** (-1.0 / dist.nu)
    return A, V


def simulate(lam, dist, n_busy_periods, rng, keep_jobs=False,
             allow_unstable=False, job_cap=DEFAULT_JOB_CAP, chunk=_CHUNK):
    """Run the tandem for exactly ``n_busy_periods`` completed busy periods.

    keep_jobs=True switches to the per-job reference path and attaches job
    records and the workload path (memory is O(jobs)).  rho > 1 requires
    ``allow_unstable`` since busy periods then may never terminate; a per-period
    job cap guards against loads too close to one for the requested horizon.
    """
    rho = lam * dist.mean
    if lam <= 0:
        raise ValueError(f"arrival rate must be positive, got {lam}")
    if rho > 1.0 + 1e-12 and not allow_unstable:
        raise ValueError(
            f"rho={rho} > 1: pass allow_unstable=True to simulate anyway")
    if n_busy_periods < 1:
        raise ValueError("need at least one busy period")
    if keep_jobs:
        return _simulate_reference(lam, dist, n_busy_periods, rng, job_cap, chunk)

    parts = {k: [] for k in "MIRNTSs"}
    carry = (False, 0.0, 0.0, 0, 0.0, 0.0, 0.0, 0.0)
    remaining = n_busy_periods
    while remaining > 0:
        A, V = _draw_chunk(rng, dist, lam, chunk)
        M, I, R, N, T, TT, S, carry, _ = _backend.process_jobs(
            A, V, carry, remaining, job_cap)
        if len(M):
            parts["M"].append(M); parts["I"].append(I); parts["R"].append(R)
            parts["N"].append(N); parts["T"].append(T); parts["S"].append(TT)
            parts["s"].append(S)
            remaining -= len(M)

    records = BusyPeriodSample(
        max_service=np.concatenate(parts["M"]),
        idle_after=np.concatenate(parts["I"]),
        r_value=np.concatenate(parts["R"]),
        n_jobs=np.concatenate(parts["N"]),
        last_arrival=np.concatenate(parts["T"]),
        last_q2_arrival=np.concatenate(parts["S"]),
        start=np.concatenate(parts["s"]),
    )
    return SimulationResult(records=records)


def _simulate_reference(lam, dist, n_busy_periods, rng, job_cap, chunk):
    """Per-job event loop; the oracle for both kernel backends."""
    bp_M = []; bp_I = []; bp_R = []; bp_N = []; bp_T = []; bp_TT = []; bp_S = []
    j_arr = []; j_srv = []; j_d = []; j_soj = []; j_w1 = []; j_bp = []

    started = False
    u = mx = z = 0.0
    cnt = 0
    t = 0.0          # epoch of the last upstream arrival (Kahan-compensated)
    t_comp = 0.0
    bp_start = 0.0
    d_prev = 0.0     # epoch of the last downstream arrival
    done = 0

    while done < n_busy_periods:
        A, V = _draw_chunk(rng, dist, lam, chunk)
        for i in range(len(A)):
            a = float(A[i]); v = float(V[i])
            if not started:
                y = a - t_comp; s = t + y; t_comp = (s - t) - y; t = s
                started = True
                u = v; mx = v; cnt = 1; bp_start = t
                d = t + v
                z = v
            elif a < u:
                y = a - t_comp; s = t + y; t_comp = (s - t) - y; t = s
                u = u - a + v
                if v > mx:
                    mx = v
                cnt += 1
                d = d_prev + v
                z = max(z - (d - d_prev), 0.0) + v
            else:
                idle = a - u
                bp_M.append(mx); bp_I.append(idle); bp_R.append(z)
                bp_N.append(cnt); bp_T.append(t); bp_TT.append(t + u)
                bp_S.append(bp_start)
                done += 1
                y = a - t_comp; s = t + y; t_comp = (s - t) - y; t = s
                u = v; mx = v; cnt = 1; bp_start = t
                d = t + v
                z = max(z - (d - d_prev), 0.0) + v
            if cnt > job_cap:
                raise RuntimeError(
                    f"busy period exceeded job cap {job_cap}; "
                    "traffic intensity is too close to (or above) one "
                    "for this horizon")
            j_arr.append(t); j_srv.append(v); j_d.append(d); j_soj.append(z)
            j_w1.append(u); j_bp.append(done + 1)
            d_prev = d
            if done == n_busy_periods:
                break

    records = BusyPeriodSample(
        max_service=np.array(bp_M), idle_after=np.array(bp_I),
        r_value=np.array(bp_R), n_jobs=np.array(bp_N, dtype=np.int64),
        last_arrival=np.array(bp_T), last_q2_arrival=np.array(bp_TT),
        start=np.array(bp_S))
    jobs = JobTable(arrival_q1=j_arr, service=j_srv, arrival_q2=j_d,
                    sojourn_q2=j_soj, w1_after=j_w1, period_index=j_bp)
    path = WorkloadPath(q1_times=jobs.arrival_q1,
                        q1_values=jobs.w1_after,
                        q2_times=jobs.arrival_q2,
                        q2_values=jobs.sojourn_q2)
    return SimulationResult(records=records, jobs=jobs, path=path)


def max_representation(records):
    """R_n = max_{k<=n}(M_k - sum_{j=k}^{n-1} I_j) for every n, vectorized.

    Equals max_k(M_k + S_{k-1}) - S_{n-1} with S the idle prefix sums.
    """
    M = records.max_service
    I = records.idle_after
    S_prev = np.concatenate([[0.0], np.cumsum(I)[:-1]])
    return np.maximum.accumulate(M + S_prev) - S_prev


@dataclass
class RecursionReport:
    n_checked: int
    max_rel_error: float
    violations: list
    tolerance: float

    @property
    def passed(self):
        return not self.violations


def verify_recursion(records, tolerance=1e-9):
    """Check the simulated R_n against the independent-variable representation.

    The event path never uses (M_k, I_k) to form R_n, so agreement within
    |R_n - rep_n| <= tolerance (1 + |R_n|) cross-validates the event logic.
    """
    rep = max_representation(records)
    R = records.r_value
    err = np.abs(R - rep) / (1.0 + np.abs(R))
    bad = np.flatnonzero(err > tolerance)
    violations = [
        {"n": int(k + 1), "r_des": float(R[k]), "r_representation": float(rep[k]),
         "rel_error": float(err[k])}
        for k in bad[:50]
    ]
    return RecursionReport(n_checked=len(R), max_rel_error=float(err.max()),
                           violations=violations, tolerance=tolerance)


def q2_sojourn_max(result):
    """Per-period maximum downstream sojourn; equals r_value pathwise.

    Requires the reference path (keep_jobs=True).
    """
    if result.jobs is None:
        raise ValueError("job records unavailable; simulate with keep_jobs=True")
    jobs, records = result.jobs, result.records
    out = np.full(len(records), -np.inf)
    mask = jobs.period_index <= len(records)
    np.maximum.at(out, jobs.period_index[mask] - 1, jobs.sojourn_q2[mask])
    return out


def work_conservation_max_error(result):
    """Recompute W1 at every arrival epoch from the raw logs and compare.

    Uses W1(arrival of job i, just after) = sum_{j<=i} V_j - tau_i + I(tau_i),
    evaluated in extended precision, against the simulator's state.
    """
    if result.jobs is None:
        raise ValueError("job records unavailable; simulate with keep_jobs=True")
    jobs, records = result.jobs, result.records
    ld = np.longdouble
    cum_v = np.cumsum(jobs.service.astype(ld))
    idle_cum = np.concatenate([[0.0], np.cumsum(records.idle_after)]).astype(ld)
    k = np.minimum(jobs.period_index - 1, len(records))
    recomputed = cum_v - jobs.arrival_q1.astype(ld) + idle_cum[k]
    return float(np.abs(recomputed - jobs.w1_after.astype(ld)).max())
