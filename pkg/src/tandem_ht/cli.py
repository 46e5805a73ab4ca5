"""Experiment harness: ``tandem-ht <kind> --config file [options]``.

Kinds: solve-m, solve-kappa, phi, simulate-des, simulate-chain, theorem1,
theorem2, steady-state, verify.  Configuration is one JSON document with the
parameters of the chosen kind; unknown fields are rejected with their path.
Tables go to CSV (byte-identical for a fixed seed, regardless of worker
count), summaries to a JSON report.  Exit status: 0 all checks passed,
1 a check failed, 2 configuration error.
"""

import argparse
import concurrent.futures
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _backend, boxma, chain, kappa, limits, tandemsim
from .config import get_profile
from .heavytail import ServiceDistribution

KINDS = ("solve-m", "solve-kappa", "phi", "simulate-des", "simulate-chain",
         "theorem1", "theorem2", "steady-state", "verify")


class ConfigError(Exception):
    pass


def _fmt(x):
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# configuration validation

def _expect(cfg, field, kind, typ, default=None, required=False):
    if field not in cfg:
        if required:
            raise ConfigError(f"{kind}: missing required field '{field}'")
        return default
    val = cfg[field]
    if typ is float and isinstance(val, (int, float)) and not isinstance(val, bool):
        return float(val)
    if typ is int and isinstance(val, int) and not isinstance(val, bool):
        return int(val)
    if typ is bool and isinstance(val, bool):
        return val
    if typ is list and isinstance(val, list):
        try:
            return [float(v) for v in val]
        except (TypeError, ValueError):
            raise ConfigError(f"{field}: expected a list of numbers")
    if typ is str and isinstance(val, str):
        return val
    raise ConfigError(f"{field}: expected {typ.__name__}, got {type(val).__name__}")


_ALLOWED = {
    "solve-m": {"nu", "b", "rho", "lam", "w_max", "points", "seed"},
    "solve-kappa": {"nu", "b", "gamma", "y_lo", "y_hi", "points", "seed"},
    "phi": {"nu", "b", "gamma", "t_values", "x_values", "seed"},
    "simulate-des": {"nu", "b", "rho", "lam", "n_busy_periods", "keep_events",
                     "seed"},
    "simulate-chain": {"nu", "b", "gamma", "n", "t", "x0", "reps", "seed"},
    "theorem1": {"nu", "b", "gamma", "n_grid", "y_grid", "seed"},
    "theorem2": {"nu", "b", "gamma", "n_grid", "t", "x0", "reps", "seed"},
    "steady-state": {"nu", "b", "rho", "steps", "burn_in", "gamma", "n_grid",
                     "x_grid", "seed"},
    "verify": {"nu", "b", "gamma", "check", "c", "reps", "seed"},
}


def _validate(kind, cfg):
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(cfg) - _ALLOWED[kind]
    if unknown:
        raise ConfigError(f"{kind}: unknown field(s) {sorted(unknown)}")


def _dist_from(cfg, kind):
    nu = _expect(cfg, "nu", kind, float, required=True)
    b = _expect(cfg, "b", kind, float, default=1.0)
    try:
        return ServiceDistribution(nu=nu, scale=b)
    except ValueError as exc:
        raise ConfigError(f"nu/b: {exc}") from exc


def _lambda_from(cfg, kind, dist, default_rho=0.9):
    lam = _expect(cfg, "lam", kind, float)
    rho = _expect(cfg, "rho", kind, float)
    if lam is not None and rho is not None:
        raise ConfigError(f"{kind}: give either 'lam' or 'rho', not both")
    if lam is None:
        lam = (rho if rho is not None else default_rho) / dist.mean
    if lam <= 0:
        raise ConfigError("lam: arrival rate must be positive")
    return lam


# ---------------------------------------------------------------------------
# experiment runners; each returns (checks, csv_paths, extra_report)

def run_solve_m(cfg, profile, outdir, workers):
    dist = _dist_from(cfg, "solve-m")
    lam = _lambda_from(cfg, "solve-m", dist)
    w_max = _expect(cfg, "w_max", "solve-m", float,
                    default=boxma.DEFAULT_GRID_SPAN * dist.scale)
    points = _expect(cfg, "points", "solve-m", int,
                     default=boxma.DEFAULT_GRID_POINTS)
    table = boxma.tabulate(lam, dist, boxma.GridSpec(w_max=w_max, points=points))
    residuals = table.residuals()
    path = outdir / "m_table.csv"
    _write_csv(path, ["w", "m", "residual"],
               [[_fmt(w), _fmt(m), _fmt(r)]
                for w, m, r in zip(table.grid, table.values, residuals)])
    tol = profile.tolerances.fixed_point_residual
    checks = [_check("fixed_point_residual_max", float(residuals.max()), tol,
                     float(residuals.max()) <= tol)]
    return checks, [path], {"rho": lam * dist.mean}


def run_solve_kappa(cfg, profile, outdir, workers):
    dist = _dist_from(cfg, "solve-kappa")
    gamma = _expect(cfg, "gamma", "solve-kappa", float, required=True)
    y_lo = _expect(cfg, "y_lo", "solve-kappa", float, default=kappa.CACHE_Y_LO)
    y_hi = _expect(cfg, "y_hi", "solve-kappa", float, default=kappa.CACHE_Y_HI)
    points = _expect(cfg, "points", "solve-kappa", int, default=kappa.CACHE_POINTS)
    params = kappa.KappaParams(lam=1.0 / dist.mean, nu=dist.nu, gamma=gamma)
    fn = kappa.KappaFunction.build(params, y_lo=y_lo, y_hi=y_hi, points=points)
    residuals = fn.residuals()
    path = outdir / "kappa_table.csv"
    _write_csv(path, ["y", "kappa", "residual"],
               [[_fmt(y), _fmt(k), _fmt(r)]
                for y, k, r in zip(fn.y_grid, fn.values, residuals)])
    tol = profile.tolerances.kappa_residual
    checks = [_check("kappa_residual_max", float(residuals.max()), tol,
                     float(residuals.max()) <= tol)]
    if gamma == 0.0:
        spread = float(fn.values.max() - fn.values.min())
        checks.append(_check("kappa_constant_spread", spread,
                             profile.tolerances.kappa_constant_spread,
                             spread <= profile.tolerances.kappa_constant_spread))
    return checks, [path], {"upper_bound": kappa.kappa_upper_bound(params)}


def run_phi(cfg, profile, outdir, workers):
    dist = _dist_from(cfg, "phi")
    gamma = _expect(cfg, "gamma", "phi", float, required=True)
    t_values = _expect(cfg, "t_values", "phi", list, required=True)
    x_values = _expect(cfg, "x_values", "phi", list, required=True)
    params = kappa.KappaParams(lam=1.0 / dist.mean, nu=dist.nu, gamma=gamma)
    cdf = kappa.LimitCdf(kappa_fn=kappa.KappaFunction.build(params))
    rows = []
    for t in t_values:
        vals = cdf.phi(t, np.asarray(x_values, dtype=float))
        rows.extend([[_fmt(t), _fmt(x), _fmt(p)] for x, p in zip(x_values, vals)])
    path = outdir / "phi_table.csv"
    _write_csv(path, ["t", "x", "phi"], rows)
    return [], [path], {}


def run_simulate_des(cfg, profile, outdir, workers, seed):
    dist = _dist_from(cfg, "simulate-des")
    lam = _lambda_from(cfg, "simulate-des", dist)
    n_bp = _expect(cfg, "n_busy_periods", "simulate-des", int,
                   default=profile.des_busy_periods)
    keep_events = _expect(cfg, "keep_events", "simulate-des", bool, default=False)
    rng = chain.rep_rng(seed, 0)
    result = tandemsim.simulate(lam, dist, n_bp, rng, keep_jobs=keep_events)
    rec = result.records
    path = outdir / "busy_periods.csv"
    _write_csv(path, ["k", "t_k", "t_tilde_k", "M_k", "I_k", "R_k"],
               [[k + 1, _fmt(rec.last_arrival[k]), _fmt(rec.last_q2_arrival[k]),
                 _fmt(rec.max_service[k]), _fmt(rec.idle_after[k]),
                 _fmt(rec.r_value[k])] for k in range(len(rec))])
    paths = [path]
    if keep_events:
        epath = outdir / "events.csv"
        jobs = result.jobs
        _write_csv(epath, ["job", "arrival_q1", "service", "arrival_q2",
                           "sojourn_q2"],
                   [[i + 1, _fmt(jobs.arrival_q1[i]), _fmt(jobs.service[i]),
                     _fmt(jobs.arrival_q2[i]), _fmt(jobs.sojourn_q2[i])]
                    for i in range(len(jobs))])
        paths.append(epath)
    report = tandemsim.verify_recursion(rec, profile.tolerances.recursion_rel)
    checks = [_check("recursion_max_rel_error", report.max_rel_error,
                     report.tolerance, report.passed)]
    return checks, paths, {"mean_jobs_per_period": float(rec.n_jobs.mean())}


def _chain_worker(payload):
    (nu, b, gamma, n, t, x0, count, offset, master_seed, grid, vals) = payload
    dist = ServiceDistribution(nu=nu, scale=b)
    sched = chain.schedule(dist, gamma, n)
    table = boxma.MaxServiceCdf(lam=sched.lambda_n, dist=dist,
                                grid=np.asarray(grid), values=np.asarray(vals))
    return chain.run_scaled(sched, t, x0, count, master_seed, maxcdf=table,
                            rep_offset=offset)


def _run_ensemble(sched, t, x0, reps, master_seed, workers, maxcdf):
    if workers <= 1:
        return chain.run_scaled(sched, t, x0, reps, master_seed, maxcdf=maxcdf)
    block = math.ceil(reps / workers)
    payloads = []
    off = 0
    while off < reps:
        cnt = min(block, reps - off)
        payloads.append((sched.dist.nu, sched.dist.scale, sched.gamma, sched.n,
                         t, x0, cnt, off, master_seed,
                         maxcdf.grid.tolist(), maxcdf.values.tolist()))
        off += cnt
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_chain_worker, payloads))
    return np.concatenate(parts)


def run_simulate_chain(cfg, profile, outdir, workers, seed):
    dist = _dist_from(cfg, "simulate-chain")
    gamma = _expect(cfg, "gamma", "simulate-chain", float, required=True)
    n = _expect(cfg, "n", "simulate-chain", int, required=True)
    t = _expect(cfg, "t", "simulate-chain", float, default=1.0)
    x0 = _expect(cfg, "x0", "simulate-chain", float, default=0.0)
    reps = _expect(cfg, "reps", "simulate-chain", int, default=profile.chain_reps)
    try:
        sched = chain.schedule(dist, gamma, n)
    except ValueError as exc:
        raise ConfigError(f"n/gamma: {exc}") from exc
    table = chain.default_max_table(sched)
    terminals = _run_ensemble(sched, t, x0, reps, seed, workers, table)
    path = outdir / "terminals.csv"
    _write_csv(path, ["rep", "terminal_value"],
               [[r, _fmt(v)] for r, v in enumerate(terminals)])
    return [], [path], {"rho_n": sched.rho_n, "steps": int(n * t)}


def run_theorem1(cfg, profile, outdir, workers):
    dist = _dist_from(cfg, "theorem1")
    gamma = _expect(cfg, "gamma", "theorem1", float, required=True)
    n_grid = [int(v) for v in _expect(cfg, "n_grid", "theorem1", list,
                                      default=[100, 1000, 10000])]
    y_grid = _expect(cfg, "y_grid", "theorem1", list,
                     default=[0.5, 1.0, 2.0, 5.0])
    params = kappa.KappaParams(lam=1.0 / dist.mean, nu=dist.nu, gamma=gamma)
    rows = []
    errs = {y: [] for y in y_grid}
    for n in n_grid:
        sched = chain.schedule(dist, gamma, n)
        probes = chain.scaled_max_cdf_probe(sched, y_grid)
        for y, p in zip(y_grid, probes):
            target = kappa.solve_kappa(params, y) / y
            err = abs(p - target)
            errs[y].append((err, target))
            rows.append([n, _fmt(y), _fmt(p), _fmt(target), _fmt(err)])
    path = outdir / "probe.csv"
    _write_csv(path, ["n", "y", "n_mbar_ny", "kappa_over_y", "abs_err"], rows)
    checks = []
    for y in y_grid:
        seq = [e for e, _ in errs[y]]
        target = errs[y][-1][1]
        decreasing = all(seq[i] > seq[i + 1] for i in range(len(seq) - 1))
        final_rel = seq[-1] / target
        checks.append(_check(f"theorem1_decreasing_y={y}", float(seq[-1]),
                             None, decreasing))
        checks.append(_check(f"theorem1_final_rel_y={y}", float(final_rel),
                             profile.tolerances.theorem1_final_rel,
                             final_rel < profile.tolerances.theorem1_final_rel))
    return checks, [path], {}


def run_theorem2(cfg, profile, outdir, workers, seed):
    dist = _dist_from(cfg, "theorem2")
    gamma = _expect(cfg, "gamma", "theorem2", float, required=True)
    n_grid = [int(v) for v in _expect(cfg, "n_grid", "theorem2", list,
                                      default=[100, 1000, 10000])]
    t = _expect(cfg, "t", "theorem2", float, default=1.0)
    x0 = _expect(cfg, "x0", "theorem2", float, default=0.0)
    reps = _expect(cfg, "reps", "theorem2", int, default=profile.chain_reps)
    params = kappa.KappaParams(lam=1.0 / dist.mean, nu=dist.nu, gamma=gamma)
    cdf = kappa.LimitCdf(kappa_fn=kappa.KappaFunction.build(params))
    rows = []
    ks_seq = []
    for n in n_grid:
        sched = chain.schedule(dist, gamma, n)
        table = chain.default_max_table(sched)
        terminals = _run_ensemble(sched, t, x0, reps, seed, workers, table)
        ks = limits.ks_distance(limits.EmpiricalDistribution(terminals),
                                lambda xs: cdf.phi(t, xs))
        ks_seq.append(ks)
        rows.append([n, reps, _fmt(ks)])
    path = outdir / "ks_by_n.csv"
    _write_csv(path, ["n", "reps", "ks"], rows)
    tol = profile.tolerances.ks_theorem2
    checks = [
        _check("theorem2_ks_final", ks_seq[-1], tol, ks_seq[-1] < tol),
        _check("theorem2_ks_decreasing", ks_seq[-1], None,
               all(ks_seq[i] > ks_seq[i + 1] for i in range(len(ks_seq) - 1))),
    ]
    return checks, [path], {"branch": "closed-form" if gamma == 0.0 else "integral",
                            "ks_sequence": ks_seq}


def run_steady_state(cfg, profile, outdir, workers, seed):
    dist = _dist_from(cfg, "steady-state")
    rho = _expect(cfg, "rho", "steady-state", float, default=0.9)
    if not 0 < rho < 1:
        raise ConfigError("rho: pre-limit steady state requires 0 < rho < 1")
    steps = _expect(cfg, "steps", "steady-state", int,
                    default=profile.steady_state_steps)
    burn_in = _expect(cfg, "burn_in", "steady-state", int,
                      default=int(max(100_000, 10.0 / (1.0 - rho))))
    gamma = _expect(cfg, "gamma", "steady-state", float, default=0.5)
    n_grid = [int(v) for v in _expect(cfg, "n_grid", "steady-state", list,
                                      default=[100, 1000, 10000])]
    x_grid = _expect(cfg, "x_grid", "steady-state", list,
                     default=list(np.geomspace(0.05, 50.0, 25)))

    lam = rho / dist.mean
    table = boxma.tabulate(lam, dist,
                           boxma.GridSpec(w_max=1e6 * dist.scale, points=768))
    law = boxma.SteadyStateLaw.from_maxcdf(table)
    rng = chain.rep_rng(seed, 0)
    traj = chain.chain_path(lam, table, burn_in + steps, 0.0, rng)
    post = traj[burn_in:]
    half = steps // 2
    ks = limits.ks_distance(limits.EmpiricalDistribution(post), law.cdf)
    split_ks = limits.ks_distance(limits.EmpiricalDistribution(post[:half]),
                                  limits.EmpiricalDistribution(post[half:]))
    tol = profile.tolerances.ks_steady_state
    checks = [_check("steady_state_ks", ks, tol, ks < tol)]
    extra = {"split_half_ks": split_ks, "burn_in": burn_in}
    paths = []

    if gamma > 0.0:
        params = kappa.KappaParams(lam=1.0 / dist.mean, nu=dist.nu, gamma=gamma)
        cdf = kappa.LimitCdf(kappa_fn=kappa.KappaFunction.build(params))
        phi_inf = cdf.phi_infinity(np.asarray(x_grid, dtype=float))
        sups = []
        rows = []
        for n in n_grid:
            sched = chain.schedule(dist, gamma, n)
            tab_n = boxma.tabulate(
                sched.lambda_n, dist,
                boxma.GridSpec(w_max=max(1e6, 100.0 * n) * dist.scale, points=768))
            law_n = boxma.SteadyStateLaw.from_maxcdf(tab_n)
            scaled = law_n.cdf(sched.n * np.asarray(x_grid, dtype=float))
            sup = float(np.abs(scaled - phi_inf).max())
            sups.append(sup)
            rows.append([n, _fmt(sup)])
        path = outdir / "interchange.csv"
        _write_csv(path, ["n", "sup_abs_err"], rows)
        paths.append(path)
        checks.append(_check("interchange_sup_err_decreasing", sups[-1], None,
                             all(sups[i] > sups[i + 1]
                                 for i in range(len(sups) - 1))))
    else:
        extra["interchange"] = "degenerate (gamma = 0): large-t limit is 0, skipped"
    return checks, paths, extra


def run_verify(cfg, profile, outdir, workers, seed):
    dist = _dist_from(cfg, "verify")
    gamma = _expect(cfg, "gamma", "verify", float, default=0.5)
    check_name = _expect(cfg, "check", "verify", str, required=True)
    c = _expect(cfg, "c", "verify", float, default=2.0)
    reps = _expect(cfg, "reps", "verify", int, default=profile.chain_reps)
    lam = 1.0 / dist.mean
    params = kappa.KappaParams(lam=lam, nu=dist.nu, gamma=gamma)
    fn = kappa.KappaFunction.build(params)
    cdf = kappa.LimitCdf(kappa_fn=fn)
    f = limits.bump_test_function(c)
    tol = profile.tolerances
    checks = []

    if check_name == "semigroup":
        worst = 0.0
        for s, t in [(0.5, 0.5), (0.3, 1.2), (1.0, 1.0)]:
            worst = max(worst, limits.semigroup_property(
                cdf, s, t, f, np.linspace(0.0, 2 * c, 9)))
        checks.append(_check("semigroup_property_max_err", worst,
                             tol.semigroup_property,
                             worst <= tol.semigroup_property))
    elif check_name == "generator":
        table = limits.generator_limit_check(
            cdf, f, x_grid=[0.0, 0.25, 0.5, 1.0, 1.5],
            h_grid=[0.1, 0.05, 0.025, 0.0125])
        checks.append(_check("generator_errors_decreasing",
                             float(table.errors[:, -1].max()), None,
                             table.decreasing_in_h))
    elif check_name == "discrete-generator":
        worstn = []
        for n in (100, 1000, 10000):
            sched = chain.schedule(dist, gamma, n)
            tab = chain.default_max_table(
                sched, points=1024, w_max=max(1e4, 4.0 * n * c) * dist.scale)
            errs = []
            for x in (0.0, 0.5, 1.0):
                an = limits.discrete_generator(sched, tab, f, x)
                af = limits.generator_apply(fn, f, x)
                errs.append(abs(an - af))
            worstn.append(max(errs))
        checks.append(_check("discrete_generator_err_decreasing", worstn[-1],
                             None, worstn[0] > worstn[1] > worstn[2]))
    elif check_name == "max-convolution":
        s, t = 0.7, 1.3
        xg = np.linspace(0.05, 5.0, 10)
        worst = 0.0
        for sv in np.linspace(0.1, 2.0, 10):
            for tv in np.linspace(0.1, 2.0, 10):
                lhs = cdf.phi(tv, xg + sv / lam) * cdf.phi(sv, xg)
                worst = max(worst, float(np.abs(lhs - cdf.phi(sv + tv, xg)).max()))
        checks.append(_check("max_convolution_identity", worst,
                             tol.semigroup_identity,
                             worst <= tol.semigroup_identity))
        draws = profile.mc_draws
        r1, r2, r3 = (chain.rep_rng(seed, k) for k in (1, 2, 3))
        zt = cdf.sample_z(t, r1, draws)
        zs = cdf.sample_z(s, r2, draws)
        zst = cdf.sample_z(s + t, r3, draws)
        ks = limits.ks_distance(
            limits.EmpiricalDistribution(np.maximum(zt - s / lam, zs)),
            limits.EmpiricalDistribution(zst))
        checks.append(_check("max_convolution_mc_ks", ks,
                             tol.ks_max_convolution, ks < tol.ks_max_convolution))
    elif check_name == "iterates":
        sched = chain.schedule(dist, gamma, 1000)
        tab = chain.default_max_table(sched)
        rep = limits.iterate_representation_check(sched, tab, f, 0.0, 1.0,
                                                  reps, seed)
        checks.append(_check("iterates_two_sample_ks", rep.ks, tol.ks_iterates,
                             rep.ks < tol.ks_iterates))
        checks.append(_check("iterates_mean_gap_sigmas", rep.mean_gap_sigmas,
                             tol.mc_sigmas,
                             rep.mean_gap_sigmas <= tol.mc_sigmas))
    else:
        raise ConfigError(
            f"check: unknown verification '{check_name}' (expected semigroup, "
            "generator, discrete-generator, max-convolution, or iterates)")
    return checks, [], {}


def _check(name, statistic, tolerance, passed):
    return {"name": name, "statistic": float(statistic),
            "tolerance": None if tolerance is None else float(tolerance),
            "passed": bool(passed)}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="tandem-ht",
        description="Heavy-traffic tandem queue experiments and verification")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed (overrides config)")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--profile", choices=("fast", "full"), default="full")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    t0 = time.perf_counter()
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        _validate(args.kind, cfg)
        seed = args.seed if args.seed is not None else _expect(
            cfg, "seed", args.kind, int, default=0)
        profile = get_profile(args.profile)
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        if args.kind == "solve-m":
            checks, paths, extra = run_solve_m(cfg, profile, outdir, args.workers)
        elif args.kind == "solve-kappa":
            checks, paths, extra = run_solve_kappa(cfg, profile, outdir,
                                                   args.workers)
        elif args.kind == "phi":
            checks, paths, extra = run_phi(cfg, profile, outdir, args.workers)
        elif args.kind == "simulate-des":
            checks, paths, extra = run_simulate_des(cfg, profile, outdir,
                                                    args.workers, seed)
        elif args.kind == "simulate-chain":
            checks, paths, extra = run_simulate_chain(cfg, profile, outdir,
                                                      args.workers, seed)
        elif args.kind == "theorem1":
            checks, paths, extra = run_theorem1(cfg, profile, outdir,
                                                args.workers)
        elif args.kind == "theorem2":
            checks, paths, extra = run_theorem2(cfg, profile, outdir,
                                                args.workers, seed)
        elif args.kind == "steady-state":
            checks, paths, extra = run_steady_state(cfg, profile, outdir,
                                                    args.workers, seed)
        else:
            checks, paths, extra = run_verify(cfg, profile, outdir,
                                              args.workers, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    report = {
        "kind": args.kind,
        "spec": cfg,
        "seed": seed,
        "profile": args.profile,
        "workers": args.workers,
        "backend": _backend.active_backend(),
        "version": __version__,
        "checks": checks,
        "outputs": [str(p) for p in paths],
        "extra": extra,
        "timing_seconds": round(time.perf_counter() - t0, 3),
    }
    report_path = Path(args.out) / "report.json"
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    for ch in checks:
        status = "PASS" if ch["passed"] else "FAIL"
        tol = "" if ch["tolerance"] is None else f" (tol {ch['tolerance']:g})"
        print(f"[{status}] {ch['name']}: {ch['statistic']:.6g}{tol}")
    print(f"report: {report_path}")
    return 0 if all(ch["passed"] for ch in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
