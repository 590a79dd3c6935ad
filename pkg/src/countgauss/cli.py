"""Command-line harness: ``countgauss <subcommand> [options]``.

Exit codes: 0 success, 1 an asserted bound failed, 2 usage or parse error.
"""
import argparse
import io
import json
import math
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.sparse as sp

from . import bench as benchmod
from .distcheck import in_typical_set, moment_suite, row_distribution_compare
from .io import (ParseError, ResultRecord, read_labeled_csv, read_libsvm, read_matrix,
                 write_table)
from .linalg import ConvergenceError, gaussian_matrix, orthonormal_basis
from .nmf import (cg_nmf, condition_number, error_curve, generate_noisy_polytope,
                  generate_separable, gp_nmf, projections_needed, solid_angles_mc, spa,
                  srht_counterexample_check, xray)
from .rng import STREAM, SeededRng, mix64
from .sketch import DEFAULT_BUCKET_FACTOR
from .svm import (PROJECTIONS, PreconditionError, SvmProblem, margin_preservation_check,
                  projection_matrix, svm_dual_solve, two_blobs)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def _ints(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _words(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _threads(args):
    if args.threads is not None:
        t = args.threads
    else:
        env = os.environ.get("COUNTGAUSS_THREADS", "1")
        try:
            t = int(env)
        except ValueError:
            raise UsageError(f"COUNTGAUSS_THREADS must be an integer, got {env!r}")
    if t < 1:
        raise UsageError("threads must be >= 1")
    return t


def _pmap(fn, items, threads):
    # results come back in input order whatever the thread count
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


def _require(cond, msg):
    if not cond:
        raise UsageError(msg)


class Output:
    """What a subcommand produced: a record, an optional table, and which
    table columns hold timings."""

    def __init__(self, record, header=None, rows=None, timing_cols=(), default="json"):
        self.record = record
        self.header = header
        self.rows = rows
        self.timing_cols = set(timing_cols)
        self.default = default

    def render(self, fmt, timings=True):
        fmt = fmt or self.default
        if fmt == "json" or self.header is None:
            return self.record.to_json(timings=timings)
        keep = [i for i, h in enumerate(self.header) if timings or h not in self.timing_cols]
        buf = io.StringIO()
        write_table(buf, [self.header[i] for i in keep], [[r[i] for i in keep] for r in self.rows])
        return buf.getvalue()


def _config(args, **extra):
    cfg = {k: v for k, v in vars(args).items()
           if k not in ("func", "output", "fmt", "no_timings", "threads")}
    cfg.update(extra)
    cfg["rng_stream"] = STREAM
    return cfg


# ---------------------------------------------------------------- verify

def cmd_verify(args):
    _require(args.n >= 1 and args.d >= 1, "--n and --d must be >= 1")
    _require(args.d <= args.n, "--d must not exceed --n")
    _require(args.m >= 1, "--m must be >= 1")
    B = DEFAULT_BUCKET_FACTOR * args.m if args.B is None else args.B
    _require(B >= 1, "--B must be >= 1")
    _require(args.trials >= 100, "--trials must be >= 100")
    threads = _threads(args)
    U = orthonormal_basis(gaussian_matrix(args.n, args.d, SeededRng(mix64(args.seed, 100))))
    _require(U.shape[1] == args.d, "random basis lost rank; try another seed")
    x = None
    for cand in (np.ones(args.d), np.eye(args.d)[0]):
        if in_typical_set(cand, U, args.C_tstar):
            x = cand
            break
    t0 = time.perf_counter()
    rep = moment_suite(U, x, B, args.trials, SeededRng(mix64(args.seed, 1)),
                       C=args.C_tstar, threads=threads)
    t_moment = time.perf_counter() - t0
    metrics = {"moments": rep.to_record()}
    timings = {"moment_suite": t_moment}
    if args.samples > 0:
        t0 = time.perf_counter()
        cmp = row_distribution_compare(U, args.m, B, args.samples, SeededRng(mix64(args.seed, 2)),
                                       permutations=args.permutations)
        timings["row_distribution_compare"] = time.perf_counter() - t0
        metrics["rows"] = cmp.to_record()
    metrics["x"] = None if x is None else x.tolist()
    passed = {"pass1": rep.pass1, "pass5": rep.pass5, "trace_zero_mean": rep.trace_zero_mean}
    rec = ResultRecord("verify", _config(args, B=B), metrics, timings, passed)
    header = ["quantity", "estimate", "stderr", "bound", "pass"]
    rows = [
        ["fro_sq", rep.est1, rep.se1, rep.bound1, rep.pass1],
        ["trace_sq", rep.est5, rep.se5, rep.bound5, rep.pass5],
        ["trace_mean", rep.trace_mean, rep.trace_se, 0.0, rep.trace_zero_mean],
    ]
    for i in (2, 3, 4):
        est = getattr(rep, f"est{i}")
        if est is not None:
            rows.append([f"item{i}", est, getattr(rep, f"se{i}"), None, None])
    return Output(rec, header, rows), all(passed.values())


# ---------------------------------------------------------- nmf-synthetic

def _auto_m(inst, k, delta, samples, seed, variant):
    om = solid_angles_mc(inst.X[:, inst.anchors], samples, SeededRng(seed))
    if np.any(om <= 0) or np.any(om >= 0.5):
        return None, om
    return projections_needed(condition_number(om, k, variant), k, delta), om


def _recover_trial(args, k, t, m_list):
    """One instance, every (m, algo) combination on it."""
    base = mix64(mix64(args.seed, k), t)
    inst = generate_separable(args.d, args.n, k, SeededRng(base))
    anchors = set(inst.anchors)
    out = {}
    ms = []
    for m in m_list:
        if m == "auto":
            mm, _ = _auto_m(inst, k, args.delta, args.omega_samples, mix64(base, 1), args.kappa)
            ms.append(("auto", mm))
        else:
            ms.append((m, m))
    for key, mm in ms:
        for algo in args.algos:
            if algo == "spa":
                continue
            if mm is None:
                out[(key, algo)] = (None, None, 0.0, None)
                continue
            s = mix64(base, 1000 + mm * 4 + ("cg", "gp").index(algo))
            t0 = time.perf_counter()
            if algo == "cg":
                B = DEFAULT_BUCKET_FACTOR * mm if args.B is None else args.B
                res = cg_nmf(inst.X, mm, B, SeededRng(s))
            else:
                res = gp_nmf(inst.X, mm, SeededRng(s))
            dt = time.perf_counter() - t0
            union = set(res.union)
            out[(key, algo)] = (anchors <= union, not union <= anchors, dt, mm)
    if "spa" in args.algos:
        t0 = time.perf_counter()
        found = spa(inst.X, k)
        dt = time.perf_counter() - t0
        out[("", "spa")] = (set(found) == anchors, not set(found) <= anchors, dt, None)
    return out


def _m_sort_key(m):
    return -1 if m == "" else (10 ** 9 if m == "auto" else int(m))


def nmf_recover(args):
    threads = _threads(args)
    m_list = args.m if args.m else ["auto"]
    rows = []
    cells = {}
    for k in args.k:
        if not 1 <= k <= min(args.d, args.n):
            warnings.warn(f"skipping k={k}: needs 1 <= k <= min(d, n)")
            for m in m_list:
                for algo in args.algos:
                    if algo != "spa":
                        rows.append([k, m, algo, None, None, None, "skipped: k > min(d, n)"])
            if "spa" in args.algos:
                rows.append([k, "", "spa", None, None, None, "skipped: k > min(d, n)"])
            continue
        results = _pmap(lambda t: _recover_trial(args, k, t, m_list), range(args.trials), threads)
        keys = sorted(results[0].keys(), key=lambda km: (_m_sort_key(km[0]), km[1]))
        for key in keys:
            vals = [r[key] for r in results]
            ok = [v for v in vals if v[0] is not None]
            note = ""
            if key[0] == "auto":
                mms = [v[3] for v in ok]
                note = (f"m_mean={np.mean(mms):.2f} m_min={min(mms)} m_max={max(mms)}"
                        if mms else "")
                if len(ok) < len(vals):
                    note += f" kappa_undefined={len(vals) - len(ok)}"
            rate = sum(v[0] for v in ok) / len(ok) if ok else None
            viol = sum(v[1] for v in ok)
            mean_t = float(np.mean([v[2] for v in vals]))
            rows.append([k, key[0], key[1], rate, viol, mean_t, note.strip()])
            cells[f"k={k},m={key[0]},algo={key[1]}"] = {"success_rate": rate, "violations": viol}
    rows.sort(key=lambda r: (r[0], _m_sort_key(r[1]), r[2]))
    header = ["k", "m", "algo", "success_rate", "violations", "mean_time", "note"]
    # pairwise parity between cg and gp in each (k, m) cell
    parity = {}
    for r in rows:
        if r[2] == "cg" and r[3] is not None:
            g = [q for q in rows if q[0] == r[0] and q[1] == r[1] and q[2] == "gp"]
            if g and g[0][3] is not None:
                parity[f"k={r[0]},m={r[1]}"] = abs(r[3] - g[0][3]) <= args.parity_tol
    no_viol = all(r[4] == 0 for r in rows if r[4] is not None and r[2] in ("cg", "gp"))
    passed = {"vertex_only": no_viol, "parity": parity}
    rec = ResultRecord("nmf-synthetic", _config(args), {"cells": cells,
                       "table": [dict(zip(header, r)) for r in rows]},
                       {"mean_time": {f"k={r[0]},m={r[1]},algo={r[2]}": r[5] for r in rows}},
                       passed)
    for r in rec.metrics["table"]:
        r.pop("mean_time")
    return Output(rec, header, rows, timing_cols=("mean_time",), default="csv"), rec.all_passed


def _scree_sigma(args, sigma, k):
    inst = generate_noisy_polytope(args.d, k, sigma, SeededRng(mix64(args.seed, int(sigma * 1e9))))
    m = args.m[0] if args.m else 2 * k
    counts = {}
    for algo in [a for a in args.algos if a in ("cg", "gp")]:
        freq = np.zeros(inst.X.shape[1])
        for t in range(args.trials):
            s = mix64(mix64(args.seed, t), ("cg", "gp").index(algo) + 7)
            res = (cg_nmf(inst.X, m, args.B, SeededRng(s)) if algo == "cg"
                   else gp_nmf(inst.X, m, SeededRng(s)))
            for j in res.union:
                freq[j] += 1
        counts[algo] = freq / args.trials
    return inst, m, counts


def nmf_scree(args):
    threads = _threads(args)
    k = args.k[0]
    sigmas = args.sigma if args.sigma else np.logspace(-2, 0, 20).tolist()
    res = _pmap(lambda s: _scree_sigma(args, s, k), sigmas, threads)
    rows = []
    for sigma, (inst, m, counts) in zip(sigmas, res):
        for algo in sorted(counts):
            for j, f in enumerate(counts[algo]):
                rows.append([sigma, k, m, algo, j, j in inst.anchors, float(f)])
    header = ["sigma", "k", "m", "algo", "column", "is_anchor", "frequency"]
    rec = ResultRecord("nmf-synthetic-scree", _config(args),
                       {"table": [dict(zip(header, r)) for r in rows]}, {}, {})
    return Output(rec, header, rows, default="csv"), True


def cmd_nmf_synthetic(args):
    _require(args.d >= 1 and args.n >= 1, "--d and --n must be >= 1")
    _require(args.trials >= 1, "--trials must be >= 1")
    _require(0 < args.delta < 1, "--delta must be in (0, 1)")
    _require(all(m >= 1 for m in args.m), "--m values must be >= 1")
    _require(args.B is None or args.B >= 1, "--B must be >= 1")
    bad = set(args.algos) - {"cg", "gp", "spa"}
    _require(not bad, f"unknown algorithms {sorted(bad)}")
    if args.mode == "scree":
        _require(len(args.k) == 1, "scree mode takes a single --k")
        return nmf_scree(args)
    return nmf_recover(args)


# ---------------------------------------------------------------- nmf-run

def default_m(k, delta):
    """ceil(ln(k/delta) / ln(1/(1 - 1/k))): enough projections when every
    anchor has solid angle at least 1/(2k)."""
    if k == 1:
        return 1
    return math.ceil(math.log(k / delta) / math.log(1.0 / (1.0 - 1.0 / k)))


def cmd_nmf_run(args):
    X = read_matrix(args.input)
    if sp.issparse(X):
        X = X.toarray()
    _require(X.size > 0, "input matrix is empty")
    if not np.all(np.isfinite(X)):
        raise UsageError("input has non-finite entries")
    d, n = X.shape
    k = args.k
    _require(k is None or 1 <= k <= min(d, n), "--k must be in [1, min(d, n)]")
    _require(0 < args.delta < 1, "--delta must be in (0, 1)")
    m = args.m
    if m is None and args.algo in ("cg", "gp"):
        _require(k is not None, "--m or --k is required for cg/gp")
        m = default_m(k, args.delta)
    B = None
    t0 = time.perf_counter()
    rng = SeededRng(mix64(args.seed, 0))
    extra = {}
    if args.algo == "cg":
        B = DEFAULT_BUCKET_FACTOR * m if args.B is None else args.B
        _require(B >= 1, "--B must be >= 1")
        res = cg_nmf(X, m, B, rng)
        ranked = res.ranked()
        extra = {"i_max": res.i_max, "i_min": res.i_min}
    elif args.algo == "gp":
        res = gp_nmf(X, m, rng)
        ranked = res.ranked()
        extra = {"i_max": res.i_max, "i_min": res.i_min}
    elif args.algo == "spa":
        _require(k is not None, "--k is required for spa")
        ranked = spa(X, k)
    else:
        _require(k is not None, "--k is required for xray")
        r = xray(X, k)
        ranked = r.indices
        extra = {"truncated": r.truncated}
    t_sel = time.perf_counter() - t0
    if k is not None:
        ranked = ranked[:k]
    t0 = time.perf_counter()
    curve = error_curve(X, ranked[:args.curve_max]) if ranked else []
    t_curve = time.perf_counter() - t0
    metrics = {"anchors": sorted(ranked), "ranked": ranked, "error_curve": curve,
               "shape": [d, n], "m": m, "B": B, **extra}
    rec = ResultRecord("nmf-run", _config(args, m=m, B=B), metrics,
                       {"selection": t_sel, "error_curve": t_curve}, {})
    header = ["anchors_used", "anchor", "relative_error"]
    rows = [[j + 1, ranked[j], e] for j, e in enumerate(curve)]
    return Output(rec, header, rows), True


# ------------------------------------------------------------------ bench

def cmd_bench(args):
    _require(args.points >= 2, "--points must be >= 2")
    _require(args.m >= 1 and args.d >= 1 and args.per_row >= 1, "sizes must be positive")
    _require(args.per_row <= args.d, "--per-row must not exceed --d")
    rep = benchmod.nnz_scaling(args.m, args.B, args.d, args.per_row, args.n0, args.points,
                               args.seed, args.repeats)
    header, rows = benchmod.bench_table(rep)
    timing = set(header) - {"n", "nnz"}
    metrics = {"grid": [{"n": r.n, "nnz": r.nnz} for r in rep.rows], "B": rep.B,
               "stage1_ratio_limit": benchmod.STAGE1_RATIO_LIMIT}
    # the pass flag is derived from timings, so it lives with them
    timings = {"table": [dict(zip(header, r)) for r in rows],
               "stage1_ratios": rep.stage1_ratios(), "dense_ratios": rep.dense_ratios(),
               "stage1_linear": rep.passed}
    rec = ResultRecord("bench", _config(args, B=rep.B), metrics, timings, {})
    out = Output(rec, header, rows, timing_cols=timing, default="csv")
    return out, rep.passed


# --------------------------------------------------------- counterexample

def cmd_counterexample(args):
    for d in args.d:
        _require(d >= 2 and d & (d - 1) == 0, f"--d values must be powers of two >= 2, got {d}")
    _require(args.samples >= 1, "--samples must be >= 1")
    reps = [srht_counterexample_check(d, args.samples, SeededRng(mix64(args.seed, d)))
            for d in args.d]
    metrics = {f"d={r.d}": r.to_dict() for r in reps}
    passed = {f"d={r.d}": r.passed for r in reps}
    rec = ResultRecord("counterexample", _config(args), metrics, {}, passed)
    header = ["d", "vectors_checked", "exhaustive", "in_cone", "threshold_exact", "omega",
              "omega_stderr", "frac_above", "frac_above_stderr", "passed"]
    rows = [[r.to_dict()[h] for h in header] for r in reps]
    return Output(rec, header, rows), all(passed.values())


# -------------------------------------------------------------- svm-check

def _svm_row(args, X, y, Xt, yt, proj, r, base_sol):
    d = X.shape[1]
    s = mix64(mix64(args.seed, r), PROJECTIONS.index(proj))
    t0 = time.perf_counter()
    R = projection_matrix(proj, d, r, SeededRng(s))
    t_proj = time.perf_counter() - t0
    p = SvmProblem(X, y, args.C)
    t0 = time.perf_counter()
    try:
        rep = margin_preservation_check(p, R, args.tol, args.max_passes, solution=base_sol)
    except PreconditionError as e:
        return {"projection": proj, "r": r, "status": "precondition_failed", "note": str(e),
                "proj_time": t_proj}
    t_solve = time.perf_counter() - t0
    row = {"projection": proj, "r": r, "status": "ok", **rep.to_dict(),
           "proj_time": t_proj, "solve_time": t_solve}
    w_proj = rep.solution_proj.w
    row["train_error"] = float(np.mean(np.sign(X @ R @ w_proj) != y))
    if Xt is not None:
        row["test_error"] = float(np.mean(np.sign(Xt @ R @ w_proj) != yt))
    return row


def cmd_svm_check(args):
    _require(args.C > 0, "--C must be positive")
    _require(all(r >= 1 for r in args.r), "--r values must be >= 1")
    bad = set(args.projections) - set(PROJECTIONS)
    _require(not bad, f"unknown projections {sorted(bad)}")
    Xt = yt = None
    if args.input:
        if args.input.lower().endswith(".csv"):
            X, y = read_labeled_csv(args.input)
            if args.test:
                Xt, yt = read_labeled_csv(args.test)
                _require(Xt.shape[1] == X.shape[1], "test file has a different feature count")
        else:
            X, y = read_libsvm(args.input)
            if args.test:
                Xt, yt = read_libsvm(args.test, n_features=X.shape[1])
                Xt = Xt.toarray()
            X = X.toarray()
    else:
        _require(args.N >= 2 and args.d >= 1, "--N must be >= 2 and --d >= 1")
        _require(args.rank is None or 1 <= args.rank <= args.d, "--rank must be in [1, d]")
        X, y = two_blobs(args.N, args.d, SeededRng(mix64(args.seed, 0)), sep=args.sep,
                         density=args.density, rank=args.rank)
    threads = _threads(args)
    t0 = time.perf_counter()
    base = svm_dual_solve(SvmProblem(X, y, args.C), args.tol, args.max_passes)
    t_base = time.perf_counter() - t0
    jobs = [(proj, r) for proj in args.projections for r in args.r]
    rows = _pmap(lambda j: _svm_row(args, X, y, Xt, yt, j[0], j[1], base), jobs, threads)
    header = ["projection", "r", "status", "embedding_error", "gamma", "gamma_proj", "lower",
              "upper", "passed", "statement_passed", "train_error", "test_error",
              "proj_time", "solve_time"]
    table = [[row.get(h) for h in header] for row in rows]
    passed = {f"{row['projection']}:r={row['r']}": row["passed"]
              for row in rows if row["status"] == "ok"}
    timing = ("proj_time", "solve_time")
    metrics = {"N": X.shape[0], "d": X.shape[1], "gamma": base.gamma,
               "rows": [{k: v for k, v in row.items() if k not in timing} for row in rows]}
    timings = {"base_solve": t_base,
               "rows": [{k: row.get(k) for k in timing} for row in rows]}
    rec = ResultRecord("svm-check", _config(args), metrics, timings, passed)
    return Output(rec, header, table, timing_cols=timing), all(passed.values())


# ------------------------------------------------------------------ parser

def _common(suppress):
    # subcommands repeat the global flags with suppressed defaults, so a flag
    # given before the subcommand is not overwritten by the subparser default
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=dflt(0), help="master seed (default 0)")
    common.add_argument("--output", "-o", default=dflt(None),
                        help="write output here instead of stdout")
    common.add_argument("--threads", type=int, default=dflt(None),
                        help="worker threads (default $COUNTGAUSS_THREADS or 1)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default=dflt(None))
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv", default=dflt(None))
    common.add_argument("--no-timings", action="store_true", default=dflt(False),
                        help="omit wall-clock fields so output is byte-reproducible")
    return common


def build_parser():
    common = _common(suppress=True)
    p = argparse.ArgumentParser(prog="countgauss", parents=[_common(suppress=False)],
                                description="CountGauss sketching experiments")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="Monte-Carlo moment and row checks")
    v.add_argument("--n", type=int, default=64)
    v.add_argument("--d", type=int, default=4)
    v.add_argument("--m", type=int, default=10, help="rows for the distribution comparison")
    v.add_argument("--B", type=int, default=None, help="buckets (default 5m)")
    v.add_argument("--trials", type=int, default=2000)
    v.add_argument("--samples", type=int, default=2000,
                   help="rows for the distribution comparison (0 skips it)")
    v.add_argument("--permutations", type=int, default=200)
    v.add_argument("--C-tstar", dest="C_tstar", type=float, default=2.0,
                   help="typical-set constant for the test vector x")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("nmf-synthetic", parents=[common], help="recovery grid on synthetic data")
    s.add_argument("--mode", choices=("recover", "scree"), default="recover")
    s.add_argument("--d", type=int, default=200)
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--k", type=_ints, default=[4, 8])
    s.add_argument("--m", type=_ints, default=[],
                   help="projection counts (default: from kappa per instance)")
    s.add_argument("--B", type=int, default=None, help="buckets (default 5m)")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--algos", type=_words, default=["cg", "gp", "spa"])
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--kappa", choices=("log", "linear"), default="log")
    s.add_argument("--omega-samples", dest="omega_samples", type=int, default=5000)
    s.add_argument("--sigma", type=_floats, default=[], help="noise levels for scree mode")
    s.add_argument("--parity-tol", dest="parity_tol", type=float, default=0.1)
    s.set_defaults(func=cmd_nmf_synthetic)

    r = sub.add_parser("nmf-run", parents=[common], help="anchor selection on a matrix file")
    r.add_argument("--input", "-i", required=True, help="Matrix Market (.mtx) or CSV file")
    r.add_argument("--algo", choices=("cg", "gp", "spa", "xray"), default="cg")
    r.add_argument("--k", type=int, default=None)
    r.add_argument("--m", type=int, default=None)
    r.add_argument("--B", type=int, default=None)
    r.add_argument("--delta", type=float, default=0.1)
    r.add_argument("--curve-max", dest="curve_max", type=int, default=50)
    r.set_defaults(func=cmd_nmf_run)

    b = sub.add_parser("bench", parents=[common], help="nnz scaling benchmark")
    b.add_argument("--m", type=int, default=16)
    b.add_argument("--B", type=int, default=None)
    b.add_argument("--d", type=int, default=64)
    b.add_argument("--per-row", dest="per_row", type=int, default=8)
    b.add_argument("--n0", type=int, default=1 << 14)
    b.add_argument("--points", type=int, default=4)
    b.add_argument("--repeats", type=int, default=benchmod.REPEATS)
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("counterexample", parents=[common], help="Hadamard-row cone check")
    c.add_argument("--d", type=_ints, default=[2, 4, 8, 16])
    c.add_argument("--samples", type=int, default=100_000)
    c.set_defaults(func=cmd_counterexample)

    m = sub.add_parser("svm-check", parents=[common], help="margin preservation under projection")
    m.add_argument("--input", "-i", help="LIBSVM or labeled CSV training file (default: synthetic blobs)")
    m.add_argument("--test", help="test file in the same format")
    m.add_argument("--N", type=int, default=60)
    m.add_argument("--d", type=int, default=64)
    m.add_argument("--rank", type=int, default=3)
    m.add_argument("--density", type=float, default=1.0)
    m.add_argument("--sep", type=float, default=3.0)
    m.add_argument("--r", type=_ints, default=[128, 256, 512])
    m.add_argument("--C", type=float, default=500.0)
    m.add_argument("--projections", type=_words, default=list(PROJECTIONS))
    m.add_argument("--tol", type=float, default=1e-10)
    m.add_argument("--max-passes", dest="max_passes", type=int, default=100000)
    m.set_defaults(func=cmd_svm_check)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        _threads(args)
        out, ok = args.func(args)
    except (UsageError, ParseError, FileNotFoundError, IsADirectoryError) as e:
        print(f"countgauss {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ConvergenceError) as e:
        print(f"countgauss {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = out.render(args.fmt, timings=not args.no_timings)
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
