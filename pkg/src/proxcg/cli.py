"""Command line entry point: ``proxcg {solve,suite,profile}``.

Exit codes
----------
0  success (solve: converged; suite: at least one cell converged)
1  usage error, bad config/CSV, oracle error, or a rejected solver/problem pair
2  solve stopped at the iteration cap; suite: no cell converged
"""

import argparse
import configparser
import csv
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import bench
from .problem import OracleError
from .problems import (LASSO_TABLE, LassoSpec, LogisticSpec, McpSpec, StudentTSpec,
                       make_instance)
from .solver import TRACE_COLUMNS, VARIANTS, SolverConfig, solve

CSV_MAGIC = "# proxcg-csv v1"
TIMING_NOTE = "# wall_time / mean_time are wall-clock measurements and not reproducible"

EXIT_OK, EXIT_ERROR, EXIT_MAXITER = 0, 1, 2

RUN_COLUMNS = ("problem", "family", "seed", "solver", "status", "iterations",
               "switches", "switch_ratio", "final_f", "final_eta", "wall_time")
AGG_METRICS = ("mean_iterations", "mean_switches", "switch_ratio_pct", "converged",
               "mean_time")

# config key -> (SolverConfig field, parser)
_SOLVER_KEYS = {
    "mu0": ("mu0", float), "kappa": ("kappa", float), "nu_hat": ("nu_hat", float),
    "delta": ("delta", float), "T": ("T", float), "theta": ("theta", float),
    "t_bar": ("t_bar", float), "tau": ("tau", float), "tol": ("tol", float),
    "max_iter": ("max_iter", int), "variant": ("variant", str),
    "mu_increase": ("mu_increase", None), "mu_factor": ("mu_factor", float),
}
_SPEC_KEYS = ("family", "m", "n", "s", "lambda", "sparse", "c", "d", "nu", "data",
              "n_features", "seed")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def _write_csv(path, header, rows, timing=False):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(CSV_MAGIC + "\n")
        if timing:
            fh.write(TIMING_NOTE + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _bool(s):
    s = str(s).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {s!r}")


# --------------------------------------------------------------------------
# argument / config handling


def _add_problem_args(p):
    g = p.add_argument_group("problem")
    g.add_argument("--family", choices=("lasso", "mcp", "student-t", "logistic"))
    g.add_argument("--m", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--s", type=int)
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--sparse", action="store_const", const=True, default=None)
    g.add_argument("--c", type=float, help="MCP concavity parameter")
    g.add_argument("--d", type=float, help="student-t dynamic range in dB")
    g.add_argument("--nu", type=float, help="student-t loss parameter")
    g.add_argument("--data", help="LIBSVM file for the logistic family")
    g.add_argument("--n-features", type=int)
    g.add_argument("--seed", type=int)


def _add_solver_args(p):
    g = p.add_argument_group("solver overrides")
    g.add_argument("--mu0", type=float)
    g.add_argument("--kappa", type=float)
    g.add_argument("--nu-hat", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--T", type=float)
    g.add_argument("--theta", type=float)
    g.add_argument("--t-bar", type=float)
    g.add_argument("--tau", type=float)
    g.add_argument("--tol", type=float)
    g.add_argument("--max-iter", type=int)
    g.add_argument("--mu-increase", action="store_const", const=True, default=None)
    g.add_argument("--mu-factor", type=float)


def build_parser():
    p = _Parser(prog="proxcg", description="Proximal nonlinear CG solvers and benchmarks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one instance; writes trace.csv and summary.csv")
    s.add_argument("--config", help="INI config file (flags override it)")
    s.add_argument("--variant", choices=VARIANTS)
    s.add_argument("--out", default=".", help="output directory")
    _add_problem_args(s)
    _add_solver_args(s)
    s.set_defaults(usage=s.format_usage)

    u = sub.add_parser("suite", help="repeated runs; writes runs.csv, aggregate.csv, profiles")
    u.add_argument("--config")
    u.add_argument("--variants", help="comma separated, e.g. alg31,alg31-interp,pgm,apg")
    u.add_argument("--repetitions", type=int)
    u.add_argument("--preset", choices=("lasso-grid", "mcp-grid"),
                   help="the seven (m, n, s) sizes of the LASSO/MCP experiments")
    u.add_argument("--workers", type=int)
    u.add_argument("--no-baseline-increase", action="store_true",
                   help="do not enlarge mu each iteration for pgm/apg")
    u.add_argument("--out", default=".")
    _add_problem_args(u)
    _add_solver_args(u)
    u.set_defaults(usage=u.format_usage)

    f = sub.add_parser("profile", help="Dolan-More profile from a runs.csv")
    f.add_argument("--input", required=True)
    f.add_argument("--metric", choices=("iterations", "time"), default="iterations")
    f.add_argument("--out", default="profile.csv")
    f.set_defaults(usage=f.format_usage)
    return p


def _read_config(path):
    if path is None:
        return None
    if not os.path.isfile(path):
        raise UsageError(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise UsageError(f"bad config file {path}: {exc}") from None
    return cp


def _solver_config(cp, args, variant=None):
    vals = {}
    if cp is not None and cp.has_section("solver"):
        for key, raw in cp.items("solver"):
            if key not in _SOLVER_KEYS:
                raise UsageError(f"unknown [solver] key {key!r}")
            name, conv = _SOLVER_KEYS[key]
            vals[name] = _bool(raw) if conv is None else conv(raw)
    flag_names = {"mu0": "mu0", "kappa": "kappa", "nu_hat": "nu_hat", "delta": "delta",
                  "T": "T", "theta": "theta", "t_bar": "t_bar", "tau": "tau",
                  "tol": "tol", "max_iter": "max_iter", "mu_increase": "mu_increase",
                  "mu_factor": "mu_factor"}
    for attr, name in flag_names.items():
        v = getattr(args, attr, None)
        if v is not None:
            vals[name] = v
    if variant is not None:
        vals["variant"] = variant
    try:
        return SolverConfig(**vals)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid solver settings: {exc}") from None


def _spec_from(values):
    """Build a family spec from a dict of raw (string or typed) values."""
    fam = values.get("family")
    if fam is None:
        raise UsageError("--family is required")

    def get(key, conv, default=None, required=False):
        v = values.get(key)
        if v is None:
            if required:
                raise UsageError(f"--{key.replace('_', '-')} is required for family {fam}")
            return default
        try:
            return conv(v)
        except (TypeError, ValueError):
            raise UsageError(f"bad value for {key}: {v!r}") from None

    seed = get("seed", int, 0)
    try:
        if fam in ("lasso", "mcp"):
            kw = dict(m=get("m", int, required=True), n=get("n", int, required=True),
                      s=get("s", int, required=True), lam=get("lambda", float, 0.1),
                      sparse=get("sparse", _bool, False), seed=seed)
            if fam == "mcp":
                return McpSpec(c=get("c", float, 10.0), **kw)
            return LassoSpec(**kw)
        if fam == "student-t":
            return StudentTSpec(n=get("n", int, 128), d=get("d", float, 20.0),
                                lam=get("lambda", float, 0.01), nu=get("nu", float, 0.001),
                                seed=seed)
        if fam == "logistic":
            path = get("data", str, required=True)
            if not os.path.isfile(path):
                raise UsageError(f"data file not found: {path}")
            return LogisticSpec(path=path, lam=get("lambda", float, 0.1),
                                n_features=get("n_features", int), seed=seed)
    except ValueError as exc:
        raise UsageError(f"invalid problem spec: {exc}") from None
    raise UsageError(f"unknown family {fam!r}")


def _flag_problem_values(args):
    vals = {"family": args.family, "m": args.m, "n": args.n, "s": args.s,
            "lambda": args.lam, "sparse": args.sparse, "c": args.c, "d": args.d,
            "nu": args.nu, "data": args.data, "n_features": args.n_features,
            "seed": args.seed}
    return {k: v for k, v in vals.items() if v is not None}


def _config_problems(cp):
    out = []
    if cp is None:
        return out
    for sec in cp.sections():
        if sec == "problem" or sec.startswith("problem:") or sec.startswith("problem."):
            vals = dict(cp.items(sec))
            unknown = set(vals) - set(_SPEC_KEYS)
            if unknown:
                raise UsageError(f"unknown key(s) {sorted(unknown)} in [{sec}]")
            out.append(vals)
    return out


# --------------------------------------------------------------------------
# subcommands


def cmd_solve(args):
    cp = _read_config(args.config)
    probs = _config_problems(cp)
    values = dict(probs[0]) if probs else {}
    values.update(_flag_problem_values(args))
    spec = _spec_from(values)
    cfg = _solver_config(cp, args, args.variant)
    cfg = replace(cfg, tol=bench.family_tolerance(spec, cfg))
    problem, x0, _ = make_instance(spec)
    try:
        report = solve(problem, x0, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "trace.csv"), TRACE_COLUMNS,
               ([getattr(r, c) for c in TRACE_COLUMNS] for r in report.trace))
    _write_csv(os.path.join(args.out, "summary.csv"),
               ("problem", "family", "seed", "variant", "status", "iterations",
                "switches", "switch_ratio", "final_f", "final_eta", "mu", "wall_time"),
               [(spec.label, spec.family, spec.seed, cfg.variant, report.status,
                 report.iterations, report.switches, report.switch_ratio, report.f,
                 report.eta_norm, report.mu, report.wall_time)], timing=True)
    print(f"{spec.label} {cfg.variant}: {report.status} after {report.iterations} "
          f"iterations, f={report.f:.10g}, switches={report.switches}", file=sys.stderr)
    if report.status == "oracle-error":
        print(f"oracle error: {report.message}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if report.converged else EXIT_MAXITER


def _suite_specs(cp, args):
    flag_vals = _flag_problem_values(args)
    if args.preset:
        fam = "mcp" if args.preset == "mcp-grid" else "lasso"
        base = {"family": fam, **{k: v for k, v in flag_vals.items()
                                  if k not in ("m", "n", "s", "family")}}
        specs = []
        for m, n, s in LASSO_TABLE:
            specs.append(_spec_from({**base, "m": m, "n": n, "s": s,
                                     "sparse": (m, n, s) == (7000, 2000, 400)}))
        return specs
    probs = _config_problems(cp)
    if flag_vals.get("family"):
        return [_spec_from({**(probs[0] if len(probs) == 1 else {}), **flag_vals})]
    if not probs:
        raise UsageError("no problems given: use --family, --preset or [problem:*] sections")
    return [_spec_from({**p, **{k: v for k, v in flag_vals.items() if k == "seed"}})
            for p in probs]


def cmd_suite(args):
    cp = _read_config(args.config)
    sect = dict(cp.items("suite")) if cp is not None and cp.has_section("suite") else {}
    variants = args.variants or sect.get("variants", "alg31,alg31-interp,pgm,apg")
    variants = [v.strip() for v in variants.split(",") if v.strip()]
    bad = [v for v in variants if v not in VARIANTS]
    if bad or not variants:
        raise UsageError(f"unknown variant(s) {bad}; pick from {VARIANTS}")
    try:
        reps = args.repetitions or int(sect.get("repetitions", 10))
        workers = args.workers or int(sect.get("workers", 1))
        seed_base = args.seed if args.seed is not None else int(sect.get("seed", 0))
        increase = not args.no_baseline_increase and _bool(sect.get("baseline_increase", "true"))
    except ValueError as exc:
        raise UsageError(f"bad [suite] value: {exc}") from None
    specs = _suite_specs(cp, args)
    cfg = _solver_config(cp, args)
    for spec in specs:
        if spec.family == "mcp" and "apg" in variants:
            raise UsageError("apg requires a convex nonsmooth term; drop it for mcp")
        if spec.family == "mcp" and any(v.startswith("alg31") for v in variants):
            raise UsageError("alg31 variants require a convex nonsmooth term; use alg41")
    runs, costs = bench.run_suite(specs, variants, reps, cfg, seed_base, workers,
                                  baseline_increase=increase)
    os.makedirs(args.out, exist_ok=True)
    write_runs(os.path.join(args.out, "runs.csv"), runs)
    write_aggregate(os.path.join(args.out, "aggregate.csv"), runs)
    for metric, cm in costs.items():
        try:
            table = bench.dolan_more(cm)
        except ValueError as exc:
            print(f"skipping {metric} profile: {exc}", file=sys.stderr)
            continue
        write_profile(os.path.join(args.out, f"profile_{metric}.csv"), table,
                      timing=(metric == "time"))
    n_ok = sum(r.converged for r in runs)
    print(f"{len(runs)} runs, {n_ok} converged; results in {args.out}", file=sys.stderr)
    return EXIT_OK if n_ok else EXIT_MAXITER


def write_runs(path, runs):
    _write_csv(path, RUN_COLUMNS,
               [(r.problem, r.family, r.seed, r.solver, r.status, r.iterations,
                 r.switches, r.switch_ratio, r.final_f, r.final_eta, r.wall_time)
                for r in runs], timing=True)


def write_aggregate(path, runs):
    agg = bench.aggregate(runs)
    solvers = list(dict.fromkeys(r.solver for r in runs))
    problems = list(dict.fromkeys(r.problem for r in runs))
    key_of = {"mean_iterations": "mean_iterations", "mean_switches": "mean_switches",
              "switch_ratio_pct": "switch_ratio", "converged": "converged",
              "mean_time": "mean_time"}
    rows = []
    for metric in AGG_METRICS:
        for p in problems:
            rows.append([metric, p] + [agg[(p, s)][key_of[metric]] for s in solvers])
    _write_csv(path, ["metric", "problem"] + solvers, rows, timing=True)


def write_profile(path, table, timing=False):
    rows = []
    for i, s in enumerate(table.solvers):
        for tau, P in zip(table.taus, table.P[i]):
            rows.append((s, tau, float(P)))
    _write_csv(path, ("solver", "tau", "P"), rows, timing=timing)


class CsvFormatError(Exception):
    pass


def read_runs(path):
    """Parse a runs.csv back into :class:`bench.RunSummary` rows."""
    if not os.path.isfile(path):
        raise CsvFormatError(f"{path}: no such file")
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [(i, ln) for i, ln in enumerate(fh.read().splitlines(), start=1)
                 if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise CsvFormatError(f"{path}: empty CSV")
    reader = csv.reader([ln for _, ln in lines])
    header = next(reader)
    missing = [c for c in ("problem", "seed", "solver", "status", "iterations",
                           "wall_time") if c not in header]
    if missing:
        raise CsvFormatError(f"row {lines[0][0]}: missing column(s) {missing}")
    col = {c: header.index(c) for c in header}
    runs = []
    for (lineno, _), rec in zip(lines[1:], reader):
        if len(rec) != len(header):
            raise CsvFormatError(f"row {lineno}: expected {len(header)} fields, got {len(rec)}")

        def val(name, conv, default=None):
            if name not in col:
                return default
            try:
                return conv(rec[col[name]])
            except ValueError:
                raise CsvFormatError(
                    f"row {lineno}: bad {name} value {rec[col[name]]!r}") from None

        runs.append(bench.RunSummary(
            rec[col["problem"]], val("family", str, ""), val("seed", int),
            rec[col["solver"]], rec[col["status"]], val("iterations", int),
            val("wall_time", float), val("final_f", float, math.nan),
            val("final_eta", float, math.nan), val("switches", int, 0)))
    if not runs:
        raise CsvFormatError(f"{path}: no data rows")
    return runs


def cmd_profile(args):
    try:
        runs = read_runs(args.input)
        table = bench.dolan_more(bench.cost_matrices(runs)[args.metric])
    except (CsvFormatError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    parent = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(parent, exist_ok=True)
    write_profile(args.out, table, timing=(args.metric == "time"))
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"solve": cmd_solve, "suite": cmd_suite, "profile": cmd_profile}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        sys.stderr.write(args.usage())
        print(f"proxcg {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OracleError as exc:
        print(f"proxcg {args.command}: oracle error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
