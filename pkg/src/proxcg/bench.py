"""Repeated seeded runs, aggregate tables and Dolan-More performance profiles."""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .problems import LogisticSpec, make_instance
from .solver import SolverConfig, solve

__all__ = ["CostMatrix", "ProfileTable", "RunSummary", "dolan_more", "run_suite",
           "aggregate", "rate_envelope", "family_tolerance"]


@dataclass(frozen=True)
class CostMatrix:
    """Cost of each solver (columns) on each problem (rows); ``nan`` marks a
    run that did not converge."""

    solvers: tuple
    problems: tuple
    costs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.costs, dtype=float)
        if c.shape != (len(self.problems), len(self.solvers)):
            raise ValueError("costs must be (problems x solvers)")
        ok = ~np.isnan(c)
        if np.any(c[ok] <= 0) or not np.all(np.isfinite(c[ok])):
            raise ValueError("converged costs must be finite and positive")
        object.__setattr__(self, "costs", c)


@dataclass(frozen=True)
class ProfileTable:
    """``P[s][i]`` is the profile of solver ``s`` at ``taus[i]``.

    ``taus`` starts at 1, lists every distinct finite ratio in increasing
    order and ends with ``inf`` (the plateau: fraction of problems solved).
    """

    solvers: tuple
    taus: np.ndarray
    P: np.ndarray

    def curve(self, solver):
        return self.taus, self.P[self.solvers.index(solver)]

    def at(self, solver, tau):
        """Right-continuous step value ``P_s(tau)``."""
        i = np.searchsorted(self.taus, tau, side="right") - 1
        return float(self.P[self.solvers.index(solver), i]) if i >= 0 else 0.0


def dolan_more(costs):
    """Performance profiles ``P_s(tau) = |{p : r_ps <= tau}| / n_p``.

    ``r_ps = t_ps / min_s t_ps``; a non-converged cell has ratio ``inf``.

    Raises
    ------
    ValueError
        On an empty matrix or a problem no solver converged on.
    """
    c = costs.costs
    if c.size == 0:
        raise ValueError("empty cost matrix")
    solved = ~np.isnan(c)
    if not np.all(solved.any(axis=1)):
        bad = [costs.problems[i] for i in np.flatnonzero(~solved.any(axis=1))]
        raise ValueError(f"no solver converged on problem(s) {bad}")
    best = np.nanmin(c, axis=1, keepdims=True)
    ratios = np.where(solved, c / best, np.inf)
    finite = ratios[np.isfinite(ratios)]
    taus = np.concatenate([np.unique(np.append(finite, 1.0)), [np.inf]])
    n_p = c.shape[0]
    # a DNF ratio is never <= tau, not even at the closing tau = inf
    P = np.array([[np.count_nonzero(solved[:, s] & (ratios[:, s] <= tau)) / n_p
                   for tau in taus] for s in range(c.shape[1])])
    return ProfileTable(tuple(costs.solvers), taus, P)


@dataclass(frozen=True)
class RunSummary:
    problem: str
    family: str
    seed: int
    solver: str
    status: str
    iterations: int
    wall_time: float
    final_f: float
    final_eta: float
    switches: int

    @property
    def switch_ratio(self):
        return self.switches / self.iterations if self.iterations else 0.0

    @property
    def converged(self):
        return self.status == "converged"


def family_tolerance(spec, config):
    """Config tolerance, or the family default (1e-6 logistic, else 1e-8)."""
    if config.tol is not None:
        return config.tol
    return 1e-6 if isinstance(spec, LogisticSpec) else 1e-8


BASELINES = ("pgm", "apg")


def _run_cell(spec, variants, config, baseline_increase=True):
    """All variants on one instance. Instance generation is not timed."""
    problem, x0, _ = make_instance(spec)
    cfg = replace(config, tol=family_tolerance(spec, config), record_iterates=False)
    out = []
    for v in variants:
        vcfg = replace(cfg, variant=v)
        if baseline_increase and v in BASELINES:
            vcfg = replace(vcfg, mu_increase=True)
        t0 = time.perf_counter()
        rep = solve(problem, x0, vcfg)
        elapsed = time.perf_counter() - t0
        out.append(RunSummary(spec.label, spec.family, spec.seed, v, rep.status,
                              rep.iterations, elapsed, rep.f, rep.eta_norm,
                              rep.switches))
    return out


def run_suite(specs, variants, repetitions=10, config=SolverConfig(), seed_base=0,
              workers=1, baseline_increase=True):
    """Solve every ``(spec, repetition, variant)`` cell.

    Repetition ``r`` uses seed ``seed_base + r``. Results come back in
    deterministic order regardless of ``workers``. With ``baseline_increase``
    the ``pgm``/``apg`` baselines enlarge ``mu`` every iteration (the usual
    setting for accelerated first-order codes); the CG variants keep
    ``config.mu_increase``.

    Returns
    -------
    runs : list of RunSummary
    costs : dict
        ``{"iterations": CostMatrix, "time": CostMatrix}`` with one row per
        ``(spec, seed)`` instance.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    variants = tuple(variants)
    cells = [replace(spec, seed=seed_base + r) for spec in specs
             for r in range(repetitions)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, cells, [variants] * len(cells),
                                    [config] * len(cells),
                                    [baseline_increase] * len(cells)))
    else:
        results = [_run_cell(c, variants, config, baseline_increase) for c in cells]
    runs = [r for cell in results for r in cell]
    return runs, cost_matrices(runs)


def cost_matrices(runs):
    solvers = tuple(dict.fromkeys(r.solver for r in runs))
    problems = tuple(dict.fromkeys((r.problem, r.seed) for r in runs))
    row = {p: i for i, p in enumerate(problems)}
    col = {s: j for j, s in enumerate(solvers)}
    it = np.full((len(problems), len(solvers)), np.nan)
    tm = np.full_like(it, np.nan)
    for r in runs:
        if r.converged:
            i, j = row[(r.problem, r.seed)], col[r.solver]
            # a zero-iteration run still costs one residual evaluation
            it[i, j] = max(r.iterations, 1)
            tm[i, j] = max(r.wall_time, 1e-9)
    labels = tuple(f"{p}#{s}" for p, s in problems)
    return {"iterations": CostMatrix(solvers, labels, it),
            "time": CostMatrix(solvers, labels, tm)}


def aggregate(runs):
    """Per-(problem, solver) means over repetitions.

    Returns a dict keyed by ``(problem, solver)`` with ``mean_time``,
    ``mean_iterations``, ``mean_switches``, ``switch_ratio`` (percentage, the
    ratio of mean switches to mean iterations) and ``converged`` count.
    """
    groups = {}
    for r in runs:
        groups.setdefault((r.problem, r.solver), []).append(r)
    out = {}
    for key, rs in groups.items():
        its = float(np.mean([r.iterations for r in rs]))
        sw = float(np.mean([r.switches for r in rs]))
        out[key] = {
            "mean_time": float(np.mean([r.wall_time for r in rs])),
            "mean_iterations": its,
            "mean_switches": sw,
            "switch_ratio": 100.0 * sw / its if its else 0.0,
            "converged": sum(r.converged for r in rs),
        }
    return out


def rate_envelope(iterates, x_ref):
    """``max_k e_k sqrt(k+1)`` with ``e_k = min_{i<=k} ||x_i - x_ref||``."""
    if len(iterates) == 0:
        raise ValueError("empty trace")
    x_ref = np.asarray(x_ref, dtype=float)
    dist = np.array([np.linalg.norm(np.asarray(x) - x_ref) for x in iterates])
    e = np.minimum.accumulate(dist)
    return float(np.max(e * np.sqrt(np.arange(1, e.size + 1))))
