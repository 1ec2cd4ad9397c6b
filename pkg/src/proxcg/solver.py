"""Outer solver loops.

``alg31`` / ``alg31-interp``
    Proximal nonlinear CG for convex ``h``.
``alg41`` / ``alg41-interp``
    The weakly convex variant: every accepted step must pass both the trial
    condition and Armijo; a failed search falls back to the forward-backward
    point.
``pgm``
    Proximal gradient with the same ``mu`` backtracking.
``apg``
    FISTA-style accelerated proximal gradient with a restart whenever the
    objective would increase (convex ``h`` only).
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .direction import DegenerateDirection, compute_direction
from .linesearch import (LineSearchConfig, StepResult, armijo, trial_scan,
                         weakly_convex_search)
from .problem import CompositeProblem, OracleError
from .residual import backtrack_mu, increase_mu

__all__ = ["VARIANTS", "SolverConfig", "TraceRow", "SolveReport", "solve",
           "solve_pgm", "solve_apg", "run"]

VARIANTS = ("alg31", "alg31-interp", "alg41", "alg41-interp", "pgm", "apg")
CG_VARIANTS = VARIANTS[:4]


@dataclass(frozen=True)
class SolverConfig:
    """Parameters shared by every variant.

    ``tol`` is the relative displacement threshold
    ``||x+ - x|| / max(1, ||x||)``; ``None`` lets callers substitute a
    family default (see :mod:`proxcg.bench`) and means 1e-8 here.
    """

    mu0: float = 1.0
    kappa: float = 0.5
    nu_hat: float = 1e-8
    delta: float = 1e-4
    T: float = 1e-3
    theta: float = 0.5
    t_bar: float = 2.0 ** -20
    tau: float = 0.5
    tol: float | None = None
    max_iter: int = 50000
    variant: str = "alg31"
    mu_increase: bool = False
    mu_factor: float = 0.9
    record_iterates: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; pick one of {VARIANTS}")
        if not self.mu0 > 0:
            raise ValueError("mu0 must be positive")
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        if not self.nu_hat > 0:
            raise ValueError("nu_hat must be positive")
        if not 0 < self.mu_factor < 1:
            raise ValueError("mu_factor must lie in (0, 1)")
        if self.tol is not None and not self.tol >= 0:
            raise ValueError("tol must be nonnegative")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")
        self.line_search()

    @property
    def tolerance(self):
        return 1e-8 if self.tol is None else self.tol

    def line_search(self):
        return LineSearchConfig(delta=self.delta, T=self.T, theta=self.theta,
                                t_bar=self.t_bar, tau=self.tau,
                                interpolate=self.variant.endswith("-interp"))


@dataclass(frozen=True)
class TraceRow:
    k: int
    f: float
    eta_norm: float
    mu: float
    alpha: float
    step_kind: str
    g_evals: int
    h_evals: int
    prox_evals: int


TRACE_COLUMNS = tuple(TraceRow.__dataclass_fields__)


@dataclass
class SolveReport:
    """Result of one solve.

    ``trace`` holds one row per iteration plus a final ``"stop"`` row at the
    returned point. ``switches`` counts iterations that fell back to the
    forward-backward point.
    """

    variant: str
    status: str
    iterations: int
    switches: int
    x: np.ndarray
    f: float
    eta_norm: float
    mu: float
    wall_time: float
    trace: list = field(default_factory=list)
    iterates: list | None = None
    direction_ratios: list = field(default_factory=list)
    ys_ratios: list = field(default_factory=list)
    message: str = ""

    @property
    def converged(self):
        return self.status == "converged"

    @property
    def switch_ratio(self):
        return self.switches / self.iterations if self.iterations else 0.0


class _CountingSmooth:
    def __init__(self, g):
        self._g, self.n, self.calls = g, g.n, 0

    def value(self, x):
        self.calls += 1
        return self._g.value(x)

    def grad(self, x):
        self.calls += 1
        return self._g.grad(x)

    def value_grad(self, x):
        self.calls += 1
        return self._g.value_grad(x)


class _CountingProx:
    def __init__(self, h):
        self._h, self.rho = h, h.rho
        self.calls = self.prox_calls = 0

    @property
    def is_convex(self):
        return self._h.is_convex

    def value(self, x):
        self.calls += 1
        return self._h.value(x)

    def dirderiv(self, x, d):
        self.calls += 1
        return self._h.dirderiv(x, d)

    def prox(self, v, mu):
        self.prox_calls += 1
        return self._h.prox(v, mu)


class _Tracker:
    """Counting wrapper plus trace bookkeeping shared by all loops."""

    def __init__(self, problem, config):
        self.g = _CountingSmooth(problem.g)
        self.h = _CountingProx(problem.h)
        self.problem = CompositeProblem(self.g, self.h)
        self.rows = []
        self._last = (0, 0, 0)
        self.iterates = [] if config.record_iterates else None

    def row(self, k, f, eta_norm, mu, alpha, kind):
        now = (self.g.calls, self.h.calls, self.h.prox_calls)
        dg, dh, dp = (a - b for a, b in zip(now, self._last))
        self._last = now
        self.rows.append(TraceRow(k, float(f), float(eta_norm), float(mu),
                                  float(alpha), kind, dg, dh, dp))

    def keep(self, x):
        if self.iterates is not None:
            self.iterates.append(np.array(x))


def _initial_mu(config, rho):
    mu = config.mu0
    if rho > 0 and mu >= 1.0 / rho:
        mu = 0.99 / rho
    return mu


def _finite(value, what):
    if not np.isfinite(value):
        raise OracleError(f"non-finite {what}")
    return value


def _rel_small(disp, x, tol):
    return disp <= tol * max(1.0, float(np.linalg.norm(x)))


def _check_x0(problem, x0):
    x = np.array(x0, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(f"x0 must have length {problem.n}")
    return x


def solve(problem, x0, config=SolverConfig()):
    """Run the variant named by ``config.variant`` from ``x0``."""
    if config.variant == "pgm":
        return solve_pgm(problem, x0, config)
    if config.variant == "apg":
        return solve_apg(problem, x0, config)
    return _solve_cg(problem, x0, config)


run = solve


def _solve_cg(problem, x0, config):
    weak = config.variant.startswith("alg41")
    if not weak and not problem.h.is_convex:
        raise ValueError(f"{config.variant} needs a convex nonsmooth term; use alg41")
    ls = config.line_search()
    search = weakly_convex_search if weak else armijo
    tol = config.tolerance
    tr = _Tracker(problem, config)
    P, g, h = tr.problem, tr.g, tr.h
    mu = _initial_mu(config, problem.rho)

    start = time.perf_counter()
    x = _check_x0(problem, x0)
    d_prev = eta_prev = s_prev = None
    switches, status, message = 0, "max-iter", ""
    eta_norm, fx = float("nan"), float("nan")
    ratios, ys = [], []
    k = 0
    try:
        gx, grad = g.value_grad(x)
        hx = h.value(x)
        fx = _finite(gx + hx, "objective at x0")
        for k in range(config.max_iter + 1):
            tr.keep(x)
            if config.mu_increase and k > 0:
                mu = increase_mu(mu, config.mu_factor, problem.rho)
            fb = backtrack_mu(P, x, mu, config.kappa, gx, grad)
            mu, eta = fb.mu, fb.eta
            eta_norm = float(np.linalg.norm(eta))
            if _rel_small(float(np.linalg.norm(fb.x_plus - x)), x, tol):
                status = "converged"
                break
            if k == config.max_iter:
                break

            d = -eta
            if d_prev is not None:
                try:
                    d, info = compute_direction(eta, eta_prev, d_prev, s_prev,
                                                config.nu_hat)
                    ys.append(float(np.linalg.norm(info["y"]) / np.linalg.norm(s_prev)))
                except DegenerateDirection:
                    d = -eta
            ratios.append(float(np.linalg.norm(d)) / eta_norm)

            t, _ = trial_scan(P, x, d, eta, grad, hx, ls)
            step = StepResult("switch")
            if t is not None:
                step = search(P, x, d, eta, grad, fx, hx, t, ls)
            if step.kind == "cg":
                x_new = x + step.alpha * d
                s_prev, h_new = step.alpha * d, step.h_new
            else:
                switches += 1
                d = -eta
                x_new = fb.x_plus
                s_prev = x_new - x
                h_new = h.value(x_new)
            tr.row(k, fx, eta_norm, mu, step.alpha, step.kind)
            d_prev, eta_prev = d, eta
            x = x_new
            gx, grad = g.value_grad(x)
            hx = h_new
            fx = _finite(gx + hx, "objective")
    except OracleError as exc:
        status, message = "oracle-error", str(exc)
    tr.row(k, fx, eta_norm, mu, 0.0, "stop")
    return SolveReport(config.variant, status, k, switches, x, fx, eta_norm, mu,
                       time.perf_counter() - start, tr.rows, tr.iterates,
                       ratios, ys, message)


def solve_pgm(problem, x0, config=SolverConfig(variant="pgm")):
    """Proximal gradient: ``x <- prox_{mu h}(x - mu grad g(x))`` with ``mu``
    backtracked from the previous value (optionally enlarged first)."""
    return _solve_prox(problem, x0, replace(config, variant="pgm"), accelerate=False)


def solve_apg(problem, x0, config=SolverConfig(variant="apg")):
    """Accelerated proximal gradient with function-value restart.

    Raises
    ------
    ValueError
        If ``h`` is not convex.
    """
    if not problem.h.is_convex:
        raise ValueError("apg requires a convex nonsmooth term (rho = 0)")
    return _solve_prox(problem, x0, replace(config, variant="apg"), accelerate=True)


def _solve_prox(problem, x0, config, accelerate):
    tol = config.tolerance
    tr = _Tracker(problem, config)
    P, g, h = tr.problem, tr.g, tr.h
    mu = _initial_mu(config, problem.rho)

    start = time.perf_counter()
    x = _check_x0(problem, x0)
    status, message = "max-iter", ""
    eta_norm, fx = float("nan"), float("nan")
    k = 0
    try:
        gx, grad = g.value_grad(x)
        fx = _finite(gx + h.value(x), "objective at x0")
        y, gy, grad_y, t = x, gx, grad, 1.0
        for k in range(config.max_iter + 1):
            tr.keep(x)
            if k == config.max_iter:
                break
            if config.mu_increase and k > 0:
                mu = increase_mu(mu, config.mu_factor, problem.rho)
            fb = backtrack_mu(P, y, mu, config.kappa, gy, grad_y)
            f_new = _finite(fb.g_plus + h.value(fb.x_plus), "objective")
            kind = "prox"
            if accelerate and f_new > fx:
                # momentum overshot: restart from x with a plain step
                kind, t = "restart", 1.0
                fb = backtrack_mu(P, x, fb.mu, config.kappa, gx, grad)
                f_new = _finite(fb.g_plus + h.value(fb.x_plus), "objective")
            mu = fb.mu
            eta_norm = float(np.linalg.norm(fb.eta))
            tr.row(k, fx, eta_norm, mu, 1.0, kind)
            x_new = fb.x_plus
            disp = float(np.linalg.norm(x_new - x))
            done = _rel_small(disp, x, tol)
            if accelerate:
                t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
                y = x_new + ((t - 1.0) / t_new) * (x_new - x)
                t = t_new
            else:
                y = x_new
            x, fx = x_new, f_new
            gx, grad = g.value_grad(x)
            if y is x_new:
                gy, grad_y = gx, grad
            else:
                gy, grad_y = g.value_grad(y)
            if done:
                status = "converged"
                k += 1
                tr.keep(x)
                break
    except OracleError as exc:
        status, message = "oracle-error", str(exc)
    tr.row(k, fx, eta_norm, mu, 0.0, "stop")
    return SolveReport(config.variant, status, k, 0, x, fx, eta_norm, mu,
                       time.perf_counter() - start, tr.rows, tr.iterates,
                       message=message)
