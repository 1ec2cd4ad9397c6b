"""Two-stage step selection: trial-step scan, then Armijo backtracking.

The trial scan looks for the largest ``t`` in ``1, theta, theta^2, ...``
(stopping once ``t <= t_bar``) with::

    t * grad^T d + h(x + t d) - h(x) <= -t * T * ||eta||^2

and the Armijo stage shrinks ``alpha`` from that ``t`` until::

    f(x + alpha d) <= f(x) - delta * alpha * ||eta||^2

Shrinking uses either a fixed ratio ``tau`` or a safeguarded quadratic
interpolation of ``phi(alpha) = f(x + alpha d)``.
"""

import math
from dataclasses import dataclass

__all__ = ["LineSearchConfig", "StepResult", "trial_scan", "armijo",
           "weakly_convex_search", "interpolation_factor", "INTERP_BOUNDS"]

INTERP_BOUNDS = (1e-8, 0.99)


@dataclass(frozen=True)
class LineSearchConfig:
    delta: float = 1e-4
    T: float = 1e-3
    theta: float = 0.5
    t_bar: float = 2.0 ** -20
    tau: float = 0.5
    interpolate: bool = False
    alpha_floor: float = 2.0 ** -30
    max_backtracks: int = 60

    def __post_init__(self):
        for name in ("delta", "theta", "t_bar", "tau"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if not self.T > self.delta:
            raise ValueError("T must exceed delta")
        if not (self.alpha_floor > 0 and self.max_backtracks >= 1):
            raise ValueError("alpha_floor and max_backtracks must be positive")


@dataclass(frozen=True)
class StepResult:
    """Outcome of one line search.

    ``kind`` is ``"cg"`` (accept ``x + alpha d``) or ``"switch"`` (take the
    forward-backward point instead). ``g_evals``/``h_evals`` count the
    oracle calls made here; ``trial_evals``/``armijo_evals`` count condition
    checks in each stage.
    """

    kind: str
    alpha: float = 0.0
    t: float = 0.0
    trial_evals: int = 0
    armijo_evals: int = 0
    g_evals: int = 0
    h_evals: int = 0
    g_new: float = float("nan")
    h_new: float = float("nan")


def _trial_holds(t, gd, h_new, hx, T, eta_sq):
    return t * gd + h_new - hx <= -t * T * eta_sq


def trial_scan(problem, x, d, eta, grad, hx, config):
    """Largest admissible trial step above ``t_bar``.

    Returns
    -------
    t : float or None
        ``None`` when no candidate ``t > t_bar`` passes.
    evals : int
        Number of candidates checked (one ``h`` evaluation each).
    """
    gd = float(grad @ d)
    eta_sq = float(eta @ eta)
    t, evals = 1.0, 0
    while t > config.t_bar:
        evals += 1
        if _trial_holds(t, gd, problem.h.value(x + t * d), hx, config.T, eta_sq):
            return t, evals
        t *= config.theta
    return None, evals


def interpolation_factor(phi0, dphi0, alpha, phi_alpha, fallback):
    """Minimiser of the quadratic through ``phi(0)``, ``phi'(0)``, ``phi(alpha)``,
    expressed as a fraction of ``alpha`` and clamped to ``[1e-8, 0.99]``.

    A nonpositive curvature estimate leaves the quadratic without a minimiser;
    ``fallback`` is returned then.
    """
    curv = phi_alpha - phi0 - dphi0 * alpha
    if not (curv > 0 and math.isfinite(curv)):
        return fallback
    raw = -dphi0 * alpha / (2.0 * curv)
    if not math.isfinite(raw):
        return fallback
    lo, hi = INTERP_BOUNDS
    return min(hi, max(lo, raw))


def _backtrack(problem, x, d, eta, grad, fx, hx, alpha_init, config, need_trial):
    eta_sq = float(eta @ eta)
    gd = float(grad @ d)
    dphi0 = None
    if config.interpolate:
        dphi0 = gd + problem.h.dirderiv(x, d)
    alpha = float(alpha_init)
    evals = 0
    while evals < config.max_backtracks and alpha >= config.alpha_floor:
        evals += 1
        xt = x + alpha * d
        g_new = problem.g.value(xt)
        h_new = problem.h.value(xt)
        f_new = g_new + h_new
        ok = f_new <= fx - config.delta * alpha * eta_sq
        if ok and need_trial:
            ok = _trial_holds(alpha, gd, h_new, hx, config.T, eta_sq)
        if ok:
            return StepResult("cg", alpha, alpha_init, 0, evals, evals, evals,
                              g_new, h_new)
        if config.interpolate and math.isfinite(f_new):
            factor = interpolation_factor(fx, dphi0, alpha, f_new, config.tau)
        else:
            factor = config.tau
        alpha *= factor
    return StepResult("switch", 0.0, alpha_init, 0, evals, evals, evals)


def armijo(problem, x, d, eta, grad, fx, hx, alpha_init, config):
    """Armijo backtracking from ``alpha_init``; ``kind="switch"`` on failure."""
    return _backtrack(problem, x, d, eta, grad, fx, hx, alpha_init, config,
                      need_trial=False)


def weakly_convex_search(problem, x, d, eta, grad, fx, hx, alpha_init, config):
    """Like :func:`armijo`, but every candidate must also pass the trial
    condition at ``t = alpha`` (the trial condition is not inherited by
    smaller steps once ``h`` is nonconvex)."""
    return _backtrack(problem, x, d, eta, grad, fx, hx, alpha_init, config,
                      need_trial=True)
