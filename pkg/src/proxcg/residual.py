"""Forward-backward residual and the step-parameter (mu) backtracking."""

from dataclasses import dataclass

import numpy as np

from .problem import OracleError

__all__ = ["FbrResult", "fbr", "backtrack_mu", "increase_mu", "decrease_model_holds",
           "MU_BACKTRACK_CAP"]

MU_BACKTRACK_CAP = 64
_CLAMP = 1e-6


@dataclass(frozen=True)
class FbrResult:
    """Forward-backward point ``x_plus`` and residual ``eta = -(x_plus - x)/mu``.

    ``g_plus`` is ``g(x_plus)`` when it was evaluated (always after
    :func:`backtrack_mu`), ``trials`` the number of ``mu`` values tried.
    """

    x_plus: np.ndarray
    eta: np.ndarray
    mu: float
    g_plus: float = float("nan")
    trials: int = 1


def fbr(problem, x, mu, grad=None):
    """Forward-backward residual at ``x`` for step ``mu``."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    x = np.asarray(x, dtype=float)
    if grad is None:
        grad = problem.g.grad(x)
    x_plus = problem.h.prox(x - mu * grad, mu)
    return FbrResult(x_plus, -(x_plus - x) / mu, float(mu))


def decrease_model_holds(gx, grad, g_plus, x, x_plus, mu, slack=1e-12):
    """``g(x+) <= g(x) + grad^T (x+ - x) + ||x+ - x||^2 / (2 mu)``, up to a
    relative rounding allowance of ``slack * (1 + |g(x)|)``."""
    step = x_plus - x
    model = gx + grad @ step + (step @ step) / (2.0 * mu)
    return g_plus <= model + slack * (1.0 + abs(gx))


def backtrack_mu(problem, x, mu_prev, kappa, gx=None, grad=None):
    """Largest ``mu`` in ``mu_prev * kappa**i`` satisfying the decrease model.

    Raises
    ------
    OracleError
        If the model still fails after ``MU_BACKTRACK_CAP`` reductions, or the
        smooth term returns a non-finite value.
    """
    if not 0 < kappa < 1:
        raise ValueError("kappa must lie in (0, 1)")
    if not mu_prev > 0:
        raise ValueError("mu_prev must be positive")
    x = np.asarray(x, dtype=float)
    if gx is None or grad is None:
        gx, grad = problem.g.value_grad(x)
    mu = float(mu_prev)
    for trial in range(1, MU_BACKTRACK_CAP + 2):
        x_plus = problem.h.prox(x - mu * grad, mu)
        g_plus = problem.g.value(x_plus)
        if not np.isfinite(g_plus):
            raise OracleError("smooth term is not finite at the forward-backward point")
        if decrease_model_holds(gx, grad, g_plus, x, x_plus, mu):
            return FbrResult(x_plus, -(x_plus - x) / mu, mu, g_plus, trial)
        mu *= kappa
    raise OracleError(
        f"decrease model failed after {MU_BACKTRACK_CAP} step reductions")


def increase_mu(mu, factor, rho=0.0):
    """``mu / factor``, kept strictly below ``1/rho`` when ``rho > 0``."""
    if not 0 < factor < 1:
        raise ValueError("factor must lie in (0, 1)")
    new = mu / factor
    if rho > 0:
        cap = (1.0 / rho) * (1.0 - _CLAMP)
        if new > cap:
            new = max(mu, cap)
    return new
