from dataclasses import dataclass

import numpy as np

from .nonsmooth import ProxOracle
from .smooth import SmoothOracle


class OracleError(RuntimeError):
    """An oracle returned something the solver cannot work with
    (non-finite value, or a decrease model that never holds)."""


@dataclass(frozen=True)
class CompositeProblem:
    """``f(x) = g(x) + h(x)`` with ``g`` smooth and ``h`` prox-friendly."""

    g: SmoothOracle
    h: ProxOracle

    @property
    def n(self):
        return self.g.n

    @property
    def rho(self):
        return self.h.rho

    def f(self, x):
        return self.g.value(x) + self.h.value(x)

    def stationarity(self, x, mu=None):
        """Norm of the forward-backward residual at ``x``.

        ``mu`` defaults to a step that is admissible for weakly convex ``h``.
        """
        if mu is None:
            mu = 1.0 if self.rho == 0 else 0.5 / self.rho
        x = np.asarray(x, dtype=float)
        xp = self.h.prox(x - mu * self.g.grad(x), mu)
        return float(np.linalg.norm(xp - x)) / mu
