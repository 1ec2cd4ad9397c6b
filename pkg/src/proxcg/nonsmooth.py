"""Nonsmooth terms ``h``: value, proximal map, directional derivative.

Every oracle advertises its weak-convexity modulus ``rho`` (``h + rho/2 ||.||^2``
is convex). ``rho == 0`` means ``h`` is convex.
"""

import numpy as np

__all__ = ["ProxOracle", "Zero", "L1", "MCP", "ProxDomainError"]


class ProxDomainError(ValueError):
    """Raised when the prox subproblem is not strongly convex (``mu >= 1/rho``)."""


class ProxOracle:
    rho = 0.0

    @property
    def is_convex(self):
        return self.rho == 0.0

    def value(self, x):
        raise NotImplementedError

    def prox(self, v, mu):
        raise NotImplementedError

    def dirderiv(self, x, d):
        raise NotImplementedError

    @staticmethod
    def _pair(x, d):
        x = np.asarray(x, dtype=float)
        d = np.asarray(d, dtype=float)
        if x.shape != d.shape:
            raise ValueError("x and d must have the same shape")
        return x, d


class Zero(ProxOracle):
    def value(self, x):
        return 0.0

    def prox(self, v, mu):
        if not mu > 0:
            raise ValueError("prox step must be positive")
        return np.array(v, dtype=float)

    def dirderiv(self, x, d):
        self._pair(x, d)
        return 0.0

    def __repr__(self):
        return "Zero()"


class L1(ProxOracle):
    """``h(x) = lam * ||x||_1``; prox is soft thresholding."""

    def __init__(self, lam):
        if not lam > 0:
            raise ValueError("lam must be positive")
        self.lam = float(lam)

    def value(self, x):
        return self.lam * float(np.sum(np.abs(x)))

    def prox(self, v, mu):
        if not mu > 0:
            raise ValueError("prox step must be positive")
        v = np.asarray(v, dtype=float)
        return np.sign(v) * np.maximum(np.abs(v) - mu * self.lam, 0.0)

    def dirderiv(self, x, d):
        x, d = self._pair(x, d)
        return self.lam * float(np.sum(np.where(x != 0, np.sign(x) * d, np.abs(d))))

    def __repr__(self):
        return f"L1(lam={self.lam!r})"


class MCP(ProxOracle):
    """Minimax concave penalty, summed over coordinates.

    ``p(t) = lam|t| - t^2/(2c)`` for ``|t| <= c*lam``, else ``c*lam^2/2``.
    It is ``1/c``-weakly convex, so the prox exists (firm thresholding) only
    for steps ``mu < c``.
    """

    def __init__(self, lam, c):
        if not (lam > 0 and c > 0):
            raise ValueError("MCP needs lam > 0 and c > 0")
        self.lam = float(lam)
        self.c = float(c)
        self.rho = 1.0 / self.c

    def value(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        inner = self.lam * a - a * a / (2.0 * self.c)
        flat = 0.5 * self.c * self.lam ** 2
        return float(np.sum(np.where(a <= self.c * self.lam, inner, flat)))

    def prox(self, v, mu):
        if not mu > 0:
            raise ValueError("prox step must be positive")
        if mu >= self.c:
            raise ProxDomainError(
                f"MCP prox needs mu < c (got mu={mu}, c={self.c})")
        v = np.asarray(v, dtype=float)
        a = np.abs(v)
        lam, c = self.lam, self.c
        shrunk = np.sign(v) * (a - mu * lam) / (1.0 - mu / c)
        out = np.where(a > c * lam, v, shrunk)
        return np.where(a <= mu * lam, 0.0, out)

    def dirderiv(self, x, d):
        x, d = self._pair(x, d)
        a = np.abs(x)
        lam, c = self.lam, self.c
        # |x| == c*lam takes the plateau branch: p is C^1 there with slope 0
        slope = (lam * np.sign(x) - x / c) * d
        terms = np.where(x == 0, lam * np.abs(d), np.where(a < c * lam, slope, 0.0))
        return float(np.sum(terms))

    def __repr__(self):
        return f"MCP(lam={self.lam!r}, c={self.c!r})"
