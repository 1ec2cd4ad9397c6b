"""Three-term Hestenes-Stiefel direction built on the forward-backward residual."""

__all__ = ["DegenerateDirection", "select_nu", "compute_direction"]

_TINY = 1e-300


class DegenerateDirection(ArithmeticError):
    """The CG denominator ``d_prev^T z`` underflowed; fall back to ``-eta``."""


def select_nu(s_prev, y_prev, nu_hat):
    """Shift ``nu`` so that ``z = y + nu*s`` has ``s^T z >= nu_hat ||s||^2``."""
    ss = float(s_prev @ s_prev)
    if ss == 0.0:
        raise ValueError("s_prev must be nonzero")
    sy = float(s_prev @ y_prev)
    if sy >= nu_hat * ss:
        return 0.0
    return max(0.0, -sy / ss) + nu_hat


def compute_direction(eta, eta_prev, d_prev, s_prev, nu_hat):
    """Return ``d = -eta + beta*d_prev - gamma*y`` and the intermediate scalars.

    Parameters
    ----------
    eta, eta_prev : ndarray
        Current and previous forward-backward residuals.
    d_prev, s_prev : ndarray
        Previous direction and previous displacement ``x_k - x_{k-1}``.
    nu_hat : float
        Safeguard constant (> 0).

    Returns
    -------
    d : ndarray
        The new direction; it satisfies ``eta^T d = -||eta||^2`` up to
        rounding regardless of ``beta``/``gamma``.
    info : dict
        ``y``, ``nu``, ``beta``, ``gamma``, ``denom``.

    Raises
    ------
    DegenerateDirection
        If ``|d_prev^T z|`` is below 1e-300.
    """
    y = eta - eta_prev
    nu = select_nu(s_prev, y, nu_hat)
    z = y + nu * s_prev if nu else y
    denom = float(d_prev @ z)
    if not abs(denom) >= _TINY:
        raise DegenerateDirection(f"d_prev^T z = {denom!r}")
    beta = float(eta @ y) / denom
    gamma = float(eta @ d_prev) / denom
    d = -eta + beta * d_prev - gamma * y
    return d, {"y": y, "nu": nu, "beta": beta, "gamma": gamma, "denom": denom}
