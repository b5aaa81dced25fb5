"""The continued fractions F_n(tau) and G_n(tau).

Both satisfy ``X_{n+1} = 2/tau - 1/X_n`` and differ only in the start value,
``F_0 = 1`` and ``G_0 = 1/tau``. For ``0 < |tau| < 1`` every iterate with
``n >= 1`` has modulus above 1, so forward recursion is stable.
"""
import numpy as np

from .errors import ParameterError


def _check(n, tau):
    if int(n) != n or n < 0:
        raise ParameterError(f"order must be a nonnegative integer, got {n}")
    tau = np.asarray(tau, dtype=np.float64)
    if np.any(~np.isfinite(tau)) or np.any(tau == 0) or np.any(np.abs(tau) >= 1):
        raise ParameterError("tau must lie in (-1, 0) or (0, 1)")
    return int(n), tau


def _recurse(h, n, tau):
    two_over = 2.0 / tau
    for _ in range(n):
        h = two_over - 1.0 / h
    return h


def cf_F(n, tau):
    """``F_n(tau)``; scalar or elementwise over an array of ``tau``."""
    n, t = _check(n, tau)
    out = _recurse(np.ones_like(t), n, t)
    return float(out) if out.ndim == 0 else out


def cf_G(n, tau):
    """``G_n(tau)``; scalar or elementwise over an array of ``tau``."""
    n, t = _check(n, tau)
    out = _recurse(1.0 / t, n, t)
    return float(out) if out.ndim == 0 else out


def cf_sequence(kind, n_max, tau):
    """``[X_0, ..., X_{n_max}]`` for ``kind`` in ``{"F", "G"}``."""
    n_max, t = _check(n_max, tau)
    h = np.ones_like(t) if kind == "F" else 1.0 / t
    seq = [h]
    for _ in range(n_max):
        h = 2.0 / t - 1.0 / h
        seq.append(h)
    return np.array(seq)


def cf_fixed_point(tau):
    """Attracting fixed point ``(1 + sqrt(1 - tau^2)) / tau`` of the recursion."""
    _, t = _check(0, tau)
    out = (1.0 + np.sqrt(1.0 - t * t)) / t
    return float(out) if out.ndim == 0 else out
