"""Squared H2 norm of the noise-to-disagreement map.

Every route works mode by mode: with ``phi_i = 1 - beta*lambda_i`` the
metric is a sum over the nonzero Laplacian eigenvalues of a per-mode term,
which equals the stationary variance of the scalar recursion

    x(t+1) = alpha*phi*x(t) + (1-alpha)*phi*x(t-theta) + w(t).

Analytic routes (``table_ii``, ``closed_small_theta``, ``half_alpha_cf``,
``memoryless``, ``pure_memory``) are checked against two independent
oracles: a per-mode discrete Lyapunov solve and a truncated Gramian sum on
the full ``n(theta+1)``-dimensional augmented system.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .contfrac import cf_F, cf_G
from .errors import (AccuracyWarning, DegenerateModeError, NumericError,
                     ParameterError, PreconditionError)
from .graph import laplacian, spectrum as graph_spectrum
from .stability import ProtocolParams, consensus_check, spectral_radius

TOL_PHI = 1e-10

METHODS = ("table_ii", "closed_small_theta", "half_alpha_cf", "memoryless",
           "pure_memory", "lyapunov_oracle", "gramian_bruteforce",
           "limit_half_alpha", "deep_memory_limit")


@dataclass(frozen=True)
class ModeQuantities:
    phi: float
    zeta: float
    eta: float
    nu: float
    mu: float
    psi: float
    iota: int


def mode_quantities(alpha, beta, theta, lam):
    """Per-mode scalars. ``psi`` is NaN when ``eta == 0``."""
    phi = 1.0 - beta * lam
    zeta = 2.0 * alpha * (1.0 - alpha) * phi ** 2
    eta = ((1.0 - alpha) ** 2 + alpha ** 2) * phi ** 2 - 1.0
    psi = alpha * zeta * phi / eta - (1.0 - alpha) * phi if eta != 0 else math.nan
    return ModeQuantities(phi=phi, zeta=zeta, eta=eta, nu=alpha * phi,
                          mu=(1.0 - alpha) * phi, psi=psi, iota=(theta + 1) // 2)


@dataclass(frozen=True)
class ModeContribution:
    lam: float
    multiplicity: int
    contribution: float


@dataclass(frozen=True)
class H2Report:
    """``value`` is the squared H2 norm; ``per_mode`` lists one entry per
    distinct nonzero eigenvalue with its single-mode contribution, so
    ``value == sum(m.multiplicity * m.contribution)``."""

    value: float
    per_mode: tuple
    method: str
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "method": self.method,
            "value": self.value,
            "per_mode": [{"lambda": m.lam, "multiplicity": m.multiplicity,
                          "contribution": m.contribution} for m in self.per_mode],
            "params": dict(self.params),
        }


def _report(lam, mult, contrib, method, params):
    contrib = np.asarray(contrib, dtype=np.float64)
    per_mode = tuple(ModeContribution(float(l), int(m), float(c))
                     for l, m, c in zip(lam, mult, contrib))
    return H2Report(value=float(np.dot(mult, contrib)), per_mode=per_mode,
                    method=method, params=params)


def _params_dict(alpha, beta, theta):
    return {"alpha": alpha, "beta": beta, "theta": theta}


def _require_beta(spec, beta):
    upper = 2.0 / spec.lambda_max
    if not 0.0 < beta < upper:
        raise PreconditionError(f"beta must lie in (0, 2/lambda_n) = (0, {upper:.6g}), got {beta}")


def _require_consensus(spec, params):
    if not consensus_check(spec, params):
        raise PreconditionError(
            f"no consensus at alpha={params.alpha}, beta={params.beta}, theta={params.theta}")


# ------------------------------------------------ reduced linear system

def table_ii_system(theta, alpha, mq):
    """Reduced ``iota x iota`` system ``(Gamma, xi)`` for one mode.

    The last component of ``solve(Gamma, xi)`` is the lag-``theta``
    autocovariance of the mode.
    """
    if abs(mq.phi) <= TOL_PHI:
        raise DegenerateModeError("phi == 0 mode: use the exact branch (contribution 1)")
    if not abs(mq.phi) < 1:
        raise PreconditionError(f"|phi| must be < 1, got {mq.phi}")
    if not 0.0 < alpha < 1.0:
        raise PreconditionError(f"alpha must lie in (0, 1), got {alpha}")
    G, xi = _table_ii_batch(theta, alpha, np.array([mq.phi]))
    return G[0], xi[0]


def _table_ii_batch(theta, alpha, phi):
    """Stacked reduced systems for an array of ``phi`` (none of them zero)."""
    a = alpha
    k = phi.size
    iota = (theta + 1) // 2
    zeta = 2 * a * (1 - a) * phi ** 2
    eta = ((1 - a) ** 2 + a ** 2) * phi ** 2 - 1
    psi = a * zeta * phi / eta - (1 - a) * phi
    G = np.zeros((k, iota, iota))
    xi = np.zeros((k, iota))
    if theta == 1:
        G[:, 0, 0] = -psi - 1
        xi[:, 0] = a * phi / eta
        return G, xi
    if theta == 2:
        G[:, 0, 0] = -psi * phi - 1
        xi[:, 0] = a * phi ** 2 / eta
        return G, xi
    if theta % 2 == 1:
        chi1 = (1 - 2 * a) / (1 - a) * phi - 1
        chi2 = np.full(k, a / (1 - a))
    else:
        chi1 = (1 - 2 * a) / (1 - a) * phi ** 2 - 1
        chi2 = a * phi / (1 - a)
    G[:, 0, iota - 2] = a * phi
    G[:, 0, iota - 1] = -(1 - a) * psi * phi - 1
    # anti-tridiagonal band, rows 2..iota-1
    for r in range(1, iota - 1):
        c = iota - r - 2
        G[:, r, c] = a * phi
        G[:, r, c + 1] = (1 - 2 * a) * phi ** 2 - 1
        G[:, r, c + 2] = a * phi
    G[:, iota - 1, 0] = chi1
    G[:, iota - 1, 1] = chi2
    xi[:, 0] = a * (1 - a) * phi ** 2 / eta
    return G, xi


def h2_table_ii(spec, params):
    """General analytic route for ``alpha`` strictly inside (0, 1)."""
    alpha, beta, theta = params.alpha, params.beta, params.theta
    if not 0.0 < alpha < 1.0:
        raise PreconditionError(
            f"table_ii needs alpha in (0, 1); use h2_memoryless/h2_pure_memory at alpha={alpha}")
    _require_beta(spec, beta)
    _require_consensus(spec, params)
    lam, mult = spec.nonzero_modes()
    phi = 1.0 - beta * lam
    contrib = np.ones(lam.size)
    live = np.abs(phi) > TOL_PHI
    if live.any():
        p = phi[live]
        G, xi = _table_ii_batch(theta, alpha, p)
        try:
            w = np.linalg.solve(G, xi[..., None])[:, -1, 0]
        except np.linalg.LinAlgError:
            bad = [int(i) for i, Gi in zip(np.flatnonzero(live), G)
                   if np.linalg.matrix_rank(Gi) < Gi.shape[0]]
            raise NumericError(f"singular reduced system for mode index(es) {bad}") from None
        zeta = 2 * alpha * (1 - alpha) * p ** 2
        eta = ((1 - alpha) ** 2 + alpha ** 2) * p ** 2 - 1
        contrib[live] = (-1.0 - zeta * w) / eta
    return _report(lam, mult, contrib, "table_ii", _params_dict(alpha, beta, theta))


# ------------------------------------------------------- closed forms

def _closed_mode(alpha, phi, theta):
    a = alpha
    mu = (1 - a) * phi
    if theta == 1:
        return (1 - mu) / ((1 - phi) * (1 + mu) * ((2 * a - 1) * phi + 1))
    if theta == 2:
        return (1 - mu * phi) / ((1 - phi ** 2) * (1 - (1 - 2 * a) * mu * phi))
    if theta == 3:
        num = (1 - 2 * a) * mu * phi ** 2 - mu ** 2 - mu + 1
        den = ((1 - phi) * ((1 - 2 * a) * phi - 1)
               * ((1 - 2 * a) * mu * phi ** 2 + mu ** 2 - mu - 1))
        return num / den
    num = (1 - 2 * a) * mu * phi ** 3 - (2 - a) * mu * phi + 1
    den = (1 - phi ** 2) * ((1 - 2 * a) ** 2 * mu * phi ** 3 + (3 * a - 2) * mu * phi + 1)
    return num / den


def h2_closed_small_theta(spec, params):
    """Explicit rational per-mode expressions for depths 1 to 4."""
    alpha, beta, theta = params.alpha, params.beta, params.theta
    if theta not in (1, 2, 3, 4):
        raise ParameterError(f"closed forms exist for theta in 1..4, got {theta}")
    if not 0.0 < alpha < 1.0:
        raise PreconditionError(f"closed forms need alpha in (0, 1), got {alpha}")
    _require_beta(spec, beta)
    _require_consensus(spec, params)
    lam, mult = spec.nonzero_modes()
    contrib = _closed_mode(alpha, 1.0 - beta * lam, theta)
    return _report(lam, mult, contrib, "closed_small_theta", _params_dict(alpha, beta, theta))


# ------------------------------------------------ balanced memory (1/2)

def half_alpha_mode(phi, theta):
    """Per-mode term at ``alpha = 1/2`` from the continued fractions."""
    if abs(phi) <= TOL_PHI:
        return 1.0
    order = (theta + 1) // 2 - 1
    h = cf_F(order, phi) if theta % 2 == 1 else cf_G(order, phi)
    return (phi - 2.0 * h) / ((phi * phi - 2.0) * h + phi)


def h2_half_alpha(spec, beta, theta):
    _require_beta(spec, beta)
    _require_consensus(spec, ProtocolParams(0.5, beta, theta))
    lam, mult = spec.nonzero_modes()
    contrib = [half_alpha_mode(1.0 - beta * l, theta) for l in lam]
    return _report(lam, mult, contrib, "half_alpha_cf", _params_dict(0.5, beta, theta))


def h2_limit_half_alpha(spec, beta):
    """Sum of ``2 / (2 - phi^2)`` over the nonzero modes.

    This is the value one gets by letting the continued fractions diverge.
    They converge instead (to ``(1 + sqrt(1 - phi^2)) / phi``), so the
    actual deep-memory limit of :func:`h2_half_alpha` is
    :func:`h2_deep_memory_limit`.
    """
    _require_beta(spec, beta)
    lam, mult = spec.nonzero_modes()
    phi = 1.0 - beta * lam
    return _report(lam, mult, 2.0 / (2.0 - phi ** 2), "limit_half_alpha",
                   _params_dict(0.5, beta, None))


def h2_deep_memory_limit(spec, beta):
    """``lim_{theta -> inf}`` of :func:`h2_half_alpha`: sum of ``1/sqrt(1 - phi^2)``."""
    _require_beta(spec, beta)
    lam, mult = spec.nonzero_modes()
    phi = 1.0 - beta * lam
    return _report(lam, mult, 1.0 / np.sqrt(1.0 - phi ** 2), "deep_memory_limit",
                   _params_dict(0.5, beta, None))


# ------------------------------------------------- alpha at the endpoints

def _endpoint(spec, beta, theta, alpha, method):
    lam, mult = spec.nonzero_modes()
    phi = 1.0 - beta * lam
    if np.any(np.abs(phi) >= 1.0):
        raise PreconditionError(f"beta must lie in (0, 2/lambda_n) = (0, {2.0 / spec.lambda_max:.6g})")
    return _report(lam, mult, 1.0 / (1.0 - phi ** 2), method, _params_dict(alpha, beta, theta))


def h2_memoryless(spec, beta):
    return _endpoint(spec, beta, None, 1.0, "memoryless")


def h2_pure_memory(spec, beta, theta):
    """``alpha = 0``; independent of ``theta`` and equal to the memoryless value."""
    if int(theta) != theta or theta < 1:
        raise ParameterError(f"theta must be a positive integer, got {theta}")
    return _endpoint(spec, beta, int(theta), 0.0, "pure_memory")


# ---------------------------------------------------------------- oracles

def mode_transition(alpha, phi, theta):
    """Companion-form per-mode matrix on the stacked state ``[x(t-theta), ..., x(t)]``."""
    m = theta + 1
    A = np.zeros((m, m))
    A[:-1, 1:] = np.eye(m - 1)
    A[-1, 0] += (1.0 - alpha) * phi
    A[-1, -1] += alpha * phi
    return A


def lyapunov_mode(alpha, phi, theta):
    """Stationary variance of one mode via ``(I - A (x) A) vec(W) = vec(B B^T)``."""
    A = mode_transition(alpha, phi, theta)
    m = A.shape[0]
    rhs = np.zeros(m * m)
    rhs[-1] = 1.0
    K = np.eye(m * m) - np.kron(A, A)
    try:
        W = np.linalg.solve(K, rhs).reshape(m, m)
    except np.linalg.LinAlgError:
        raise NumericError(f"singular Lyapunov system at phi={phi}") from None
    if not np.all(np.isfinite(W)):
        raise NumericError(f"non-finite Lyapunov solution at phi={phi}")
    return float(W[-1, -1])


def h2_lyapunov_oracle(spec, params):
    """Exact per-mode Lyapunov route; valid anywhere in the consensus region."""
    _require_consensus(spec, params)
    lam, mult = spec.nonzero_modes()
    contrib = [lyapunov_mode(params.alpha, 1.0 - params.beta * l, params.theta) for l in lam]
    return _report(lam, mult, contrib, "lyapunov_oracle",
                   _params_dict(params.alpha, params.beta, params.theta))


def augmented_matrix(L, alpha, beta, theta):
    """Full ``n(theta+1)`` transition matrix on ``[x(t-theta); ...; x(t)]``."""
    n = L.shape[0]
    m = theta + 1
    Phi = np.eye(n) - beta * L
    T = np.zeros((n * m, n * m))
    for r in range(theta):
        T[r * n:(r + 1) * n, (r + 1) * n:(r + 2) * n] = np.eye(n)
    T[theta * n:, :n] += (1.0 - alpha) * Phi
    T[theta * n:, theta * n:] += alpha * Phi
    return T


def h2_gramian_bruteforce(g, params, horizon, tail_tol=1e-10):
    """Truncated Gramian sum on the full augmented system.

    Accumulates ``sum_k ||C T^k B||_F^2 = Tr(C W_K C^T)`` with the noise input
    pre-projected by ``Psi = I - 11^T/n`` (which commutes with ``T``), so the
    marginal consensus direction never enters. Warns with
    :class:`AccuracyWarning` when the geometric tail estimate exceeds
    ``tail_tol``.
    """
    n, theta = g.n, params.theta
    h = n * (theta + 1)
    if h > 400:
        raise ParameterError(f"augmented dimension n(theta+1) = {h} exceeds 400")
    if int(horizon) != horizon or horizon < 1:
        raise ParameterError(f"horizon must be a positive integer, got {horizon}")
    spec = graph_spectrum(g)
    _require_consensus(spec, params)
    T = augmented_matrix(laplacian(g), params.alpha, params.beta, theta)
    Psi = np.eye(n) - np.full((n, n), 1.0 / n)
    M = np.zeros((h, n))
    M[theta * n:, :] = Psi
    terms = np.empty(int(horizon))
    for k in range(int(horizon)):
        out = M[theta * n:, :] - M[theta * n:, :].mean(axis=0, keepdims=True)
        terms[k] = np.sum(out * out)
        M = T @ M
    r = spectral_radius(spec, params)
    recent = terms[-min(theta + 1, terms.size):].max()
    tail = recent * r * r / (1.0 - r * r)
    if tail > tail_tol:
        warnings.warn(f"Gramian truncated at horizon {horizon}: tail estimate {tail:.2e} "
                      f"exceeds {tail_tol:.0e}", AccuracyWarning, stacklevel=2)
    return float(terms.sum())


# ------------------------------------------------------------- dispatch

def h2(spec, params, method="auto"):
    """Evaluate the metric by ``method`` (``"auto"`` picks the natural route).

    ``auto`` uses the memoryless/pure-memory formulas at the alpha endpoints,
    the reduced system for ``beta < 2/lambda_n``, and the Lyapunov oracle beyond that
    (where the analytic routes do not apply but consensus may still hold).
    """
    a, b, t = params.alpha, params.beta, params.theta
    if method == "auto":
        if a == 1.0:
            method = "memoryless"
        elif a == 0.0:
            method = "pure_memory"
        elif b < 2.0 / spec.lambda_max:
            method = "table_ii"
        else:
            method = "lyapunov_oracle"
    if method == "table_ii":
        return h2_table_ii(spec, params)
    if method == "closed_small_theta":
        return h2_closed_small_theta(spec, params)
    if method == "half_alpha_cf":
        if a != 0.5:
            raise ParameterError("half_alpha_cf requires alpha = 0.5")
        return h2_half_alpha(spec, b, t)
    if method == "memoryless":
        return h2_memoryless(spec, b)
    if method == "pure_memory":
        return h2_pure_memory(spec, b, t)
    if method == "lyapunov_oracle":
        return h2_lyapunov_oracle(spec, params)
    if method == "limit_half_alpha":
        return h2_limit_half_alpha(spec, b)
    if method == "deep_memory_limit":
        return h2_deep_memory_limit(spec, b)
    raise ParameterError(f"unknown method {method!r}")
