"""Consensus of the single-step memory protocol.

Mode ``i`` of the protocol obeys the characteristic trinomial

    P(gamma) = gamma**(theta+1) - alpha*phi*gamma**theta - (1-alpha)*phi,
    phi = 1 - beta*lambda_i,

and the network reaches consensus iff every trinomial with ``lambda_i > 0``
is Schur stable.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NumericError, ParameterError, PreconditionError
from .graph import TOL_CONN

TOL_SCHUR = 1e-9
TOL_JURY = 1e-12


@dataclass(frozen=True)
class ProtocolParams:
    """Memory factor ``alpha``, coupling gain ``beta``, memory depth ``theta``
    and maximum accessible depth ``theta_max`` (defaults to ``theta``)."""

    alpha: float
    beta: float
    theta: int = 1
    theta_max: int = None

    def __post_init__(self):
        alpha, beta = float(self.alpha), float(self.beta)
        if not 0.0 <= alpha <= 1.0:
            raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
        if not beta > 0.0 or not np.isfinite(beta):
            raise ParameterError(f"beta must be positive, got {beta}")
        if int(self.theta) != self.theta or self.theta < 1:
            raise ParameterError(f"theta must be a positive integer, got {self.theta}")
        theta = int(self.theta)
        theta_max = theta if self.theta_max is None else self.theta_max
        if int(theta_max) != theta_max or theta_max < theta:
            raise ParameterError(f"theta_max must be an integer >= theta, got {theta_max}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "theta_max", int(theta_max))

    def with_theta(self, theta):
        return ProtocolParams(self.alpha, self.beta, theta, max(theta, self.theta_max))


@dataclass(frozen=True, eq=False)
class ModePolynomial:
    """Coefficients in ascending powers of gamma; monic trinomial of degree theta+1."""

    coefficients: np.ndarray

    @property
    def degree(self):
        return self.coefficients.size - 1

    def __call__(self, gamma):
        return np.polynomial.polynomial.polyval(gamma, self.coefficients)

    def __eq__(self, other):
        return (isinstance(other, ModePolynomial)
                and np.array_equal(self.coefficients, other.coefficients))


def mode_polynomial(params, lam):
    phi = 1.0 - params.beta * lam
    c = np.zeros(params.theta + 2)
    c[-1] = 1.0
    c[-2] = -params.alpha * phi
    c[0] += -(1.0 - params.alpha) * phi
    return ModePolynomial(c)


def companion_matrix(coefficients):
    """Companion matrix of a polynomial given in ascending powers."""
    c = np.asarray(coefficients, dtype=np.float64)
    c = c / c[-1]
    deg = c.size - 1
    C = np.zeros((deg, deg))
    C[1:, :-1] = np.eye(deg - 1)
    C[:, -1] = -c[:-1]
    return C


def max_root_modulus(p):
    coefs = p.coefficients if isinstance(p, ModePolynomial) else np.asarray(p, float)
    if coefs.size < 2:
        return 0.0
    try:
        roots = np.linalg.eigvals(companion_matrix(coefs))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"eigensolver failed: {exc}") from exc
    return float(np.abs(roots).max())


def is_schur_roots(p):
    """All roots strictly inside ``|gamma| < 1 - TOL_SCHUR``."""
    return max_root_modulus(p) < 1.0 - TOL_SCHUR


def jury_verdict(p):
    """``"stable"``, ``"unstable"`` or ``"marginal"`` from the Jury table."""
    coefs = p.coefficients if isinstance(p, ModePolynomial) else np.asarray(p, float)
    if coefs.size < 2:
        raise ParameterError("Jury test needs degree >= 1")
    code = kernels.jury_code(coefs, TOL_JURY)
    return {1: "stable", 0: "unstable", -1: "marginal"}[code]


def jury_schur(p):
    """Jury stability criterion; marginal tables count as unstable."""
    return jury_verdict(p) == "stable"


_SCHUR_TESTS = {"roots": is_schur_roots, "jury": jury_schur}


def _schur_test(method):
    if method not in _SCHUR_TESTS:
        raise ParameterError(f"unknown stability method {method!r}; expected 'roots' or 'jury'")
    return _SCHUR_TESTS[method]


def _require_connected(spec):
    if not spec.lambda2 > TOL_CONN:
        raise PreconditionError(
            f"spectrum is disconnected (lambda_2 = {spec.lambda2:.3g} <= {TOL_CONN})")


def consensus_check(spec, params, method="roots"):
    """True iff every mode with ``lambda > 0`` has a Schur trinomial."""
    _require_connected(spec)
    test = _schur_test(method)
    lam, _ = spec.nonzero_modes()
    return all(test(mode_polynomial(params, l)) for l in lam)


def spectral_radius(spec, params):
    """Largest root modulus over the non-consensus modes."""
    lam, _ = spec.nonzero_modes()
    return max(max_root_modulus(mode_polynomial(params, l)) for l in lam)


def consensus_region(spec, theta, alpha_grid, beta_grid, method="roots"):
    """Boolean matrix ``[len(alpha_grid), len(beta_grid)]`` of consensus verdicts."""
    alpha_grid = np.asarray(alpha_grid, dtype=np.float64)
    beta_grid = np.asarray(beta_grid, dtype=np.float64)
    if alpha_grid.size == 0 or beta_grid.size == 0:
        raise ParameterError("grids must be nonempty")
    if np.any(alpha_grid < 0) or np.any(alpha_grid > 1):
        raise ParameterError("alpha grid must lie in [0, 1]")
    if np.any(beta_grid <= 0):
        raise ParameterError("beta grid must be positive")
    _require_connected(spec)
    test = _schur_test(method)
    lam, _ = spec.nonzero_modes()
    out = np.zeros((alpha_grid.size, beta_grid.size), dtype=bool)
    for a_idx, a in enumerate(alpha_grid):
        for b_idx, b in enumerate(beta_grid):
            params = ProtocolParams(a, b, theta)
            out[a_idx, b_idx] = all(test(mode_polynomial(params, l)) for l in lam)
    return out


def verify_inheritance(spec, alpha, beta, theta):
    """Check that consensus at depth ``theta + 1`` implies consensus at ``theta``."""
    lam_n = spec.lambda_max
    if not 0.0 < beta < 2.0 / lam_n:
        raise PreconditionError(f"beta must lie in (0, 2/lambda_n) = (0, {2.0 / lam_n:.6g})")
    deeper = consensus_check(spec, ProtocolParams(alpha, beta, theta + 1))
    if not deeper:
        return True
    return consensus_check(spec, ProtocolParams(alpha, beta, theta))
