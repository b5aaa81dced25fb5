"""Memory-depth and parameter optimisation over the H2 metric."""
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, PreconditionError
from .h2core import h2
from .simulate import estimate_msd
from .stability import ProtocolParams, consensus_check

REGION_RTOL = 1e-12


def beta_region(spec, beta):
    """Classify ``beta`` as ``low`` (<= 1/lam_n), ``high`` (in [1/lam_2, 2/lam_n)),
    ``middle`` or ``out_of_range``. Boundaries carry a ``1e-12`` relative slack;
    ``low`` wins when both apply (complete graphs at ``beta = 1/lam_2``)."""
    inv_n = 1.0 / spec.lambda_max
    inv_2 = 1.0 / spec.lambda2
    if not 0.0 < beta < 2.0 * inv_n:
        return "out_of_range"
    if beta <= inv_n * (1.0 + REGION_RTOL):
        return "low"
    if beta >= inv_2 * (1.0 - REGION_RTOL):
        return "high"
    return "middle"


@dataclass(frozen=True)
class DepthSearchResult:
    optimal_theta: int
    values: tuple          # ((theta, h2), ...) for the stable prefix of depths
    beta_region: str
    theta_max: int         # requested maximum depth
    stable_theta_max: int  # deepest depth of the stable prefix

    @property
    def optimal_value(self):
        return dict(self.values)[self.optimal_theta]

    def to_dict(self):
        return {"optimal_theta": self.optimal_theta,
                "values": [{"theta": t, "h2": v} for t, v in self.values],
                "beta_region": self.beta_region, "theta_max": self.theta_max,
                "stable_theta_max": self.stable_theta_max}


def _argmin_first(values):
    best_i, best_v = 0, values[0]
    for i, v in enumerate(values[1:], start=1):
        if v < best_v:
            best_i, best_v = i, v
    return best_i


def optimal_depth(spec, alpha, beta, theta_max, method="analytic", config=None):
    """Best memory depth in ``1..theta_max``; ties go to the smallest depth.

    Only the stable prefix of depths is searched: evaluation stops at the
    first depth outside the consensus region. ``method="simulate"`` uses
    Monte Carlo estimates and needs a :class:`~memconsensus.simulate.SimConfig`.
    """
    if int(theta_max) != theta_max or theta_max < 1:
        raise ParameterError(f"theta_max must be a positive integer, got {theta_max}")
    if method not in ("analytic", "simulate"):
        raise ParameterError(f"unknown method {method!r}")
    if method == "simulate" and config is None:
        raise ParameterError("method='simulate' needs a SimConfig")
    values = []
    for theta in range(1, int(theta_max) + 1):
        params = ProtocolParams(alpha, beta, theta, theta_max)
        if not consensus_check(spec, params):
            break
        if method == "analytic":
            v = h2(spec, params).value
        else:
            v = estimate_msd(spec, params, config).msd_estimate
        values.append((theta, v))
    if not values:
        raise PreconditionError(f"no stable depth at alpha={alpha}, beta={beta}")
    best = _argmin_first([v for _, v in values])
    return DepthSearchResult(optimal_theta=values[best][0], values=tuple(values),
                             beta_region=beta_region(spec, beta), theta_max=int(theta_max),
                             stable_theta_max=values[-1][0])


@dataclass(frozen=True)
class ParamSearchResult:
    alpha_opt: float
    beta_opt: float
    value: float
    grid_values: np.ndarray   # NaN marks cells outside the consensus region
    alpha_grid: np.ndarray
    beta_grid: np.ndarray
    history: tuple = field(default=())  # ((alpha, beta, value), ...) after coarse + each round

    def to_dict(self):
        return {"alpha_opt": self.alpha_opt, "beta_opt": self.beta_opt, "value": self.value,
                "alpha_grid": self.alpha_grid.tolist(), "beta_grid": self.beta_grid.tolist(),
                "grid_values": [[None if np.isnan(v) else float(v) for v in row]
                                for row in self.grid_values],
                "history": [list(h) for h in self.history]}


def default_grids(spec, steps=60):
    upper = 2.0 / spec.lambda_max
    return np.linspace(0.02, 0.98, steps), np.linspace(0.02, 0.98, steps) * upper


def _value_or_nan(spec, alpha, beta, theta):
    try:
        return h2(spec, ProtocolParams(alpha, beta, theta), method="table_ii").value
    except PreconditionError:
        return np.nan


def optimal_params(spec, theta, alpha_grid=None, beta_grid=None, refine_iters=4):
    """Coarse grid search for ``(alpha, beta)``, then local refinement.

    Each refinement round halves the step sizes and scans a 5 x 5 stencil
    centred on the incumbent; the incumbent only moves on a strict
    improvement, so the value never increases. Deterministic.
    """
    da_default, db_default = default_grids(spec)
    alpha_grid = da_default if alpha_grid is None else np.asarray(alpha_grid, dtype=np.float64)
    beta_grid = db_default if beta_grid is None else np.asarray(beta_grid, dtype=np.float64)
    upper = 2.0 / spec.lambda_max
    if alpha_grid.size == 0 or beta_grid.size == 0:
        raise ParameterError("grids must be nonempty")
    if np.any(alpha_grid <= 0) or np.any(alpha_grid >= 1):
        raise ParameterError("alpha grid must lie in (0, 1)")
    if np.any(beta_grid <= 0) or np.any(beta_grid >= upper):
        raise ParameterError(f"beta grid must lie in (0, 2/lambda_n) = (0, {upper:.6g})")
    if int(refine_iters) != refine_iters or refine_iters < 0:
        raise ParameterError("refine_iters must be a nonnegative integer")

    grid = np.array([[_value_or_nan(spec, a, b, theta) for b in beta_grid] for a in alpha_grid])
    if np.all(np.isnan(grid)):
        raise PreconditionError("every grid cell lies outside the consensus region")
    # first minimum in row-major scan order
    flat = np.where(np.isnan(grid), np.inf, grid).ravel()
    k = int(np.argmin(flat))
    ia, ib = divmod(k, beta_grid.size)
    a_best, b_best, v_best = float(alpha_grid[ia]), float(beta_grid[ib]), float(grid[ia, ib])
    history = [(a_best, b_best, v_best)]

    da = float(np.min(np.diff(np.unique(alpha_grid)))) if alpha_grid.size > 1 else 0.02
    db = float(np.min(np.diff(np.unique(beta_grid)))) if beta_grid.size > 1 else 0.02 * upper
    for _ in range(int(refine_iters)):
        da, db = da / 2, db / 2
        a0, b0 = a_best, b_best
        for i in range(-2, 3):
            for j in range(-2, 3):
                a, b = a0 + i * da, b0 + j * db
                if not (0.0 < a < 1.0 and 0.0 < b < upper) or (i == 0 and j == 0):
                    continue
                v = _value_or_nan(spec, a, b, theta)
                if v < v_best:
                    a_best, b_best, v_best = a, b, v
        history.append((a_best, b_best, v_best))
    return ParamSearchResult(alpha_opt=a_best, beta_opt=b_best, value=v_best, grid_values=grid,
                             alpha_grid=alpha_grid, beta_grid=beta_grid, history=tuple(history))


@dataclass(frozen=True)
class BetaSweep:
    rows: tuple   # dicts with beta, optimal_theta, h2, region
    inv_lambda2: float
    inv_lambdan: float
    two_over_lambdan: float


def sweep_beta(spec, alpha, theta_max, beta_grid):
    """Optimal depth and its metric for each ``beta``; unstable cells get
    ``optimal_theta = None`` and ``h2 = nan``."""
    rows = []
    for b in np.asarray(beta_grid, dtype=np.float64):
        try:
            res = optimal_depth(spec, alpha, float(b), theta_max)
            rows.append({"beta": float(b), "optimal_theta": res.optimal_theta,
                         "h2": res.optimal_value, "region": res.beta_region})
        except (PreconditionError, ParameterError):
            rows.append({"beta": float(b), "optimal_theta": None, "h2": float("nan"),
                         "region": "out_of_range" if b <= 0 else beta_region(spec, float(b))})
    return BetaSweep(rows=tuple(rows), inv_lambda2=1.0 / spec.lambda2,
                     inv_lambdan=1.0 / spec.lambda_max, two_over_lambdan=2.0 / spec.lambda_max)
