"""Plot-ready tables for the five discussion figures (data only, no plotting).

Each generator returns ``(columns, rows, meta)`` where ``rows`` is a list of
dicts keyed by ``columns`` and ``meta`` holds scalars worth keeping in JSON.
"""
import numpy as np

from .errors import ParameterError, PreconditionError
from .graph import generate_graph, spectrum
from .h2core import h2
from .search import optimal_depth, optimal_params, sweep_beta
from .stability import ProtocolParams

FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5")


def _min_size(family, d, m):
    if family == "ring_lattice":
        return 2 * d + 1
    if family == "barabasi_albert":
        return max(3, m + 1)
    return 3


def _interior(steps):
    """``steps`` points strictly inside (0, 1), evenly spaced."""
    return np.arange(1, steps + 1) / (steps + 1)


def fig1(family, n, d=None, m=None, seed=None, theta_max=10, alpha=0.5, beta_steps=40):
    """Optimal depth and metric along ``beta`` for every family member of size 3..n."""
    columns = ["n", "beta", "optimal_theta", "h2", "region",
               "inv_lambda2", "inv_lambdan", "two_over_lambdan"]
    rows = []
    for size in range(_min_size(family, d, m), n + 1):
        spec = spectrum(generate_graph(family, size, d=d, m=m, seed=seed))
        betas = _interior(beta_steps) * 2.0 / spec.lambda_max
        sw = sweep_beta(spec, alpha, theta_max, betas)
        for r in sw.rows:
            rows.append({"n": size, **r, "inv_lambda2": sw.inv_lambda2,
                         "inv_lambdan": sw.inv_lambdan, "two_over_lambdan": sw.two_over_lambdan})
    return columns, rows, {"family": family, "theta_max": theta_max, "alpha": alpha}


def fig2(family, n, d=None, m=None, seed=None, theta_max=10, alpha_steps=41,
         beta_over_lambdan=(0.2, 1.0, 1.9)):
    """Metric versus memory factor, per depth, for a few coupling gains.

    ``alpha = 0`` and ``alpha = 1`` use the pure-memory and memoryless formulas.
    """
    spec = spectrum(generate_graph(family, n, d=d, m=m, seed=seed))
    columns = ["beta", "alpha", "theta", "h2", "stable"]
    rows = []
    for x in beta_over_lambdan:
        beta = x / spec.lambda_max
        for alpha in np.linspace(0.0, 1.0, alpha_steps):
            for theta in range(1, theta_max + 1):
                try:
                    v = h2(spec, ProtocolParams(float(alpha), beta, theta)).value
                    ok = True
                except PreconditionError:
                    v, ok = float("nan"), False
                rows.append({"beta": beta, "alpha": float(alpha), "theta": theta,
                             "h2": v, "stable": ok})
    return columns, rows, {"n": n, "family": family}


def fig3(family, n, d=None, m=None, seed=None, theta_max=30, alpha=0.75,
         beta_over_lambdan=(0.2, 1.9)):
    """Metric versus depth at fixed ``alpha`` for ``beta = x / lambda_n``."""
    spec = spectrum(generate_graph(family, n, d=d, m=m, seed=seed))
    columns = ["beta_over_lambdan", "beta", "theta", "h2"]
    rows = []
    for x in beta_over_lambdan:
        beta = x / spec.lambda_max
        res = optimal_depth(spec, alpha, beta, theta_max)
        rows += [{"beta_over_lambdan": x, "beta": beta, "theta": t, "h2": v}
                 for t, v in res.values]
    return columns, rows, {"n": n, "family": family, "alpha": alpha}


def fig4(family, n, d=None, m=None, seed=None, theta=1, alpha_steps=60, beta_steps=60,
         refine=4):
    """Metric surface over ``(alpha, beta)`` plus both one-dimensional minimiser curves."""
    spec = spectrum(generate_graph(family, n, d=d, m=m, seed=seed))
    upper = 2.0 / spec.lambda_max
    res = optimal_params(spec, theta, np.linspace(0.02, 0.98, alpha_steps),
                         np.linspace(0.02, 0.98, beta_steps) * upper, refine)
    columns = ["alpha", "beta", "h2", "stable"]
    rows = []
    for i, a in enumerate(res.alpha_grid):
        for j, b in enumerate(res.beta_grid):
            v = float(res.grid_values[i, j])
            rows.append({"alpha": float(a), "beta": float(b), "h2": v, "stable": not np.isnan(v)})
    g = np.where(np.isnan(res.grid_values), np.inf, res.grid_values)
    meta = {"alpha_opt": res.alpha_opt, "beta_opt": res.beta_opt, "value": res.value,
            "min_over_beta": [{"alpha": float(a), "beta": float(res.beta_grid[j]), "h2": float(g[i, j])}
                              for i, (a, j) in enumerate(zip(res.alpha_grid, g.argmin(axis=1)))],
            "min_over_alpha": [{"alpha": float(res.alpha_grid[i]), "beta": float(b), "h2": float(g[i, j])}
                               for j, (b, i) in enumerate(zip(res.beta_grid, g.argmin(axis=0)))]}
    return columns, rows, meta


def fig5(family="barabasi_albert", n=50, d=None, m=2, seed=0, theta_max=10,
         alpha_steps=20, beta_steps=20):
    """Optimal depth over an ``(alpha, beta)`` grid (scale-free test)."""
    spec = spectrum(generate_graph(family, n, d=d, m=m, seed=seed))
    upper = 2.0 / spec.lambda_max
    columns = ["alpha", "beta", "optimal_theta", "h2"]
    rows = []
    for a in _interior(alpha_steps):
        for b in _interior(beta_steps) * upper:
            res = optimal_depth(spec, float(a), float(b), theta_max)
            rows.append({"alpha": float(a), "beta": float(b),
                         "optimal_theta": res.optimal_theta, "h2": res.optimal_value})
    return columns, rows, {"n": n, "m": m, "seed": seed, "lambda2": spec.lambda2,
                           "lambdan": spec.lambda_max}


def figure(fig_id, **kwargs):
    gens = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5}
    if fig_id not in gens:
        raise ParameterError(f"unknown figure {fig_id!r}; expected one of {FIGURES}")
    return gens[fig_id](**{k: v for k, v in kwargs.items() if v is not None})
