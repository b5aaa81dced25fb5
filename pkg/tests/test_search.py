import numpy as np
import pytest
from scipy.optimize import minimize

from memconsensus import figures
from memconsensus.errors import ParameterError, PreconditionError
from memconsensus.graph import complete_graph, ring_lattice, spectrum, star_graph
from memconsensus.h2core import h2
from memconsensus.search import (beta_region, default_grids, optimal_depth, optimal_params,
                                 sweep_beta)
from memconsensus.simulate import SimConfig
from memconsensus.stability import ProtocolParams

K3 = spectrum(complete_graph(3))


def test_low_beta_deepest():
    res = optimal_depth(K3, 0.5, 1 / 6, 10)
    assert res.optimal_theta == 10 and res.beta_region == "low"
    vals = [v for _, v in res.values]
    assert vals[:3] == pytest.approx([2.4, 7 / 3, 44 / 19], abs=1e-12)
    assert res.optimal_value == min(vals)


def test_high_beta_shortest():
    res = optimal_depth(K3, 0.5, 0.5, 10)
    assert res.optimal_theta == 1 and res.beta_region == "high"


@pytest.mark.parametrize("n", [3, 8, 20])
def test_phi_zero_tie_break(n):
    res = optimal_depth(spectrum(complete_graph(n)), 0.5, 1 / n, 6)
    assert res.optimal_theta == 1
    assert all(v == pytest.approx(n - 1, abs=1e-12) for _, v in res.values)


def test_regions():
    s = spectrum(star_graph(6))      # lambda_2 = 1, lambda_n = 6
    assert beta_region(s, 0.1) == "low"
    assert beta_region(s, 1 / 6) == "low"
    assert beta_region(s, 0.2) == "middle"
    assert beta_region(s, 0.4) == "out_of_range"
    assert beta_region(s, 0.0) == "out_of_range"
    assert beta_region(K3, 1 / 3) == "low"      # K_n: 1/lambda_2 == 1/lambda_n
    assert beta_region(K3, 0.5) == "high"


def test_stable_prefix_only():
    # beyond 2/lambda_n the memory can keep shallow depths stable only
    res = optimal_depth(K3, 0.5, 0.7, 8)
    assert res.beta_region == "out_of_range"
    assert 1 <= res.stable_theta_max < 8
    assert len(res.values) == res.stable_theta_max
    with pytest.raises(PreconditionError):
        optimal_depth(K3, 1.0, 0.8, 3)


def test_depth_errors():
    with pytest.raises(ParameterError):
        optimal_depth(K3, 0.5, 0.1, 0)
    with pytest.raises(ParameterError):
        optimal_depth(K3, 0.5, 0.1, 3, method="simulate")
    with pytest.raises(ParameterError):
        optimal_depth(K3, 0.5, 0.1, 3, method="magic")


def test_depth_by_simulation():
    cfg = SimConfig(seed=5, trials=16, horizon=4000, burn_in=400)
    res = optimal_depth(K3, 0.5, 0.5, 3, method="simulate", config=cfg)
    assert len(res.values) == 3
    assert res.to_dict()["beta_region"] == "high"


def test_params_complete_graph():
    for n in (3, 6):
        spec = spectrum(complete_graph(n))
        a = np.linspace(0.1, 0.9, 9)
        b = np.linspace(0.1, 1.9, 19) / n       # grid contains beta = 1/n
        res = optimal_params(spec, 2, a, b, refine_iters=3)
        assert res.beta_opt == pytest.approx(1 / n, abs=1e-12)
        assert res.value == pytest.approx(n - 1, abs=1e-9)
        row = res.grid_values[:, 9]
        np.testing.assert_allclose(row, n - 1, atol=1e-9)     # flat in alpha
        assert res.alpha_opt == a[0]                          # first in scan order
        assert optimal_params(spec, 2, a, b, refine_iters=3).alpha_opt == res.alpha_opt


def test_params_ring_interior_and_monotone():
    spec = spectrum(ring_lattice(20, 2))
    res = optimal_params(spec, 1, *default_grids(spec, 24), refine_iters=4)
    vals = [h[2] for h in res.history]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    upper = 2 / spec.lambda_max
    assert 0.05 < res.alpha_opt < 0.95 and 0.05 * upper < res.beta_opt < 0.95 * upper
    # a fine local polish from the incumbent gains almost nothing
    fine = minimize(lambda z: h2(spec, ProtocolParams(z[0], z[1] * upper, 1)).value,
                    [res.alpha_opt, res.beta_opt / upper], method="Nelder-Mead",
                    options={"xatol": 1e-8, "fatol": 1e-12})
    assert fine.fun <= res.value
    assert res.value - fine.fun < 1e-5 * res.value
    # last two rounds move by less than one coarse cell
    a_step = np.diff(res.alpha_grid)[0]
    assert abs(res.history[-1][0] - res.history[-2][0]) < a_step


def test_params_errors():
    spec = spectrum(complete_graph(4))
    with pytest.raises(ParameterError):
        optimal_params(spec, 1, [0.0, 0.5], [0.1])
    with pytest.raises(ParameterError):
        optimal_params(spec, 1, [0.5], [0.6])
    with pytest.raises(ParameterError):
        optimal_params(spec, 1, [], [0.1])


def test_params_json():
    spec = spectrum(complete_graph(4))
    d = optimal_params(spec, 1, [0.3, 0.6], [0.1, 0.2], 1).to_dict()
    assert set(d) >= {"alpha_opt", "beta_opt", "value", "grid_values"}


def test_sweep_reference_lines():
    spec = spectrum(star_graph(5))
    sw = sweep_beta(spec, 0.5, 6, np.array([0.05, 0.3, 0.5]))
    assert sw.two_over_lambdan == pytest.approx(0.4)
    assert sw.inv_lambda2 == pytest.approx(1.0)
    assert [r["optimal_theta"] for r in sw.rows][:2] == [6, sw.rows[1]["optimal_theta"]]
    assert sw.rows[2]["region"] == "out_of_range"
    assert sw.rows[2]["optimal_theta"] is not None or np.isnan(sw.rows[2]["h2"])


def test_figure_tables_shapes():
    cols, rows, meta = figures.fig1("complete", 5, beta_steps=6, theta_max=4)
    assert cols[:4] == ["n", "beta", "optimal_theta", "h2"]
    assert {r["n"] for r in rows} == {3, 4, 5} and len(rows) == 18
    cols, rows, _ = figures.fig2("complete", 5, alpha_steps=5, theta_max=3)
    assert len(rows) == 3 * 5 * 3 and all(r["stable"] for r in rows if r["beta"] * 4 < 1.9)
    cols, rows, _ = figures.fig3("chain", 6, theta_max=5)
    assert len(rows) == 10
    cols, rows, meta = figures.fig4("ring_lattice", 10, d=2, alpha_steps=6, beta_steps=6, refine=1)
    assert len(rows) == 36 and len(meta["min_over_beta"]) == 6
    cols, rows, meta = figures.fig5(n=12, alpha_steps=2, beta_steps=3, theta_max=4)
    assert len(rows) == 6 and meta["m"] == 2
    with pytest.raises(ParameterError):
        figures.figure("fig9")


def test_fig1_ring_sizes_start_at_lattice_minimum():
    _, rows, _ = figures.fig1("ring_lattice", 8, d=2, beta_steps=3, theta_max=3)
    assert min(r["n"] for r in rows) == 5
