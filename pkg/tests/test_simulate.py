import numpy as np
import pytest

from memconsensus import _accel
from memconsensus.errors import ParameterError, PreconditionError
from memconsensus.graph import chain_graph, complete_graph, spectrum, star_graph
from memconsensus.h2core import h2
from memconsensus.simulate import SimConfig, estimate_msd, simulate_noise_free
from memconsensus.stability import ProtocolParams, consensus_check, spectral_radius

K3 = complete_graph(3)


def test_constant_history_stays_put():
    p = ProtocolParams(0.5, 1 / 6, 3)
    hist = np.tile([2.5, 2.5, 2.5], (4, 1))
    out = simulate_noise_free(K3, p, hist, 50)
    assert np.all(out == 0)


def test_geometric_decay_rate():
    p = ProtocolParams(0.5, 1 / 6, 1)
    hist = np.random.default_rng(0).normal(size=(2, 3))
    out = simulate_noise_free(K3, p, hist, 80)
    rate = (out[80] / out[40]) ** (1 / 40)
    assert rate == pytest.approx(spectral_radius(spectrum(K3), p), rel=1e-3)


def test_unstable_grows():
    hist = np.random.default_rng(1).normal(size=(2, 3))
    out = simulate_noise_free(K3, ProtocolParams(1.0, 0.7, 1), hist, 60)
    assert out[-1] > 100 * out[0]


def test_noise_free_shape_errors():
    with pytest.raises(ParameterError):
        simulate_noise_free(K3, ProtocolParams(0.5, 0.1, 2), np.zeros((2, 3)), 10)
    with pytest.raises(ParameterError):
        simulate_noise_free(K3, ProtocolParams(0.5, 0.1, 1), np.zeros((2, 3)), 0)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")   # divergent runs overflow to inf
def test_noise_free_matches_consensus_verdict():
    rng = np.random.default_rng(7)
    for _ in range(100):
        g = [complete_graph, star_graph, chain_graph][rng.integers(3)](int(rng.integers(3, 8)))
        spec = spectrum(g)
        p = ProtocolParams(rng.uniform(0, 1), rng.uniform(0.05, 3.0) / spec.lambda_max,
                           int(rng.integers(1, 5)))
        r = spectral_radius(spec, p)
        if abs(r - 1) < 0.02:
            continue      # too slow to call either way in a short run
        hist = rng.normal(size=(p.theta + 1, g.n))
        out = simulate_noise_free(g, p, hist, 3000)
        decayed = out[-1] < 1e-6 * out[: p.theta + 1].max() if out[0] > 0 else True
        assert decayed == consensus_check(spec, p)


def test_k3_estimate():
    res = estimate_msd(K3, ProtocolParams(0.5, 1 / 6, 1), SimConfig(seed=1))
    assert abs(res.msd_estimate - 2.4) <= 3 * res.std_error
    assert res.trials == 64 and res.horizon == 20000 and res.burn_in == 2000


def test_phi_zero_k20():
    res = estimate_msd(complete_graph(20), ProtocolParams(0.5, 1 / 20, 4),
                       SimConfig(seed=2, trials=16, horizon=5000, burn_in=100))
    assert abs(res.msd_estimate - 19) <= 3 * res.std_error


def test_deterministic():
    cfg = SimConfig(seed=99, trials=8, horizon=2000, burn_in=200, init_scale=0.5)
    p = ProtocolParams(0.7, 0.3, 3)
    a = estimate_msd(chain_graph(5), p, cfg)
    b = estimate_msd(chain_graph(5), p, cfg)
    assert a.msd_estimate == b.msd_estimate and a.per_trial == b.per_trial


def test_thread_count_does_not_change_result():
    cfg = SimConfig(seed=4, trials=6, horizon=1000, burn_in=100)
    p = ProtocolParams(0.4, 0.2, 2)
    a = estimate_msd(star_graph(6), p, cfg).msd_estimate
    _accel.set_threads(1)
    b = estimate_msd(star_graph(6), p, cfg).msd_estimate
    assert a == b


def test_backends_same_estimate(monkeypatch):
    cfg = SimConfig(seed=8, trials=4, horizon=1200, burn_in=100, init_scale=1.0)
    p = ProtocolParams(0.4, 0.2, 3)
    a = estimate_msd(star_graph(5), p, cfg).msd_estimate
    monkeypatch.setattr(_accel, "USE_NUMBA", False)
    b = estimate_msd(star_graph(5), p, cfg).msd_estimate
    assert a == pytest.approx(b, rel=1e-12)


def test_spectrum_input_matches_graph():
    # same spectrum, different eigenbasis: same estimator distribution, check 3 sigma
    p = ProtocolParams(0.5, 0.2, 2)
    cfg = SimConfig(seed=3, trials=32, horizon=6000, burn_in=500)
    res = estimate_msd(spectrum(chain_graph(5)), p, cfg)
    assert abs(res.msd_estimate - h2(spectrum(chain_graph(5)), p).value) <= 3 * res.std_error


def test_unstable_rejected():
    with pytest.raises(PreconditionError):
        estimate_msd(K3, ProtocolParams(1.0, 0.7, 1), SimConfig(seed=1, trials=2, horizon=10, burn_in=1))


@pytest.mark.parametrize("kwargs", [dict(seed=None), dict(seed=1, trials=0),
                                    dict(seed=1, horizon=10, burn_in=10),
                                    dict(seed=1, init_scale=-1.0), dict(seed=1.5)])
def test_config_validation(kwargs):
    with pytest.raises(ParameterError):
        SimConfig(**kwargs)


def test_single_trial_zero_se():
    res = estimate_msd(K3, ProtocolParams(0.5, 0.2, 1), SimConfig(seed=1, trials=1, horizon=100, burn_in=10))
    assert res.std_error == 0.0
    assert set(res.to_dict()) == {"msd_estimate", "std_error", "trials", "horizon", "burn_in", "seed"}
