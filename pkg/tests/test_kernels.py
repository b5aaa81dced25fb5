import numpy as np
import pytest

from memconsensus import _accel, kernels

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def _nb_normals(key, counters):
    out = np.empty(counters.size)
    for idx, k in enumerate(counters):
        a, b = kernels._normal_pair_nb(key, np.uint64(k // 2))
        out[idx] = a if k % 2 == 0 else b
    return out


def test_normal_streams_agree():
    keys = kernels.trial_keys(123, 4)
    counters = np.arange(0, 200)
    grid = kernels.normals_np(keys, counters)
    assert grid.shape == (4, 200)
    for row, key in zip(grid, keys):
        # libm vs numpy transcendental rounding
        np.testing.assert_allclose(_nb_normals(key, counters), row, rtol=1e-14, atol=1e-15)


def test_uniform_streams_bit_identical():
    key = kernels.trial_keys(77, 1)[0]
    u_np = kernels._uniform_np(np.array([key]), np.arange(500))[0]
    u_nb = np.array([kernels._uniform_nb(key, k) for k in range(500)])
    np.testing.assert_array_equal(u_nb, u_np)


def test_normal_moments():
    z = kernels.normals_np(kernels.trial_keys(9, 1), np.arange(200000))[0]
    assert abs(z.mean()) < 0.01
    assert abs(z.var() - 1) < 0.01
    assert abs(np.mean(z[:-1] * z[1:])) < 0.01


def test_trial_keys_distinct_and_stable():
    k = kernels.trial_keys(5, 1000)
    assert np.unique(k).size == 1000
    np.testing.assert_array_equal(k, kernels.trial_keys(5, 1000))
    assert not np.array_equal(k, kernels.trial_keys(6, 1000))


@pytest.mark.parametrize("theta,init", [(1, 0.0), (3, 0.7), (5, 0.0)])
def test_simulation_backends_agree(monkeypatch, theta, init):
    rng = np.random.default_rng(theta)
    n = 6
    A = rng.uniform(0, 1, (n, n))
    A = np.triu(A, 1)
    A = A + A.T
    L = np.diag(A.sum(1)) - A
    Phi = np.eye(n) - 0.8 / np.linalg.eigvalsh(L)[-1] * L
    keys = kernels.trial_keys(42, 5)
    ikeys = kernels.trial_keys(43, 5)
    args = (Phi, 0.6, theta, keys, ikeys, init, 1500, 300)
    a = kernels.simulate_trials(*args)
    monkeypatch.setattr(_accel, "USE_NUMBA", False)
    b = kernels.simulate_trials(*args)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_backend_name(monkeypatch):
    assert _accel.backend() in ("numba", "numpy")
    monkeypatch.setattr(_accel, "USE_NUMBA", False)
    assert _accel.backend() == "numpy"
