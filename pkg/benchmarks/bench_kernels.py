"""Wall-clock comparison of the numba and pure-numpy kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

The numba figures exclude the first (compiling) call. Both backends run in
one process by toggling ``memconsensus._accel.USE_NUMBA``.
"""
import argparse
import time

import numpy as np

from memconsensus import _accel, kernels
from memconsensus.graph import chain_graph, complete_graph, laplacian, ring_lattice
from memconsensus.stability import TOL_JURY


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def sim_case(g, alpha, beta, theta, trials, horizon, burn_in):
    Phi = np.eye(g.n) - beta * laplacian(g)
    keys = kernels.trial_keys(1, trials)
    ikeys = kernels.trial_keys(2, trials)
    return lambda: kernels.simulate_trials(Phi, alpha, theta, keys, ikeys, 0.0, horizon, burn_in)


def jury_case(count, seed=0):
    rng = np.random.default_rng(seed)
    polys = []
    for _ in range(count):
        theta = int(rng.integers(1, 12))
        alpha, phi = rng.uniform(0, 1), rng.uniform(-1.5, 1.5)
        c = np.zeros(theta + 2)
        c[-1], c[-2] = 1.0, -alpha * phi
        c[0] += -(1 - alpha) * phi
        polys.append(c)
    return lambda: [kernels.jury_code(c, TOL_JURY) for c in polys]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    cases = [
        ("simulate K3 theta=1, 64x20000", sim_case(complete_graph(3), 0.5, 1 / 6, 1, 64, 20000, 2000)),
        ("simulate P10 theta=5, 64x20000", sim_case(chain_graph(10), 0.7, 0.3, 5, 64, 20000, 2000)),
        ("simulate C2_20 theta=3, 16x20000", sim_case(ring_lattice(20, 2), 0.5, 0.1, 3, 16, 20000, 2000)),
        ("jury 5000 trinomials", jury_case(5000)),
    ]
    print(f"{'case':36s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for name, fn in cases:
        _accel.USE_NUMBA = True
        fn()   # compile
        t_nb = _best(fn, args.repeat)
        _accel.USE_NUMBA = False
        t_np = _best(fn, args.repeat)
        _accel.USE_NUMBA = True
        print(f"{name:36s} {t_nb:10.3f} {t_np:10.3f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
