"""Time-domain Monte Carlo of the noisy memory protocol.

The estimator averages the disagreement energy ``||x(t) - mean(x(t))||^2``
over ``t in (burn_in, horizon]`` within each trial and then over trials.
Time averaging after burn-in stands in for the ensemble limit, which is
fine for a stable (hence ergodic) linear Gaussian system.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError, PreconditionError
from .graph import laplacian, spectrum as graph_spectrum, is_connected
from .stability import consensus_check


@dataclass(frozen=True)
class SimConfig:
    seed: int
    trials: int = 64
    horizon: int = 20000
    burn_in: int = 2000
    init_scale: float = 0.0

    def __post_init__(self):
        if self.seed is None or int(self.seed) != self.seed:
            raise ParameterError("seed must be an integer")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ParameterError(f"horizon must be >= 1, got {self.horizon}")
        if int(self.burn_in) != self.burn_in or not 0 <= self.burn_in < self.horizon:
            raise ParameterError(f"need 0 <= burn_in < horizon, got {self.burn_in}, {self.horizon}")
        if not self.init_scale >= 0:
            raise ParameterError(f"init_scale must be >= 0, got {self.init_scale}")


@dataclass(frozen=True)
class SimResult:
    msd_estimate: float
    std_error: float
    trials: int
    horizon: int
    burn_in: int
    seed: int
    per_trial: tuple = ()

    def to_dict(self):
        return {"msd_estimate": self.msd_estimate, "std_error": self.std_error,
                "trials": self.trials, "horizon": self.horizon,
                "burn_in": self.burn_in, "seed": self.seed}


def simulate_noise_free(g, params, x0_history, horizon):
    """Disagreement norms ``||Psi x(t)||`` for ``t = 0..horizon``.

    ``x0_history`` has ``theta + 1`` rows, oldest first: ``x(-theta), ..., x(0)``.
    """
    if int(horizon) != horizon or horizon <= 0:
        raise ParameterError(f"horizon must be a positive integer, got {horizon}")
    if not is_connected(g):
        raise PreconditionError("graph is disconnected")
    hist = np.array(x0_history, dtype=np.float64)
    m = params.theta + 1
    if hist.shape != (m, g.n):
        raise ParameterError(f"x0_history must have shape {(m, g.n)}, got {hist.shape}")
    Phi = np.eye(g.n) - params.beta * laplacian(g)
    phis = hist @ Phi.T
    x = hist[-1].copy()
    out = np.empty(int(horizon) + 1)
    out[0] = np.linalg.norm(x - x.mean())
    a = params.alpha
    for t in range(int(horizon)):
        x = a * phis[(t + params.theta) % m] + (1 - a) * phis[t % m]
        phis[t % m] = Phi @ x
        out[t + 1] = np.linalg.norm(x - x.mean())
    return out


def _operator(g_or_spec, beta):
    if hasattr(g_or_spec, "weights"):
        return np.eye(g_or_spec.n) - beta * laplacian(g_or_spec), graph_spectrum(g_or_spec)
    # a bare spectrum: realise it as U diag(lam) U^T with U[:, 0] = 1/sqrt(n)
    spec = g_or_spec
    n = spec.n
    basis = np.eye(n)
    basis[:, 0] = 1.0
    U, _ = np.linalg.qr(basis)
    L = (U * spec.eigenvalues) @ U.T
    return np.eye(n) - beta * L, spec


def estimate_msd(g, params, cfg):
    """Monte Carlo estimate of the steady-state mean-square deviation.

    ``g`` is a :class:`~memconsensus.graph.WeightedGraph`; a
    :class:`~memconsensus.graph.Spectrum` is also accepted and simulated on a
    symmetric operator with that spectrum and null vector ``1``.
    Bit-reproducible for a fixed config and backend.
    """
    Phi, spec = _operator(g, params.beta)
    if not consensus_check(spec, params):
        raise PreconditionError(
            f"no consensus at alpha={params.alpha}, beta={params.beta}, theta={params.theta}; "
            "the estimator would diverge")
    keys = kernels.trial_keys(cfg.seed, cfg.trials)
    init_keys = kernels.trial_keys(int(cfg.seed) ^ kernels.INIT_TAG, cfg.trials)
    per_trial = kernels.simulate_trials(Phi, params.alpha, params.theta, keys, init_keys,
                                        cfg.init_scale, cfg.horizon, cfg.burn_in)
    est = float(np.mean(per_trial))
    se = float(np.std(per_trial, ddof=1) / np.sqrt(cfg.trials)) if cfg.trials > 1 else 0.0
    return SimResult(msd_estimate=est, std_error=se, trials=cfg.trials, horizon=cfg.horizon,
                     burn_in=cfg.burn_in, seed=int(cfg.seed),
                     per_trial=tuple(float(v) for v in per_trial))
