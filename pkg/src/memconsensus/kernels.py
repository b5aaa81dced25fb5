"""Hot numeric kernels, each in a numba flavour and a pure-numpy flavour.

The public dispatchers (:func:`simulate_trials`, :func:`jury_code`) pick the
implementation from :data:`memconsensus._accel.USE_NUMBA` on every call, so
both paths can be exercised in one process.

Random numbers
--------------
Noise is drawn from a counter-based stream so that a trial's samples depend
only on ``(seed, trial, counter)``:

* ``mix64`` is the SplitMix64 finaliser (Steele, Lea & Flood 2014).
* trial key: ``mix64(seed + GOLDEN * (trial + 1))`` (all arithmetic mod 2**64).
* uniform ``k`` of a key: ``((mix64(key + GOLDEN * (k + 1)) >> 11) + 1) * 2**-53``,
  which lies in ``(0, 1]``.
* normal ``k``: Box-Muller on the uniform pair ``(2p, 2p + 1)`` with
  ``p = k // 2``; even ``k`` takes the cosine branch, odd ``k`` the sine.

Agent ``i`` at step ``t`` receives normal ``t * n + i`` of its trial key.
Initial-state spread (when requested) uses the key of trial ``trial`` under
seed ``seed ^ INIT_TAG``.

The integer stream is identical in both flavours; the transcendental calls
in Box-Muller may round differently (a few ulp), so cross-backend estimates
agree to rounding, while each backend on its own is bit-reproducible.
"""
import math

import numpy as np

from . import _accel
from ._accel import njit, prange

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
INIT_TAG = 0x5DEECE66D
_TWO_PI = 2.0 * math.pi
_INV_2_53 = 1.0 / 9007199254740992.0

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_U1 = np.uint64(1)

_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------- RNG, numba

@njit(cache=True)
def _mix64_nb(z):
    z = (z ^ (z >> _U30)) * _M1
    z = (z ^ (z >> _U27)) * _M2
    return z ^ (z >> _U31)


@njit(cache=True)
def _uniform_nb(key, k):
    z = _mix64_nb(key + GOLDEN * (np.uint64(k) + _U1))
    return float((z >> _U11) + _U1) * _INV_2_53


@njit(cache=True)
def _normal_pair_nb(key, p):
    u1 = _uniform_nb(key, 2 * p)
    u2 = _uniform_nb(key, 2 * p + 1)
    r = math.sqrt(-2.0 * math.log(u1))
    return r * math.cos(_TWO_PI * u2), r * math.sin(_TWO_PI * u2)


# ---------------------------------------------------------------- RNG, numpy

def _mix64_np(z):
    z = (z ^ (z >> _U30)) * _M1
    z = (z ^ (z >> _U27)) * _M2
    return z ^ (z >> _U31)


def _uniform_np(keys, counters):
    """Uniforms for every (key, counter) pair; shape ``keys.shape + counters.shape``."""
    keys = np.asarray(keys, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = keys[..., None] + GOLDEN * (counters + _U1)
        z = _mix64_np(z)
    return ((z >> _U11) + _U1).astype(np.float64) * _INV_2_53


def normals_np(keys, counters):
    """Standard normals ``normal(key, k)`` for each key and each counter ``k``."""
    counters = np.asarray(counters, dtype=np.int64)
    p = counters >> 1
    u1 = _uniform_np(keys, 2 * p)
    u2 = _uniform_np(keys, 2 * p + 1)
    r = np.sqrt(-2.0 * np.log(u1))
    ang = _TWO_PI * u2
    return np.where((counters & 1) == 0, r * np.cos(ang), r * np.sin(ang))


def trial_keys(seed, trials):
    """Per-trial stream keys derived from ``seed`` (any Python int)."""
    s = np.uint64(int(seed) & _MASK64)
    idx = np.arange(1, trials + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64_np(s + GOLDEN * idx)


# ------------------------------------------------------- simulation, numba

@njit(cache=True)
def _one_trial_nb(Phi, alpha, theta, key, init_key, init_scale, horizon, burn_in):
    n = Phi.shape[0]
    m = theta + 1
    hist = np.zeros((m, n))
    x = np.zeros(n)
    # initial layers x(-theta), ..., x(0); slot of time s is (s + theta) % m
    for layer in range(m):
        if init_scale > 0.0:
            for i in range(n):
                k = layer * n + i
                c, s = _normal_pair_nb(init_key, k >> 1)
                x[i] = init_scale * (c if (k & 1) == 0 else s)
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += Phi[i, j] * x[j]
            hist[layer, i] = acc
    total = 0.0
    c = 0.0
    s = 0.0
    for t in range(horizon):
        cur = (t + theta) % m
        old = t % m
        mean = 0.0
        for i in range(n):
            k = t * n + i
            if (k & 1) == 0 or i == 0:
                c, s = _normal_pair_nb(key, k >> 1)
            w = c if (k & 1) == 0 else s
            x[i] = alpha * hist[cur, i] + (1.0 - alpha) * hist[old, i] + w
            mean += x[i]
        # slot `old` is free once x(t+1) is formed
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += Phi[i, j] * x[j]
            hist[old, i] = acc
        if t + 1 > burn_in:
            mean /= n
            e2 = 0.0
            for i in range(n):
                d = x[i] - mean
                e2 += d * d
            total += e2
    return total / (horizon - burn_in)


@njit(cache=True, parallel=True)
def _simulate_nb(Phi, alpha, theta, keys, init_keys, init_scale, horizon, burn_in):
    trials = keys.shape[0]
    out = np.empty(trials)
    for j in prange(trials):
        out[j] = _one_trial_nb(Phi, alpha, theta, keys[j], init_keys[j],
                               init_scale, horizon, burn_in)
    return out


# ------------------------------------------------------- simulation, numpy

def _simulate_np(Phi, alpha, theta, keys, init_keys, init_scale, horizon, burn_in,
                 chunk=512):
    n = Phi.shape[0]
    m = theta + 1
    trials = keys.shape[0]
    hist = np.zeros((m, trials, n))
    if init_scale > 0.0:
        layers = init_scale * normals_np(init_keys, np.arange(m * n)).reshape(trials, m, n)
        hist[:] = np.einsum("tln,in->lti", layers, Phi)
    total = np.zeros(trials)
    noise = None
    t0 = 0
    for t in range(horizon):
        if t % chunk == 0:
            t0 = t
            steps = min(chunk, horizon - t)
            ctr = (np.arange(t, t + steps)[:, None] * n + np.arange(n)).ravel()
            noise = normals_np(keys, ctr).reshape(trials, steps, n)
        cur = (t + theta) % m
        old = t % m
        x = alpha * hist[cur] + (1.0 - alpha) * hist[old] + noise[:, t - t0, :]
        hist[old] = x @ Phi.T
        if t + 1 > burn_in:
            eps = x - x.mean(axis=1, keepdims=True)
            total += np.einsum("ij,ij->i", eps, eps)
    return total / (horizon - burn_in)


def simulate_trials(Phi, alpha, theta, keys, init_keys, init_scale, horizon, burn_in):
    """Time-averaged disagreement energy for each trial.

    ``Phi`` is ``I - beta L``; ``keys``/``init_keys`` are uint64 stream keys
    (see module docstring). Returns one float per trial.
    """
    Phi = np.ascontiguousarray(Phi, dtype=np.float64)
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    init_keys = np.ascontiguousarray(init_keys, dtype=np.uint64)
    args = (Phi, float(alpha), int(theta), keys, init_keys, float(init_scale),
            int(horizon), int(burn_in))
    if _accel.USE_NUMBA and _accel.HAVE_NUMBA:
        return _simulate_nb(*args)
    return _simulate_np(*args)


# ------------------------------------------------------------- Jury table
# Codes: 1 = Schur stable, 0 = unstable, -1 = marginal (degenerate entry).

@njit(cache=True)
def _jury_nb(a, tol):
    n = a.shape[0] - 1
    lead = a[n]
    scale = 0.0
    for k in range(n + 1):
        scale += abs(a[k])
    p1 = 0.0
    pm1 = 0.0
    sgn = 1.0
    for k in range(n + 1):
        p1 += a[k]
        pm1 += sgn * a[k]
        sgn = -sgn
    if n % 2 == 1:
        pm1 = -pm1
    if lead < 0:
        p1 = -p1
        pm1 = -pm1
        lead = -lead
    if abs(p1) <= tol * scale or abs(pm1) <= tol * scale:
        return -1
    if p1 < 0 or pm1 < 0:
        return 0
    d = (lead - abs(a[0])) / scale
    if abs(d) <= tol:
        return -1
    if d < 0:
        return 0
    row = a / scale
    m = n
    while m > 2:
        new = np.empty(m)
        for k in range(m):
            new[k] = row[0] * row[k] - row[m] * row[m - k]
        big = 0.0
        for k in range(m):
            if abs(new[k]) > big:
                big = abs(new[k])
        if big == 0.0:
            return -1
        for k in range(m):
            new[k] /= big
        d = abs(new[0]) - abs(new[m - 1])
        if abs(d) <= tol:
            return -1
        if d < 0:
            return 0
        row = new
        m -= 1
    return 1


def _jury_np(a, tol):
    a = np.asarray(a, dtype=np.float64)
    n = a.size - 1
    scale = np.abs(a).sum()
    lead = a[-1]
    p1 = a.sum()
    pm1 = np.polynomial.polynomial.polyval(-1.0, a) * (-1) ** n
    if lead < 0:
        p1, pm1, lead = -p1, -pm1, -lead
    if abs(p1) <= tol * scale or abs(pm1) <= tol * scale:
        return -1
    if p1 < 0 or pm1 < 0:
        return 0
    d = (lead - abs(a[0])) / scale
    if abs(d) <= tol:
        return -1
    if d < 0:
        return 0
    row = a / scale
    while row.size > 3:
        new = row[0] * row[:-1] - row[-1] * row[:0:-1]
        big = np.abs(new).max()
        if big == 0.0:
            return -1
        new = new / big
        d = abs(new[0]) - abs(new[-1])
        if abs(d) <= tol:
            return -1
        if d < 0:
            return 0
        row = new
    return 1


def jury_code(coefficients, tol):
    """Jury test on ascending coefficients: 1 stable, 0 unstable, -1 marginal.

    Each table row is rescaled to unit max-norm before the next one is formed;
    positive rescaling leaves every ``|first| > |last|`` test unchanged and
    keeps high-degree tables out of under/overflow.
    """
    a = np.ascontiguousarray(coefficients, dtype=np.float64)
    if _accel.USE_NUMBA and _accel.HAVE_NUMBA:
        return int(_jury_nb(a, float(tol)))
    return int(_jury_np(a, float(tol)))
