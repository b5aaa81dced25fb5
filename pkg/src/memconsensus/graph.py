"""Weighted undirected communication graphs and their Laplacian spectra."""
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParameterError

TOL_EIG = 1e-9
TOL_CONN = 1e-8

FAMILIES = ("complete", "star", "chain", "ring_lattice", "barabasi_albert")


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric nonnegative adjacency matrix with zero diagonal."""

    weights: np.ndarray
    name: str = ""

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ParameterError(f"adjacency must be square, got shape {w.shape}")
        if w.shape[0] < 2:
            raise ParameterError("a graph needs at least 2 vertices")
        if not np.all(np.isfinite(w)):
            raise ParameterError("adjacency has non-finite entries")
        if np.any(np.diag(w) != 0):
            raise ParameterError("adjacency diagonal must be zero")
        if np.any(w < 0):
            raise ParameterError("edge weights must be nonnegative")
        if not np.array_equal(w, w.T):
            raise ParameterError("adjacency must be symmetric")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return self.weights.shape[0]

    def edges(self):
        """Undirected edges as ``(i, j, w)`` with ``i < j`` (0-based)."""
        iu, ju = np.nonzero(np.triu(self.weights, k=1))
        return [(int(i), int(j), float(self.weights[i, j])) for i, j in zip(iu, ju)]

    def __eq__(self, other):
        return isinstance(other, WeightedGraph) and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending Laplacian eigenvalues ``0 = lam_1 <= lam_2 <= ... <= lam_n``."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = np.array(self.eigenvalues, dtype=np.float64, copy=True)
        if ev.ndim != 1 or ev.size < 2:
            raise ParameterError("a spectrum needs at least 2 eigenvalues")
        if np.any(np.diff(ev) < -TOL_EIG * max(1.0, abs(ev[-1]))):
            raise ParameterError("eigenvalues must be ascending")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    @classmethod
    def from_values(cls, values):
        """Build from any iterable of eigenvalues, sorting and clamping
        round-off zeros (a Laplacian is positive semidefinite)."""
        ev = np.sort(np.asarray(values, dtype=np.float64))
        ev[np.abs(ev) <= TOL_EIG * max(1.0, abs(ev[-1]))] = 0.0
        return cls(ev)

    @property
    def n(self):
        return self.eigenvalues.size

    @property
    def lambda2(self):
        return float(self.eigenvalues[1])

    @property
    def lambda_max(self):
        return float(self.eigenvalues[-1])

    @property
    def connected(self):
        return self.lambda2 > TOL_CONN

    def nonzero_modes(self, merge=True):
        """Distinct eigenvalues of modes 2..n with their multiplicities.

        Values within ``TOL_EIG * max(1, lam_n)`` of their predecessor are
        merged; the representative is the group mean.
        """
        lam = self.eigenvalues[1:]
        if not merge:
            return lam.copy(), np.ones(lam.size, dtype=np.int64)
        tol = TOL_EIG * max(1.0, self.lambda_max)
        groups = [[lam[0]]]
        for v in lam[1:]:
            if v - groups[-1][-1] <= tol:
                groups[-1].append(v)
            else:
                groups.append([v])
        vals = np.array([np.mean(g) for g in groups])
        mult = np.array([len(g) for g in groups], dtype=np.int64)
        return vals, mult

    def __eq__(self, other):
        return isinstance(other, Spectrum) and np.array_equal(self.eigenvalues, other.eigenvalues)

    def __hash__(self):
        return hash(self.eigenvalues.tobytes())


def _check_int(name, value, lo):
    if value is None or int(value) != value or value < lo:
        raise ParameterError(f"{name} must be an integer >= {lo}, got {value!r}")
    return int(value)


def complete_graph(n):
    n = _check_int("n", n, 2)
    return WeightedGraph(np.ones((n, n)) - np.eye(n), name=f"K{n}")


def star_graph(n):
    n = _check_int("n", n, 2)
    w = np.zeros((n, n))
    w[0, 1:] = w[1:, 0] = 1.0
    return WeightedGraph(w, name=f"S{n}")


def chain_graph(n):
    n = _check_int("n", n, 2)
    w = np.zeros((n, n))
    i = np.arange(n - 1)
    w[i, i + 1] = w[i + 1, i] = 1.0
    return WeightedGraph(w, name=f"P{n}")


def ring_lattice(n, d):
    """Vertices on a circle, each joined to its ``2d`` nearest neighbours."""
    n = _check_int("n", n, 3)
    d = _check_int("d", d, 1)
    if n < 2 * d + 1:
        raise ParameterError(f"ring_lattice needs n >= 2d+1, got n={n}, d={d}")
    w = np.zeros((n, n))
    i = np.arange(n)
    for j in range(1, d + 1):
        w[i, (i + j) % n] = 1.0
        w[(i + j) % n, i] = 1.0
    return WeightedGraph(w, name=f"C{d}_{n}")


def barabasi_albert(n, m, seed):
    """Preferential-attachment graph grown from an ``m``-vertex clique.

    Each arriving vertex attaches ``m`` distinct edges; targets are sampled
    with probability proportional to current degree, duplicates are redrawn.
    For ``m == 1`` the seed is a single vertex, so the first arrival attaches
    to it unconditionally.
    """
    n = _check_int("n", n, 2)
    m = _check_int("m", m, 1)
    if m >= n:
        raise ParameterError(f"barabasi_albert needs 1 <= m < n, got m={m}, n={n}")
    if seed is None:
        raise ParameterError("barabasi_albert requires an explicit seed")
    rng = np.random.default_rng(seed)
    w = np.zeros((n, n))
    w[:m, :m] = 1.0 - np.eye(m)
    # endpoint list: each vertex appears once per incident edge
    ends = [v for v in range(m) for _ in range(m - 1)]
    for v in range(m, n):
        targets = set()
        while len(targets) < m:
            if ends:
                u = ends[int(rng.integers(len(ends)))]
            else:
                u = int(rng.integers(v))
            targets.add(u)
        for u in sorted(targets):
            w[u, v] = w[v, u] = 1.0
            ends.extend((u, v))
    return WeightedGraph(w, name=f"BA{n}_m{m}_s{seed}")


def generate_graph(family, n, d=None, m=None, seed=None):
    """Build a graph from one of :data:`FAMILIES`.

    The deterministic families carry unit edge weights. ``ring_lattice``
    needs ``d``; ``barabasi_albert`` needs ``m`` and ``seed``.
    """
    n = _check_int("n", n, 3)
    if family == "complete":
        return complete_graph(n)
    if family == "star":
        return star_graph(n)
    if family == "chain":
        return chain_graph(n)
    if family == "ring_lattice":
        if d is None:
            raise ParameterError("ring_lattice requires d")
        return ring_lattice(n, d)
    if family == "barabasi_albert":
        if m is None:
            raise ParameterError("barabasi_albert requires m")
        return barabasi_albert(n, m, seed)
    raise ParameterError(f"unknown graph family {family!r}; expected one of {FAMILIES}")


def laplacian(g):
    """``L = D - A`` with ``D`` the weighted degree diagonal."""
    w = g.weights
    return np.diag(w.sum(axis=1)) - w


def spectrum(g):
    L = laplacian(g)
    try:
        ev = np.linalg.eigvalsh(L)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"eigensolver failed: {exc}") from exc
    return Spectrum.from_values(ev)


def is_connected(g):
    """Breadth-first search over strictly positive edges."""
    adj = g.weights > 0
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in np.flatnonzero(adj[v] & ~seen):
            seen[u] = True
            queue.append(int(u))
    return bool(seen.all())


def ring_lattice_eigenvalues(n, d):
    """Circulant formula ``2d - 2 sum_j cos(2 pi j k / n)``, sorted."""
    k = np.arange(n)[:, None]
    j = np.arange(1, d + 1)[None, :]
    return np.sort(2 * d - 2 * np.cos(2 * np.pi * j * k / n).sum(axis=1))


# ------------------------------------------------------------ edge lists

def parse_edge_list(text):
    """Parse the ``n m`` / ``i j w`` edge-list format (1-based, ``#`` comments)."""
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line.split())
    if not rows:
        raise ParameterError("edge list is empty")
    header = rows[0]
    if len(header) != 2:
        raise ParameterError("edge list header must be 'n m'")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError as exc:
        raise ParameterError(f"bad edge list header {header}") from exc
    body = rows[1:]
    if len(body) != m:
        raise ParameterError(f"header announces {m} edges, found {len(body)}")
    w = np.zeros((n, n))
    for k, row in enumerate(body, start=1):
        if len(row) != 3:
            raise ParameterError(f"edge {k}: expected 'i j w', got {row}")
        try:
            i, j, wt = int(row[0]), int(row[1]), float(row[2])
        except ValueError as exc:
            raise ParameterError(f"edge {k}: cannot parse {row}") from exc
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise ParameterError(f"edge {k}: invalid endpoints {i}, {j}")
        if not wt > 0 or not np.isfinite(wt):
            raise ParameterError(f"edge {k}: weight must be positive, got {wt}")
        if w[i - 1, j - 1] != 0:
            raise ParameterError(f"edge {k}: duplicate edge {i}-{j}")
        w[i - 1, j - 1] = w[j - 1, i - 1] = wt
    return WeightedGraph(w)


def load_edge_list(path):
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def format_edge_list(g):
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"]
    lines += [f"{i + 1} {j + 1} {w!r}" for i, j, w in edges]
    return "\n".join(lines) + "\n"
