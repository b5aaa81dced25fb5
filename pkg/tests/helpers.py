"""Shared random-instance generators for the test suite."""
import numpy as np

from memconsensus.graph import generate_graph, spectrum

FAMILY_CHOICES = ("complete", "star", "chain", "ring_lattice", "barabasi_albert")


def random_graph(rng, n_max=25, family=None):
    family = family or FAMILY_CHOICES[rng.integers(len(FAMILY_CHOICES))]
    if family == "ring_lattice":
        n = int(rng.integers(5, n_max + 1))
        d = int(rng.integers(1, (n - 1) // 2 + 1))
        return generate_graph(family, n, d=d)
    if family == "barabasi_albert":
        n = int(rng.integers(4, n_max + 1))
        m = int(rng.integers(1, min(3, n - 1) + 1))
        return generate_graph(family, n, m=m, seed=int(rng.integers(2**31)))
    return generate_graph(family, int(rng.integers(3, n_max + 1)))


def random_spectrum(rng, n_max=25, family=None):
    return spectrum(random_graph(rng, n_max, family))


def synthetic_spectrum(rng, n_max=25):
    """Arbitrary positive eigenvalues (any weighted graph realises some of these)."""
    n = int(rng.integers(3, n_max + 1))
    lo = rng.uniform(0.05, 5.0)
    hi = lo * rng.uniform(1.0, 6.0)
    from memconsensus.graph import Spectrum
    return Spectrum.from_values(np.concatenate([[0.0], rng.uniform(lo, hi, n - 1)]))
