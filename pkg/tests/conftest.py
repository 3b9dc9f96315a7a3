"""Shared model factories for the test suite.

Random instances are always built from an explicit numpy Generator so every
property loop is reproducible from the seed written at its top.
"""

import numpy as np
import pytest

from markov_uq import (
    GeneratorMatrix,
    TransitionKernel,
    center_observable,
    invariant_measure,
)


def random_reversible_generator(rng: np.random.Generator, n: int) -> GeneratorMatrix:
    """Detailed-balance generator with respect to a random positive measure."""
    w = rng.uniform(0.2, 1.0, n)
    w /= w.sum()
    s = rng.uniform(0.1, 1.0, (n, n))
    s = 0.5 * (s + s.T)
    q = s / w[:, None]
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    return GeneratorMatrix(tuple(str(i) for i in range(n)), q)


def random_generator(rng: np.random.Generator, n: int) -> GeneratorMatrix:
    """Irreducible generator with no reversibility structure."""
    q = rng.uniform(0.05, 1.0, (n, n))
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    return GeneratorMatrix(tuple(str(i) for i in range(n)), q)


def random_kernel(rng: np.random.Generator, n: int) -> TransitionKernel:
    """Strictly positive stochastic matrix, hence irreducible and aperiodic."""
    p = rng.uniform(0.05, 1.0, (n, n))
    p /= p.sum(axis=1, keepdims=True)
    return TransitionKernel(tuple(str(i) for i in range(n)), p)


def two_state_chain(rate01: float = 1.0, rate10: float = 1.0) -> GeneratorMatrix:
    q = np.array([[-rate01, rate01], [rate10, -rate10]])
    return GeneratorMatrix(("0", "1"), q)


@pytest.fixture
def two_state():
    gen = two_state_chain()
    mu = invariant_measure(gen)
    f = center_observable([0.0, 1.0], mu)
    return gen, mu, f
