"""Shared helpers for randomized instances."""

import numpy as np
import pytest

from shiftlab import WeightSet, enumerate_basis


def random_weight_set(rng, m, N, k=1, spread=0.7, label="random"):
    """Random positive monomial norms, constant across components of an alpha."""
    basis = enumerate_basis(m, N, k)
    by_alpha = {}
    logs = np.empty(basis.dimension)
    for j in range(basis.dimension):
        alpha = tuple(int(a) for a in basis.exponents[j])
        if alpha not in by_alpha:
            by_alpha[alpha] = 0.0 if sum(alpha) == 0 else rng.uniform(-spread, spread)
        logs[j] = by_alpha[alpha]
    return WeightSet(basis, logs, label)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
