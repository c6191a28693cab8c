"""Shared test fixtures and independent numeric oracles.

The oracles here deliberately avoid the package's own bracket machinery:
spectral radii come from the roots of the characteristic polynomial and
spectral norms from the eigenvalues of the Gram matrix, both via plain
numpy eigensolvers.  Engine results are then checked by containment
against these independently computed values.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest


def oracle_rho(a) -> float:
    """Spectral radius via characteristic-polynomial roots."""
    arr = np.asarray(getattr(a, "data", a), dtype=float)
    coeffs = np.poly(arr)
    roots = np.roots(coeffs)
    return float(np.max(np.abs(roots))) if roots.size else 0.0


def oracle_norm(a) -> float:
    """Spectral norm via the Gram matrix's largest eigenvalue."""
    arr = np.asarray(getattr(a, "data", a), dtype=float)
    gram = arr.T @ arr
    eigs = np.linalg.eigvalsh(gram)
    return float(np.sqrt(max(eigs.max(), 0.0)))


def oracle_gsr_lower(mats, depth: int) -> float:
    """Best radius root over all words up to ``depth``, by full enumeration."""
    best = 0.0
    arrays = [np.asarray(getattr(m, "data", m), dtype=float) for m in mats]
    for length in range(1, depth + 1):
        for combo in itertools.product(arrays, repeat=length):
            prod = combo[0]
            for factor in combo[1:]:
                prod = prod @ factor
            best = max(best, oracle_rho(prod) ** (1.0 / length))
    return best


def oracle_norm_upper(mats, depth: int) -> float:
    """Best norm-root upper bound over all words of length ``depth``."""
    arrays = [np.asarray(getattr(m, "data", m), dtype=float) for m in mats]
    worst = 0.0
    for combo in itertools.product(arrays, repeat=depth):
        prod = combo[0]
        for factor in combo[1:]:
            prod = prod @ factor
        worst = max(worst, oracle_norm(prod))
    return worst ** (1.0 / depth)


def random_matrix(rng: np.random.Generator, dim: int, sparsity: float = 0.3):
    vals = rng.uniform(0.0, 2.0, size=(dim, dim))
    mask = rng.random((dim, dim)) >= sparsity
    return vals * mask


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260823)
