"""Matrix container, arithmetic, and certified scalar brackets."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specbound import (
    Bracket,
    MatrixValidationError,
    asmatrix,
    hadamard_power,
    hadamard_product,
    mat_product,
    pointwise_leq,
    spectral_norm_bracket,
    spectral_radius_bracket,
    weighted_hadamard_mean,
)
from specbound.numat import matrix_from_json, matrix_to_json

from conftest import oracle_norm, oracle_rho, random_matrix


# -- frozen oracle values -------------------------------------------------

# Expected values computed independently (characteristic polynomial /
# Gram eigenvalues) before the engine existed; frozen here.
FROZEN_RHO = [
    ([[1.0, 1.0], [1.0, 1.0]], 2.0),
    ([[1.0, 0.0], [0.0, 1.0]], 1.0),
    ([[0.0, 1.0], [0.0, 0.0]], 0.0),
    ([[0.0, 0.0], [1.0, 1.0]], 1.0),
    ([[2.0, 1.0], [1.0, 2.0]], 3.0),
]
FROZEN_NORM = [
    ([[1.0, 0.0], [0.0, 1.0]], 1.0),
    ([[0.0, 0.0], [1.0, 1.0]], math.sqrt(2.0)),
    ([[3.0, 0.0], [0.0, 1.0]], 3.0),
    ([[1.0, 1.0], [1.0, 1.0]], 2.0),
]


@pytest.mark.parametrize("rows, expected", FROZEN_RHO)
def test_radius_bracket_frozen(rows, expected):
    assert abs(oracle_rho(rows) - expected) < 1e-12
    b = spectral_radius_bracket(asmatrix(rows))
    assert b.lo <= expected <= b.hi
    assert b.width <= 1e-9 * max(1.0, expected) + 1e-12


@pytest.mark.parametrize("rows, expected", FROZEN_NORM)
def test_norm_bracket_frozen(rows, expected):
    assert abs(oracle_norm(rows) - expected) < 1e-12
    b = spectral_norm_bracket(asmatrix(rows))
    assert b.lo <= expected <= b.hi
    assert b.width <= 1e-9 * max(1.0, expected) + 1e-12


# -- validation -----------------------------------------------------------

def test_rejects_negative_entries():
    with pytest.raises(MatrixValidationError):
        asmatrix([[1.0, -0.5], [0.0, 1.0]])


def test_rejects_non_square():
    with pytest.raises(MatrixValidationError):
        asmatrix([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])


def test_rejects_non_finite():
    with pytest.raises(MatrixValidationError):
        asmatrix([[1.0, float("nan")], [0.0, 1.0]])
    with pytest.raises(MatrixValidationError):
        asmatrix([[1.0, float("inf")], [0.0, 1.0]])


def test_matrix_is_immutable():
    m = asmatrix([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(ValueError):
        m.data[0, 0] = 99.0


def test_json_round_trip():
    m = asmatrix([[0.25, 1.5], [0.0, 3.0]])
    again = matrix_from_json(matrix_to_json(m))
    assert np.array_equal(m.data, again.data)


# -- arithmetic -----------------------------------------------------------

def test_hadamard_product_entrywise():
    a = asmatrix([[1.0, 2.0], [3.0, 4.0]])
    b = asmatrix([[5.0, 6.0], [7.0, 8.0]])
    assert np.array_equal(hadamard_product(a, b).data, [[5.0, 12.0], [21.0, 32.0]])


def test_hadamard_power_entrywise():
    a = asmatrix([[4.0, 9.0], [0.0, 1.0]])
    assert np.allclose(hadamard_power(a, 0.5).data, [[2.0, 3.0], [0.0, 1.0]])


def test_mat_product_is_matrix_multiplication():
    a = asmatrix([[1.0, 2.0], [3.0, 4.0]])
    b = asmatrix([[0.0, 1.0], [1.0, 0.0]])
    assert np.array_equal(mat_product(a, b).data, np.asarray(a.data) @ np.asarray(b.data))


def test_weighted_mean_matches_direct_formula():
    a = asmatrix([[1.0, 4.0], [2.0, 3.0]])
    b = asmatrix([[2.0, 1.0], [5.0, 4.0]])
    got = weighted_hadamard_mean([a, b], [0.3, 0.7]).data
    want = np.asarray(a.data) ** 0.3 * np.asarray(b.data) ** 0.7
    assert np.allclose(got, want)


def test_pointwise_leq():
    a = asmatrix([[1.0, 2.0], [3.0, 4.0]])
    b = asmatrix([[1.0, 2.5], [3.0, 4.0]])
    assert pointwise_leq(a, b)
    assert not pointwise_leq(b, a)
    assert pointwise_leq(b, a, slack=1.0)


# -- bracket type ---------------------------------------------------------

def test_bracket_operations():
    b = Bracket(1.0, 2.0)
    assert b.contains(1.0) and b.contains(2.0) and not b.contains(2.1)
    assert b.overlaps(Bracket(1.9, 3.0))
    assert not b.overlaps(Bracket(2.5, 3.0))
    sq = b.power(2.0)
    assert sq.lo <= 1.0 and sq.hi >= 4.0
    prod = b.times(Bracket(3.0, 4.0))
    assert prod.lo <= 3.0 and prod.hi >= 8.0


def test_bracket_rejects_inverted():
    with pytest.raises(ValueError):
        Bracket(2.0, 1.0)


# -- property tests against the independent oracle ------------------------

matrix_strategy = st.integers(min_value=2, max_value=4).flatmap(
    lambda d: st.lists(
        st.lists(st.floats(min_value=0.0, max_value=8.0), min_size=d, max_size=d),
        min_size=d,
        max_size=d,
    )
)


@settings(max_examples=60, deadline=None)
@given(matrix_strategy)
def test_radius_bracket_contains_oracle(rows):
    m = asmatrix(rows)
    b = spectral_radius_bracket(m)
    val = oracle_rho(m)
    assert b.lo <= val + 1e-9 * max(1.0, val)
    assert b.hi >= val - 1e-9 * max(1.0, val)


@settings(max_examples=60, deadline=None)
@given(matrix_strategy)
def test_norm_bracket_contains_oracle(rows):
    m = asmatrix(rows)
    b = spectral_norm_bracket(m)
    val = oracle_norm(m)
    assert b.lo <= val + 1e-9 * max(1.0, val)
    assert b.hi >= val - 1e-9 * max(1.0, val)


def test_radius_monotone_in_entries(rng):
    for _ in range(50):
        dim = int(rng.integers(2, 5))
        small = random_matrix(rng, dim)
        big = small + rng.uniform(0.0, 1.0, size=(dim, dim))
        lo = spectral_radius_bracket(asmatrix(small))
        hi = spectral_radius_bracket(asmatrix(big))
        assert lo.lo <= hi.hi + 1e-12


def test_mean_radius_below_weighted_radii(rng):
    # radius of the entrywise weighted mean is at most the weighted
    # product of the radii when the weights sum to at least one
    for _ in range(50):
        dim = int(rng.integers(2, 4))
        a = random_matrix(rng, dim, sparsity=0.0) + 0.05
        b = random_matrix(rng, dim, sparsity=0.0) + 0.05
        alpha = float(rng.uniform(0.2, 0.8))
        mean = weighted_hadamard_mean([asmatrix(a), asmatrix(b)], [alpha, 1.0 - alpha])
        lhs = oracle_rho(mean)
        rhs = oracle_rho(a) ** alpha * oracle_rho(b) ** (1.0 - alpha)
        assert lhs <= rhs * (1.0 + 1e-12)
