"""Certified joint/generalized spectral radius brackets for matrix sets."""

from __future__ import annotations

import numpy as np
import pytest

from specbound.radius import (
    JsrConfig,
    bracket_report,
    brute_force_oracle,
    gsr_lower,
    jsr_bracket,
    jsr_detail,
    set_norm,
)
from specbound.setalg import OperatorSet, adjoint_set, set_power, set_product

from conftest import oracle_gsr_lower, oracle_norm_upper, oracle_rho, random_matrix


ONES = OperatorSet([[[1.0, 1.0], [1.0, 1.0]]], name="ones")
UNIT_PAIR = OperatorSet(
    [[[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]], name="units")


def random_set(rng, dim, size, sparsity=0.3):
    return OperatorSet([random_matrix(rng, dim, sparsity) for _ in range(size)])


def loose_overlaps(a, b, rel=1e-9):
    # the oracle is plain float arithmetic, so allow its endpoints that
    # much relative play when comparing against certified brackets
    return a.lo <= b.hi * (1.0 + rel) and b.lo <= a.hi * (1.0 + rel)


# -- oracle self-checks (enumeration first, engine second) ----------------

def test_oracle_frozen_values():
    assert brute_force_oracle(ONES).contains(2.0)
    assert brute_force_oracle(UNIT_PAIR).contains(1.0)
    assert abs(oracle_gsr_lower(ONES.mats, 2) - 2.0) < 1e-12
    assert abs(oracle_gsr_lower(UNIT_PAIR.mats, 2) - 1.0) < 1e-12


def test_oracle_is_a_true_bracket(rng):
    # lower comes from radius roots, upper from norm roots; the lower can
    # never exceed the upper and enumeration depth only tightens the lower
    for _ in range(10):
        sigma = random_set(rng, int(rng.integers(2, 4)), 2)
        b = brute_force_oracle(sigma, depth=4)
        assert b.lo <= b.hi * (1.0 + 1e-12)
        assert b.lo >= oracle_gsr_lower(sigma.mats, 3) * (1.0 - 1e-9)
        assert b.hi <= oracle_norm_upper(sigma.mats, 4) * (1.0 + 1e-9)


# -- frozen engine values -------------------------------------------------

def test_singleton_ones_is_exact():
    b = jsr_bracket(ONES, JsrConfig(max_depth=4))
    assert b.contains(2.0)
    assert b.width <= 1e-6


def test_unit_pair_brackets_one():
    b = jsr_bracket(UNIT_PAIR, JsrConfig(max_depth=2))
    assert b.contains(1.0)
    assert b.width <= 1e-6


def test_gsr_lower_ones_depth_one():
    assert gsr_lower(ONES, 1) == pytest.approx(2.0, abs=1e-9)


def test_set_norm_frozen():
    assert set_norm(ONES).contains(2.0)
    t0 = OperatorSet([[[0.0, 0.0], [1.0, 1.0]]], name="T0")
    assert set_norm(t0).contains(np.sqrt(2.0))


def test_detail_report_shape():
    d = jsr_detail(UNIT_PAIR)
    assert d.depth_used >= 1
    assert d.partial is False
    rep = bracket_report(d)
    assert set(rep) == {"lo", "hi", "partial", "depth_used"}
    assert rep["lo"] <= rep["hi"]


# -- engine vs oracle on random sets --------------------------------------

def test_bracket_contains_oracle_value(rng):
    cfg = JsrConfig(max_depth=6)
    for _ in range(25):
        sigma = random_set(rng, int(rng.integers(2, 5)), int(rng.integers(1, 4)))
        engine = jsr_bracket(sigma, cfg)
        oracle = brute_force_oracle(sigma, depth=5)
        # both brackets contain the common value, so they must overlap
        assert loose_overlaps(engine, oracle)


def test_gsr_lower_nondecreasing_in_depth(rng):
    for _ in range(10):
        sigma = random_set(rng, 2, 2)
        values = [gsr_lower(sigma, depth) for depth in (1, 2, 3, 4)]
        for shallow, deep in zip(values, values[1:]):
            assert deep >= shallow * (1.0 - 1e-12)
        assert values[-1] <= jsr_bracket(sigma).hi * (1.0 + 1e-9)


def test_power_identity(rng):
    # the radius of the m-fold product set is the m-th power of the radius
    for _ in range(8):
        sigma = random_set(rng, 2, 2)
        base = jsr_bracket(sigma, JsrConfig(max_depth=8))
        squared = jsr_bracket(set_power(sigma, 2), JsrConfig(max_depth=4))
        assert squared.overlaps(base.power(2.0))


def test_commutation_identity(rng):
    # radius of AB products equals the radius of BA products
    for _ in range(8):
        a = random_set(rng, 2, 2)
        b = random_set(rng, 2, 2)
        ab = jsr_bracket(set_product(a, b), JsrConfig(max_depth=6))
        ba = jsr_bracket(set_product(b, a), JsrConfig(max_depth=6))
        assert ab.overlaps(ba)


def test_adjoint_identity(rng):
    for _ in range(8):
        sigma = random_set(rng, 3, 2)
        direct = jsr_bracket(sigma, JsrConfig(max_depth=6))
        adjoint = jsr_bracket(adjoint_set(sigma), JsrConfig(max_depth=6))
        assert direct.overlaps(adjoint)


def test_norm_is_root_of_gram_radius(rng):
    for _ in range(8):
        sigma = random_set(rng, 2, 2)
        norm = set_norm(sigma)
        gram = jsr_bracket(
            set_product(adjoint_set(sigma), sigma),
            JsrConfig(max_depth=8, target_width=1e-10))
        assert norm.overlaps(gram.power(0.5))


def test_block_triangular_radius_is_blockwise_max(rng):
    # reducible sets: the radius of a block-triangular set equals the max
    # over the diagonal-block sets, which the engine resolves exactly
    for _ in range(6):
        top = [random_matrix(rng, 2) for _ in range(2)]
        bottom = [random_matrix(rng, 2) for _ in range(2)]
        coupling = [rng.uniform(0.0, 1.0, size=(2, 2)) for _ in range(2)]
        stacked = []
        for t, c, b in zip(top, coupling, bottom):
            mat = np.zeros((4, 4))
            mat[:2, :2], mat[:2, 2:], mat[2:, 2:] = t, c, b
            stacked.append(mat)
        whole = jsr_bracket(OperatorSet(stacked), JsrConfig(max_depth=6))
        top_b = jsr_bracket(OperatorSet(top), JsrConfig(max_depth=6))
        bot_b = jsr_bracket(OperatorSet(bottom), JsrConfig(max_depth=6))
        blockwise = max(top_b.lo, bot_b.lo), max(top_b.hi, bot_b.hi)
        assert whole.lo <= blockwise[1] * (1.0 + 1e-9)
        assert whole.hi >= blockwise[0] * (1.0 - 1e-9)


def test_zero_set():
    zero = OperatorSet([[[0.0, 0.0], [0.0, 0.0]]])
    b = jsr_bracket(zero)
    assert b.lo == 0.0
    assert b.hi <= 1e-12


def test_budget_marks_partial():
    rng = np.random.default_rng(3)
    sigma = OperatorSet([random_matrix(rng, 4, 0.0) for _ in range(3)])
    d = jsr_detail(sigma, JsrConfig(max_depth=12, budget_products=50, refine=False))
    assert d.partial or d.bracket.width <= 1e-3
