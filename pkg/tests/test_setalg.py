"""Operator sets, word constructions, and their structural identities."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from specbound.setalg import (
    CONSTRUCTION_KINDS,
    OperatorSet,
    Permutation,
    Word,
    adjoint_set,
    alternating_word,
    build_construction,
    corollary_315_permutations,
    evaluate_word,
    even_star_base,
    index_shift,
    odd_star_base,
    pair_blocks,
    phi_words,
    rotate_word,
    set_hadamard_mean,
    set_power,
    set_product,
    tau_nu_base,
    word_adjoint,
)


A_ROWS = [[1.0, 2.0], [0.0, 1.0]]
B1_ROWS = [[0.0, 1.0], [1.0, 0.0]]
B2_ROWS = [[1.0, 0.0], [0.0, 2.0]]


@pytest.fixture
def sets():
    a = OperatorSet([A_ROWS], name="A")
    b = OperatorSet([B1_ROWS, B2_ROWS], name="B")
    return a, b


# -- frozen word expansions ----------------------------------------------
# These letter tuples were derived by hand from the alternating-adjoint
# construction rules and frozen before the implementation existed.

def test_even_star_base_expansions():
    assert even_star_base(2).letters == (
        (1, False), (2, True), (1, False), (2, True))
    assert even_star_base(3).letters == (
        (1, False), (2, True), (3, False), (1, True), (2, False), (3, True))
    assert even_star_base(4).letters == (
        (1, False), (2, True), (3, False), (4, True),
        (1, False), (2, True), (3, False), (4, True))


def test_odd_star_base_expansions():
    assert odd_star_base(2).letters == (
        (1, True), (2, False), (1, True), (2, False))
    assert odd_star_base(3).letters == (
        (1, True), (2, False), (3, True), (1, False), (2, True), (3, False))


def test_alternating_word():
    assert alternating_word(3, True).letters == ((1, True), (2, False), (3, True))
    assert alternating_word(3, False).letters == ((1, False), (2, True), (3, False))


def test_star_parity_alternates_through_length():
    for m in (2, 3, 4, 5, 6, 7, 8):
        for word in (even_star_base(m), odd_star_base(m)):
            assert len(word.letters) == 2 * m
            stars = [s for _, s in word.letters]
            assert all(stars[i] != stars[i + 1] for i in range(len(stars) - 1))
            indices = [i for i, _ in word.letters]
            assert indices == [(i % m) + 1 for i in range(2 * m)]


# -- word operations ------------------------------------------------------

def test_rotate_word_cycles():
    w = even_star_base(3)
    assert rotate_word(w, 1).letters == w.letters[1:] + w.letters[:1]
    assert rotate_word(w, len(w.letters)).letters == w.letters
    assert rotate_word(rotate_word(w, 2), -2).letters == w.letters


def test_word_adjoint_reverses_and_flips():
    w = even_star_base(3)
    adj = word_adjoint(w)
    assert adj.letters == tuple((i, not s) for i, s in reversed(w.letters))
    assert word_adjoint(adj).letters == w.letters


def test_index_shift_rotates_set_indices():
    w = even_star_base(3)
    shifted = index_shift(w, 1, 3)
    assert shifted.letters == tuple((i % 3 + 1, s) for i, s in w.letters)
    back = index_shift(shifted, 2, 3)
    assert back.letters == w.letters


def test_pair_blocks_partition():
    w = even_star_base(3)
    blocks = pair_blocks(w)
    assert [b.letters for b in blocks] == [
        ((1, False), (2, True)), ((3, False), (1, True)), ((2, False), (3, True))]
    flat = tuple(letter for b in blocks for letter in b.letters)
    assert flat == w.letters


def test_tau_nu_base_uses_both_permutations():
    tau = Permutation((2, 1, 4, 3))
    nu = Permutation((1, 2, 4, 3))
    word = tau_nu_base(4, tau, nu)
    assert word.letters == (
        (2, True), (1, False), (1, True), (2, False),
        (4, True), (4, False), (3, True), (3, False))


def test_corollary_315_permutations_frozen():
    tau3, nu3 = corollary_315_permutations(3)
    assert tau3.images == (1, 3, 2)
    assert nu3.images == (2, 1, 3)
    tau5, nu5 = corollary_315_permutations(5)
    assert tau5.images == (1, 3, 5, 2, 4)
    assert nu5.images == (2, 4, 1, 3, 5)


def test_phi_words_cycle_all_starts():
    words = phi_words(2)
    assert [w.letters for w in words] == [
        ((1, False), (2, False)), ((2, False), (1, False))]
    for m in (3, 4):
        words = phi_words(m)
        assert len(words) == m
        for k, w in enumerate(words):
            assert [i for i, _ in w.letters] == [(k + j) % m + 1 for j in range(m)]
            assert not any(s for _, s in w.letters)


# -- permutations ---------------------------------------------------------

def test_permutation_validation():
    assert Permutation.identity(4).images == (1, 2, 3, 4)
    with pytest.raises(ValueError):
        Permutation((1, 1, 3))
    with pytest.raises(ValueError):
        Permutation((0, 1, 2))


# -- set algebra ----------------------------------------------------------

def test_evaluate_word_matches_manual_product(sets):
    a, b = sets
    word = even_star_base(2)
    out = evaluate_word(word, [a, b])
    assert len(out.mats) == 4
    mat_a = np.array(A_ROWS)
    manual = mat_a @ np.array(B1_ROWS).T @ mat_a @ np.array(B1_ROWS).T
    assert any(np.allclose(m, manual) for m in out.mats)


def test_adjoint_set_transposes(sets):
    a, _ = sets
    got = adjoint_set(a).mats[0]
    assert np.array_equal(got, np.array(A_ROWS).T)


def test_adjoint_set_is_involution(sets):
    _, b = sets
    twice = adjoint_set(adjoint_set(b))
    assert all(np.array_equal(x, y) for x, y in zip(twice.mats, b.mats))


def test_set_product_all_pairs(sets):
    a, b = sets
    prod = set_product(a, b)
    assert len(prod.mats) == 2
    want = {tuple((np.array(A_ROWS) @ np.array(r)).ravel()) for r in (B1_ROWS, B2_ROWS)}
    got = {tuple(np.asarray(m).ravel()) for m in prod.mats}
    assert got == want


def test_set_power_counts(sets):
    # counts follow full enumeration up to removal of exact duplicates
    _, b = sets
    arrays = [np.array(B1_ROWS), np.array(B2_ROWS)]
    for power in (1, 2, 3):
        prods = set()
        for combo in itertools.product(arrays, repeat=power):
            mat = combo[0]
            for factor in combo[1:]:
                mat = mat @ factor
            prods.add(tuple(mat.ravel()))
        assert len(set_power(b, power).mats) == len(prods)


def test_set_hadamard_mean_matches_entrywise(sets):
    a, b = sets
    mean = set_hadamard_mean([a, b], [0.5, 0.5])
    assert len(mean.mats) == 2
    first = np.array(A_ROWS) ** 0.5 * np.array(B1_ROWS) ** 0.5
    assert any(np.allclose(m, first) for m in mean.mats)


def test_operator_set_json_round_trip(sets):
    _, b = sets
    again = OperatorSet.from_json(b.to_json())
    assert again.name == b.name
    assert all(np.array_equal(x, y) for x, y in zip(again.mats, b.mats))


def test_operator_set_rejects_mixed_dims():
    with pytest.raises(Exception):
        OperatorSet([[[1.0]], [[1.0, 0.0], [0.0, 1.0]]])


# -- constructions --------------------------------------------------------

def test_construction_kinds_enumerated():
    assert set(CONSTRUCTION_KINDS) == {
        "cyclic_sigma", "phi_cyclic", "omega_odd", "sigma_even",
        "omega_even", "theta_half", "omega_tau_nu", "corollary_315_perms"}


def test_build_construction_validates_parity(sets):
    a, b = sets
    with pytest.raises(ValueError):
        build_construction("omega_odd", [a, b], weights=[0.5, 0.5])
    with pytest.raises(ValueError):
        build_construction("no_such_kind", [a, b])


def test_build_construction_cyclic_sigma(sets):
    a, b = sets
    out = build_construction("cyclic_sigma", [a, b], weights=[0.5, 0.5])
    assert len(out) == 2
    assert all(isinstance(s, OperatorSet) for s in out)
    # first combination is the weighted mean of the sets in cyclic order
    mean = set_hadamard_mean([a, b], [0.5, 0.5])
    assert {tuple(np.asarray(m).ravel()) for m in out[0].mats} == {
        tuple(np.asarray(m).ravel()) for m in mean.mats}
