"""Finite sets of nonnegative matrices, formal words and set constructions.

An ``OperatorSet`` is a nonempty finite collection of same-dimension
nonnegative matrices stored as a stacked ``(N, d, d)`` array.  Members are
deduplicated by exact entry equality and kept in a canonical (lexicographic
by flattened entries) order, so two sets with the same members compare equal
and downstream computations are deterministic.  Deduplication never changes
any radius/norm quantity: it only removes exact duplicates.

A ``Word`` is a formal product of set symbols: a sequence of letters
``(set_index, adjoint)`` with 1-based indices.  Words evaluate against a
list of concrete sets to the corresponding set product.  The construction
helpers build the standard derived families used by the inequality catalog:
cyclic Hadamard means, cyclic full products, and several families of cyclic
rotations of alternating-adjoint base words, indexed by one or two
permutations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .numat import (
    MatrixValidationError,
    NonNegMatrix,
    _arr,
    matrix_from_json,
    matrix_to_json,
)

__all__ = [
    "OperatorSet",
    "Permutation",
    "Word",
    "set_product",
    "set_power",
    "adjoint_set",
    "set_hadamard_mean",
    "evaluate_word",
    "rotate_word",
    "word_adjoint",
    "even_star_base",
    "odd_star_base",
    "alternating_word",
    "index_shift",
    "pair_blocks",
    "tau_nu_base",
    "sigma_even_words",
    "phi_words",
    "corollary_315_permutations",
    "build_construction",
    "CONSTRUCTION_KINDS",
]


def _dedup_stack(stack: np.ndarray) -> np.ndarray:
    """Canonical exact deduplication of a (N, d, d) stack."""
    n, d, _ = stack.shape
    flat = np.ascontiguousarray(stack.reshape(n, d * d))
    uniq = np.unique(flat, axis=0)
    return uniq.reshape(-1, d, d)


class OperatorSet:
    """Nonempty finite set of same-dimension nonnegative matrices.

    ``name`` is a display label only; equality and hashing use the members.
    """

    __slots__ = ("mats", "name")

    def __init__(self, members: Iterable, name: str = ""):
        arrs = [_arr(m) for m in members]
        if not arrs:
            raise ValueError("an operator set must have at least one member")
        dim = arrs[0].shape[0]
        if any(a.shape[0] != dim for a in arrs):
            raise MatrixValidationError("all members must share one dimension")
        stack = _dedup_stack(np.stack(arrs))
        stack.setflags(write=False)
        object.__setattr__(self, "mats", stack)
        object.__setattr__(self, "name", str(name))

    def __setattr__(self, name, value):
        raise AttributeError("OperatorSet is immutable")

    @classmethod
    def _from_stack(cls, stack: np.ndarray, name: str = "") -> "OperatorSet":
        obj = object.__new__(cls)
        canon = _dedup_stack(np.asarray(stack, dtype=float))
        canon.setflags(write=False)
        object.__setattr__(obj, "mats", canon)
        object.__setattr__(obj, "name", name)
        return obj

    @property
    def dim(self) -> int:
        return self.mats.shape[1]

    def __len__(self) -> int:
        return self.mats.shape[0]

    def __iter__(self):
        for a in self.mats:
            yield NonNegMatrix(a)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorSet):
            return NotImplemented
        return self.mats.shape == other.mats.shape and bool(np.all(self.mats == other.mats))

    def __hash__(self) -> int:
        return hash((self.mats.shape, self.mats.tobytes()))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"OperatorSet(<{len(self)} members, dim {self.dim}{label}>)"

    def max_entry(self) -> float:
        return float(self.mats.max())

    def to_json(self) -> dict:
        return {"name": self.name, "matrices": [matrix_to_json(a) for a in self.mats]}

    @classmethod
    def from_json(cls, obj) -> "OperatorSet":
        """Parse either a raw matrix list or a {"name", "matrices"} object."""
        name = ""
        if isinstance(obj, dict):
            unknown = set(obj) - {"name", "matrices"}
            if unknown:
                raise MatrixValidationError(f"unknown set field {sorted(unknown)[0]!r}")
            name = obj.get("name", "")
            if not isinstance(name, str):
                raise MatrixValidationError("set field 'name' must be a string")
            obj = obj.get("matrices")
        if not isinstance(obj, list) or not obj:
            raise MatrixValidationError("set field 'matrices' must be a nonempty list")
        return cls([matrix_from_json(o) for o in obj], name=name)


def set_product(a: OperatorSet, b: OperatorSet) -> OperatorSet:
    """All products xy with x in a, y in b, deduplicated."""
    if a.dim != b.dim:
        raise MatrixValidationError(f"dimension mismatch: {a.dim} vs {b.dim}")
    prod = np.einsum("aij,bjk->abik", a.mats, b.mats)
    return OperatorSet._from_stack(prod.reshape(-1, a.dim, a.dim))


def set_power(a: OperatorSet, m: int) -> OperatorSet:
    """The set of all length-m products of members of ``a``."""
    if m < 1:
        raise ValueError("set power requires m >= 1")
    out = a
    for _ in range(m - 1):
        out = set_product(out, a)
    return out


def adjoint_set(a: OperatorSet) -> OperatorSet:
    """Member-wise transpose."""
    return OperatorSet._from_stack(np.swapaxes(a.mats, 1, 2))


def set_hadamard_mean(sets: Sequence[OperatorSet], alphas: Sequence[float]) -> OperatorSet:
    """Weighted Hadamard geometric mean of sets: all member combinations.

    Materializes every combination (one member from each set), so the result
    can have up to ``prod(len(s))`` members; callers enumerating large
    products should guard sizes.
    """
    if len(sets) == 0:
        raise ValueError("need at least one set")
    if len(sets) != len(alphas):
        raise ValueError(f"{len(sets)} sets but {len(alphas)} weights")
    dim = sets[0].dim
    if any(s.dim != dim for s in sets):
        raise MatrixValidationError("all sets must share one dimension")
    if any(not (float(w) > 0) for w in alphas):
        raise ValueError("all weights must be > 0")
    out = np.power(sets[0].mats, float(alphas[0]))
    for s, w in zip(sets[1:], alphas[1:]):
        powed = np.power(s.mats, float(w))
        out = (out[:, None, :, :] * powed[None, :, :, :]).reshape(-1, dim, dim)
    return OperatorSet._from_stack(out)


# ---------------------------------------------------------------------------
# Permutations and words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1, ..., m} stored as a tuple of 1-based images."""

    images: tuple[int, ...]

    def __post_init__(self):
        m = len(self.images)
        if m < 1 or sorted(self.images) != list(range(1, m + 1)):
            raise ValueError(f"not a permutation of 1..{m}: {self.images}")

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(tuple(range(1, m + 1)))

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        if not 1 <= i <= len(self.images):
            raise IndexError(f"index {i} out of range 1..{len(self.images)}")
        return self.images[i - 1]


@dataclass(frozen=True)
class Word:
    """Formal product of set symbols; letters are (set_index, adjoint)."""

    letters: tuple[tuple[int, bool], ...]

    def __post_init__(self):
        for idx, star in self.letters:
            if idx < 1:
                raise ValueError(f"word letters use 1-based set indices, got {idx}")
            if not isinstance(star, bool):
                raise ValueError("adjoint flag must be a bool")

    def __len__(self) -> int:
        return len(self.letters)

    def rotate(self, k: int) -> "Word":
        return rotate_word(self, k)

    def adjoint(self) -> "Word":
        return word_adjoint(self)


def rotate_word(word: Word, k: int) -> Word:
    """Cyclic left rotation by k letters."""
    n = len(word.letters)
    if n == 0:
        return word
    k = k % n
    return Word(word.letters[k:] + word.letters[:k])


def word_adjoint(word: Word) -> Word:
    """Adjoint of a product: reverse letter order and flip every star."""
    return Word(tuple((idx, not star) for idx, star in reversed(word.letters)))


def evaluate_word(word: Word, sets: Sequence[OperatorSet]) -> OperatorSet:
    """Evaluate a formal word against concrete sets (1-based indices)."""
    if len(word.letters) == 0:
        raise ValueError("cannot evaluate empty word")
    factors = []
    for idx, star in word.letters:
        if idx > len(sets):
            raise IndexError(f"word refers to set {idx}, only {len(sets)} given")
        s = sets[idx - 1]
        factors.append(adjoint_set(s) if star else s)
    out = factors[0]
    for f in factors[1:]:
        out = set_product(out, f)
    return out


# ---------------------------------------------------------------------------
# Base words of the catalog's inequality families
# ---------------------------------------------------------------------------


def even_star_base(m: int) -> Word:
    """2m-letter cyclic base with adjoints on even positions.

    Letter p (1-based) refers to set ((p-1) mod m)+1; stars sit on even p.
    With m = 3 this reads: 1 2* 3 1* 2 3*.
    """
    return Word(tuple((((p - 1) % m) + 1, p % 2 == 0) for p in range(1, 2 * m + 1)))


def odd_star_base(m: int) -> Word:
    """2m-letter cyclic base with adjoints on odd positions.

    With m = 3 this reads: 1* 2 3* 1 2* 3.  For odd m it equals the
    m-letter rotation of ``even_star_base(m)``.
    """
    return Word(tuple((((p - 1) % m) + 1, p % 2 == 1) for p in range(1, 2 * m + 1)))


def alternating_word(m: int, star_odd: bool = True) -> Word:
    """m-letter word 1 2 3 ... m with stars on odd (or even) positions."""
    return Word(tuple((p, (p % 2 == 1) == star_odd) for p in range(1, m + 1)))


def index_shift(word: Word, k: int, m: int) -> Word:
    """Shift every set index by k cyclically within 1..m, keeping stars."""
    return Word(tuple((((idx - 1 + k) % m) + 1, star) for idx, star in word.letters))


def pair_blocks(word: Word) -> list[Word]:
    """Split an even-length word into its consecutive two-letter blocks."""
    if len(word.letters) % 2 != 0:
        raise ValueError("word length must be even to split into pairs")
    return [Word(word.letters[i : i + 2]) for i in range(0, len(word.letters), 2)]


def tau_nu_base(m: int, tau: Permutation, nu: Permutation) -> Word:
    """2m-letter base: tau(1)* nu(1) tau(2)* nu(2) ... tau(m)* nu(m)."""
    if tau.size != m or nu.size != m:
        raise ValueError("permutations must act on 1..m")
    letters: list[tuple[int, bool]] = []
    for j in range(1, m + 1):
        letters.append((tau(j), True))
        letters.append((nu(j), False))
    return Word(tuple(letters))


def sigma_even_words(m: int, tau: Permutation) -> list[Word]:
    """The m two-letter words for even m: tau(2j-1)* tau(2j), then adjoints.

    Word j (j <= m/2) is tau(2j-1)* tau(2j); word m/2+j is its adjoint
    tau(2j)* tau(2j-1).
    """
    if m % 2 != 0:
        raise ValueError("this construction needs even m")
    if tau.size != m:
        raise ValueError("permutation must act on 1..m")
    first = [Word(((tau(2 * j - 1), True), (tau(2 * j), False))) for j in range(1, m // 2 + 1)]
    return first + [w.adjoint() for w in first]


def phi_words(m: int) -> list[Word]:
    """Cyclic full products: word j is j, j+1, ..., m, 1, ..., j-1 (no stars)."""
    return [
        Word(tuple((((j - 1 + i) % m) + 1, False) for i in range(m))) for j in range(1, m + 1)
    ]


def corollary_315_permutations(m: int) -> tuple[Permutation, Permutation]:
    """The odd-m permutation pair (odds then evens / evens then odds).

    tau sends 1..(m+1)/2 to 1,3,...,m and the rest to 2,4,...,m-1; nu sends
    1..(m-1)/2 to 2,4,...,m-1 and the rest to 1,3,...,m.  For m = 3:
    tau = (1,3,2), nu = (2,1,3).
    """
    if m % 2 != 1:
        raise ValueError("this permutation pair needs odd m")
    half = (m + 1) // 2
    tau = tuple(2 * j - 1 for j in range(1, half + 1)) + tuple(
        2 * (j - half) for j in range(half + 1, m + 1)
    )
    nu = tuple(2 * j for j in range(1, half)) + tuple(
        2 * (j - half + 1) - 1 for j in range(half, m + 1)
    )
    return Permutation(tau), Permutation(nu)


# ---------------------------------------------------------------------------
# build_construction
# ---------------------------------------------------------------------------

CONSTRUCTION_KINDS = (
    "cyclic_sigma",
    "phi_cyclic",
    "omega_odd",
    "sigma_even",
    "omega_even",
    "theta_half",
    "omega_tau_nu",
    "corollary_315_perms",
)


def build_construction(
    kind: str,
    sets: Sequence[OperatorSet],
    weights: Sequence[float] | None = None,
    tau: Permutation | None = None,
    nu: Permutation | None = None,
):
    """Build a named derived family from base sets.

    Returns a list of ``OperatorSet`` for all kinds except
    ``corollary_315_perms``, which returns the ``(tau, nu)`` permutation
    pair itself.

    Kinds
    -----
    cyclic_sigma
        m Hadamard means; family i applies weight j to set i+j-1 (cyclic).
    phi_cyclic
        m cyclic full products j..m,1..j-1.
    omega_odd
        For odd m: rotations by 2(j-1) letters of the 2m-letter base
        1 2* 3 4* ... m 1* 2 3* ... (m-1) m*.
    sigma_even
        For even m: the pair words tau(2j-1)* tau(2j) and their adjoints.
    omega_even
        For even m: position-rotations of the sigma_even sequence reordered
        by nu.
    theta_half
        For even m: cyclic products of the first m/2 sigma_even families.
    omega_tau_nu
        Rotations by 2(j-1) letters of tau(1)* nu(1) ... tau(m)* nu(m).
    corollary_315_perms
        The distinguished odd-m (tau, nu) pair.
    """
    m = len(sets)
    if m == 0:
        raise ValueError("need at least one base set")
    if tau is None:
        tau = Permutation.identity(m)
    if nu is None:
        nu = Permutation.identity(m)

    if kind == "cyclic_sigma":
        if weights is None or len(weights) != m:
            raise ValueError(f"cyclic_sigma needs {m} weights")
        out = []
        for i in range(m):
            rotated = [sets[(i + j) % m] for j in range(m)]
            out.append(set_hadamard_mean(rotated, list(weights)))
        return out
    if kind == "phi_cyclic":
        return [evaluate_word(w, sets) for w in phi_words(m)]
    if kind == "omega_odd":
        if m % 2 != 1:
            raise ValueError("omega_odd needs an odd number of sets")
        base = even_star_base(m)
        return [evaluate_word(rotate_word(base, 2 * j), sets) for j in range(m)]
    if kind == "sigma_even":
        return [evaluate_word(w, sets) for w in sigma_even_words(m, tau)]
    if kind == "omega_even":
        sigma = sigma_even_words(m, tau)
        seq = [sigma[nu(i) - 1] for i in range(1, m + 1)]
        out = []
        for i in range(m):
            letters: tuple[tuple[int, bool], ...] = ()
            for w in seq[i:] + seq[:i]:
                letters = letters + w.letters
            out.append(evaluate_word(Word(letters), sets))
        return out
    if kind == "theta_half":
        if m % 2 != 0:
            raise ValueError("theta_half needs an even number of sets")
        sigma = sigma_even_words(m, tau)[: m // 2]
        out = []
        for i in range(m // 2):
            letters = ()
            for w in sigma[i:] + sigma[:i]:
                letters = letters + w.letters
            out.append(evaluate_word(Word(letters), sets))
        return out
    if kind == "omega_tau_nu":
        base = tau_nu_base(m, tau, nu)
        return [evaluate_word(rotate_word(base, 2 * j), sets) for j in range(m)]
    if kind == "corollary_315_perms":
        return corollary_315_permutations(m)
    raise ValueError(f"unknown construction kind {kind!r}")
