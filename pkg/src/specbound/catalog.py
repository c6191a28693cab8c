"""Registry of Hadamard-product spectral inequality chains.

Each catalog entry describes one inequality chain (or a small family of
chains) over finite sets of nonnegative matrices: a claimed ordering
``e1 <= e2 <= ... <= ek`` of scalar quantities built from set products,
adjoints, weighted Hadamard means, set powers, radii and norms.  Entries
carry an applicability predicate over the hypothesis parameters (parity of
m, weight-sum regime, thresholds on alpha or t, permutations) and build
their chains as Expression ASTs that the evaluator turns into certified
brackets.

Two scalar expressions can be recognized as *structurally equal* — equal by
algebraic identities rather than numerics — via ``canonical_key``: radii of
word products are invariant under cyclic rotation of the word and under
adjoint-reversal, and norms are invariant under adjoint-reversal.  The
verdict machinery uses this to confirm equality links exactly, where
bracket arithmetic alone could only show overlap.

When a composed set would materialize too many members (Hadamard means of
several multi-member sets), evaluation switches to certified lazy bounds:
lower bounds from a deterministic subsample of true members, upper bounds
from norm composition (submultiplicativity for products; weighted norm
products for means with weight sum >= 1; the entrywise bound
``norm <= dim * max_entry`` otherwise).  Lazy brackets are wide but sound,
so they can only ever cost sharpness, never correctness.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .numat import (
    OUT,
    Bracket,
    bracket_product,
    norm_bounds_batch,
    norm_upper_batch,
    weighted_hadamard_mean,
)
from .radius import JsrConfig, _dominance_reduce, gsr_lower, jsr_detail, set_norm
from .setalg import (
    OperatorSet,
    Permutation,
    Word,
    adjoint_set,
    alternating_word,
    corollary_315_permutations,
    even_star_base,
    index_shift,
    odd_star_base,
    pair_blocks,
    phi_words,
    rotate_word,
    set_hadamard_mean,
    set_product,
    sigma_even_words,
    tau_nu_base,
    word_adjoint,
)

__all__ = [
    "SetRef",
    "Adjoint",
    "Product",
    "HadamardMean",
    "PowerN",
    "RValue",
    "ScalarPow",
    "ScalarMul",
    "CatalogEntry",
    "EvalStats",
    "list_entries",
    "get_entry",
    "entry_ids",
    "applicability_check",
    "entry_chains",
    "entry_elementwise",
    "canonical_key",
    "evaluate_expression",
    "evaluate_set_expression",
    "Evaluator",
    "format_entry_line",
]


# ---------------------------------------------------------------------------
# Expression AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SetRef:
    """Reference to the instance's set number ``index`` (1-based)."""

    index: int


@dataclass(frozen=True)
class Adjoint:
    arg: object


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class HadamardMean:
    args: tuple
    weights: tuple


@dataclass(frozen=True)
class PowerN:
    arg: object
    n: int


@dataclass(frozen=True)
class RValue:
    """Scalar head: kind 'gsr_jsr' (radius) or 'norm' (set norm)."""

    kind: str
    arg: object


@dataclass(frozen=True)
class ScalarPow:
    arg: object
    exponent: float


@dataclass(frozen=True)
class ScalarMul:
    factors: tuple


_SET_NODES = (SetRef, Adjoint, Product, HadamardMean, PowerN)
_SCALAR_NODES = (RValue, ScalarPow, ScalarMul)


def _prod(*exprs):
    return exprs[0] if len(exprs) == 1 else Product(tuple(exprs))


def _mean(exprs: Sequence, weights: Sequence[float]) -> HadamardMean:
    return HadamardMean(tuple(exprs), tuple(float(w) for w in weights))


def _hpow(expr, t: float):
    """Entrywise power of a set as a one-argument Hadamard mean."""
    return HadamardMean((expr,), (float(t),))


def _setpow(expr, n: int):
    return expr if n == 1 else PowerN(expr, int(n))


def _r(expr):
    return RValue("gsr_jsr", expr)


def _norm(expr):
    return RValue("norm", expr)


def _pow(expr, p: float):
    return expr if p == 1 else ScalarPow(expr, float(p))


def _mul(*exprs):
    return exprs[0] if len(exprs) == 1 else ScalarMul(tuple(exprs))


def _refs(n: int) -> list[SetRef]:
    return [SetRef(i) for i in range(1, n + 1)]


def _word_expr(word: Word):
    return _prod(
        *[Adjoint(SetRef(i)) if star else SetRef(i) for i, star in word.letters]
    )


# ---------------------------------------------------------------------------
# Canonical keys (structural equality)
# ---------------------------------------------------------------------------


def _normalize_set(e):
    """Cheap normal form: drop double adjoints, unwrap trivial wrappers,
    sort Hadamard-mean operands (the entrywise product commutes)."""
    if isinstance(e, SetRef):
        return e
    if isinstance(e, Adjoint):
        inner = _normalize_set(e.arg)
        return inner.arg if isinstance(inner, Adjoint) else Adjoint(inner)
    if isinstance(e, Product):
        fs = tuple(_normalize_set(f) for f in e.factors)
        return fs[0] if len(fs) == 1 else Product(fs)
    if isinstance(e, HadamardMean):
        args = tuple(_normalize_set(a) for a in e.args)
        order = sorted(range(len(args)), key=lambda i: (repr(args[i]), e.weights[i]))
        return HadamardMean(
            tuple(args[i] for i in order), tuple(float(e.weights[i]) for i in order)
        )
    if isinstance(e, PowerN):
        inner = _normalize_set(e.arg)
        return inner if e.n == 1 else PowerN(inner, e.n)
    raise TypeError(f"not a set expression: {type(e).__name__}")


def _set_adjoint(e):
    """Adjoint of a set expression, pushed to the leaves.

    Transposition reverses products, distributes over Hadamard means, and
    commutes with set powers (the power is over one set, so reversal does
    not change the collection of length-n products).
    """
    if isinstance(e, SetRef):
        return Adjoint(e)
    if isinstance(e, Adjoint):
        return e.arg
    if isinstance(e, Product):
        return Product(tuple(_set_adjoint(f) for f in reversed(e.factors)))
    if isinstance(e, HadamardMean):
        return HadamardMean(tuple(_set_adjoint(a) for a in e.args), e.weights)
    if isinstance(e, PowerN):
        return PowerN(_set_adjoint(e.arg), e.n)
    raise TypeError(f"not a set expression: {type(e).__name__}")


def _as_word(e):
    """Letter tuple ((index, star), ...) if e is a plain word product."""
    factors = e.factors if isinstance(e, Product) else (e,)
    letters = []
    for f in factors:
        if isinstance(f, SetRef):
            letters.append((f.index, False))
        elif isinstance(f, Adjoint) and isinstance(f.arg, SetRef):
            letters.append((f.arg.index, True))
        else:
            return None
    return tuple(letters)


def canonical_key(expr) -> str:
    """Stable key identifying a scalar expression up to value-preserving
    rewrites: cyclic rotation of word products (valid for radii, since the
    radius of a product set is invariant under cyclic reordering of the
    factors) and adjoint-reversal (valid for radii and for the set norm,
    both transpose-invariant).  Equal keys imply equal exact values."""
    if isinstance(expr, RValue):
        if expr.kind not in ("gsr_jsr", "norm"):
            raise ValueError(f"unknown RValue kind {expr.kind!r}")
        x = _normalize_set(expr.arg)
        letters = _as_word(x)
        if letters is not None:
            adj = tuple((i, not s) for i, s in reversed(letters))
            if expr.kind == "gsr_jsr":
                cands = [
                    w[k:] + w[:k] for w in (letters, adj) for k in range(len(w))
                ]
            else:
                cands = [letters, adj]
            return f"{expr.kind}:word{min(cands)}"
        keys = (repr(x), repr(_normalize_set(_set_adjoint(x))))
        return f"{expr.kind}:{min(keys)}"
    if isinstance(expr, ScalarPow):
        if expr.exponent == 1.0:
            return canonical_key(expr.arg)
        return f"pow[{expr.exponent!r}]({canonical_key(expr.arg)})"
    if isinstance(expr, ScalarMul):
        parts = sorted(canonical_key(f) for f in expr.factors)
        return parts[0] if len(parts) == 1 else "mul(" + ",".join(parts) + ")"
    raise TypeError(f"not a scalar expression: {type(expr).__name__}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

_MEAN_CAP = 8192
_PROD_CAP = 8192
_SAMPLE_CAP = 64
_TRIM_FACTORS = 8


@dataclass
class EvalStats:
    """Flags accumulated while evaluating expressions."""

    partial: bool = False
    lazy: bool = False


class _SetVal:
    """Materialized set, or certified bounds standing in for one.

    ``sample`` always holds true members of the represented set, so any
    lower bound derived from it is sound.  ``env`` is an entrywise envelope:
    every member is entrywise <= ``env``, which survives products (for
    nonnegative matrices A <= E and B <= F imply AB <= EF), Hadamard means
    and adjoints, and turns into norm/entry upper bounds for free.
    ``norm_hi`` / ``entry_hi`` are certified upper bounds on the set norm /
    max member entry.
    """

    __slots__ = ("mat", "dim", "sample", "norm_hi", "entry_hi", "env", "_tight")

    def __init__(self, mat, dim, sample, norm_hi, entry_hi, env):
        self.mat = mat
        self.dim = dim
        self.sample = sample
        self.norm_hi = norm_hi
        self.entry_hi = entry_hi
        self.env = env
        self._tight = None

    @classmethod
    def from_set(cls, s: OperatorSet) -> "_SetVal":
        nh = float(norm_upper_batch(s.mats).max())
        env = s.mats.max(axis=0)
        return cls(s, s.dim, s, nh, float(s.mats.max()), env)

    def tight_norm_hi(self) -> float:
        """Sharper certified set-norm upper bound, computed on demand;
        worth the extra passes when this value feeds a composed bound."""
        if self._tight is None:
            if self.mat is None:
                self._tight = self.norm_hi
            else:
                stack = _dominance_reduce(self.mat.mats)
                stages = 24 if stack.shape[0] <= 4096 else 12
                ladder = float(norm_bounds_batch(stack, stages=stages)[1].max())
                self._tight = min(self.norm_hi, ladder)
        return self._tight


def _env_norm_hi(env: np.ndarray) -> float:
    """Certified spectral-norm upper bound of a single envelope matrix."""
    return float(norm_bounds_batch(env[None, :, :], stages=24)[1][0])


def _trim(s: OperatorSet, k: int) -> OperatorSet:
    """Deterministic subsample keeping the members with the largest cheap
    norm bounds (the useful ones for lower bounds)."""
    if len(s) <= k:
        return s
    idx = np.argsort(-norm_upper_batch(s.mats), kind="stable")[:k]
    return OperatorSet._from_stack(s.mats[np.sort(idx)])


class Evaluator:
    """Caches and evaluates expressions against an environment of sets."""

    def __init__(self, env: Sequence[OperatorSet], cfg: JsrConfig | None = None, stats: EvalStats | None = None):
        self.env = list(env)
        if not self.env:
            raise ValueError("environment must contain at least one set")
        dim = self.env[0].dim
        if any(s.dim != dim for s in self.env):
            raise ValueError("all environment sets must share one dimension")
        self.cfg = cfg or JsrConfig()
        self.stats = stats if stats is not None else EvalStats()
        self._set_cache: dict[str, _SetVal] = {}
        self._scalar_cache: dict[str, Bracket] = {}

    # -- set-valued nodes --------------------------------------------------

    def set_value(self, expr) -> _SetVal:
        key = repr(_normalize_set(expr))
        got = self._set_cache.get(key)
        if got is None:
            got = self._compute_set(expr)
            self._set_cache[key] = got
        return got

    def _compute_set(self, e) -> _SetVal:
        if isinstance(e, SetRef):
            if not 1 <= e.index <= len(self.env):
                raise IndexError(
                    f"expression references set {e.index}, instance has {len(self.env)}"
                )
            return _SetVal.from_set(self.env[e.index - 1])
        if isinstance(e, Adjoint):
            v = self.set_value(e.arg)
            if v.mat is not None:
                return _SetVal.from_set(adjoint_set(v.mat))
            return _SetVal(
                None, v.dim, adjoint_set(v.sample), v.norm_hi, v.entry_hi, v.env.T
            )
        if isinstance(e, Product):
            vals = [self.set_value(f) for f in e.factors]
            out = vals[0]
            for v in vals[1:]:
                out = self._compose_product(out, v)
            return out
        if isinstance(e, PowerN):
            if e.n < 1:
                raise ValueError("set power requires n >= 1")
            v = self.set_value(e.arg)
            out = v
            for _ in range(e.n - 1):
                out = self._compose_product(out, v)
            return out
        if isinstance(e, HadamardMean):
            return self._compose_mean(e)
        raise TypeError(f"not a set expression: {type(e).__name__}")

    def _compose_product(self, a: _SetVal, b: _SetVal) -> _SetVal:
        if a.mat is not None and b.mat is not None and len(a.mat) * len(b.mat) <= _PROD_CAP:
            return _SetVal.from_set(set_product(a.mat, b.mat))
        self.stats.lazy = True
        sample = _trim(
            set_product(_trim(a.sample, _TRIM_FACTORS), _trim(b.sample, _TRIM_FACTORS)),
            _SAMPLE_CAP,
        )
        env = (a.env @ b.env) * OUT
        entry_hi = float(env.max())
        norm_hi = min(a.tight_norm_hi() * b.tight_norm_hi() * OUT, _env_norm_hi(env))
        return _SetVal(None, a.dim, sample, norm_hi, entry_hi, env)

    def _compose_mean(self, e: HadamardMean) -> _SetVal:
        if any(w <= 0 for w in e.weights):
            raise ValueError("Hadamard mean weights must be positive")
        if len(e.args) != len(e.weights):
            raise ValueError(f"{len(e.args)} mean operands but {len(e.weights)} weights")
        vals = [self.set_value(a) for a in e.args]
        dim = vals[0].dim
        sizes = [len(v.mat) if v.mat is not None else None for v in vals]
        if all(s is not None for s in sizes) and math.prod(sizes) <= _MEAN_CAP:
            return _SetVal.from_set(
                set_hadamard_mean([v.mat for v in vals], list(e.weights))
            )
        self.stats.lazy = True
        samples = [_trim(v.sample, _SAMPLE_CAP).mats for v in vals]
        count = min(_SAMPLE_CAP, math.prod(len(s) for s in samples))
        members = [
            weighted_hadamard_mean(
                [s[i % len(s)] for s in samples], list(e.weights)
            ).data
            for i in range(count)
        ]
        sample = OperatorSet._from_stack(np.stack(members))
        env = np.power(vals[0].env, e.weights[0])
        for v, w in zip(vals[1:], e.weights[1:]):
            env = env * np.power(v.env, w)
        env = env * OUT
        entry_hi = float(env.max())
        norm_hi = _env_norm_hi(env)
        if sum(e.weights) >= 1.0 - 1e-12:
            # Weighted norm product bound, valid when the weights sum to >= 1.
            norm_hi = min(
                norm_hi,
                math.prod(v.tight_norm_hi() ** w for v, w in zip(vals, e.weights)) * OUT,
            )
        return _SetVal(None, dim, sample, norm_hi, entry_hi, env)

    # -- scalar nodes ------------------------------------------------------

    def scalar(self, expr) -> Bracket:
        key = canonical_key(expr)
        got = self._scalar_cache.get(key)
        if got is None:
            got = self._compute_scalar(expr)
            self._scalar_cache[key] = got
        return got

    def _compute_scalar(self, e) -> Bracket:
        if isinstance(e, RValue):
            v = self.set_value(e.arg)
            if v.mat is not None:
                if e.kind == "norm":
                    return set_norm(v.mat)
                det = jsr_detail(v.mat, self.cfg)
                if det.partial:
                    self.stats.partial = True
                return det.bracket
            self.stats.lazy = True
            if e.kind == "norm":
                lo = float(norm_bounds_batch(v.sample.mats, stages=24)[0].max())
            else:
                lo = gsr_lower(
                    v.sample,
                    depth=min(3, self.cfg.max_depth),
                    budget_products=min(300_000, self.cfg.budget_products),
                )
            hi = max(v.norm_hi, lo)
            return Bracket(min(lo, hi), hi, loose=True)
        if isinstance(e, ScalarPow):
            if not e.exponent > 0:
                raise ValueError("scalar exponent must be > 0")
            return self.scalar(e.arg).power(e.exponent)
        if isinstance(e, ScalarMul):
            return bracket_product([self.scalar(f) for f in e.factors])
        raise TypeError(f"not a scalar expression: {type(e).__name__}")


def evaluate_expression(expr, env: Sequence[OperatorSet], cfg: JsrConfig | None = None) -> Bracket:
    """Certified bracket for a scalar expression over concrete sets."""
    if not isinstance(expr, _SCALAR_NODES):
        raise TypeError("evaluate_expression needs a scalar-valued expression")
    return Evaluator(env, cfg).scalar(expr)


def evaluate_set_expression(expr, env: Sequence[OperatorSet], cap: int = 65536) -> OperatorSet:
    """Fully materialize a set expression (no lazy fallback); for claims
    that need actual members, e.g. elementwise comparisons in tests."""
    if isinstance(expr, SetRef):
        if not 1 <= expr.index <= len(env):
            raise IndexError(f"expression references set {expr.index}, instance has {len(env)}")
        return env[expr.index - 1]
    if isinstance(expr, Adjoint):
        return adjoint_set(evaluate_set_expression(expr.arg, env, cap))
    if isinstance(expr, Product):
        out = evaluate_set_expression(expr.factors[0], env, cap)
        for f in expr.factors[1:]:
            nxt = evaluate_set_expression(f, env, cap)
            if len(out) * len(nxt) > cap:
                raise ValueError(f"materialization exceeds cap {cap}")
            out = set_product(out, nxt)
        return out
    if isinstance(expr, PowerN):
        base = evaluate_set_expression(expr.arg, env, cap)
        out = base
        for _ in range(expr.n - 1):
            if len(out) * len(base) > cap:
                raise ValueError(f"materialization exceeds cap {cap}")
            out = set_product(out, base)
        return out
    if isinstance(expr, HadamardMean):
        args = [evaluate_set_expression(a, env, cap) for a in expr.args]
        if math.prod(len(a) for a in args) > cap:
            raise ValueError(f"materialization exceeds cap {cap}")
        return set_hadamard_mean(args, list(expr.weights))
    raise TypeError(f"not a set expression: {type(expr).__name__}")


# ---------------------------------------------------------------------------
# Catalog entries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    """One inequality-chain family.

    ``arity_kind`` is how the number of instance sets is fixed: ``fixed``
    (always ``fixed_arity`` sets), ``m`` (one set per index 1..m), ``grid``
    (k rows of m sets, row-major), or ``any`` (any positive count).
    ``chains_fn(params)`` returns the list of claimed chains, each an
    ordered list of scalar Expressions e1 <= e2 <= ...; ``elementwise_fn``
    optionally returns (lhs, rhs) set-expression pairs claimed pointwise <=.
    """

    id: str
    anchor: str
    arity: str
    regime: str
    arity_kind: str
    fixed_arity: int
    matrix_only: bool
    requires: tuple
    accepts_perms: tuple
    uses_n: bool
    applicability_fn: Callable[[dict], tuple[bool, str]] = field(repr=False)
    chains_fn: Callable[[dict], list] = field(repr=False)
    elementwise_fn: Callable[[dict], list] | None = field(default=None, repr=False)


def _regime_check(
    *,
    m_parity: str | None = None,
    m_required: bool = False,
    weights: str | None = None,
    alpha_min_of: Callable[[dict], float | None] | None = None,
    alpha_reason: str = "",
    t_required: bool = False,
):
    def check(p: dict) -> tuple[bool, str]:
        m = p.get("m")
        if (m_required or m_parity) and m is None:
            return False, "m required"
        if m is not None and (not isinstance(m, int) or m < 1):
            return False, "m must be a positive integer"
        if m_parity == "even" and m % 2 != 0:
            return False, "m must be even"
        if m_parity == "odd" and m % 2 != 1:
            return False, "m must be odd"
        if weights is not None:
            w = p.get("weights")
            if not w:
                return False, "weights required"
            if any(not (x > 0) for x in w):
                return False, "weights must be positive"
            s = sum(w)
            if weights == "sum1" and abs(s - 1.0) > 1e-9:
                return False, "weights must sum to 1"
            if weights == "sum_ge1" and s < 1.0 - 1e-9:
                return False, "weights must sum to at least 1"
        if alpha_min_of is not None:
            a = p.get("alpha")
            if a is None:
                return False, "alpha required"
            if not a > 0:
                return False, "alpha must be positive"
            thr = alpha_min_of(p)
            if thr is None:
                return False, "m required"
            if a < thr - 1e-12:
                return False, alpha_reason
        if t_required:
            t = p.get("t")
            if t is None:
                return False, "t required"
            if t < 1.0 - 1e-12:
                return False, "t must be >= 1"
        n = p.get("n")
        if n is not None and (not isinstance(n, int) or n < 1):
            return False, "n must be a positive integer"
        return True, ""

    return check


def _grid_refs(m: int, k: int):
    return lambda i, j: SetRef((i - 1) * m + j)


# -- chain builders ---------------------------------------------------------


def _t11_parts(p):
    m, k, w = p["m"], p["k"], p["weights"]
    ref = _grid_refs(m, k)
    rows = [_mean([ref(i, j) for j in range(1, m + 1)], w) for i in range(1, k + 1)]
    a = _prod(*rows)
    cols = [_prod(*[ref(i, j) for i in range(1, k + 1)]) for j in range(1, m + 1)]
    mid = _mean(cols, w)
    return a, cols, mid, w


def _chains_t11(p):
    a, cols, mid, w = _t11_parts(p)
    return [
        [_norm(a), _norm(mid), _mul(*[_pow(_norm(c), x) for c, x in zip(cols, w)])],
        [_r(a), _r(mid), _mul(*[_pow(_r(c), x) for c, x in zip(cols, w)])],
    ]


def _elem_t11(p):
    a, _, mid, _ = _t11_parts(p)
    return [(a, mid)]


def _chains_t12i(p):
    refs, w = _refs(p["m"]), p["weights"]
    mean = _mean(refs, w)
    return [
        [_norm(mean), _mul(*[_pow(_norm(s), x) for s, x in zip(refs, w)])],
        [_r(mean), _mul(*[_pow(_r(s), x) for s, x in zip(refs, w)])],
    ]


def _t12iii_parts(p):
    refs, t = _refs(p["m"]), p["t"]
    lhs = _prod(*[_hpow(s, t) for s in refs])
    full = _prod(*refs)
    return lhs, full, t


def _chains_t12iii(p):
    lhs, full, t = _t12iii_parts(p)
    return [[_r(lhs), _pow(_r(full), t)], [_norm(lhs), _pow(_norm(full), t)]]


def _elem_t12iii(p):
    lhs, full, t = _t12iii_parts(p)
    return [(lhs, _hpow(full, t))]


def _chains_t13i(p):
    m, k, w, n = p["m"], p["k"], p["weights"], p["n"]
    ref = _grid_refs(m, k)
    rows = [_mean([ref(i, j) for j in range(1, m + 1)], w) for i in range(1, k + 1)]
    cols = [_prod(*[ref(i, j) for i in range(1, k + 1)]) for j in range(1, m + 1)]
    return [
        [
            _r(_prod(*rows)),
            _r(_mean(cols, w)),
            _pow(_r(_mean([_setpow(c, n) for c in cols], w)), 1.0 / n),
            _mul(*[_pow(_r(c), x) for c, x in zip(cols, w)]),
        ]
    ]


def _chains_t13ii(p):
    kk, t, n = p["nsets"], p["t"], p["n"]
    refs = _refs(kk)
    full = _prod(*refs)
    return [
        [
            _r(_prod(*[_hpow(s, t) for s in refs])),
            _r(_hpow(full, t)),
            _pow(_r(_hpow(_setpow(full, n), t)), 1.0 / n),
            _pow(_r(full), t),
        ]
    ]


def _sigma_means(m: int, w):
    return [
        _mean([SetRef(((i + j) % m) + 1) for j in range(m)], w) for i in range(m)
    ]


def _chains_c21(p):
    m, w = p["m"], p["weights"]
    return [[_r(_prod(*_sigma_means(m, w))), _r(_prod(*_refs(m)))]]


def _c2_refined(p, last_exponent: float):
    m, w, n = p["m"], p["weights"], p["n"]
    phis = [_word_expr(wd) for wd in phi_words(m)]
    return [
        [
            _r(_prod(*_sigma_means(m, w))),
            _r(_mean(phis, w)),
            _pow(_r(_mean([_setpow(ph, n) for ph in phis], w)), 1.0 / n),
            _pow(_r(_prod(*_refs(m))), last_exponent),
        ]
    ]


def _chains_c22(p):
    return _c2_refined(p, 1.0)


def _chains_c23(p):
    return _c2_refined(p, float(sum(p["weights"])))


def _chains_l31(p):
    psi = SetRef(1)
    root = _pow(_r(_prod(Adjoint(psi), psi)), 0.5)
    return [[_norm(psi), root], [root, _norm(psi)]]


def _chains_t32even(p):
    m = p["m"]
    q = 1.0 / (2 * m)
    v = alternating_word(m, star_odd=True)
    w2 = alternating_word(m, star_odd=False)
    w3 = word_adjoint(w2)
    e1 = _norm(_mean(_refs(m), [1.0 / m] * m))
    e2 = _pow(_mul(_r(_word_expr(v)), _r(_word_expr(w2))), q)
    e3 = _pow(_mul(_r(_word_expr(v)), _r(_word_expr(w3))), q)
    return [[e1, e2, e3]]


def _chains_t32odd(p):
    m = p["m"]
    e1 = _norm(_mean(_refs(m), [1.0 / m] * m))
    return [[e1, _pow(_r(_word_expr(even_star_base(m))), 1.0 / (2 * m))]]


def _chains_t33even(p):
    m, a = p["m"], p["alpha"]
    v = alternating_word(m, star_odd=True)
    w3 = word_adjoint(alternating_word(m, star_odd=False))
    shifted = _mean([_word_expr(index_shift(v, k, m)) for k in range(m)], [a] * m)
    return [
        [
            _norm(_mean(_refs(m), [a] * m)),
            _pow(_r(shifted), 1.0 / m),
            _pow(_mul(_r(_word_expr(v)), _r(_word_expr(w3))), a / 2),
        ]
    ]


def _chains_t33odd(p):
    m, a = p["m"], p["alpha"]
    u = odd_star_base(m)
    rotated = _mean([_word_expr(rotate_word(u, 2 * k)) for k in range(m)], [a] * m)
    return [
        [
            _norm(_mean(_refs(m), [a] * m)),
            _pow(_r(rotated), 1.0 / (2 * m)),
            _pow(_r(_word_expr(even_star_base(m))), a / 2),
        ]
    ]


def _pairrot_chain(m: int, wv: float, last_exp: float):
    wb = even_star_base(m)
    e1 = _norm(_mean(_refs(m), [wv] * m))
    e2 = _pow(_r(_mean([_word_expr(b) for b in pair_blocks(wb)], [wv] * m)), 0.5)
    e3 = _pow(
        _r(_mean([_word_expr(rotate_word(wb, 2 * j)) for j in range(m)], [wv] * m)),
        1.0 / (2 * m),
    )
    e4 = _pow(_r(_word_expr(wb)), last_exp)
    return [[e1, e2, e3, e4]]


def _chains_t35(p):
    m = p["m"]
    return _pairrot_chain(m, 1.0 / m, 1.0 / (2 * m))


def _chains_t36(p):
    m, a = p["m"], p["alpha"]
    return _pairrot_chain(m, a, a / 2)


def _c37_chain(a: float, last_exp: float):
    psi, sig = SetRef(1), SetRef(2)
    pa, sa = Adjoint(psi), Adjoint(sig)
    e1 = _norm(_mean([psi, sa, psi], [a] * 3))
    e2 = _pow(
        _r(_mean([_prod(pa, sa), _prod(pa, psi), _prod(sig, psi)], [a] * 3)), 0.5
    )
    e3 = _pow(
        _r(
            _mean(
                [
                    _prod(pa, sa, pa, psi, sig, psi),
                    _prod(pa, psi, sig, psi, pa, sa),
                    _prod(sig, psi, pa, sa, pa, psi),
                ],
                [a] * 3,
            )
        ),
        1.0 / 6,
    )
    e4 = _pow(_norm(_prod(psi, sig, psi)), last_exp)
    return [[e1, e2, e3, e4]]


def _chains_c37i(p):
    return _c37_chain(1.0 / 3, 1.0 / 3)


def _chains_c37ii(p):
    return _c37_chain(p["alpha"], p["alpha"])


def _concat_words(seq: Sequence[Word]) -> Word:
    letters: tuple = ()
    for w in seq:
        letters = letters + w.letters
    return Word(letters)


def _t38_chain(p, wv: float, last_exp: float):
    m, tau, nu = p["m"], p["tau"], p["nu"]
    sig = sigma_even_words(m, tau)
    seq = [sig[nu(i) - 1] for i in range(1, m + 1)]
    omegas = [_concat_words(seq[i:] + seq[:i]) for i in range(m)]
    e1 = _norm(_mean(_refs(m), [wv] * m))
    e2 = _pow(_r(_mean([_word_expr(s) for s in sig], [wv] * m)), 0.5)
    e3 = _pow(_r(_mean([_word_expr(o) for o in omegas], [wv] * m)), 1.0 / (2 * m))
    e4 = _pow(_r(_word_expr(omegas[0])), last_exp)
    return [[e1, e2, e3, e4]]


def _chains_t38i(p):
    m = p["m"]
    return _t38_chain(p, 1.0 / m, 1.0 / (2 * m))


def _chains_t38ii(p):
    return _t38_chain(p, p["alpha"], p["alpha"] / 2)


def _chains_t311(p):
    m, a, tau = p["m"], p["alpha"], p["tau"]
    sig = sigma_even_words(m, tau)
    half = sig[: m // 2]
    thetas = [_concat_words(half[i:] + half[:i]) for i in range(m // 2)]
    return [
        [
            _norm(_mean(_refs(m), [a] * m)),
            _pow(_r(_mean([_word_expr(s) for s in sig], [a] * m)), 0.5),
            _r(_mean([_word_expr(s) for s in half], [a] * (m // 2))),
            _pow(_r(_mean([_word_expr(t) for t in thetas], [a] * (m // 2))), 2.0 / m),
            _pow(_r(_word_expr(thetas[0])), a),
        ]
    ]


def _t313_chain(p, wv: float, last_exp: float, extra_word: Word | None = None):
    m, tau, nu = p["m"], p["tau"], p["nu"]
    base = tau_nu_base(m, tau, nu)
    chain = [
        _norm(_mean(_refs(m), [wv] * m)),
        _pow(_r(_mean([_word_expr(b) for b in pair_blocks(base)], [wv] * m)), 0.5),
        _pow(
            _r(_mean([_word_expr(rotate_word(base, 2 * j)) for j in range(m)], [wv] * m)),
            1.0 / (2 * m),
        ),
        _pow(_r(_word_expr(base)), last_exp),
    ]
    if extra_word is not None:
        chain.append(_pow(_r(_word_expr(extra_word)), last_exp))
    return [chain]


def _chains_t313i(p):
    m = p["m"]
    return _t313_chain(p, 1.0 / m, 1.0 / (2 * m))


def _chains_t313ii(p):
    return _t313_chain(p, p["alpha"], p["alpha"] / 2)


def _with_315_perms(p):
    tau, nu = corollary_315_permutations(p["m"])
    q = dict(p)
    q["tau"], q["nu"] = tau, nu
    return q


def _chains_c315i(p):
    m = p["m"]
    return _t313_chain(_with_315_perms(p), 1.0 / m, 1.0 / (2 * m), even_star_base(m))


def _chains_c315ii(p):
    m = p["m"]
    return _t313_chain(_with_315_perms(p), p["alpha"], p["alpha"] / 2, even_star_base(m))


def _chains_l316(p):
    a = p["alpha"]
    psi = SetRef(1)
    return [
        [
            _r(_mean([psi, Adjoint(psi)], [a, a])),
            _r(_mean([psi, psi], [a, a])),
            _pow(_r(psi), 2 * a),
        ]
    ]


def _chains_c317(p):
    a = p["alpha"]
    psi, sig = SetRef(1), SetRef(2)
    x = _prod(Adjoint(psi), sig)
    xs = _prod(Adjoint(sig), psi)
    return [
        [
            _norm(_mean([psi, sig], [a, a])),
            _pow(_r(_mean([x, xs], [a, a])), 0.5),
            _pow(_r(_mean([x, x], [a, a])), 0.5),
            _pow(_r(x), a),
        ]
    ]


def _alpha_1_over_m(p):
    m = p.get("m")
    return None if m is None else 1.0 / m


def _alpha_2_over_m(p):
    m = p.get("m")
    return None if m is None else 2.0 / m


_ENTRIES = (
    CatalogEntry(
        id="T1.1",
        anchor="product of row means vs mean of column products",
        arity="k*m",
        regime="single matrices; weights > 0 with sum >= 1",
        arity_kind="grid",
        fixed_arity=0,
        matrix_only=True,
        requires=("m", "weights"),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(m_required=True, weights="sum_ge1"),
        chains_fn=_chains_t11,
        elementwise_fn=_elem_t11,
    ),
    CatalogEntry(
        id="T1.2i",
        anchor="weighted Hadamard mean vs weighted product of norms/radii",
        arity="m",
        regime="single matrices; weights > 0 with sum >= 1",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=True,
        requires=("weights",),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(weights="sum_ge1"),
        chains_fn=_chains_t12i,
    ),
    CatalogEntry(
        id="T1.2iii",
        anchor="product of entrywise powers vs power of the product",
        arity="m",
        regime="single matrices; t >= 1",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=True,
        requires=("t",),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(t_required=True),
        chains_fn=_chains_t12iii,
        elementwise_fn=_elem_t12iii,
    ),
    CatalogEntry(
        id="T1.3i",
        anchor="set version of the row/column mean chain with power refinement",
        arity="k*m",
        regime="weights > 0 summing to 1; power refinement n",
        arity_kind="grid",
        fixed_arity=0,
        matrix_only=False,
        requires=("m", "weights"),
        accepts_perms=(),
        uses_n=True,
        applicability_fn=_regime_check(m_required=True, weights="sum1"),
        chains_fn=_chains_t13i,
    ),
    CatalogEntry(
        id="T1.3ii",
        anchor="set chain for entrywise power t with power refinement",
        arity="k",
        regime="t >= 1; power refinement n",
        arity_kind="any",
        fixed_arity=0,
        matrix_only=False,
        requires=("t",),
        accepts_perms=(),
        uses_n=True,
        applicability_fn=_regime_check(t_required=True),
        chains_fn=_chains_t13ii,
    ),
    CatalogEntry(
        id="C2.1",
        anchor="product of cyclic Hadamard means vs product of the sets",
        arity="m",
        regime="weights > 0 summing to 1",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=("weights",),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(weights="sum1"),
        chains_fn=_chains_c21,
    ),
    CatalogEntry(
        id="C2.2",
        anchor="cyclic mean chain refined through cyclic full products",
        arity="m",
        regime="weights > 0 summing to 1; power refinement n",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=("weights",),
        accepts_perms=(),
        uses_n=True,
        applicability_fn=_regime_check(weights="sum1"),
        chains_fn=_chains_c22,
    ),
    CatalogEntry(
        id="C2.3",
        anchor="cyclic mean chain with weight sum >= 1, last term raised to the sum",
        arity="m",
        regime="weights > 0 with sum >= 1; power refinement n",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=("weights",),
        accepts_perms=(),
        uses_n=True,
        applicability_fn=_regime_check(weights="sum_ge1"),
        chains_fn=_chains_c23,
    ),
    CatalogEntry(
        id="L3.1",
        anchor="set norm equals the square root of the Gram-set radius",
        arity="1",
        regime="none",
        arity_kind="fixed",
        fixed_arity=1,
        matrix_only=False,
        requires=(),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(),
        chains_fn=_chains_l31,
    ),
    CatalogEntry(
        id="T3.2even",
        anchor="mean norm against two alternating-adjoint m-letter words",
        arity="m",
        regime="m even; weights fixed at 1/m",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=(),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(m_parity="even"),
        chains_fn=_chains_t32even,
    ),
    CatalogEntry(
        id="T3.2odd",
        anchor="mean norm against the 2m-letter alternating-adjoint word",
        arity="m",
        regime="m odd; weights fixed at 1/m",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=(),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(m_parity="odd"),
        chains_fn=_chains_t32odd,
    ),
    CatalogEntry(
        id="T3.3even",
        anchor="refinement through index-shifted word means (even m)",
        arity="m",
        regime="m even; alpha >= 1/m",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=("alpha",),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(
            m_parity="even", alpha_min_of=_alpha_1_over_m, alpha_reason="alpha < 1/m"
        ),
        chains_fn=_chains_t33even,
    ),
    CatalogEntry(
        id="T3.3odd",
        anchor="refinement through rotated word means (odd m)",
        arity="m",
        regime="m odd; alpha >= 1/m",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=("alpha",),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(
            m_parity="odd", alpha_min_of=_alpha_1_over_m, alpha_reason="alpha < 1/m"
        ),
        chains_fn=_chains_t33odd,
    ),
    CatalogEntry(
        id="T3.5",
        anchor="pair-block and rotation refinements at weights 1/m",
        arity="m",
        regime="m odd; weights fixed at 1/m",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=(),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(m_parity="odd"),
        chains_fn=_chains_t35,
    ),
    CatalogEntry(
        id="T3.6",
        anchor="pair-block and rotation refinements at weight alpha",
        arity="m",
        regime="m odd; alpha >= 1/m",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=("alpha",),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(
            m_parity="odd", alpha_min_of=_alpha_1_over_m, alpha_reason="alpha < 1/m"
        ),
        chains_fn=_chains_t36,
    ),
    CatalogEntry(
        id="C3.7i",
        anchor="two-set sandwich specialization at weights 1/3",
        arity="2",
        regime="weights fixed at 1/3",
        arity_kind="fixed",
        fixed_arity=2,
        matrix_only=False,
        requires=(),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(),
        chains_fn=_chains_c37i,
    ),
    CatalogEntry(
        id="C3.7ii",
        anchor="two-set sandwich specialization at weight alpha",
        arity="2",
        regime="alpha >= 1/3",
        arity_kind="fixed",
        fixed_arity=2,
        matrix_only=False,
        requires=("alpha",),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(
            alpha_min_of=lambda p: 1.0 / 3, alpha_reason="alpha < 1/3"
        ),
        chains_fn=_chains_c37ii,
    ),
    CatalogEntry(
        id="T3.8i",
        anchor="permuted pair-block chain at weights 1/m",
        arity="m",
        regime="m even; permutations tau, nu",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=(),
        accepts_perms=("tau", "nu"),
        uses_n=False,
        applicability_fn=_regime_check(m_parity="even"),
        chains_fn=_chains_t38i,
    ),
    CatalogEntry(
        id="T3.8ii",
        anchor="permuted pair-block chain at weight alpha",
        arity="m",
        regime="m even; alpha >= 1/m; permutations tau, nu",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=("alpha",),
        accepts_perms=("tau", "nu"),
        uses_n=False,
        applicability_fn=_regime_check(
            m_parity="even", alpha_min_of=_alpha_1_over_m, alpha_reason="alpha < 1/m"
        ),
        chains_fn=_chains_t38ii,
    ),
    CatalogEntry(
        id="T3.11",
        anchor="half-product chain with no radius root on the half mean",
        arity="m",
        regime="m even; alpha >= 2/m; permutation tau",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=("alpha",),
        accepts_perms=("tau",),
        uses_n=False,
        applicability_fn=_regime_check(
            m_parity="even", alpha_min_of=_alpha_2_over_m, alpha_reason="alpha < 2/m"
        ),
        chains_fn=_chains_t311,
    ),
    CatalogEntry(
        id="T3.13i",
        anchor="two-permutation interleaved word chain at weights 1/m",
        arity="m",
        regime="any m; permutations tau, nu",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=(),
        accepts_perms=("tau", "nu"),
        uses_n=False,
        applicability_fn=_regime_check(m_required=True),
        chains_fn=_chains_t313i,
    ),
    CatalogEntry(
        id="T3.13ii",
        anchor="two-permutation interleaved word chain at weight alpha",
        arity="m",
        regime="any m; alpha >= 1/m; permutations tau, nu",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=("alpha",),
        accepts_perms=("tau", "nu"),
        uses_n=False,
        applicability_fn=_regime_check(
            m_required=True, alpha_min_of=_alpha_1_over_m, alpha_reason="alpha < 1/m"
        ),
        chains_fn=_chains_t313ii,
    ),
    CatalogEntry(
        id="C3.15i",
        anchor="interleaved word chain under the odd/even permutation pair",
        arity="m",
        regime="m odd; weights fixed at 1/m",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=(),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(m_parity="odd"),
        chains_fn=_chains_c315i,
    ),
    CatalogEntry(
        id="C3.15ii",
        anchor="interleaved word chain under the odd/even pair at weight alpha",
        arity="m",
        regime="m odd; alpha >= 1/m",
        arity_kind="m",
        fixed_arity=0,
        matrix_only=False,
        requires=("alpha",),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(
            m_parity="odd", alpha_min_of=_alpha_1_over_m, alpha_reason="alpha < 1/m"
        ),
        chains_fn=_chains_c315ii,
    ),
    CatalogEntry(
        id="L3.16",
        anchor="set against its adjoint under Hadamard powers",
        arity="1",
        regime="alpha >= 1/2",
        arity_kind="fixed",
        fixed_arity=1,
        matrix_only=False,
        requires=("alpha",),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(
            alpha_min_of=lambda p: 0.5, alpha_reason="alpha < 1/2"
        ),
        chains_fn=_chains_l316,
    ),
    CatalogEntry(
        id="C3.17",
        anchor="two-set Hadamard power norm chain",
        arity="2",
        regime="alpha >= 1/2",
        arity_kind="fixed",
        fixed_arity=2,
        matrix_only=False,
        requires=("alpha",),
        accepts_perms=(),
        uses_n=False,
        applicability_fn=_regime_check(
            alpha_min_of=lambda p: 0.5, alpha_reason="alpha < 1/2"
        ),
        chains_fn=_chains_c317,
    ),
)

_BY_ID = {e.id: e for e in _ENTRIES}


def list_entries() -> tuple[CatalogEntry, ...]:
    return _ENTRIES


def entry_ids() -> tuple[str, ...]:
    return tuple(e.id for e in _ENTRIES)


def get_entry(entry_id: str) -> CatalogEntry:
    try:
        return _BY_ID[entry_id]
    except KeyError:
        raise KeyError(f"unknown entry id {entry_id!r}") from None


def applicability_check(entry: CatalogEntry, params: dict) -> tuple[bool, str]:
    """True iff all regime hypotheses hold; else False plus the first
    violated hypothesis, e.g. ('alpha < 1/m')."""
    return entry.applicability_fn(params)


def entry_chains(entry: CatalogEntry, params: dict) -> list:
    """The entry's chains for concrete parameters (list of lists of scalar
    Expressions, each claimed nondecreasing)."""
    return entry.chains_fn(_with_defaults(entry, params))


def entry_elementwise(entry: CatalogEntry, params: dict) -> list:
    """Optional pointwise-<= claims as (lhs, rhs) set-expression pairs."""
    if entry.elementwise_fn is None:
        return []
    return entry.elementwise_fn(_with_defaults(entry, params))


def _with_defaults(entry: CatalogEntry, params: dict) -> dict:
    p = dict(params)
    p.setdefault("n", 1)
    m = p.get("m")
    if m is not None:
        if "tau" in entry.accepts_perms and p.get("tau") is None:
            p["tau"] = Permutation.identity(m)
        if "nu" in entry.accepts_perms and p.get("nu") is None:
            p["nu"] = Permutation.identity(m)
    return p


def format_entry_line(entry: CatalogEntry) -> str:
    return f"{entry.id:<9} | {entry.anchor} | arity {entry.arity} | {entry.regime}"
