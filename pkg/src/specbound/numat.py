"""Nonnegative matrices, Hadamard operations and certified scalar brackets.

Every quantity this package ultimately reports (a spectral radius, an
operator norm, a joint/generalized spectral radius) is returned as a
``Bracket``: a pair ``lo <= hi`` of floats that provably encloses the exact
real value.  Enclosure is maintained the dull way: every number extracted
from floating-point work is pushed outward by a uniform relative fudge that
dominates the accumulated rounding error of the pipeline that produced it
(see ``OUT`` / ``IN`` below), and norm readings taken after matrix products
get a tiny additive pad that covers underflow-to-zero.  A bracket may be
wider than requested (then it is flagged ``loose``) but is never wrong.

Lower bounds for the spectral radius come from the Collatz-Wielandt
characterization: for any nonnegative vector ``x != 0``,

    min over the support of x of (A x)_i / x_i   <=   rho(A),

which, unlike the strictly-positive form, stays valid (and can be tight) for
reducible matrices when ``x`` is supported on a dominant class.  Upper
bounds come from strictly positive test vectors (max ratio), from
``||A^(2^j)||^(1/2^j)`` via a renormalized repeated-squaring ladder carried
in log scale, and from perturbed-matrix eigenvector tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "MatrixValidationError",
    "NonNegMatrix",
    "Bracket",
    "asmatrix",
    "hadamard_product",
    "hadamard_power",
    "weighted_hadamard_mean",
    "mat_product",
    "pointwise_leq",
    "l1_norm",
    "linf_norm",
    "spectral_radius_bracket",
    "spectral_norm_bracket",
    "matrix_from_json",
    "matrix_to_json",
]

# Uniform certification fudges.  2^-38 relative is orders of magnitude above
# the worst-case accumulated floating-point drift of any bound-extracting
# pipeline in this module (dims <= 64, <= 64 squaring stages, cancellation
# free nonnegative arithmetic), while staying far below the 1e-9 tolerances
# the package promises.  PAD absorbs underflow-to-zero in products.
OUT = 1.0 + 2.0**-38
IN = 1.0 - 2.0**-38
_PAD = 2.0**-1000

# Fudges for scalar interval arithmetic on brackets (single float ops).
_OP_OUT = 1.0 + 2.0**-48
_OP_IN = 1.0 - 2.0**-48

_LADDER_STAGES = 52
_SUPPORT_CLIPS = (0.0, 1e-14, 1e-12, 1e-9)


class MatrixValidationError(ValueError):
    """Raised when input data does not describe a nonnegative matrix."""


def _validated_array(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MatrixValidationError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise MatrixValidationError("matrix dimension must be >= 1")
    if not np.all(np.isfinite(a)):
        raise MatrixValidationError("matrix entries must be finite (no NaN/inf)")
    if np.any(a < 0.0):
        raise MatrixValidationError("matrix entries must be nonnegative")
    return a


class NonNegMatrix:
    """A validated square matrix with finite nonnegative float entries.

    Thin immutable wrapper over an ``ndarray``; all operations in this
    package accept either a ``NonNegMatrix`` or any array-like that passes
    validation.  Equality is exact (bitwise on entries).
    """

    __slots__ = ("data",)

    def __init__(self, data):
        a = _validated_array(np.asarray(data, dtype=float).copy())
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    def __setattr__(self, name, value):
        raise AttributeError("NonNegMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return np.asarray(self.data, dtype=dtype)
        return self.data

    def __eq__(self, other) -> bool:
        if isinstance(other, NonNegMatrix):
            other = other.data
        elif not isinstance(other, np.ndarray):
            return NotImplemented
        return self.data.shape == other.shape and bool(np.all(self.data == other))

    def __hash__(self) -> int:
        return hash((self.data.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"NonNegMatrix({self.data.tolist()!r})"

    def to_json(self) -> dict:
        return matrix_to_json(self)

    @classmethod
    def from_json(cls, obj: dict) -> "NonNegMatrix":
        return matrix_from_json(obj)


def asmatrix(m) -> NonNegMatrix:
    """Coerce an array-like (or NonNegMatrix) to a validated NonNegMatrix."""
    if isinstance(m, NonNegMatrix):
        return m
    return NonNegMatrix(m)


def _arr(m) -> np.ndarray:
    """Validated ndarray view of a matrix argument (no copy for wrappers)."""
    if isinstance(m, NonNegMatrix):
        return m.data
    return _validated_array(m)


# ---------------------------------------------------------------------------
# Brackets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bracket:
    """Certified enclosure ``lo <= value <= hi`` of a nonnegative real.

    ``loose`` marks brackets wider than the tolerance they were requested
    at; the enclosure itself still holds.  ``hi`` may be ``inf`` in
    intermediate computations, never in a returned final bracket unless no
    finite upper bound was derivable.
    """

    lo: float
    hi: float
    loose: bool = False

    def __post_init__(self):
        if not (self.lo >= 0.0 and math.isfinite(self.lo)):
            raise ValueError(f"bracket lo must be finite and >= 0, got {self.lo}")
        if math.isnan(self.hi) or self.hi < self.lo:
            raise ValueError(f"bracket needs hi >= lo, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    def overlaps(self, other: "Bracket", slack: float = 0.0) -> bool:
        return self.lo <= other.hi + slack and other.lo <= self.hi + slack

    # -- outward interval arithmetic (monotone nonnegative operands) -------

    def times(self, other: "Bracket") -> "Bracket":
        return Bracket(
            max(0.0, self.lo * other.lo * _OP_IN),
            self.hi * other.hi * _OP_OUT,
            self.loose or other.loose,
        )

    def power(self, p: float) -> "Bracket":
        """Bracket of value**p for p > 0 (monotone on nonnegatives)."""
        if p <= 0:
            raise ValueError("bracket power requires p > 0")
        return Bracket(
            max(0.0, self.lo**p * _OP_IN),
            self.hi**p * _OP_OUT if math.isfinite(self.hi) else math.inf,
            self.loose,
        )

    def scaled(self, c: float) -> "Bracket":
        if c < 0:
            raise ValueError("scale factor must be >= 0")
        return Bracket(max(0.0, self.lo * c * _OP_IN), self.hi * c * _OP_OUT, self.loose)

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "loose": self.loose}


def bracket_product(brackets: Iterable[Bracket]) -> Bracket:
    out = Bracket(1.0, 1.0)
    for b in brackets:
        out = out.times(b)
    return out


# ---------------------------------------------------------------------------
# Hadamard / pointwise operations
# ---------------------------------------------------------------------------


def hadamard_product(a, b) -> NonNegMatrix:
    """Entrywise product of two matrices of the same dimension."""
    x, y = _arr(a), _arr(b)
    if x.shape != y.shape:
        raise MatrixValidationError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return NonNegMatrix(x * y)


def hadamard_power(a, t: float) -> NonNegMatrix:
    """Entrywise power ``a_ij ** t`` for t > 0 (0**t is 0).

    Raises
    ------
    ValueError
        If ``t <= 0`` -- the convention 0**t = 0 only makes sense for
        strictly positive exponents, so these are rejected outright.
    """
    if not (t > 0):
        raise ValueError(f"hadamard_power requires t > 0, got {t}")
    return NonNegMatrix(np.power(_arr(a), float(t)))


def weighted_hadamard_mean(mats: Sequence, alphas: Sequence[float]) -> NonNegMatrix:
    """Entrywise weighted geometric mean ``prod_j a_j ** alpha_j``.

    All weights must be strictly positive; matrices must share a dimension.
    """
    if len(mats) == 0:
        raise ValueError("weighted_hadamard_mean needs at least one matrix")
    if len(mats) != len(alphas):
        raise ValueError(f"{len(mats)} matrices but {len(alphas)} weights")
    alphas = [float(w) for w in alphas]
    if any(not (w > 0) for w in alphas):
        raise ValueError("all weights must be > 0")
    arrs = [_arr(m) for m in mats]
    shape = arrs[0].shape
    if any(a.shape != shape for a in arrs):
        raise MatrixValidationError("all matrices must share one dimension")
    out = np.power(arrs[0], alphas[0])
    for a, w in zip(arrs[1:], alphas[1:]):
        out = out * np.power(a, w)
    return NonNegMatrix(out)


def mat_product(a, b) -> NonNegMatrix:
    """Ordinary matrix product."""
    x, y = _arr(a), _arr(b)
    if x.shape != y.shape:
        raise MatrixValidationError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return NonNegMatrix(x @ y)


def pointwise_leq(a, b, slack: float = 0.0) -> bool:
    """True iff ``a_ij <= b_ij + slack`` for every entry."""
    x, y = _arr(a), _arr(b)
    if x.shape != y.shape:
        raise MatrixValidationError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return bool(np.all(x <= y + slack))


def l1_norm(a) -> float:
    """Maximum column sum (the operator 1-norm); exact read of the entries."""
    return float(_arr(a).sum(axis=0).max(initial=0.0))


def linf_norm(a) -> float:
    """Maximum row sum (the operator inf-norm); exact read of the entries."""
    return float(_arr(a).sum(axis=1).max(initial=0.0))


# ---------------------------------------------------------------------------
# Batch bound kernels (shared by the scalar brackets and the set engines)
# ---------------------------------------------------------------------------


def _ladder_bounds(stack: np.ndarray, stages: int = _LADDER_STAGES):
    """Vectorized bounds ``lo <= rho(A) <= hi`` for a (N, d, d) stack.

    Upper: running min over j of certified ``||A^(2^j)||_inf ** (1/2^j)``,
    with per-stage renormalization carried in log scale.  Lower: running max
    of certified ``maxdiag(A^(2^j)) ** (1/2^j)`` (the trace ladder) --
    ``rho(A) >= max_i (A^m)_ii ** (1/m)`` for nonnegative ``A``.
    """
    stack = np.asarray(stack, dtype=float)
    n_mats, d, _ = stack.shape
    rs = stack.sum(axis=2).max(axis=1)
    zero = rs == 0.0
    c0 = np.where(zero, 1.0, rs * OUT)
    hi = np.where(zero, 0.0, rs * OUT)
    lo = stack.diagonal(axis1=1, axis2=2).max(axis=1) * IN
    lo = np.maximum(lo, 0.0)
    if stages <= 0 or bool(zero.all()):
        return lo, np.maximum(hi, lo)
    X = stack / c0[:, None, None]
    L = np.log(c0)
    with np.errstate(divide="ignore"):
        for j in range(1, stages + 1):
            X = X @ X
            norms = X.sum(axis=2).max(axis=1)
            diags = X.diagonal(axis1=1, axis2=2).max(axis=1)
            L = 2.0 * L
            inv = 1.0 / float(2**j)
            cert = norms * OUT + _PAD
            hi = np.minimum(hi, np.exp((L + np.log(cert)) * inv))
            dg = diags * IN - _PAD
            good = dg > 0.0
            if good.any():
                lo_j = np.where(good, np.exp((L + np.log(np.where(good, dg, 1.0))) * inv), 0.0)
                lo = np.maximum(lo, lo_j)
            X = X / cert[:, None, None]
            L = L + np.log(cert)
    hi = np.where(zero, 0.0, hi)
    lo = np.where(zero, 0.0, np.minimum(lo, hi))
    return lo, hi


def _support_cw_lower(stack: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Certified Collatz-Wielandt lower bounds from nonnegative test vectors.

    For each matrix A and vector x >= 0 (x != 0):
    ``min over support(x) of (A x)_i / x_i <= rho(A)``.
    """
    w = np.einsum("nij,nj->ni", stack, vecs)
    mask = vecs > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(mask, w / np.where(mask, vecs, 1.0), np.inf)
    beta = ratios.min(axis=1)
    beta = np.where(np.isfinite(beta), beta, 0.0)
    return np.maximum(beta * IN, 0.0)


def _strict_cw_bounds(stack: np.ndarray, vecs: np.ndarray):
    """(lower, upper) Collatz-Wielandt bounds from strictly positive vectors.

    Rows whose vector is not strictly positive get the trivial (0, inf).
    """
    n_mats = stack.shape[0]
    strict = (vecs > 0.0).all(axis=1)
    w = np.einsum("nij,nj->ni", stack, vecs)
    safe = np.where(vecs > 0.0, vecs, 1.0)
    ratios = w / safe
    lo = np.where(strict, ratios.min(axis=1) * IN, 0.0)
    hi = np.where(strict, ratios.max(axis=1) * OUT, np.inf)
    return np.maximum(lo, 0.0), hi


def _power_iterates(stack: np.ndarray, shift: float, iters: int, clip: float) -> np.ndarray:
    """Normalized iterates of (A + shift*maxentry*I) from the ones vector.

    ``clip`` zeroes entries below clip*max(x) after each step, steering the
    support toward a dominant class (used for lower-bound test vectors).
    """
    n_mats, d, _ = stack.shape
    shifts = shift * stack.reshape(n_mats, -1).max(axis=1)
    x = np.ones((n_mats, d))
    for _ in range(iters):
        x = np.einsum("nij,nj->ni", stack, x) + shifts[:, None] * x
        mx = x.max(axis=1)
        mx = np.where(mx > 0.0, mx, 1.0)
        x = x / mx[:, None]
        if clip > 0.0:
            x = np.where(x >= clip, x, 0.0)
    return x


def rho_bounds_batch(stack: np.ndarray, *, stages: int = 24, cw_iters: int = 24):
    """Certified (lo, hi) spectral-radius bounds for a (N, d, d) stack.

    The workhorse for set-level computations: moderate-accuracy bounds at
    vectorized cost.  For tight single-matrix brackets use
    ``spectral_radius_bracket``.
    """
    stack = np.ascontiguousarray(np.asarray(stack, dtype=float))
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError(f"expected (N, d, d) stack, got shape {stack.shape}")
    lo, hi = _ladder_bounds(stack, stages=stages)
    for shift, clip in ((1e-6, 0.0), (0.0, 1e-13)):
        vecs = _power_iterates(stack, shift, cw_iters, clip)
        nz = vecs.sum(axis=1) > 0.0
        if nz.any():
            cand = np.zeros(len(stack))
            cand[nz] = _support_cw_lower(stack[nz], vecs[nz])
            lo = np.maximum(lo, cand)
        s_lo, s_hi = _strict_cw_bounds(stack, vecs)
        lo = np.maximum(lo, s_lo)
        hi = np.minimum(hi, s_hi)
    lo = np.minimum(lo, hi)
    return lo, hi


def norm_upper_batch(stack: np.ndarray) -> np.ndarray:
    """Cheap certified upper bounds on the spectral (l2) norm of each matrix.

    min( sqrt(l1 * linf), frobenius ), pushed outward.  Exact on several
    structured cases (rank-one 0/1 patterns, constant matrices).
    """
    stack = np.asarray(stack, dtype=float)
    l1 = stack.sum(axis=1).max(axis=1)
    li = stack.sum(axis=2).max(axis=1)
    fro = np.sqrt((stack * stack).sum(axis=(1, 2)))
    return np.minimum(np.sqrt(l1 * li), fro) * OUT


def norm_bounds_batch(stack: np.ndarray, *, stages: int = 24):
    """Certified (lo, hi) spectral-norm bounds for a (N, d, d) stack.

    ``||A||^2 = rho(A^T A)``; bounds are pulled through the square root
    outward.  Lower bounds additionally use the largest entry.
    """
    stack = np.asarray(stack, dtype=float)
    gram = np.swapaxes(stack, 1, 2) @ stack
    g_lo, g_hi = rho_bounds_batch(gram, stages=stages)
    lo = np.sqrt(np.maximum(g_lo, 0.0)) * IN
    hi = np.sqrt(g_hi) * OUT
    hi = np.minimum(hi, norm_upper_batch(stack))
    lo = np.maximum(lo, stack.reshape(len(stack), -1).max(axis=1) * IN)
    return np.minimum(lo, hi), hi


# ---------------------------------------------------------------------------
# Tight scalar brackets
# ---------------------------------------------------------------------------


def _eig_candidate_vectors(a: np.ndarray) -> list[np.ndarray]:
    """Moduli of dominant eigenvectors, with progressively clipped support."""
    try:
        w, v = np.linalg.eig(a)
    except np.linalg.LinAlgError:
        return []
    order = np.argsort(-np.abs(w))
    out = []
    for k in order[: min(2, len(order))]:
        vec = np.abs(v[:, k])
        mx = vec.max()
        if mx <= 0.0 or not np.all(np.isfinite(vec)):
            continue
        for clip in _SUPPORT_CLIPS:
            clipped = np.where(vec >= clip * mx, vec, 0.0)
            if clipped.sum() > 0.0:
                out.append(clipped)
    return out


def spectral_radius_bracket(a, tol: float = 1e-9, budget: int = 10000) -> Bracket:
    """Certified bracket around the spectral radius of a nonnegative matrix.

    Parameters
    ----------
    a : array-like or NonNegMatrix
        Square matrix with finite nonnegative entries.
    tol : float
        Target width: the bracket aims for ``hi - lo <= tol * max(1, hi)``;
        if the budget runs out first the bracket is flagged ``loose`` (it is
        still a valid enclosure).
    budget : int
        Iteration budget for the test-vector refinement loops.

    Notes
    -----
    Combines (a) a repeated-squaring norm/trace ladder, (b) Collatz-Wielandt
    ratio bounds from the ones vector and its iterates (strictly positive
    vectors bound from both sides, support-restricted nonnegative vectors
    bound from below), (c) dominant-eigenvector test vectors, and (d) test
    vectors from slightly perturbed matrices ``A + eps*J`` whose strict
    positivity yields valid upper bounds for ``A`` itself.  All extracted
    numbers are pushed outward by the module fudges, so the enclosure holds
    even though the vectors themselves are approximate.
    """
    m = _arr(a)
    d = m.shape[0]
    if float(m.max(initial=0.0)) == 0.0:
        return Bracket(0.0, 0.0)

    stack = m[None, :, :]
    lo_arr, hi_arr = _ladder_bounds(stack, stages=_LADDER_STAGES)
    lo, hi = float(lo_arr[0]), float(hi_arr[0])

    def absorb(vec: np.ndarray):
        nonlocal lo, hi
        if vec.sum() <= 0.0 or not np.all(np.isfinite(vec)):
            return
        v = vec[None, :]
        lo = max(lo, float(_support_cw_lower(stack, v)[0]))
        if np.all(vec > 0.0):
            s_lo, s_hi = _strict_cw_bounds(stack, v)
            lo = max(lo, float(s_lo[0]))
            hi = min(hi, float(s_hi[0]))

    def done() -> bool:
        return hi - lo <= tol * max(1.0, hi)

    for vec in _eig_candidate_vectors(m):
        absorb(vec)
    if not done():
        # Collatz-Wielandt iteration from the ones vector on A itself.
        x = np.ones(d)
        spent = 0
        while spent < budget and not done():
            x = m @ x
            mx = float(x.max())
            if mx <= 0.0:
                break
            x = x / mx
            absorb(x)
            spent += 1
            if spent % 8 == 0:
                absorb(np.where(x >= 1e-13, x, 0.0))
    if not done():
        # Perturbed-matrix eigenvectors: strictly positive tests for upper
        # bounds that survive reducibility.
        scale = float(m.max())
        for eps in (1e-8, 1e-10, 1e-12):
            b = m + eps * scale
            for vec in _eig_candidate_vectors(b):
                if np.all(vec > 0.0):
                    absorb(vec)
            x = np.ones(d)
            for _ in range(min(200, budget)):
                x = b @ x
                mx = float(x.max())
                if mx <= 0.0:
                    break
                x = x / mx
            if x.min() > 0.0:
                absorb(x)
            if done():
                break
    lo = min(lo, hi)
    return Bracket(max(lo, 0.0), hi, loose=not done())


def spectral_norm_bracket(a, tol: float = 1e-9, budget: int = 10000) -> Bracket:
    """Certified bracket around the spectral (l2 operator) norm.

    Uses ``||A||^2 = rho(A^T A)`` with an outward square root, sharpened by
    the cheap ``sqrt(l1*linf)`` / Frobenius upper bounds and the max-entry
    lower bound.
    """
    m = _arr(a)
    inner = spectral_radius_bracket(m.T @ m, tol=tol, budget=budget)
    lo = math.sqrt(max(inner.lo, 0.0)) * IN
    hi = math.sqrt(inner.hi) * OUT
    hi = min(hi, float(norm_upper_batch(m[None])[0]))
    lo = max(lo, float(m.max(initial=0.0)) * IN)
    lo = min(lo, hi)
    return Bracket(max(lo, 0.0), hi, loose=inner.loose)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def matrix_to_json(m) -> dict:
    a = _arr(m)
    return {"dim": int(a.shape[0]), "rows": [[float(x) for x in row] for row in a]}


def matrix_from_json(obj) -> NonNegMatrix:
    """Parse ``{"dim": n, "rows": [[...], ...]}``; reject malformed input.

    Error messages name the offending field, which the CLI surfaces on
    exit code 3.
    """
    if not isinstance(obj, dict):
        raise MatrixValidationError("matrix object must be a JSON object")
    unknown = set(obj) - {"dim", "rows"}
    if unknown:
        raise MatrixValidationError(f"unknown matrix field(s): {sorted(unknown)}")
    if "dim" not in obj:
        raise MatrixValidationError("matrix field 'dim' is required")
    if "rows" not in obj:
        raise MatrixValidationError("matrix field 'rows' is required")
    dim = obj["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MatrixValidationError(f"matrix field 'dim' must be a positive integer, got {dim!r}")
    rows = obj["rows"]
    if not isinstance(rows, list) or len(rows) != dim:
        raise MatrixValidationError(f"matrix field 'rows' must be a list of {dim} rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise MatrixValidationError(f"matrix field 'rows'[{i}] must be a list of {dim} numbers")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise MatrixValidationError(f"matrix field 'rows'[{i}][{j}] must be a number")
            if not math.isfinite(float(x)) or float(x) < 0.0:
                raise MatrixValidationError(
                    f"matrix field 'rows'[{i}][{j}] must be finite and nonnegative, got {x!r}"
                )
    return NonNegMatrix(rows)
