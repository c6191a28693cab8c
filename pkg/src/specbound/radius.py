"""Certified brackets for generalized/joint spectral radii of matrix sets.

For a finite set of nonnegative matrices the generalized spectral radius
(sup over lengths of the best per-product spectral radius root) equals the
joint spectral radius (limit of best norm roots), so one bracket serves
both.  Lower bounds come from certified per-product spectral-radius lower
bounds on deduplicated power sets; upper bounds come from per-length norm
maxima and from a pruned tree search.

The tree search keeps, for every node (word) w, the value

    q(w) = min over nonempty prefixes v of w of  N(v)^(1/|v|),

where N is a certified upper bound on a submultiplicative norm.  A node is
pruned when q(w) <= theta.  At termination the certified upper bound is

    max(theta, max q over all never-expanded unpruned nodes),

which covers depth-capped, budget-stopped and value-merged frontiers alike:
any long word decomposes greedily into pieces each of which has a prefix
with norm root below that bound.  Merging nodes with bitwise-equal product
matrices keeps the max of their q values, which preserves the invariant
q(node) >= q(word) for every represented word.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .numat import (
    IN,
    OUT,
    Bracket,
    rho_bounds_batch,
    norm_bounds_batch,
    norm_upper_batch,
    spectral_radius_bracket,
)
from .setalg import OperatorSet, adjoint_set

__all__ = [
    "JsrConfig",
    "JsrDetail",
    "set_norm",
    "gsr_lower",
    "jsr_upper",
    "jsr_bracket",
    "bracket_report",
    "brute_force_oracle",
]

_ORACLE_CAP = 10_000_000
_LEVEL_MEMBER_CAP = 250_000
_TIGHT_NORM_CAP = 1024
_SCALAR_RHO_CAP = 64
_RHO_SELECT_CAP = 512
_DEDUP_CAP = 65_536
_REFINE_BRANCH_CAP = 256
_REFINE_DEPTH_CAP = 64
_REFINE_DEPTH_CAP_SMALL = 160
_REFINE_BEAM = 8192
_REFINE_STALL_WINDOW = 6
_REFINE_STALL_MIN_COST = 4096
_REFINE_DEEP_COST = 16384
_DOMINANCE_CAP = 65536
_DOMINANCE_PROBE = 64
_DOMINANCE_ROUNDS = 8


@dataclass(frozen=True)
class JsrConfig:
    """Tuning knobs for joint-spectral-radius computations.

    ``target_width`` is relative: the bracket aims for
    ``hi - lo <= target_width * max(1, hi)``.  ``budget_products`` caps the
    number of matrix products formed across the whole computation.
    ``max_depth`` bounds the exhaustive level enumeration; the pruned-tree
    refinement may follow individual words deeper within the same product
    budget, which only sharpens the bracket.
    """

    max_depth: int = 10
    target_width: float = 1e-3
    norm_kind: str = "l2"
    budget_products: int = 2_000_000
    refine: bool = True

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not (self.target_width > 0):
            raise ValueError("target_width must be > 0")
        if self.norm_kind not in ("l2", "l1", "linf"):
            raise ValueError(f"unknown norm_kind {self.norm_kind!r}")
        if self.budget_products < 1:
            raise ValueError("budget_products must be >= 1")


@dataclass(frozen=True)
class JsrDetail:
    """Bracket plus bookkeeping from a jsr computation."""

    bracket: Bracket
    depth_used: int
    partial: bool


def _norm_hi_fn(norm_kind: str) -> Callable[[np.ndarray], np.ndarray]:
    """Certified upper bounds for the chosen submultiplicative norm."""
    if norm_kind == "l2":
        return norm_upper_batch
    if norm_kind == "l1":
        return lambda stack: stack.sum(axis=1).max(axis=1) * OUT
    if norm_kind == "linf":
        return lambda stack: stack.sum(axis=2).max(axis=1) * OUT
    raise ValueError(f"unknown norm_kind {norm_kind!r}")


def _dedup(stack: np.ndarray) -> np.ndarray:
    n, d, _ = stack.shape
    uniq = np.unique(np.ascontiguousarray(stack.reshape(n, d * d)), axis=0)
    return uniq.reshape(-1, d, d)


def _maybe_dedup(stack: np.ndarray) -> np.ndarray:
    """Dedup when affordable; duplicates never change level maxima, they
    only inflate the next expansion, so skipping is always sound."""
    return _dedup(stack) if stack.shape[0] <= _DEDUP_CAP else stack


def _dominance_keep(flat: np.ndarray) -> np.ndarray | None:
    """Indices of rows not entrywise dominated by another row, or ``None``.

    ``None`` means the stack was too large to examine and the caller should
    keep every row.  Rows are scanned in descending entry-sum order, so a
    dominator always appears no later than what it dominates (equal sums
    with domination force equal rows, which this also deduplicates).
    Transitivity makes it irrelevant whether an in-chunk dominator itself
    survives.  The returned indices are in scan order.
    """
    n = flat.shape[0]
    if n <= 1 or n > _DOMINANCE_CAP:
        return None
    order = np.argsort(-flat.sum(axis=1), kind="stable")
    idx = order
    srt = flat[order]
    # Sweep successive blocks of the surviving prefix against all later
    # rows: most domination comes from the heaviest rows, so the first
    # sweeps do the bulk of the collapse, and a round that removes almost
    # nothing signals a stack not worth filtering further.  Rows a dropped
    # probe row dominated stay covered by whatever dropped it.
    pos = 0
    for _ in range(_DOMINANCE_ROUNDS):
        m = idx.shape[0]
        if pos >= m:
            break
        p_end = min(pos + _DOMINANCE_PROBE, m)
        probe = srt[pos:p_end]
        alive = np.ones(m, dtype=bool)
        for start in range(pos, m, 8192):
            sl = srt[start : start + 8192]
            dom = (probe[:, None, :] >= sl[None, :, :]).all(axis=2)
            if start < p_end:
                # Inside the probe block only earlier rows may drop later
                # ones, which also keeps the first copy of exact duplicates.
                width = min(p_end - start, sl.shape[0])
                dom[:, :width] &= np.triu(
                    np.ones((p_end - pos, width), dtype=bool), k=pos + 1 - start
                )
            alive[start : start + sl.shape[0]] = ~dom.any(axis=0)
        dropped = m - int(alive.sum())
        pos = int(alive[:p_end].sum())
        if dropped:
            idx, srt = idx[alive], srt[alive]
        if dropped < m // 64:
            break
    return idx


def _dominance_reduce(stack: np.ndarray) -> np.ndarray:
    """Drop members entrywise dominated by another member.

    For nonnegative sets this changes nothing computed here: 0 <= A <= B
    entrywise gives rho(A) <= rho(B) and ||A|| <= ||B|| for every monotone
    norm, and matrix products are entrywise monotone in each factor, so any
    product through a dominated member is itself dominated by the product
    through its dominator.  Member maxima, per-level norm maxima and both
    radius bounds are unchanged while the branching factor can collapse
    dramatically (Hadamard means with weight sums above one especially).
    """
    n = stack.shape[0]
    d = stack.shape[1]
    keep = _dominance_keep(stack.reshape(n, d * d)) if n > 1 else None
    if keep is None or keep.shape[0] == n:
        return stack
    return np.ascontiguousarray(stack[keep])


def _level_rho_lower(level: np.ndarray, floor: float) -> tuple[float, np.ndarray | None]:
    """Certified max spectral-radius lower bound over a level stack.

    Large stacks are pre-filtered by the cheap norm upper bound: since
    ``rho(A) <= ||A||``, members whose norm bound falls below ``floor``
    cannot raise the maximum, and among the rest only the strongest
    candidates are examined.  Dropping candidates can only weaken a lower
    bound, never falsify it.  Also returns the member attaining the bound
    (a witness product, used to seed diagonal-similarity scalings).
    """
    cand = level
    if cand.shape[0] > _RHO_SELECT_CAP:
        ub = norm_upper_batch(cand)
        if floor > 0.0:
            keep = ub >= floor * IN
            if not keep.any():
                return 0.0, None
            cand, ub = cand[keep], ub[keep]
        if cand.shape[0] > _RHO_SELECT_CAP:
            idx = np.argpartition(-ub, _RHO_SELECT_CAP - 1)[:_RHO_SELECT_CAP]
            cand = cand[idx]
    rlo, _ = rho_bounds_batch(cand, stages=12, cw_iters=12)
    i = int(rlo.argmax())
    return float(rlo[i]), cand[i]


def _scc_blocks(stack: np.ndarray) -> list[np.ndarray]:
    """Strongly connected components of the union support graph.

    Index sets come back in a topological-compatible order; a family whose
    union support is reducible is simultaneously block-triangularizable on
    these coordinate blocks.
    """
    d = stack.shape[1]
    adj = (stack > 0.0).any(axis=0) | np.eye(d, dtype=bool)
    reach = adj.astype(np.uint8)
    for _ in range(max(1, d.bit_length())):
        reach = np.minimum(reach @ reach, 1)
    mutual = (reach > 0) & (reach.T > 0)
    _, labels = np.unique(mutual, axis=0, return_inverse=True)
    return [np.where(labels == lab)[0] for lab in np.unique(labels)]


def _perron_vector(mat: np.ndarray) -> np.ndarray | None:
    vals, vecs = np.linalg.eig(mat)
    v = np.abs(vecs[:, int(np.abs(vals).argmax())].real)
    if np.all(v > 0.0) and np.all(np.isfinite(v)):
        return v
    return None


def _similarity_hi(stack: np.ndarray, witness: np.ndarray | None) -> float:
    """Upper bound via diagonal similarity scaling.

    For any positive diagonal D the joint spectral radius is invariant
    under ``A -> D^-1 A D`` and bounded by the max scaled row-sum norm, so
    every candidate vector yields a certified bound; only its quality
    depends on the choice.  Candidates: Perron vectors of a witness product
    attaining the current lower bound (regularized towards positivity) and
    of the member sum.  This certifies exactly the instances where the
    radius is attained by a single cycle, which brackets cannot otherwise
    separate from an equal neighbor.
    """
    d = stack.shape[1]
    ones = np.ones((d, d))
    cands = []
    if witness is not None and witness.max() > 0.0:
        for delta in (0.0, 1e-9, 1e-4):
            cands.append(_perron_vector(witness + delta * witness.max() * ones))
    total = stack.sum(axis=0)
    if total.max() > 0.0:
        cands.append(_perron_vector(total + 1e-12 * total.max() * ones))
    best = math.inf
    for v in cands:
        if v is None:
            continue
        scaled = stack * (v[None, None, :] / v[None, :, None])
        bound = float(scaled.sum(axis=2).max(axis=1).max())
        if math.isfinite(bound):
            best = min(best, bound * OUT)
    return best


def set_norm(psi: OperatorSet, tol: float = 1e-9) -> Bracket:
    """Certified bracket for the set norm: the max member spectral norm."""
    stack = _dominance_reduce(psi.mats)
    stages = 40 if stack.shape[0] <= 2048 else 16
    lo, hi = norm_bounds_batch(stack, stages=stages)
    i = int(np.argmax(hi))
    bracket_hi = float(hi[i])
    bracket_lo = float(lo.max())
    loose = bracket_hi - bracket_lo > tol * max(1.0, bracket_hi)
    return Bracket(min(bracket_lo, bracket_hi), bracket_hi, loose=loose)


def gsr_lower(
    sigma: OperatorSet,
    depth: int = 10,
    budget_products: int = 2_000_000,
) -> float:
    """Certified lower bound: best per-product radius root up to ``depth``.

    Enumerates deduplicated power sets level by level and keeps the running
    max of (certified spectral-radius lower bound)^(1/m).  Stops early when
    the product budget runs out; the value computed so far is still valid.
    """
    value, _, _ = _gsr_lower_detail(sigma, depth, budget_products)
    return value


def _gsr_lower_detail(sigma: OperatorSet, depth: int, budget_products: int):
    base = _dominance_reduce(sigma.mats)
    level = base
    spent = 0
    best = 0.0
    depth_used = 0
    partial = False
    for m in range(1, depth + 1):
        if m > 1:
            cost = level.shape[0] * base.shape[0]
            if spent + cost > budget_products or cost > _LEVEL_MEMBER_CAP * base.shape[0]:
                partial = True
                break
            spent += cost
            level = _dominance_reduce(
                _maybe_dedup(
                    np.einsum("aij,bjk->abik", level, base).reshape(-1, sigma.dim, sigma.dim)
                )
            )
        rlo, _ = _level_rho_lower(level, best**m if best > 0.0 else 0.0)
        if rlo > 0.0:
            best = max(best, rlo ** (1.0 / m) * IN)
        depth_used = m
    return max(best, 0.0), depth_used, partial


def jsr_upper(sigma: OperatorSet, cfg: JsrConfig | None = None, lower: float | None = None) -> float:
    """Certified upper bound on the joint spectral radius.

    Min over lengths m of (max certified member norm at level m)^(1/m); if
    ``cfg.refine`` a pruned tree search sharpens it using ``lower`` (or a
    freshly computed lower bound) as the pruning threshold.
    """
    detail = _jsr_detail(sigma, cfg or JsrConfig(), lower_hint=lower, need_lower=lower is None)
    return detail.bracket.hi


def jsr_bracket(sigma: OperatorSet, cfg: JsrConfig | None = None) -> Bracket:
    """Certified two-sided bracket for the joint spectral radius."""
    return jsr_detail(sigma, cfg).bracket


def jsr_detail(sigma: OperatorSet, cfg: JsrConfig | None = None) -> JsrDetail:
    """Bracket plus depth/partial bookkeeping (see ``jsr_bracket``)."""
    return _jsr_detail(sigma, cfg or JsrConfig(), lower_hint=None, need_lower=True)


def bracket_report(detail: JsrDetail) -> dict:
    """Serialization of a jsr computation."""
    return {
        "lo": detail.bracket.lo,
        "hi": detail.bracket.hi,
        "partial": detail.partial,
        "depth_used": detail.depth_used,
    }


def _jsr_detail(
    sigma: OperatorSet,
    cfg: JsrConfig,
    lower_hint: float | None,
    need_lower: bool,
) -> JsrDetail:
    base = _dominance_reduce(sigma.mats)
    if base.shape[0] == 1:
        # A singleton's joint spectral radius is its spectral radius, and a
        # set dominated by one member inherits that member's value exactly.
        b = spectral_radius_bracket(base[0], tol=min(1e-9, cfg.target_width))
        return JsrDetail(b, depth_used=1, partial=False)

    blocks = _scc_blocks(base)
    if len(blocks) > 1:
        # The family is simultaneously block-triangular on the components of
        # its union support graph, so product spectra are exactly the unions
        # of the diagonal-block product spectra; with the generalized equal
        # to the joint spectral radius this gives the blockwise max exactly.
        details = [
            _jsr_detail(
                OperatorSet._from_stack(np.ascontiguousarray(base[:, idx[:, None], idx[None, :]])),
                cfg,
                lower_hint=None,
                need_lower=need_lower or lower_hint is None,
            )
            for idx in blocks
        ]
        bracket = Bracket(
            max(dtl.bracket.lo for dtl in details),
            max(dtl.bracket.hi for dtl in details),
        )
        return JsrDetail(
            bracket,
            depth_used=max(dtl.depth_used for dtl in details),
            partial=any(dtl.partial for dtl in details),
        )

    scale = float(norm_upper_batch(base).max())
    if scale == 0.0:
        return JsrDetail(Bracket(0.0, 0.0), depth_used=1, partial=False)
    scaled = base / scale
    norm_hi = _norm_hi_fn(cfg.norm_kind)
    witness: np.ndarray | None = None

    lo = 0.0 if lower_hint is None else lower_hint / scale
    hi = math.inf
    spent = 0
    depth_used = 0
    partial = False

    def width_ok() -> bool:
        return math.isfinite(hi) and hi - lo <= cfg.target_width * max(1.0, hi)

    level = scaled
    for m in range(1, cfg.max_depth + 1):
        if m > 1:
            cost = level.shape[0] * scaled.shape[0]
            if spent + cost > cfg.budget_products or level.shape[0] > _LEVEL_MEMBER_CAP:
                partial = True
                break
            spent += cost
            level = _dominance_reduce(
                _maybe_dedup(
                    np.einsum("aij,bjk->abik", level, scaled).reshape(-1, sigma.dim, sigma.dim)
                )
            )
        # Depth 1 carries the whole bracket when the set norm is attained by a
        # member radius (e.g. Gram sets), so spend extra effort there: tight
        # member norms instead of the cheap closed-form upper, and per-member
        # scalar radius brackets instead of the batched lower.
        if m == 1 and level.shape[0] <= _TIGHT_NORM_CAP:
            hi = min(hi, float(norm_bounds_batch(level, stages=32)[1].max()) * OUT)
        else:
            hi = min(hi, float(norm_hi(level).max()) ** (1.0 / m) * OUT)
        if need_lower or lower_hint is None:
            if m == 1 and level.shape[0] <= _SCALAR_RHO_CAP:
                lows = [spectral_radius_bracket(a).lo for a in level]
                j = int(np.argmax(lows))
                if lows[j] > lo:
                    lo, witness = lows[j], level[j]
            else:
                rlo, wit = _level_rho_lower(level, lo**m if lo > 0.0 else 0.0)
                if rlo > 0.0 and rlo ** (1.0 / m) * IN > lo:
                    lo = rlo ** (1.0 / m) * IN
                    witness = wit
        depth_used = m
        if width_ok():
            break

    if not width_ok():
        hi = min(hi, _similarity_hi(scaled, witness))
        lo = min(lo, hi)

    if (
        cfg.refine
        and not width_ok()
        and lo > 0.0
        and spent < cfg.budget_products
        and scaled.shape[0] <= _REFINE_BRANCH_CAP
    ):
        lo, hi, witness = _gripenberg_refine(
            scaled,
            norm_hi,
            lo,
            hi,
            cfg.target_width,
            cfg.budget_products - spent,
            witness,
            level,
            depth_used,
            norm_hi(level) ** (1.0 / depth_used) * OUT,
        )
        if not width_ok():
            hi = min(hi, _similarity_hi(scaled, witness))

    lo = min(lo, hi)
    loose = not (math.isfinite(hi) and hi - lo <= cfg.target_width * max(1.0, hi))
    bracket = Bracket(max(lo, 0.0) * scale * IN, hi * scale * OUT, loose=loose)
    return JsrDetail(bracket, depth_used=depth_used, partial=partial)


def _gripenberg_refine(
    scaled: np.ndarray,
    norm_hi: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    target_width: float,
    budget: int,
    witness: np.ndarray | None,
    frontier: np.ndarray,
    depth: int,
    q: np.ndarray,
) -> tuple[float, float, np.ndarray | None]:
    """Pruned word-tree refinement of both bounds, in scaled coordinates.

    At any point the certified upper bound is max(theta, max q over
    unpruned never-expanded nodes, max q over beam-dropped nodes) — see the
    module docstring.  The pruning threshold theta rises as deeper products
    improve the lower bound; since a node pruned against an earlier, smaller
    theta is also below the final theta, raising it keeps the bound valid.

    The tree is rooted at the exhaustive enumeration's final level
    (``frontier`` at word length ``depth`` with certified norm roots ``q``),
    which is complete up to exact deduplication and dominance, so every
    longer word still runs through a frontier node.  Continuing from there
    preserves the collapse those reductions achieved instead of re-growing
    the tree from single letters.
    """
    b, d = scaled.shape[0], scaled.shape[1]
    # Keep each expansion affordable even for wide alphabets: the beam
    # shrinks so that roughly eight more depths fit in the budget.
    beam = int(min(_REFINE_BEAM, max(256, budget // (8 * b))))
    spent = 0
    dropped_hi = 0.0
    if frontier.shape[0] > beam:
        idx = np.argpartition(-q, beam - 1)
        kept, rest = idx[:beam], idx[beam:]
        dropped_hi = float(q[rest].max())
        frontier, q = frontier[kept], q[kept]
    recent_widths: deque[float] = deque(maxlen=_REFINE_STALL_WINDOW + 1)
    while True:
        rlo, wit = _level_rho_lower(frontier, lo**depth if lo > 0.0 else 0.0)
        if rlo > 0.0 and rlo ** (1.0 / depth) * IN > lo:
            lo = rlo ** (1.0 / depth) * IN
            witness = wit
        theta = lo * (1.0 + 0.5 * target_width)
        keep = q > theta
        frontier, q = frontier[keep], q[keep]
        if not frontier.shape[0]:
            return lo, min(hi, max(theta * OUT, dropped_hi)), witness
        hi = min(hi, max(theta, float(q.max()), dropped_hi))
        lo = min(lo, hi)
        width = hi - lo
        if width <= target_width * max(1.0, hi):
            return lo, hi, witness
        recent_widths.append(width)
        cost = frontier.shape[0] * b
        if (
            len(recent_widths) > _REFINE_STALL_WINDOW
            and recent_widths[0] - width < 0.02 * recent_widths[0]
            and cost > _REFINE_STALL_MIN_COST
        ):
            return lo, hi, witness
        # Slowly converging brackets shrink like C^(1/depth); cheap frontiers
        # make extra depth nearly free, so allow much more of it.
        depth_cap = (
            _REFINE_DEPTH_CAP_SMALL if cost <= _REFINE_DEEP_COST else _REFINE_DEPTH_CAP
        )
        if depth >= depth_cap or spent + cost > budget:
            return lo, hi, witness
        spent += cost
        children = np.einsum("aij,bjk->abik", frontier, scaled).reshape(-1, d, d)
        depth += 1
        child_q = np.minimum(
            np.repeat(q, b), norm_hi(children) ** (1.0 / depth) * OUT
        )
        if child_q.shape[0] > beam:
            # Keep the highest-q nodes; the rest are never expanded, so the
            # upper bound must stay at or above the best q they carried.
            idx = np.argpartition(-child_q, beam - 1)
            kept, rest = idx[:beam], idx[beam:]
            dropped_hi = max(dropped_hi, float(child_q[rest].max()))
            children, child_q = children[kept], child_q[kept]
        # Merge bitwise-equal products, keeping the max q (sound: q only grows).
        flat = np.ascontiguousarray(children.reshape(-1, d * d))
        uniq, inverse = np.unique(flat, axis=0, return_inverse=True)
        merged_q = np.zeros(uniq.shape[0])
        np.maximum.at(merged_q, inverse, child_q)
        # Dominated nodes need no bookkeeping at all: every word through one
        # is entrywise below the same word through its dominator, so the
        # bound that ends up covering the dominator's subtree covers it too.
        keep = _dominance_keep(uniq)
        if keep is not None:
            uniq, merged_q = uniq[keep], merged_q[keep]
        frontier = uniq.reshape(-1, d, d)
        q = merged_q


# ---------------------------------------------------------------------------
# Brute-force oracle (tests only)
# ---------------------------------------------------------------------------


def brute_force_oracle(sigma: OperatorSet, depth: int = 6) -> Bracket:
    """Plain-float enumeration estimate of the joint spectral radius.

    Enumerates every product up to ``depth`` with no deduplication and no
    pruning (capped at 10^7 products), taking the best spectral-radius root
    as the lower estimate and the best per-length max-norm root as the upper
    estimate.  Uses numpy's eigenvalues/SVD directly with no certification;
    intended as an independent cross-check in tests, not for production use.
    """
    base = sigma.mats
    k = base.shape[0]
    total = sum(k**m for m in range(1, depth + 1))
    if total > _ORACLE_CAP:
        raise ValueError(f"oracle would form {total} products (cap {_ORACLE_CAP})")
    level = base.copy()
    lo = 0.0
    hi = math.inf
    for m in range(1, depth + 1):
        if m > 1:
            level = np.einsum("aij,bjk->abik", level, base).reshape(-1, sigma.dim, sigma.dim)
        radii = np.abs(np.linalg.eigvals(level)).max(axis=1)
        norms = np.linalg.norm(level, ord=2, axis=(1, 2))
        lo = max(lo, float(radii.max()) ** (1.0 / m))
        hi = min(hi, float(norms.max()) ** (1.0 / m))
    return Bracket(lo, max(lo, hi))


def adjoint_invariant_pair(sigma: OperatorSet, cfg: JsrConfig | None = None):
    """Convenience for tests: brackets of a set and of its adjoint set."""
    return jsr_bracket(sigma, cfg), jsr_bracket(adjoint_set(sigma), cfg)
