"""Structured nonnegative test matrices from kernel discretization.

Midpoint-rule sampling of a positive kernel ``a(x, y)`` on the unit square
produces the matrix ``M[i, j] = a(x_i, x_j) * h`` with ``x_i = (i + 1/2) h``
and ``h = 1/grid_n``, so that ``M`` acting on grid samples mimics the
integral operator ``f -> integral of a(x, y) f(y) dy``.  The point is a
supply of reproducible, structured nonnegative matrices for the inequality
catalog; no convergence claims toward the continuum operator are made.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .setalg import OperatorSet
from .verify import _ALPHA_THRESHOLD, InstanceSpec

__all__ = ["KernelKind", "KernelSpec", "nystrom_matrix", "kernel_instance"]


class KernelKind(Enum):
    """Supported positive kernels on the unit square."""

    EXP_ABS = "exp_abs"  # exp(-c |x - y|)
    GAUSS = "gauss"  # exp(-c (x - y)^2)
    POLY = "poly"  # (1 + x y)^c
    CONST = "const"  # 1


@dataclass(frozen=True)
class KernelSpec:
    """One kernel plus its discretization grid.

    Parameters
    ----------
    kind:
        Kernel family, as a :class:`KernelKind` or its string value.
    c:
        Positive shape parameter (decay rate or polynomial degree; unused
        by the constant kernel but validated all the same).
    grid_n:
        Number of midpoint samples; the resulting matrix is
        ``grid_n x grid_n``.
    """

    kind: KernelKind
    c: float = 1.0
    grid_n: int = 8

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if not isinstance(self.c, (int, float)) or not self.c > 0:
            raise ValueError("field 'c' must be a positive number")
        object.__setattr__(self, "c", float(self.c))
        if not isinstance(self.grid_n, int) or self.grid_n < 1:
            raise ValueError("field 'grid_n' must be a positive integer")


def _kernel_values(spec: KernelSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if spec.kind is KernelKind.EXP_ABS:
        return np.exp(-spec.c * np.abs(x - y))
    if spec.kind is KernelKind.GAUSS:
        return np.exp(-spec.c * (x - y) ** 2)
    if spec.kind is KernelKind.POLY:
        return (1.0 + x * y) ** spec.c
    return np.ones(np.broadcast(x, y).shape)


def nystrom_matrix(spec: KernelSpec) -> np.ndarray:
    """Midpoint-quadrature matrix of ``spec`` on the unit interval.

    Returns the ``grid_n x grid_n`` array with entries
    ``a(x_i, x_j) / grid_n`` at midpoint nodes ``x_i = (i + 1/2)/grid_n``.
    All listed kernels are strictly positive, so every entry is positive.
    """
    h = 1.0 / spec.grid_n
    x = (np.arange(spec.grid_n) + 0.5) * h
    return _kernel_values(spec, x[:, None], x[None, :]) * h


_DEFAULT_T = 1.5
_ALPHA_SLACK = 1.25


def kernel_instance(
    specs: list[KernelSpec] | tuple[KernelSpec, ...],
    entry_id: str,
    params: dict | None = None,
) -> InstanceSpec:
    """Wrap kernel matrices into an instance for a catalog entry.

    Each kernel becomes a singleton operator set, in order.  Hypothesis
    parameters not supplied in ``params`` are filled with in-regime
    defaults: uniform weights summing to one, an exponent safely above the
    entry's threshold, ``t = 1.5``, and ``n = 1``.

    Raises ``ValueError`` when the kernels disagree on ``grid_n`` or when
    their count does not fit the entry's arity.
    """
    from . import catalog  # local import to keep module load cheap

    if not specs:
        raise ValueError("at least one kernel spec is required")
    grid = specs[0].grid_n
    for s in specs:
        if s.grid_n != grid:
            raise ValueError(
                f"grid mismatch: kernels use grid_n={grid} and grid_n={s.grid_n}"
            )
    entry = catalog.get_entry(entry_id)
    params = dict(params or {})
    nsets = len(specs)

    m = params.get("m")
    if entry.arity_kind == "fixed" and nsets != entry.fixed_arity:
        raise ValueError(
            f"entry {entry_id} takes exactly {entry.fixed_arity} sets, got {nsets}"
        )
    if entry.arity_kind == "m":
        m = m if m is not None else nsets
        if m != nsets:
            raise ValueError(f"entry {entry_id} with m={m} takes m sets, got {nsets}")
        params["m"] = m
    elif entry.arity_kind == "grid":
        m = m if m is not None else nsets
        if nsets % m:
            raise ValueError(
                f"entry {entry_id} takes k*m sets for m={m}, got {nsets}"
            )
        params["m"] = m

    if entry.uses_n:
        params.setdefault("n", 1)

    weights = None
    if "weights" in entry.requires:
        count = m if m is not None else nsets
        weights = [1.0 / count] * count
    if "alpha" in entry.requires and "alpha" not in params:
        thr = _ALPHA_THRESHOLD[entry.id](m if m is not None else nsets)
        params["alpha"] = thr * _ALPHA_SLACK
    if "t" in entry.requires and "t" not in params:
        params["t"] = _DEFAULT_T

    sets = [
        OperatorSet([nystrom_matrix(s)], name=f"K{j + 1}")
        for j, s in enumerate(specs)
    ]
    return InstanceSpec(grid, sets, weights=weights, params=params)
