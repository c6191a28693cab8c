"""Certified brackets for spectral quantities of nonnegative matrix sets,
plus a verdict engine for a catalog of entrywise-product inequality chains.

The package computes rigorous numeric enclosures (brackets) for the
spectral radius, operator norm, generalized spectral radius and joint
spectral radius of finite sets of nonnegative matrices, and uses them to
confirm — or certify violations of — the inequality chains registered in
:mod:`specbound.catalog` on concrete instances.
"""

from __future__ import annotations

from .numat import (
    Bracket,
    MatrixValidationError,
    NonNegMatrix,
    asmatrix,
    hadamard_power,
    hadamard_product,
    mat_product,
    pointwise_leq,
    spectral_norm_bracket,
    spectral_radius_bracket,
    weighted_hadamard_mean,
)
from .setalg import (
    OperatorSet,
    Permutation,
    Word,
    adjoint_set,
    build_construction,
    evaluate_word,
    even_star_base,
    odd_star_base,
    set_hadamard_mean,
    set_power,
    set_product,
)
from .radius import (
    JsrConfig,
    JsrDetail,
    brute_force_oracle,
    gsr_lower,
    jsr_bracket,
    jsr_detail,
    set_norm,
)
from .catalog import (
    CatalogEntry,
    applicability_check,
    canonical_key,
    entry_chains,
    entry_ids,
    evaluate_expression,
    format_entry_line,
    get_entry,
)
from .verify import (
    FuzzGen,
    InstanceSpec,
    NotApplicableError,
    Verdict,
    check_instance,
    example_ids,
    fuzz_campaign,
    instance_digest,
    paper_example,
)
from .kerngen import KernelKind, KernelSpec, kernel_instance, nystrom_matrix

__version__ = "0.1.0"

__all__ = [
    "Bracket",
    "CatalogEntry",
    "FuzzGen",
    "InstanceSpec",
    "JsrConfig",
    "JsrDetail",
    "KernelKind",
    "KernelSpec",
    "MatrixValidationError",
    "NonNegMatrix",
    "NotApplicableError",
    "OperatorSet",
    "Permutation",
    "Verdict",
    "Word",
    "adjoint_set",
    "applicability_check",
    "asmatrix",
    "brute_force_oracle",
    "build_construction",
    "canonical_key",
    "check_instance",
    "entry_chains",
    "entry_ids",
    "evaluate_expression",
    "evaluate_word",
    "even_star_base",
    "example_ids",
    "format_entry_line",
    "fuzz_campaign",
    "get_entry",
    "gsr_lower",
    "hadamard_power",
    "hadamard_product",
    "instance_digest",
    "jsr_bracket",
    "jsr_detail",
    "kernel_instance",
    "mat_product",
    "nystrom_matrix",
    "odd_star_base",
    "paper_example",
    "pointwise_leq",
    "set_hadamard_mean",
    "set_norm",
    "set_power",
    "set_product",
    "spectral_norm_bracket",
    "spectral_radius_bracket",
    "weighted_hadamard_mean",
]
