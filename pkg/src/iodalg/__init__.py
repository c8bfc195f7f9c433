"""Block decompositions of matrix algebras over orthogonal projection families."""

from .iod import (
    FamilyMismatchError,
    IodElement,
    corner,
    decompose,
    hermitian_split,
    involution,
    iod_norm,
    is_hermitian_blockwise,
    leq,
    reconstruct,
    star_product,
    unit,
    zero,
)
from .lazy import (
    LazyBlockFamily,
    TruncationReport,
    builtin_family,
    certify_bound,
    materialize,
    truncated_norm_curve,
)
from .matrix import commutant_basis, is_psd, spectral_norm
from .models import (
    CxMnModel,
    WeightedUnitFamily,
    build_cx_mn,
    l2_bound_check,
    verify_type_In,
)
from .monotone import MonotoneNet, NotConvergedError, blockwise_sup, is_upper_bound
from .projections import (
    EquivalenceWitness,
    Projection,
    ProjectionFamily,
    equivalence_witnesses,
    family_from_partition,
    family_random,
    validate_family,
)

__version__ = "0.1.0"

__all__ = [
    "blockwise_sup",
    "build_cx_mn",
    "builtin_family",
    "certify_bound",
    "commutant_basis",
    "corner",
    "CxMnModel",
    "decompose",
    "equivalence_witnesses",
    "EquivalenceWitness",
    "family_from_partition",
    "family_random",
    "FamilyMismatchError",
    "hermitian_split",
    "involution",
    "iod_norm",
    "IodElement",
    "is_hermitian_blockwise",
    "is_psd",
    "is_upper_bound",
    "l2_bound_check",
    "LazyBlockFamily",
    "leq",
    "materialize",
    "MonotoneNet",
    "NotConvergedError",
    "Projection",
    "ProjectionFamily",
    "reconstruct",
    "spectral_norm",
    "star_product",
    "truncated_norm_curve",
    "TruncationReport",
    "unit",
    "validate_family",
    "verify_type_In",
    "WeightedUnitFamily",
    "zero",
]
