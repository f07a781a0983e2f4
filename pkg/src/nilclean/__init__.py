"""Constructive two-idempotents-plus-nilpotent decompositions over Z_m.

The package splits into the exact-arithmetic layers (residue, matrix), the
canonical-form machinery (frobenius), the constructive decompositions with
verified certificates (decompose), an independent brute-force oracle over
small finite rings (classifier), and a batch CLI (cli).
"""

from .classifier import (
    ImplicationAudit,
    MatFactor,
    PropertyReport,
    RingDescriptor,
    TruncFactor,
    ZmFactor,
    check_not_strongly_matrix_witness,
    enumerate_idempotents,
    enumerate_nilpotents,
    implication_audit,
    is_generalized_n_like,
    is_nil_clean,
    is_strongly_sit,
    is_strongly_two_nil_clean,
    is_tripotent,
    is_two_boolean,
    is_two_nil_clean,
    is_weakly_nil_clean,
    min_nilpotent_index_over_decompositions,
    parse_ring_descriptor,
)
from .decompose import (
    CaseTag,
    decompose,
    decompose_companion_gf2,
    decompose_companion_gf3,
    decompose_field_matrix,
    decompose_prime_power,
    decompose_triangular,
    decompose_trunc_poly_matrix,
    decompose_zm,
    lift_idempotent_matrix,
)
from .errors import (
    DomainError,
    InputError,
    InternalCheckError,
    NilcleanError,
    ResourceCapError,
    UnsupportedRingError,
)
from .frobenius import (
    CompanionBlock,
    FieldPoly,
    RcfResult,
    companion,
    rcf,
    verify_rcf,
)
from .matrix import (
    DecompositionCertificate,
    MatrixRing,
    RingMatrix,
    check_certificate,
    matrix_crt_recombine,
    matrix_crt_split,
    trunc_ring,
    verify_certificate,
    zm_ring,
)
from .residue import (
    ElementClassification,
    Modulus,
    TruncPolyElem,
    ZmodElem,
    classify_element,
    crt_recombine,
    crt_split,
    factorize,
    is_two_three_smooth,
    lift_idempotent_elem,
    strong_decompose_element,
    two_three_smooth_moduli,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
