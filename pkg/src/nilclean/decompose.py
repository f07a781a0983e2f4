"""Constructive idempotent + idempotent + nilpotent decompositions.

Pipeline: companion blocks over GF(2)/GF(3) are decomposed by closed-form
templates keyed on the block's bottom-right entry (the trace of a companion
matrix); whole field matrices reduce to companion blocks through the
Frobenius form; Z_{p^e} lifts the field solution through the nilpotent kernel
by the cubic idempotent iteration; composite 2-3-smooth moduli recombine the
prime-power solutions entrywise by the CRT.  Triangular and truncated
polynomial variants reuse the same machinery on the diagonal and on the
constant term respectively.

Every certificate-producing operation re-verifies its output before returning
and raises InternalCheckError on failure: a wrong certificate is a bug here,
never a value.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import DomainError, InputError, InternalCheckError, UnsupportedRingError
from .frobenius import CompanionBlock, rcf
from .matrix import (
    DecompositionCertificate,
    MatrixRing,
    RingMatrix,
    _dtype_for,
    matrix_crt_recombine,
    matrix_crt_split,
    verify_certificate,
    zm_ring,
)
from .residue import (
    ZmodElem,
    factorize,
    lift_iteration_cap,
    require_two_three_smooth,
    strong_decompose_element,
)


class CaseTag(enum.Enum):
    """Which closed-form template handled a companion block.

    The split keys on the field and on the block's bottom-right entry c_{n-1}
    (the trace of a companion matrix); the trace-zero templates additionally
    depend on the block size.
    """

    GF3_TRACE_ONE = "gf3:trace-one"
    GF3_TRACE_MINUS_ONE = "gf3:trace-minus-one"
    GF3_TRACE_ZERO_DIM1 = "gf3:trace-zero-dim1"
    GF3_TRACE_ZERO_DIM2 = "gf3:trace-zero-dim2"
    GF3_TRACE_ZERO_BIG = "gf3:trace-zero-big"
    GF2_TRACE_ONE = "gf2:trace-one"
    GF2_TRACE_ZERO = "gf2:trace-zero"


def _shift_matrix(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(1, n):
        out[i, i - 1] = 1
    return out


def _last_column_matrix(col, n: int, p: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=np.int64)
    for i, c in enumerate(col):
        out[i, n - 1] = c % p
    return out


def _companion_triple_gf3(last_col: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray, np.ndarray, CaseTag]:
    """Template decomposition of the GF(3) companion matrix with the given
    last column; returns raw (E, F, W) arrays and the case tag."""
    n = len(last_col)
    trace = last_col[-1] % 3
    if trace == 1:
        e = _last_column_matrix(last_col, n, 3)
        f = np.zeros((n, n), dtype=np.int64)
        return e, f, _shift_matrix(n), CaseTag.GF3_TRACE_ONE
    if trace == 2:
        # M with last column (c_0..c_{n-2}, -1) satisfies M^2 = -M, so -M is
        # idempotent and (-M) + (-M) = -2M = M restores the column.
        neg = tuple(-c % 3 for c in last_col[:-1]) + (1,)
        e = _last_column_matrix(neg, n, 3)
        return e, e.copy(), _shift_matrix(n), CaseTag.GF3_TRACE_MINUS_ONE
    if n == 1:
        z = np.zeros((1, 1), dtype=np.int64)
        return z, z.copy(), z.copy(), CaseTag.GF3_TRACE_ZERO_DIM1
    if n == 2:
        e = np.eye(2, dtype=np.int64)
        f = np.array([[2, 1], [1, 2]], dtype=np.int64)
        w = np.array([[0, (last_col[0] - 1) % 3], [0, 0]], dtype=np.int64)
        return e, f, w, CaseTag.GF3_TRACE_ZERO_DIM2
    # n >= 3: two idempotents supported on the bottom-right 3x3 corner plus a
    # nilpotent carrying the shortened shift and the adjusted last column.
    e = np.zeros((n, n), dtype=np.int64)
    e[n - 2, n - 2] = 1
    e[n - 1, n - 3] = 1
    e[n - 1, n - 1] = 1
    f = np.zeros((n, n), dtype=np.int64)
    f[n - 2, n - 3], f[n - 2, n - 2], f[n - 2, n - 1] = 1, 2, 1
    f[n - 1, n - 3], f[n - 1, n - 2], f[n - 1, n - 1] = 2, 1, 2
    w = np.zeros((n, n), dtype=np.int64)
    for i in range(1, n - 2):
        w[i, i - 1] = 1
    for i in range(n - 3):
        w[i, n - 1] = last_col[i] % 3
    w[n - 3, n - 1] = last_col[n - 3] % 3
    w[n - 2, n - 1] = (last_col[n - 2] - 1) % 3
    return e, f, w, CaseTag.GF3_TRACE_ZERO_BIG


def _companion_triple_gf2(last_col: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray, np.ndarray, CaseTag]:
    """Template decomposition of the GF(2) companion matrix: a column whose
    bottom entry is 1 is idempotent; a trace-zero block sheds a corner unit
    idempotent, after which the remainder has bottom entry 1 again."""
    n = len(last_col)
    trace = last_col[-1] % 2
    if trace == 1:
        e = _last_column_matrix(last_col, n, 2)
        f = np.zeros((n, n), dtype=np.int64)
        return e, f, _shift_matrix(n), CaseTag.GF2_TRACE_ONE
    if n == 1:
        z = np.zeros((1, 1), dtype=np.int64)
        return z, z.copy(), z.copy(), CaseTag.GF2_TRACE_ZERO
    e = np.zeros((n, n), dtype=np.int64)
    e[n - 1, n - 1] = 1
    rem_col = tuple(c % 2 for c in last_col[:-1]) + (1,)
    f = _last_column_matrix(rem_col, n, 2)
    return e, f, _shift_matrix(n), CaseTag.GF2_TRACE_ZERO


def _companion_triple(p: int, last_col: tuple[int, ...]):
    if p == 3:
        return _companion_triple_gf3(last_col)
    if p == 2:
        return _companion_triple_gf2(last_col)
    raise UnsupportedRingError(
        f"no companion decomposition over GF({p}); only GF(2) and GF(3) matrix "
        f"rings admit two-idempotents-plus-nilpotent decompositions"
    )


def _tag_string(tag: CaseTag, degree: int) -> str:
    return f"{tag.value}:n{degree}"


def decompose_companion_gf3(block: CompanionBlock) -> tuple[RingMatrix, RingMatrix, RingMatrix, CaseTag]:
    """Decompose a GF(3) companion block as E + F + W."""
    if block.poly.p != 3:
        raise InputError("decompose_companion_gf3 expects a GF(3) block")
    ring = zm_ring(3)
    e, f, w, tag = _companion_triple_gf3(block.last_column)
    return (
        RingMatrix(ring, e[None]),
        RingMatrix(ring, f[None]),
        RingMatrix(ring, w[None]),
        tag,
    )


def decompose_companion_gf2(block: CompanionBlock) -> tuple[RingMatrix, RingMatrix, RingMatrix, CaseTag]:
    """Decompose a GF(2) companion block as E + F + W."""
    if block.poly.p != 2:
        raise InputError("decompose_companion_gf2 expects a GF(2) block")
    ring = zm_ring(2)
    e, f, w, tag = _companion_triple_gf2(block.last_column)
    return (
        RingMatrix(ring, e[None]),
        RingMatrix(ring, f[None]),
        RingMatrix(ring, w[None]),
        tag,
    )


def _certify(a: RingMatrix, e: RingMatrix, f: RingMatrix, w: RingMatrix,
             tags: tuple[str, ...]) -> DecompositionCertificate:
    k = w.nilpotency_exponent()
    if k is None:
        raise InternalCheckError("constructed W is not nilpotent")
    cert = DecompositionCertificate(a, e, f, w, k, tags)
    if not verify_certificate(cert):
        raise InternalCheckError(f"certificate failed self-check: {cert.failure}")
    return cert


def decompose_field_matrix(a: RingMatrix) -> DecompositionCertificate:
    """Decompose any matrix over GF(2) or GF(3) through its Frobenius form."""
    if not a.ring.is_prime_field() or a.ring.m not in (2, 3):
        raise UnsupportedRingError(
            f"decompose_field_matrix supports GF(2) and GF(3), not {a.ring.describe()}"
        )
    p = a.ring.m
    n = a.n
    form = rcf(a)
    e_big = np.zeros((n, n), dtype=np.int64)
    f_big = np.zeros((n, n), dtype=np.int64)
    w_big = np.zeros((n, n), dtype=np.int64)
    tags = []
    at = 0
    for block in form.blocks:
        d = block.degree
        eb, fb, wb, tag = _companion_triple(p, block.last_column)
        e_big[at : at + d, at : at + d] = eb
        f_big[at : at + d, at : at + d] = fb
        w_big[at : at + d, at : at + d] = wb
        tags.append(_tag_string(tag, d))
        at += d
    t, t_inv = form.transform, form.transform_inv
    def conj(x: np.ndarray) -> RingMatrix:
        return RingMatrix(a.ring, t_inv.coeffs[0].dot(x).dot(t.coeffs[0])[None] % p)
    return _certify(a, conj(e_big), conj(f_big), conj(w_big), tuple(tags))


def _embed(mat: RingMatrix, ring: MatrixRing) -> RingMatrix:
    """Reinterpret canonical entries in a larger ring (same dimension)."""
    out = np.zeros((ring.d, mat.n, mat.n), dtype=_dtype_for(ring, mat.n))
    out[: mat.ring.d] = mat.coeffs % ring.m
    return RingMatrix(ring, out)


def lift_idempotent_matrix(x: RingMatrix) -> RingMatrix:
    """Lift a residually idempotent matrix to an exact idempotent.

    Requires the image of x in M_n(GF(p)) to be idempotent for every prime
    p | m (all iterates then stay congruent to x there); iterates
    x <- 3x^2 - 2x^3, whose idempotency defect lies in the square of the ideal
    generated by the previous defect, so convergence is doubly exponential.
    """
    ring = x.ring
    for p in ring.modulus.primes:
        img = x.residue_field_image(p)
        if ((img.dot(img) - img) % p).any():
            raise DomainError(
                f"matrix is not idempotent modulo {p}; the cubic iteration "
                f"would not converge to a lift of it"
            )
    cap = lift_iteration_cap(ring.radical_exponent())
    y = x
    for _ in range(cap + 1):
        y2 = y @ y
        if y2 == y:
            return y
        y = 3 * y2 - 2 * (y2 @ y)
    raise InternalCheckError("idempotent lifting exceeded its iteration cap")


def decompose_prime_power(a: RingMatrix) -> DecompositionCertificate:
    """Decompose over Z_{p^e} (p in {2, 3}): solve over GF(p), lift both
    idempotents, absorb the difference into W (nilpotent because the
    reduction kernel is)."""
    ring = a.ring
    if ring.d != 1 or len(ring.modulus.factors) != 1:
        raise InputError("decompose_prime_power expects a prime-power modulus")
    p, e = ring.modulus.factors[0]
    if p not in (2, 3):
        raise UnsupportedRingError(f"unsupported prime {p}; only 2 and 3 work")
    if e == 1:
        return decompose_field_matrix(a)
    base = decompose_field_matrix(a.reduce_mod_prime(p))
    lifted_e = lift_idempotent_matrix(_embed(base.e, ring))
    lifted_f = lift_idempotent_matrix(_embed(base.f, ring))
    w = a - lifted_e - lifted_f
    return _certify(a, lifted_e, lifted_f, w, base.case_tags)


def decompose_zm(a: RingMatrix) -> DecompositionCertificate:
    """Decompose over Z_m for any 2-3-smooth m, by CRT to the prime powers."""
    ring = a.ring
    if ring.d != 1:
        raise InputError("decompose_zm expects a plain Z_m matrix")
    require_two_three_smooth(ring.modulus)
    factors = ring.modulus.factors
    if len(factors) == 1:
        return decompose_prime_power(a)
    (p1, e1), (p2, e2) = factors
    m1 = factorize(p1**e1)
    m2 = factorize(p2**e2)
    a1, a2 = matrix_crt_split(a, m1, m2)
    c1 = decompose_prime_power(a1)
    c2 = decompose_prime_power(a2)
    e = matrix_crt_recombine(c1.e, c2.e)
    f = matrix_crt_recombine(c1.f, c2.f)
    w = matrix_crt_recombine(c1.w, c2.w)
    return _certify(a, e, f, w, c1.case_tags + c2.case_tags)


def decompose_triangular(t: RingMatrix) -> DecompositionCertificate:
    """Decompose an upper-triangular matrix over 2-3-smooth Z_m entirely inside
    the triangular ring: diagonal entries split elementwise, the strict upper
    part rides along in W (whose diagonal is nilpotent, so W is)."""
    ring = t.ring
    if ring.d != 1:
        raise InputError("decompose_triangular expects a plain Z_m matrix")
    if not t.is_upper_triangular():
        raise InputError("matrix is not upper triangular")
    require_two_three_smooth(ring.modulus)
    mod = ring.modulus
    n = t.n
    e = RingMatrix.zeros(n, ring)
    f = RingMatrix.zeros(n, ring)
    for i in range(n):
        ei, fi, _ = strong_decompose_element(ZmodElem(int(t.coeffs[0, i, i]), mod))
        e.coeffs[0, i, i] = ei.residue
        f.coeffs[0, i, i] = fi.residue
    w = t - e - f
    cert = _certify(t, e, f, w, ())
    if not (e.is_upper_triangular() and f.is_upper_triangular() and w.is_upper_triangular()):
        raise InternalCheckError("triangular decomposition left the triangular ring")
    return cert


def decompose_trunc_poly_matrix(a: RingMatrix) -> DecompositionCertificate:
    """Decompose over Z_m[x]/(x^d): solve the constant term over Z_m, lift the
    idempotents through the ideal (x) (constants are already fixed points of
    the lifting iteration), and put every higher coefficient into W."""
    ring = a.ring
    require_two_three_smooth(ring.modulus)
    if ring.d == 1:
        return decompose_zm(a)
    const = RingMatrix(zm_ring(ring.m), a.coeffs[:1].copy())
    base = decompose_zm(const)
    e = lift_idempotent_matrix(_embed(base.e, ring))
    f = lift_idempotent_matrix(_embed(base.f, ring))
    w = a - e - f
    return _certify(a, e, f, w, base.case_tags)


def decompose(a: RingMatrix) -> DecompositionCertificate:
    """Dispatch on the entry ring: Z_m or a truncated polynomial extension."""
    if a.ring.d == 1:
        return decompose_zm(a)
    return decompose_trunc_poly_matrix(a)
