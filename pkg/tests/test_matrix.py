"""Dense matrices over Z_m: ops, predicates, CRT, certificates."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import mat_mul_naive, nilpotency_naive_exact
from nilclean.errors import InputError
from nilclean.matrix import (
    DecompositionCertificate,
    RingMatrix,
    check_certificate,
    matrix_crt_recombine,
    matrix_crt_split,
    trunc_ring,
    verify_certificate,
    zm_ring,
)
from nilclean.residue import factorize

SMOOTH_SMALL = (2, 3, 4, 6, 8, 9, 12, 18, 36)


def all_matrices(n, m):
    ring = zm_ring(m)
    for entries in itertools.product(range(m), repeat=n * n):
        yield RingMatrix(ring, np.array(entries, dtype=np.int64).reshape(1, n, n))


def random_invertible(n, ring, rng):
    while True:
        cand = RingMatrix.random(n, ring, rng)
        if cand.is_invertible():
            return cand


class TestArithmetic:
    def test_identity_neutral(self, rng):
        ring = zm_ring(12)
        a = RingMatrix.random(4, ring, rng)
        ident = RingMatrix.identity(4, ring)
        assert ident @ a == a and a @ ident == a

    def test_additive_inverse(self, rng):
        ring = zm_ring(9)
        a = RingMatrix.random(3, ring, rng)
        assert (a + (-a)).is_zero()

    def test_shift_square(self):
        shift = RingMatrix.from_rows([[0, 0, 0], [1, 0, 0], [0, 1, 0]], zm_ring(3))
        sq = shift @ shift
        expected = RingMatrix.from_rows([[0, 0, 0], [0, 0, 0], [1, 0, 0]], zm_ring(3))
        assert sq == expected

    def test_pow_matches_naive(self, rng):
        ring = zm_ring(6)
        a = RingMatrix.random(3, ring, rng)
        rows = a.to_rows()
        acc = rows
        for k in range(2, 7):
            acc = mat_mul_naive(acc, rows, 6)
            assert (a ** k).to_rows() == acc

    def test_dimension_mismatch(self):
        a = RingMatrix.identity(2, zm_ring(4))
        b = RingMatrix.identity(3, zm_ring(4))
        c = RingMatrix.identity(2, zm_ring(6))
        for other in (b, c):
            with pytest.raises(InputError):
                _ = a @ other

    def test_huge_modulus_object_path(self):
        m = 2**31  # forces exact Python-integer entries
        ring = zm_ring(m)
        a = RingMatrix.from_rows([[m - 1, 1], [0, m - 1]], ring)
        sq = a @ a
        assert sq.to_rows() == [[(m - 1) ** 2 % m, 2 * (m - 1) % m], [0, (m - 1) ** 2 % m]]
        assert (a - a).is_zero()


class TestPredicates:
    def test_idempotent_examples(self):
        ring = zm_ring(3)
        for c0 in range(3):
            assert RingMatrix.from_rows([[0, c0], [0, 1]], ring).is_idempotent()
        assert RingMatrix.from_rows([[2, 1], [1, 2]], ring).is_idempotent()
        assert not RingMatrix.from_rows([[1, 1], [1, 1]], zm_ring(2)).is_idempotent()

    def test_nilpotency_examples(self):
        shift4 = RingMatrix.from_rows(
            [[0] * 4, [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], zm_ring(3)
        )
        assert shift4.nilpotency_exponent() == 4
        assert RingMatrix.from_rows([[2, 1], [1, 1]], zm_ring(3)).nilpotency_exponent() is None
        assert RingMatrix.from_rows([[2, 0], [0, 2]], zm_ring(4)).nilpotency_exponent() == 2

    @pytest.mark.parametrize("m", (4, 6, 9))
    def test_nilpotency_exhaustive_against_naive(self, m):
        bound = 2 * factorize(m).max_exponent
        for a in all_matrices(2, m):
            assert a.nilpotency_exponent() == nilpotency_naive_exact(a.to_rows(), m, bound)

    def test_nilpotent_implies_bound_power_vanishes(self, rng):
        ring = zm_ring(12)
        hits = 0
        while hits < 25:
            a = RingMatrix.random(2, ring, rng)
            k = a.nilpotency_exponent()
            if k is None:
                continue
            hits += 1
            assert (a ** ring.nilpotency_bound(2)).is_zero()

    def test_invertibility_examples(self):
        for m in (2, 3, 5, 12, 36):
            ring = zm_ring(m)
            b = RingMatrix.from_rows([[2, 1], [1, 1]], ring)
            assert b.is_invertible()
            assert b.inverse() == RingMatrix.from_rows([[1, -1], [-1, 2]], ring)
            assert RingMatrix.identity(2, ring).is_invertible()
            assert not RingMatrix.from_rows([[0, 0], [1, 1]], ring).is_invertible()

    def test_invertible_iff_two_sided_inverse(self, rng):
        for m in (4, 6, 9, 12, 27):
            ring = zm_ring(m)
            for n in (1, 2, 3, 4):
                for _ in range(8):
                    a = RingMatrix.random(n, ring, rng)
                    if a.is_invertible():
                        inv = a.inverse()
                        ident = RingMatrix.identity(n, ring)
                        assert a @ inv == ident and inv @ a == ident
                    else:
                        with pytest.raises(InputError):
                            a.inverse()

    def test_det_against_cofactor(self, rng):
        def cofactor_det(rows, m):
            n = len(rows)
            if n == 1:
                return rows[0][0] % m
            total = 0
            for j in range(n):
                minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
                term = rows[0][j] * cofactor_det(minor, m)
                total = (total - term if j % 2 else total + term) % m
            return total

        for m in (5, 12, 36, 97):
            ring = zm_ring(m)
            for n in (1, 2, 3, 4):
                for _ in range(6):
                    a = RingMatrix.random(n, ring, rng)
                    assert a.det() == cofactor_det(a.to_rows(), m)

    def test_det_unit_iff_invertible(self, rng):
        import math

        for m in (4, 6, 12, 18):
            ring = zm_ring(m)
            for _ in range(20):
                a = RingMatrix.random(3, ring, rng)
                assert (math.gcd(a.det(), m) == 1) == a.is_invertible()

    def test_reduce_mod_prime_examples(self):
        a = RingMatrix.from_rows([[4, 6], [3, 9]], zm_ring(12))
        assert a.reduce_mod_prime(3).to_rows() == [[1, 0], [0, 0]]
        b = RingMatrix.from_rows([[2, 4], [1, 6]], zm_ring(7))
        assert b.reduce_mod_prime(7) == b
        assert RingMatrix.from_rows([[7]], zm_ring(12)).reduce_mod_prime(2).to_rows() == [[1]]
        with pytest.raises(InputError):
            a.reduce_mod_prime(5)

    def test_upper_triangular_flag(self):
        ring = zm_ring(6)
        assert RingMatrix.from_rows([[1, 2], [0, 3]], ring).is_upper_triangular()
        assert not RingMatrix.from_rows([[1, 0], [2, 3]], ring).is_upper_triangular()


class TestMatrixCrt:
    def test_split_recombine_roundtrip(self, rng):
        ring = zm_ring(6)
        m1, m2 = factorize(2), factorize(3)
        for _ in range(10):
            a = RingMatrix.random(3, ring, rng)
            a1, a2 = matrix_crt_split(a, m1, m2)
            assert a1.to_rows() == (np.array(a.to_rows()) % 2).tolist()
            assert matrix_crt_recombine(a1, a2) == a

    def test_zero_splits_to_zero(self):
        z = RingMatrix.zeros(2, zm_ring(12))
        a1, a2 = matrix_crt_split(z, factorize(4), factorize(3))
        assert a1.is_zero() and a2.is_zero()

    def test_non_coprime_rejected(self):
        a = RingMatrix.identity(2, zm_ring(12))
        with pytest.raises(InputError):
            matrix_crt_split(a, factorize(6), factorize(2))
        with pytest.raises(InputError):
            matrix_crt_recombine(
                RingMatrix.identity(2, zm_ring(6)), RingMatrix.identity(2, zm_ring(4))
            )

    def test_certificates_split_componentwise(self, rng):
        # a verified certificate splits into verified certificates mod 4 and 9
        from nilclean.decompose import decompose_zm

        ring = zm_ring(36)
        m1, m2 = factorize(4), factorize(9)
        for _ in range(5):
            cert = decompose_zm(RingMatrix.random(3, ring, rng))
            for pick in (0, 1):
                parts = [
                    matrix_crt_split(x, m1, m2)[pick]
                    for x in (cert.a, cert.e, cert.f, cert.w)
                ]
                k = parts[3].nilpotency_exponent()
                assert k is not None
                piece = DecompositionCertificate(*parts, nilpotency_exponent=k)
                assert verify_certificate(piece)


class TestCertificates:
    def test_zero_certificate(self):
        z = RingMatrix.zeros(2, zm_ring(6))
        cert = DecompositionCertificate(z, z, z, z, 1)
        assert verify_certificate(cert) and cert.verified and cert.failure is None

    def test_trace_one_template_example(self):
        ring = zm_ring(3)
        a = RingMatrix.from_rows([[0, 1], [1, 1]], ring)
        e = RingMatrix.from_rows([[0, 1], [0, 1]], ring)
        f = RingMatrix.zeros(2, ring)
        w = RingMatrix.from_rows([[0, 0], [1, 0]], ring)
        cert = DecompositionCertificate(a, e, f, w, 2)
        assert verify_certificate(cert)

    def test_non_nilpotent_w_rejected(self):
        ring = zm_ring(3)
        ident = RingMatrix.identity(2, ring)
        cert = DecompositionCertificate(ident, ident, ident, -ident, 2)
        assert not verify_certificate(cert)
        assert cert.failure == "nilpotency exponent"

    def test_each_failure_is_named(self):
        ring = zm_ring(6)
        a = RingMatrix.from_rows([[4]], ring)
        e = RingMatrix.from_rows([[4]], ring)
        zero = RingMatrix.zeros(1, ring)
        assert verify_certificate(DecompositionCertificate(a, e, zero, zero, 1))

        bad_e = DecompositionCertificate(a, RingMatrix.from_rows([[2]], ring), zero, zero, 1)
        assert not verify_certificate(bad_e)
        assert bad_e.failure == "E idempotency"

        bad_f = DecompositionCertificate(a, e, RingMatrix.from_rows([[5]], ring), zero, 1)
        assert not verify_certificate(bad_f)
        assert bad_f.failure == "F idempotency"

        bad_sum = DecompositionCertificate(a, e, RingMatrix.from_rows([[1]], ring), zero, 1)
        assert not verify_certificate(bad_sum)
        assert bad_sum.failure == "sum"

        bad_k = DecompositionCertificate(a, e, zero, zero, 2)
        assert not verify_certificate(bad_k)
        assert bad_k.failure == "nilpotency exponent"

    @given(st.sampled_from(SMOOTH_SMALL), st.integers(min_value=1, max_value=3), st.integers(0, 2**32))
    @settings(max_examples=40, deadline=None)
    def test_similarity_stability(self, m, n, seed):
        from nilclean.decompose import decompose_zm

        gen = np.random.default_rng(seed)
        ring = zm_ring(m)
        cert = decompose_zm(RingMatrix.random(n, ring, gen))
        p = random_invertible(n, ring, gen)
        p_inv = p.inverse()
        conj = [p @ x @ p_inv for x in (cert.a, cert.e, cert.f, cert.w)]
        moved = DecompositionCertificate(*conj, nilpotency_exponent=cert.nilpotency_exponent)
        assert verify_certificate(moved)

    def test_ring_mismatch_raises(self):
        a = RingMatrix.zeros(2, zm_ring(6))
        b = RingMatrix.zeros(2, zm_ring(12))
        with pytest.raises(InputError):
            check_certificate(DecompositionCertificate(a, b, b, b, 1))

    def test_trunc_ring_certificates(self):
        ring = trunc_ring(3, 2)
        a = RingMatrix.from_rows([[[1, 1]]], ring)
        e = RingMatrix.from_rows([[[1, 0]]], ring)
        zero = RingMatrix.zeros(1, ring)
        w = RingMatrix.from_rows([[[0, 1]]], ring)
        cert = DecompositionCertificate(a, e, zero, w, 2)
        assert verify_certificate(cert)
