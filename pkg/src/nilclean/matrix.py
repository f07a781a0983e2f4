"""Dense exact matrices over Z_m and over Z_m[x]/(x^d), with certificates.

A matrix is stored as a coefficient stack ``coeffs`` of shape (d, n, n): slice
t holds the matrix coefficient of x^t, so d = 1 is the plain Z_m case.  All
slices are kept reduced into [0, m).  int64 arithmetic is used whenever the
worst-case accumulation d*n*(m-1)^2 fits below 2^63; bigger moduli fall back
to exact Python integers through object arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InputError, InternalCheckError
from .residue import (
    Modulus,
    crt_recombine_int,
    factorize,
)

MAX_DIMENSION = 64


@dataclass(frozen=True)
class MatrixRing:
    """Ring descriptor for matrix entries: Z_m when trunc_degree == 1,
    otherwise Z_m[x]/(x^trunc_degree)."""

    modulus: Modulus
    trunc_degree: int = 1

    def __post_init__(self):
        if self.trunc_degree < 1:
            raise InputError("truncation degree must be >= 1")

    @property
    def m(self) -> int:
        return self.modulus.m

    @property
    def d(self) -> int:
        return self.trunc_degree

    def is_prime_field(self) -> bool:
        return self.trunc_degree == 1 and self.modulus.is_prime()

    def nilpotency_bound(self, n: int) -> int:
        """Certified upper bound for the exponent of any nilpotent n x n matrix."""
        return n * self.modulus.max_exponent * self.trunc_degree

    def radical_exponent(self) -> int:
        """Nilpotency exponent of the nilradical of the entry ring."""
        e = self.modulus.max_exponent
        return e if self.trunc_degree == 1 else e + self.trunc_degree - 1

    def describe(self) -> str:
        if self.trunc_degree == 1:
            return f"Z{self.m}"
        return f"Z{self.m}[x]/(x^{self.trunc_degree})"


def zm_ring(m: int) -> MatrixRing:
    return MatrixRing(factorize(m))


def trunc_ring(m: int, d: int) -> MatrixRing:
    return MatrixRing(factorize(m), d)


def _dtype_for(ring: MatrixRing, n: int):
    worst = ring.d * n * (ring.m - 1) ** 2
    return np.int64 if worst < 2**63 else object


class RingMatrix:
    """Square matrix over a MatrixRing, canonical entries, value semantics."""

    __slots__ = ("ring", "n", "coeffs")

    def __init__(self, ring: MatrixRing, coeffs: np.ndarray):
        # internal: coeffs assumed already reduced and correctly shaped
        self.ring = ring
        self.n = coeffs.shape[1]
        self.coeffs = coeffs

    # -- construction -------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ring: MatrixRing) -> "RingMatrix":
        """Build from row-major nested lists; entries are ints for d = 1 and
        coefficient lists (ascending, length <= d) otherwise."""
        n = len(rows)
        if not (1 <= n <= MAX_DIMENSION):
            raise InputError(f"dimension must be in [1, {MAX_DIMENSION}], got {n}")
        if any(len(r) != n for r in rows):
            raise InputError("matrix must be square")
        d = ring.d
        dtype = _dtype_for(ring, n)
        coeffs = np.zeros((d, n, n), dtype=dtype)
        for i, row in enumerate(rows):
            for j, entry in enumerate(row):
                if isinstance(entry, (int, np.integer)):
                    coeffs[0, i, j] = int(entry) % ring.m
                else:
                    if d == 1 and len(entry) > 1:
                        raise InputError("polynomial entry in a plain Z_m matrix")
                    if len(entry) > d:
                        raise InputError("entry has more coefficients than the ring degree")
                    for t, c in enumerate(entry):
                        coeffs[t, i, j] = int(c) % ring.m
        return cls(ring, coeffs)

    @classmethod
    def zeros(cls, n: int, ring: MatrixRing) -> "RingMatrix":
        if not (1 <= n <= MAX_DIMENSION):
            raise InputError(f"dimension must be in [1, {MAX_DIMENSION}], got {n}")
        return cls(ring, np.zeros((ring.d, n, n), dtype=_dtype_for(ring, n)))

    @classmethod
    def identity(cls, n: int, ring: MatrixRing) -> "RingMatrix":
        out = cls.zeros(n, ring)
        idx = np.arange(n)
        out.coeffs[0, idx, idx] = 1 % ring.m
        return out

    @classmethod
    def random(cls, n: int, ring: MatrixRing, rng: np.random.Generator) -> "RingMatrix":
        if not (1 <= n <= MAX_DIMENSION):
            raise InputError(f"dimension must be in [1, {MAX_DIMENSION}], got {n}")
        data = rng.integers(0, ring.m, size=(ring.d, n, n))
        return cls(ring, data.astype(_dtype_for(ring, n), copy=False))

    def copy(self) -> "RingMatrix":
        return RingMatrix(self.ring, self.coeffs.copy())

    # -- ring plumbing ------------------------------------------------------

    def _match(self, other: "RingMatrix") -> None:
        if self.ring != other.ring or self.n != other.n:
            raise InputError("matrix ring/dimension mismatch")

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        self._match(other)
        return RingMatrix(self.ring, (self.coeffs + other.coeffs) % self.ring.m)

    def __sub__(self, other: "RingMatrix") -> "RingMatrix":
        self._match(other)
        return RingMatrix(self.ring, (self.coeffs - other.coeffs) % self.ring.m)

    def __neg__(self) -> "RingMatrix":
        return RingMatrix(self.ring, (-self.coeffs) % self.ring.m)

    def __mul__(self, scalar: int) -> "RingMatrix":
        if not isinstance(scalar, (int, np.integer)):
            return NotImplemented
        return RingMatrix(self.ring, (self.coeffs * int(scalar)) % self.ring.m)

    __rmul__ = __mul__

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        self._match(other)
        m, d = self.ring.m, self.ring.d
        if d == 1:
            return RingMatrix(self.ring, self.coeffs[0].dot(other.coeffs[0])[None, :, :] % m)
        out = np.zeros_like(self.coeffs)
        for i in range(d):
            a = self.coeffs[i]
            for j in range(d - i):
                out[i + j] += a.dot(other.coeffs[j]) % m
        return RingMatrix(self.ring, out % m)

    def __pow__(self, k: int) -> "RingMatrix":
        if k < 0:
            raise InputError("negative matrix powers are not supported")
        result = RingMatrix.identity(self.n, self.ring)
        base = self
        while k > 0:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.n == other.n
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def to_rows(self) -> list:
        if self.ring.d == 1:
            return [[int(v) for v in row] for row in self.coeffs[0]]
        return [
            [[int(self.coeffs[t, i, j]) for t in range(self.ring.d)] for j in range(self.n)]
            for i in range(self.n)
        ]

    def __repr__(self) -> str:
        return f"RingMatrix({self.ring.describe()}, {self.to_rows()})"

    # -- structure ----------------------------------------------------------

    def is_idempotent(self) -> bool:
        return (self @ self) == self

    def is_upper_triangular(self) -> bool:
        n = self.n
        tril = np.tril_indices(n, k=-1)
        return not self.coeffs[:, tril[0], tril[1]].any()

    def reduce_mod_prime(self, p: int) -> "RingMatrix":
        """Entrywise reduction Z_m -> Z_p for a prime factor p of m."""
        if self.ring.d != 1:
            raise InputError("reduce_mod_prime expects a plain Z_m matrix")
        if p not in self.ring.modulus.primes:
            raise InputError(f"{p} does not divide {self.ring.m}")
        return RingMatrix(zm_ring(p), (self.coeffs % p).astype(np.int64))

    def residue_field_image(self, p: int) -> np.ndarray:
        """Image in M_n(GF(p)) killing the nilradical: x -> 0, entries mod p."""
        if p not in self.ring.modulus.primes:
            raise InputError(f"{p} does not divide {self.ring.m}")
        img = self.coeffs[0] % p
        return img if img.dtype == np.int64 else img.astype(np.int64)

    def nilpotency_exponent(self) -> Optional[int]:
        """Minimal k with self^k = 0, or None if not nilpotent.

        Nilpotency holds iff the image in M_n(GF(p)) is nilpotent for every
        prime p | m (the reduction kernel is a nilpotent ideal), and then the
        minimal exponent is found by binary search under the proven bound.
        """
        n = self.n
        for p in self.ring.modulus.primes:
            b = self.residue_field_image(p)
            power = b
            t = 1
            while t < n:
                power = power.dot(power) % p
                t *= 2
            if power.any():
                return None
        lo, hi = 1, self.ring.nilpotency_bound(n)
        if self.ring.d == 1:
            mat, m = self.coeffs[0], self.ring.m
            if _pow_raw(mat, hi, m).any():
                raise InternalCheckError("nilpotency bound violated")  # pragma: no cover
            while lo < hi:
                mid = (lo + hi) // 2
                if _pow_raw(mat, mid, m).any():
                    lo = mid + 1
                else:
                    hi = mid
            return lo
        if not (self ** hi).is_zero():
            raise InternalCheckError("nilpotency bound violated")  # pragma: no cover
        while lo < hi:
            mid = (lo + hi) // 2
            if (self ** mid).is_zero():
                hi = mid
            else:
                lo = mid + 1
        return lo

    def is_invertible(self) -> bool:
        """True iff the reduction mod every prime factor is invertible."""
        if self.ring.d != 1:
            raise InputError("is_invertible expects a plain Z_m matrix")
        return all(
            _gf_rank(self.residue_field_image(p), p) == self.n
            for p in self.ring.modulus.primes
        )

    def det(self) -> int:
        """Determinant in Z_m via per-prime-power fraction-free elimination."""
        if self.ring.d != 1:
            raise InputError("det expects a plain Z_m matrix")
        res, mod = 0, 1
        for p, e in self.ring.modulus.factors:
            q = p**e
            d_q = _bareiss_det([[int(v) % q for v in row] for row in self.coeffs[0]]) % q
            res = d_q if mod == 1 else crt_recombine_int(res, mod, d_q, q)
            mod *= q
        return res

    def inverse(self) -> "RingMatrix":
        """Explicit inverse over Z_m: invert mod each prime, Newton-lift to the
        prime power, recombine by CRT.  Raises InputError when singular."""
        if self.ring.d != 1:
            raise InputError("inverse expects a plain Z_m matrix")
        n = self.n
        res: Optional[np.ndarray] = None
        mod = 1
        for p, e in self.ring.modulus.factors:
            q = p**e
            x = _gf_inverse(self.residue_field_image(p), p)
            if x is None:
                raise InputError("matrix is not invertible (singular mod %d)" % p)
            a = np.array([[int(v) % q for v in row] for row in self.coeffs[0]], dtype=object)
            x = x.astype(object)
            ident = 2 * np.eye(n, dtype=object)
            for _ in range(max(1, (e - 1).bit_length() + 1)):
                x = x.dot(ident - a.dot(x) % q) % q
            if res is None:
                res = x
            else:
                comb = np.zeros((n, n), dtype=object)
                for i in range(n):
                    for j in range(n):
                        comb[i, j] = crt_recombine_int(int(res[i, j]), mod, int(x[i, j]), q)
                res = comb
            mod *= q
        out = RingMatrix.from_rows([[int(v) for v in row] for row in res], self.ring)
        if not (out @ self == RingMatrix.identity(n, self.ring)):
            raise InternalCheckError("inverse failed verification")  # pragma: no cover
        return out


# ---------------------------------------------------------------------------
# GF(p) kernels shared with the canonical-form machinery
# ---------------------------------------------------------------------------

def _pow_raw(mat: np.ndarray, k: int, m: int) -> np.ndarray:
    """mat^k mod m on a bare 2-d array, k >= 1 (repeated squaring)."""
    result = None
    base = mat
    while k:
        if k & 1:
            result = base if result is None else result.dot(base) % m
        k >>= 1
        if k:
            base = base.dot(base) % m
    return result


def _gf_rank(a: np.ndarray, p: int) -> int:
    a = a % p
    n = a.shape[0]
    rank = 0
    col = 0
    a = a.copy()
    while rank < n and col < n:
        piv = None
        for i in range(rank, n):
            if a[i, col] % p:
                piv = i
                break
        if piv is None:
            col += 1
            continue
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, col]), -1, p)
        a[rank] = a[rank] * inv % p
        for i in range(n):
            if i != rank and a[i, col]:
                a[i] = (a[i] - a[i, col] * a[rank]) % p
        rank += 1
        col += 1
    return rank


def _gf_inverse(a: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Gauss-Jordan inverse over GF(p); None when singular."""
    n = a.shape[0]
    aug = np.concatenate([a % p, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        piv = None
        for i in range(col, n):
            if aug[i, col] % p:
                piv = i
                break
        if piv is None:
            return None
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] = aug[col] * pow(int(aug[col, col]), -1, p) % p
        for i in range(n):
            if i != col and aug[i, col]:
                aug[i] = (aug[i] - aug[i, col] * aug[col]) % p
    return aug[:, n:]


def _bareiss_det(rows: list[list[int]]) -> int:
    """Fraction-free determinant over the integers (exact divisions only)."""
    a = [row[:] for row in rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Matrix-level CRT
# ---------------------------------------------------------------------------

def matrix_crt_split(a: RingMatrix, m1: Modulus, m2: Modulus) -> tuple[RingMatrix, RingMatrix]:
    """Entrywise CRT split of a Z_m matrix along a coprime factorization of m."""
    if a.ring.d != 1:
        raise InputError("matrix CRT expects plain Z_m matrices")
    if m1.m * m2.m != a.ring.m:
        raise InputError(f"{m1.m} * {m2.m} != {a.ring.m}")
    if math.gcd(m1.m, m2.m) != 1:
        raise InputError(f"split moduli {m1.m}, {m2.m} are not coprime")
    r1 = MatrixRing(m1)
    r2 = MatrixRing(m2)
    c1 = (a.coeffs % m1.m).astype(_dtype_for(r1, a.n))
    c2 = (a.coeffs % m2.m).astype(_dtype_for(r2, a.n))
    return RingMatrix(r1, c1), RingMatrix(r2, c2)


def matrix_crt_recombine(a1: RingMatrix, a2: RingMatrix) -> RingMatrix:
    """Inverse of matrix_crt_split."""
    if a1.ring.d != 1 or a2.ring.d != 1:
        raise InputError("matrix CRT expects plain Z_m matrices")
    if a1.n != a2.n:
        raise InputError("dimension mismatch in CRT recombination")
    m1, m2 = a1.ring.m, a2.ring.m
    m = m1 * m2
    if math.gcd(m1, m2) != 1:
        raise InputError(f"moduli {m1}, {m2} are not coprime")
    u = pow(m2, -1, m1)
    ring = zm_ring(m)
    c1 = a1.coeffs.astype(object)
    c2 = a2.coeffs.astype(object)
    comb = (c2 + m2 * ((c1 - c2) * u % m1)) % m
    return RingMatrix(ring, comb.astype(_dtype_for(ring, a1.n)))


# ---------------------------------------------------------------------------
# Decomposition certificates
# ---------------------------------------------------------------------------

CHECK_E_IDEMPOTENT = "E idempotency"
CHECK_F_IDEMPOTENT = "F idempotency"
CHECK_SUM = "sum"
CHECK_NILPOTENCY = "nilpotency exponent"


@dataclass
class DecompositionCertificate:
    """The verified data of a = E + F + W with E, F idempotent, W nilpotent."""

    a: RingMatrix
    e: RingMatrix
    f: RingMatrix
    w: RingMatrix
    nilpotency_exponent: int
    case_tags: tuple[str, ...] = ()
    verified: bool = False
    failure: Optional[str] = field(default=None, compare=False)


def check_certificate(cert: DecompositionCertificate) -> Optional[str]:
    """Re-run all certificate conditions; return the first failed check name."""
    mats = (cert.a, cert.e, cert.f, cert.w)
    ring = cert.a.ring
    if any(x.ring != ring or x.n != cert.a.n for x in mats):
        raise InputError("certificate matrices disagree in ring or dimension")
    k = cert.nilpotency_exponent
    if ring.d == 1:
        m = ring.m
        a, e, f, w = (x.coeffs[0] for x in mats)
        if ((e.dot(e) - e) % m).any():
            return CHECK_E_IDEMPOTENT
        if ((f.dot(f) - f) % m).any():
            return CHECK_F_IDEMPOTENT
        if ((e + f + w - a) % m).any():
            return CHECK_SUM
        if k < 1 or k > ring.nilpotency_bound(cert.a.n):
            return CHECK_NILPOTENCY
        if _pow_raw(w, k, m).any():
            return CHECK_NILPOTENCY
        if k > 1 and not _pow_raw(w, k - 1, m).any():
            return CHECK_NILPOTENCY
        return None
    if not cert.e.is_idempotent():
        return CHECK_E_IDEMPOTENT
    if not cert.f.is_idempotent():
        return CHECK_F_IDEMPOTENT
    if not (cert.e + cert.f + cert.w) == cert.a:
        return CHECK_SUM
    if k < 1 or k > ring.nilpotency_bound(cert.a.n):
        return CHECK_NILPOTENCY
    if not (cert.w ** k).is_zero():
        return CHECK_NILPOTENCY
    if k > 1 and (cert.w ** (k - 1)).is_zero():
        return CHECK_NILPOTENCY
    return None


def verify_certificate(cert: DecompositionCertificate) -> bool:
    """Recompute the four certificate conditions and set the verified flag."""
    failure = check_certificate(cert)
    cert.failure = failure
    cert.verified = failure is None
    return cert.verified
