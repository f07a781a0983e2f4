"""Shared independent oracles for the test suite.

These helpers deliberately reimplement arithmetic from scratch (plain Python,
no imports from the package) so that agreement with the library is evidence,
not circularity.
"""

from __future__ import annotations

import numpy as np
import pytest


# --- polynomial helpers over GF(p), ascending coefficient tuples -----------

def poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(a, b, p):
    n = max(len(a), len(b))
    return poly_trim(
        ((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)
    )


def poly_sub(a, b, p):
    n = max(len(a), len(b))
    return poly_trim(
        ((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)
    )


def poly_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return poly_trim(out)


def charpoly_cofactor(rows, p):
    """Characteristic polynomial det(xI - A) over GF(p) by cofactor expansion
    along the first column.  Exponential; intended for n <= 6."""
    n = len(rows)
    mat = [
        [
            poly_trim(((-rows[i][j]) % p,) + ((1,) if i == j else ()))
            for j in range(n)
        ]
        for i in range(n)
    ]

    def det(sub):
        if len(sub) == 1:
            return sub[0][0]
        acc = ()
        for i, row in enumerate(sub):
            if not row[0]:
                continue
            minor = [r[1:] for j, r in enumerate(sub) if j != i]
            term = poly_mul(row[0], det(minor), p)
            acc = poly_add(acc, term, p) if i % 2 == 0 else poly_sub(acc, term, p)
        return acc

    return det(mat)


# --- naive modular matrix arithmetic on nested lists ------------------------

def mat_mul_naive(a, b, m):
    n = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(n)) % m for j in range(n)]
        for i in range(n)
    ]


def mat_is_zero(a):
    return all(v == 0 for row in a for v in row)


def nilpotency_naive_exact(rows, m, cap):
    """Minimal k with rows^k = 0 searching k = 1..cap, else None."""
    if mat_is_zero(rows):
        return 1
    power = rows
    for k in range(2, cap + 1):
        power = mat_mul_naive(power, rows, m)
        if mat_is_zero(power):
            return k
    return None


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
