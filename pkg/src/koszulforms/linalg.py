"""Small exact dense linear algebra over a field.

Matrices are lists of rows of field elements.  Everything is exact
(Fraction or prime-field arithmetic); the one numeric fast path is
``rank_mod_p``, a vectorized mod-p row reduction used by the sampling
oracle where thousands of scalar matrices need ranks.
"""

from __future__ import annotations

import numpy as np


def zeros(m, n, field):
    z = field.zero()
    return [[z for _ in range(n)] for _ in range(m)]


def identity(n, field):
    z, o = field.zero(), field.one()
    return [[o if i == j else z for j in range(n)] for i in range(n)]


def mat_mul(A, B, field):
    m = len(A)
    n = len(B[0]) if B else 0
    k = len(B)
    if A and len(A[0]) != k:
        raise ValueError("shape mismatch: %dx%d times %dx%d" % (m, len(A[0]), k, n))
    C = zeros(m, n, field)
    for i in range(m):
        Ai = A[i]
        Ci = C[i]
        for t in range(k):
            a = Ai[t]
            if not a:
                continue
            Bt = B[t]
            for j in range(n):
                if Bt[j]:
                    Ci[j] = Ci[j] + a * Bt[j]
    return C

def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, c):
    return [[c * a for a in row] for row in A]


def transpose(A):
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def mat_eq(A, B):
    if len(A) != len(B):
        return False
    for ra, rb in zip(A, B):
        if len(ra) != len(rb):
            return False
        for a, b in zip(ra, rb):
            if a != b:
                return False
    return True


def is_zero_matrix(A):
    return all(not a for row in A for a in row)


def _rref(A, field):
    """Row-reduce a copy of A; returns (rref rows, pivot columns)."""
    M = [list(row) for row in A]
    m = len(M)
    n = len(M[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, m):
            if M[i][c]:
                pr = i
                break
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        inv = field.one() / M[r][c]
        M[r] = [inv * a for a in M[r]]
        for i in range(m):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return M, pivots


def rank(A, field):
    if not A or not A[0]:
        return 0
    return len(_rref(A, field)[1])


def inverse(A, field):
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("inverse of a non-square matrix")
    aug = [list(row) + list(erow) for row, erow in zip(A, identity(n, field))]
    M, pivots = _rref(aug, field)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in M[:n]]


def nullspace(A, field):
    """Basis (as columns) of the right kernel of A."""
    if not A:
        return []
    n = len(A[0])
    M, pivots = _rref(A, field)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    z, o = field.zero(), field.one()
    for fc in free:
        v = [z] * n
        v[fc] = o
        for r, pc in enumerate(pivots):
            v[pc] = -M[r][fc]
        basis.append(v)
    return transpose(basis) if basis else [[] for _ in range(n)]


def solve(A, b, field):
    """One solution x of A x = b, or None if inconsistent."""
    if not A:
        return None
    n = len(A[0])
    aug = [list(row) + [bv] for row, bv in zip(A, b)]
    M, pivots = _rref(aug, field)
    if n in pivots:
        return None
    x = [field.zero()] * n
    for r, pc in enumerate(pivots):
        x[pc] = M[r][n]
    return x


def column_stack(*mats):
    rows = len(mats[0])
    out = []
    for i in range(rows):
        row = []
        for M in mats:
            row.extend(M[i])
        out.append(row)
    return out


def columns(A, idxs):
    return [[row[j] for j in idxs] for row in A]


def rank_mod_p(rows, p):
    """Rank of an integer matrix mod p via vectorized elimination.

    Entries must already be reduced to 0..p-1; p**2 must fit in int64.
    """
    if not rows or not rows[0]:
        return 0
    M = np.array(rows, dtype=np.int64)
    m, n = M.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        col = M[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            M[[r, pr]] = M[[pr, r]]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r] = (M[r] * inv) % p
        rest = np.nonzero(M[r + 1 :, c])[0]
        if rest.size:
            factors = M[r + 1 :, c][rest].reshape(-1, 1)
            M[r + 1 + rest] = (M[r + 1 + rest] - factors * M[r]) % p
        r += 1
    return r
