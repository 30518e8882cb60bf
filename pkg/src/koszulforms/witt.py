"""Epsilon-symmetric bilinear forms over the base field.

Gram matrices follow the row-major convention G[i][j] = b(u_i, u_j), so
G^T = epsilon G.  Where a form is used as a duality map x -> b(x, -) the
matrix is the transpose of the Gram matrix.  Every returned basis or map
tuple is re-verified against its defining identities; nothing is trusted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import linalg


class FormError(ValueError):
    pass


@dataclass
class EpsForm:
    gram: list
    epsilon: int
    field: object

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise FormError("epsilon must be +1 or -1")
        n = len(self.gram)
        for row in self.gram:
            if len(row) != n:
                raise FormError("Gram matrix is not square")
        if self.gram_transpose_defect():
            raise FormError("Gram matrix is not %+d-symmetric" % self.epsilon)

    def gram_transpose_defect(self):
        G = self.gram
        n = len(G)
        for i in range(n):
            for j in range(n):
                if G[j][i] != self.epsilon * G[i][j]:
                    return True
        return False

    @property
    def dim(self):
        return len(self.gram)

    def as_map(self):
        """Matrix of x -> b(x, -) in the dual basis (the Gram transpose)."""
        return linalg.transpose(self.gram)

    def is_nondegenerate(self):
        return self.dim == 0 or linalg.rank(self.gram, self.field) == self.dim

    def pair(self, x, y):
        f = self.field
        total = f.zero()
        for i, xi in enumerate(x):
            if not xi:
                continue
            row = self.gram[i]
            for j, yj in enumerate(y):
                if yj and row[j]:
                    total = total + xi * row[j] * yj
        return total

    def restrict(self, basis_cols):
        """The form pulled back along a basis matrix (columns)."""
        f = self.field
        B = basis_cols
        G2 = linalg.mat_mul(linalg.mat_mul(linalg.transpose(B), self.gram, f), B, f)
        return EpsForm(G2, self.epsilon, f)

    def to_json_dict(self):
        return {
            "epsilon": self.epsilon,
            "gram": [[self.field.to_str(v) for v in row] for row in self.gram],
        }

    @classmethod
    def from_json_dict(cls, data, field):
        gram = [[field.from_str(s) for s in row] for row in data["gram"]]
        return cls(gram, data["epsilon"], field)


@dataclass
class Subspace:
    basis: list  # n x k columns

    @property
    def ambient_dim(self):
        return len(self.basis)

    @property
    def dim(self):
        return len(self.basis[0]) if self.basis else 0


def is_lagrangian(form, subspace):
    """Isotropic of half the dimension; the form must be nondegenerate."""
    f = form.field
    if not form.is_nondegenerate():
        raise FormError("Lagrangian test against a degenerate form")
    if form.dim % 2:
        raise FormError("odd-dimensional space has no Lagrangian")
    B = subspace.basis
    if linalg.rank(B, f) != subspace.dim:
        raise FormError("subspace basis is not independent")
    if 2 * subspace.dim != form.dim:
        return False
    return linalg.is_zero_matrix(
        linalg.mat_mul(linalg.mat_mul(linalg.transpose(B), form.gram, f), B, f)
    )


def symplectic_basis(form):
    """A basis putting a nondegenerate skew form into hyperbolic 2x2 blocks.

    Returns B with B^T G B block-diagonal [[0, 1], [-1, 0]]; verified
    exactly before returning.
    """
    if form.epsilon != -1:
        raise FormError("symplectic basis needs a skew form")
    if not form.is_nondegenerate():
        raise FormError("symplectic basis needs a nondegenerate form")
    f = form.field
    n = form.dim
    remaining = [
        [f.one() if i == j else f.zero() for j in range(n)] for i in range(n)
    ]  # columns as rows of an identity, transposed below
    remaining = linalg.transpose(remaining)  # list of column vectors
    pairs = []

    def bvec(x, y):
        return form.pair(x, y)

    while remaining:
        u = remaining.pop(0)
        w = None
        for idx, cand in enumerate(remaining):
            if bvec(u, cand):
                w = remaining.pop(idx)
                break
        if w is None:
            raise FormError("degenerate block encountered")
        c = bvec(u, w)
        w = [wi / c for wi in w]
        fixed = []
        for z in remaining:
            a = bvec(u, z)
            b = bvec(w, z)
            # subtract the span of (u, w): z' = z - a*w' ... adjust so both pairings die
            z1 = [zi - a * wi for zi, wi in zip(z, w)]
            b1 = bvec(w, z1)
            z2 = [zi + b1 * ui for zi, ui in zip(z1, u)]
            fixed.append(z2)
        remaining = fixed
        pairs.append((u, w))
    cols = []
    for u, w in pairs:
        cols.append(u)
        cols.append(w)
    B = linalg.transpose(cols)
    got = linalg.mat_mul(linalg.mat_mul(linalg.transpose(B), form.gram, f), B, f)
    k = n // 2
    want = linalg.zeros(n, n, f)
    for i in range(k):
        want[2 * i][2 * i + 1] = f.one()
        want[2 * i + 1][2 * i] = -f.one()
    if not linalg.mat_eq(got, want):
        raise FormError("symplectic reduction failed verification")
    return B


def diagonalize(form):
    """A congruence basis B with B^T G B diagonal (rank preserved; zeros allowed)."""
    if form.epsilon != 1:
        raise FormError("diagonalization is for symmetric forms")
    f = form.field
    n = form.dim
    G = [list(row) for row in form.gram]
    B = linalg.identity(n, f)

    def col_op(dst, src, c):
        for i in range(n):
            G[i][dst] = G[i][dst] + c * G[i][src]
        for i in range(n):
            G[dst][i] = G[dst][i] + c * G[src][i]
        for i in range(n):
            B[i][dst] = B[i][dst] + c * B[i][src]

    def col_swap(a, b):
        for i in range(n):
            G[i][a], G[i][b] = G[i][b], G[i][a]
        G[a], G[b] = G[b], G[a]
        for i in range(n):
            B[i][a], B[i][b] = B[i][b], B[i][a]

    half = f.one() / f.from_int(2)
    for k in range(n):
        if not G[k][k]:
            pivot = None
            for i in range(k + 1, n):
                if G[i][i]:
                    pivot = i
                    break
            if pivot is not None:
                col_swap(k, pivot)
            else:
                found = None
                for i in range(k, n):
                    for j in range(i + 1, n):
                        if G[i][j]:
                            found = (i, j)
                            break
                    if found:
                        break
                if not found:
                    break  # remaining block is zero
                i, j = found
                col_op(i, j, f.one())  # b(e_i + e_j, e_i + e_j) = 2 G[i][j]
                if i != k:
                    col_swap(k, i)
        if not G[k][k]:
            continue
        for j in range(k + 1, n):
            if G[k][j]:
                col_op(j, k, -G[k][j] / G[k][k])
    got = linalg.mat_mul(linalg.mat_mul(linalg.transpose(B), form.gram, f), B, f)
    for i in range(n):
        for j in range(n):
            if i != j and got[i][j]:
                raise FormError("diagonalization failed verification")
    if linalg.rank(got, f) != linalg.rank(form.gram, f):
        raise FormError("diagonalization changed the rank")
    return B


def _legendre(a, p):
    if a % p == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _find_isotropic_diag(diag, field, rng, exhaustive_below=6):
    """A nonzero isotropic vector for a nondegenerate diagonal symmetric form
    over F_p, dim >= 2 (None if dim 2 carries none)."""
    p = field.p
    n = len(diag)
    d = [x.val for x in diag]
    if n == 2:
        # isotropic iff -d1/d2 is a square
        if _legendre((-d[0] * pow(d[1], p - 2, p)) % p, p) == 1:
            t = _sqrt_mod((-d[0] * pow(d[1], p - 2, p)) % p, p)
            return [field.one(), field.from_int(t)]
        return None
    if n < exhaustive_below and p ** n <= 200000:
        for vec in _iter_vectors(p, n):
            if any(vec):
                if sum(d[i] * vec[i] * vec[i] for i in range(n)) % p == 0:
                    return [field.from_int(v) for v in vec]
        return None
    # dim >= 3 over a finite field always has one: solve d0 x^2 + d1 y^2 = -d2
    # by randomized search on (x, y), deterministic given the seed
    while True:
        x = rng.randrange(p)
        rhs = (-d[2] - d[0] * x * x) % p
        val = (rhs * pow(d[1], p - 2, p)) % p
        if _legendre(val, p) >= 0:
            y = 0 if val == 0 else _sqrt_mod(val, p)
            vec = [0] * n
            vec[0], vec[1], vec[2] = x, y, 1
            return [field.from_int(v) for v in vec]


def _sqrt_mod(a, p):
    """Tonelli-Shanks; assumes a is a quadratic residue mod odd prime p."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while _legendre(z, p) != -1:
        z += 1
    m, c, t, rres = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, rres = t * c % p, rres * b % p
    return rres


def _iter_vectors(p, n):
    import itertools

    return itertools.product(range(p), repeat=n)


def witt_index_fp(form, seed=0, dim_bound=12):
    """The number of hyperbolic planes split off a nondegenerate form over F_p.

    Skew forms have index dim/2.  Symmetric forms are diagonalized, then
    hyperbolic planes are split off through isotropic vectors: quadratic
    character casework in dimension <= 2, isotropic search above (exhaustive
    below dimension 6, seeded randomized above).
    """
    f = form.field
    if not hasattr(f, "p"):
        raise FormError("Witt index is only computed over prime fields")
    if form.dim > dim_bound:
        raise FormError("dimension %d exceeds the bound %d" % (form.dim, dim_bound))
    if not form.is_nondegenerate():
        raise FormError("Witt index of a degenerate form")
    if form.epsilon == -1:
        if form.dim % 2:
            raise FormError("odd-dimensional nondegenerate skew form cannot exist")
        return form.dim // 2
    rng = random.Random(seed)

    def index_of(g):
        n = len(g)
        if n <= 1:
            return 0
        sub = EpsForm(g, 1, f)
        D = diagonalize(sub)
        diag_form = sub.restrict(D)
        diag = [diag_form.gram[i][i] for i in range(n)]
        v_d = _find_isotropic_diag(diag, f, rng)
        if v_d is None:
            return 0
        # back to the original coordinates
        v = [sum(D[i][j] * v_d[j] for j in range(n)) for i in range(n)]
        # complete v to a hyperbolic pair: u with b(v, u) = 1, then square-correct
        gv = [sum(g[i][j] * v[j] for j in range(n)) for i in range(n)]
        pivot = next(i for i, x in enumerate(gv) if x)
        u = [f.zero()] * n
        u[pivot] = f.one() / gv[pivot]
        buu = sub.pair(u, u)
        c = buu / f.from_int(2)
        u = [ui - c * vi for ui, vi in zip(u, v)]
        # perp of span(v, u): solve the two linear conditions
        rows = [
            [sum((v[i] * g[i][j] for i in range(n)), f.zero()) for j in range(n)],
            [sum((u[i] * g[i][j] for i in range(n)), f.zero()) for j in range(n)],
        ]
        ker = linalg.nullspace(rows, f)
        k = len(ker[0]) if ker and ker[0] else 0
        if k != n - 2:
            raise FormError("hyperbolic splitting produced a wrong complement")
        B = ker
        g2 = linalg.mat_mul(linalg.mat_mul(linalg.transpose(B), g, f), B, f)
        return 1 + index_of(g2)

    return index_of(form.gram)


def max_isotropic_dim_bruteforce(form):
    """Exhaustive maximal totally isotropic dimension (small fields only).

    Enumerates projective representatives (first nonzero coordinate 1); any
    isotropic subspace has a basis of such vectors in echelon position.
    """
    f = form.field
    p = f.p
    n = form.dim
    vectors = []
    for vec in _iter_vectors(p, n):
        nz = next((i for i, v in enumerate(vec) if v), None)
        if nz is not None and vec[nz] == 1:
            vectors.append([f.from_int(v) for v in vec])
    isotropic = [v for v in vectors if not form.pair(v, v)]

    def orthogonal(cur_basis, v):
        return all(not form.pair(w, v) for w in cur_basis)

    def independent(cur_basis, v):
        M = linalg.transpose(cur_basis + [v])
        return linalg.rank(M, f) == len(cur_basis) + 1

    best = 0

    def extend(cur, start):
        nonlocal best
        best = max(best, len(cur))
        if len(cur) == n // 2:
            return
        for idx in range(start, len(isotropic)):
            v = isotropic[idx]
            if orthogonal(cur, v) and independent(cur, v):
                extend(cur + [v], idx + 1)
                if best == n // 2:
                    return

    extend([], 0)
    return best


@dataclass
class SplitSequenceData:
    iota: list  # n x k
    pr: list  # k x n
    surjection: list  # k x n, the map V -> W-dual, iota^T o (form map)
    section: list  # n x k


def split_sequence(form, subspace):
    """Retraction and section data for a Lagrangian W of a nondegenerate form.

    Produces pr with pr o iota = id such that the two idempotents
    iota pr and G^-1 pr^T iota^T G sum to the identity; equivalently the
    complement ker(pr) is itself Lagrangian.  Verified exactly.
    """
    f = form.field
    if not is_lagrangian(form, subspace):
        raise FormError("subspace is not a Lagrangian")
    iota = subspace.basis
    n = form.dim
    k = subspace.dim
    G = form.gram
    # any complement: greedily extend the basis with coordinate vectors
    cols = [linalg.columns(iota, [j]) for j in range(k)]
    chosen = []
    cur = [c for c in cols]
    for j in range(n):
        e = [[f.one() if i == j else f.zero()] for i in range(n)]
        trial = linalg.column_stack(*(cur + [e]))
        if linalg.rank(trial, f) == len(cur) + 1:
            cur.append(e)
            chosen.append(j)
        if len(cur) == n:
            break
    C = linalg.column_stack(*cur[k:])
    # isotropize the complement: C' = C - iota X with X = (eps/2) A^-T S0
    A = linalg.mat_mul(linalg.mat_mul(linalg.transpose(iota), G, f), C, f)
    S0 = linalg.mat_mul(linalg.mat_mul(linalg.transpose(C), G, f), C, f)
    half_eps = f.from_int(form.epsilon) / f.from_int(2)
    X = linalg.mat_scale(
        linalg.mat_mul(linalg.inverse(linalg.transpose(A), f), S0, f), half_eps
    )
    Cp = linalg.mat_sub(C, linalg.mat_mul(iota, X, f))
    full = linalg.column_stack(iota, Cp)
    inv = linalg.inverse(full, f)
    pr = inv[:k]
    gmap = form.as_map()
    surj = linalg.mat_mul(linalg.transpose(iota), gmap, f)
    section = linalg.mat_mul(
        linalg.inverse(gmap, f), linalg.transpose(pr), f
    )
    # verification: retraction, section, isotropy of the complement, idempotents
    if not linalg.mat_eq(linalg.mat_mul(pr, iota, f), linalg.identity(k, f)):
        raise FormError("pr o iota is not the identity")
    if not linalg.is_zero_matrix(
        linalg.mat_mul(linalg.mat_mul(linalg.transpose(Cp), G, f), Cp, f)
    ):
        raise FormError("complement failed to isotropize")
    if not linalg.mat_eq(linalg.mat_mul(surj, section, f), linalg.identity(k, f)):
        raise FormError("surjection o section is not the identity")
    q1 = linalg.mat_mul(iota, pr, f)
    q2 = linalg.mat_mul(section, surj, f)
    if not linalg.mat_eq(linalg.mat_add(q1, q2), linalg.identity(n, f)):
        raise FormError("idempotent decomposition failed")
    if not linalg.is_zero_matrix(linalg.mat_mul(pr, section, f)):
        raise FormError("pr o section is not zero")
    return SplitSequenceData(iota, pr, surj, section)


def find_lagrangian(form, seed=0):
    """A Lagrangian basis: symplectic pairing halves for skew forms,
    isotropic-splitting recursion over prime fields for symmetric ones."""
    f = form.field
    if form.dim % 2:
        raise FormError("odd-dimensional forms have no Lagrangian")
    if form.dim == 0:
        return []
    if form.epsilon == -1:
        B = symplectic_basis(form)
        cols = [j for j in range(form.dim) if j % 2 == 0]
        W = linalg.columns(B, cols)
        if not is_lagrangian(form, Subspace(W)):
            raise FormError("symplectic Lagrangian failed verification")
        return W
    if not hasattr(f, "p"):
        raise FormError(
            "finding a Lagrangian of a symmetric form needs a prime field; "
            "supply an explicit basis over the rationals"
        )
    if witt_index_fp(form, seed=seed) * 2 != form.dim:
        raise FormError("form is not hyperbolic, no Lagrangian exists")
    # peel hyperbolic pairs, collecting the isotropic halves
    rng = random.Random(seed)
    n = form.dim
    g = form.gram
    basis_change = linalg.identity(n, f)  # columns express current coords in original
    collected = []
    while len(g) > 0:
        m = len(g)
        sub = EpsForm(g, 1, f)
        D = diagonalize(sub)
        diag_form = sub.restrict(D)
        diag = [diag_form.gram[i][i] for i in range(m)]
        v_d = _find_isotropic_diag(diag, f, rng)
        if v_d is None:
            raise FormError("ran out of isotropic vectors before a full Lagrangian")
        v = [sum(D[i][j] * v_d[j] for j in range(m)) for i in range(m)]
        gv = [sum(g[i][j] * v[j] for j in range(m)) for i in range(m)]
        pivot = next(i for i, x in enumerate(gv) if x)
        u = [f.zero()] * m
        u[pivot] = f.one() / gv[pivot]
        buu = sub.pair(u, u)
        c = buu / f.from_int(2)
        u = [ui - c * vi for ui, vi in zip(u, v)]
        collected.append([
            sum(basis_change[i][j] * v[j] for j in range(m)) for i in range(n)
        ])
        rows = [
            [sum(v[i] * g[i][j] for i in range(m)) for j in range(m)],
            [sum(u[i] * g[i][j] for i in range(m)) for j in range(m)],
        ]
        ker = linalg.nullspace(rows, f)
        if not ker or not ker[0]:
            break
        B = ker
        basis_change = linalg.mat_mul(basis_change, B, f)
        g = linalg.mat_mul(linalg.mat_mul(linalg.transpose(B), g, f), B, f)
    W = linalg.transpose(collected)
    if not is_lagrangian(form, Subspace(W)):
        raise FormError("assembled Lagrangian failed verification")
    return W
