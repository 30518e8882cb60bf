"""Univariate polynomials over an exact field and Smith normal form.

k[x] is a Euclidean domain with the degree as size, so any matrix over it
diagonalizes by row/column operations; the diagonal entries (elementary
divisors, normalized monic) decide homology of complexes of free modules
exactly.
"""

from __future__ import annotations


class UPoly:
    """Dense univariate polynomial; coeffs[i] is the x^i coefficient."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs, field):
        while coeffs and not coeffs[-1]:
            coeffs = coeffs[:-1]
        self.coeffs = list(coeffs)
        self.field = field

    @classmethod
    def zero(cls, field):
        return cls([], field)

    @classmethod
    def const(cls, c, field):
        return cls([c], field)

    @classmethod
    def x_power(cls, e, field, c=None):
        return cls([field.zero()] * e + [c if c is not None else field.one()], field)

    def is_zero(self):
        return not self.coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -1

    def lead(self):
        return self.coeffs[-1]

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.field.zero()
        a = self.coeffs + [z] * (n - len(self.coeffs))
        b = other.coeffs + [z] * (n - len(other.coeffs))
        return UPoly([x + y for x, y in zip(a, b)], self.field)

    def __neg__(self):
        return UPoly([-c for c in self.coeffs], self.field)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return UPoly.zero(self.field)
        z = self.field.zero()
        out = [z] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * b
        return UPoly(out, self.field)

    def scale(self, c):
        return UPoly([c * a for a in self.coeffs], self.field)

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = UPoly.zero(self.field)
        rem = UPoly(list(self.coeffs), self.field)
        inv_lead = self.field.one() / other.lead()
        while not rem.is_zero() and rem.degree >= other.degree:
            shift = rem.degree - other.degree
            c = rem.lead() * inv_lead
            term = UPoly.x_power(shift, self.field, c)
            q = q + term
            rem = rem - term * other
        return q, rem

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.field.one() / self.lead())

    def is_unit(self):
        return self.degree == 0

    def __eq__(self, other):
        return isinstance(other, UPoly) and self.coeffs == other.coeffs

    def to_str(self):
        if self.is_zero():
            return "0"
        parts = []
        for e in range(self.degree, -1, -1):
            c = self.coeffs[e]
            if not c:
                continue
            if e == 0:
                parts.append(str(c))
            elif e == 1:
                parts.append("%s*x" % c)
            else:
                parts.append("%s*x^%d" % (c, e))
        return " + ".join(parts)

    def __repr__(self):
        return self.to_str()


def smith_normal_form(rows, field):
    """Elementary divisors (monic, divisibility-chained) and the rank.

    ``rows`` is a matrix of UPoly; the matrix is reduced in place on a copy
    by Euclidean row/column operations.
    """
    M = [[p for p in row] for row in rows]
    m = len(M)
    n = len(M[0]) if m else 0
    divisors = []
    top = 0
    while top < min(m, n):
        # locate the minimal-degree nonzero entry in the remaining block
        best = None
        for i in range(top, m):
            for j in range(top, n):
                if not M[i][j].is_zero():
                    if best is None or M[i][j].degree < M[best[0]][best[1]].degree:
                        best = (i, j)
        if best is None:
            break
        bi, bj = best
        M[top], M[bi] = M[bi], M[top]
        for row in M:
            row[top], row[bj] = row[bj], row[top]
        while True:
            # reduce the pivot column
            dirty = False
            for i in range(top + 1, m):
                if M[i][top].is_zero():
                    continue
                q, rem = M[i][top].divmod(M[top][top])
                for j in range(top, n):
                    M[i][j] = M[i][j] - q * M[top][j]
                if not rem.is_zero():
                    M[top], M[i] = M[i], M[top]
                    dirty = True
            for j in range(top + 1, n):
                if M[top][j].is_zero():
                    continue
                q, rem = M[top][j].divmod(M[top][top])
                for i in range(top, m):
                    M[i][j] = M[i][j] - q * M[i][top]
                if not rem.is_zero():
                    for i in range(top, m):
                        M[i][top], M[i][j] = M[i][j], M[i][top]
                    dirty = True
            col_clean = all(M[i][top].is_zero() for i in range(top + 1, m))
            row_clean = all(M[top][j].is_zero() for j in range(top + 1, n))
            if col_clean and row_clean and not dirty:
                break
        # divisibility: fold in any entry the pivot does not divide
        fixed = False
        for i in range(top + 1, m):
            for j in range(top + 1, n):
                if M[i][j].is_zero():
                    continue
                _, rem = M[i][j].divmod(M[top][top])
                if not rem.is_zero():
                    for jj in range(top, n):
                        M[top][jj] = M[top][jj] + M[i][jj]
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        divisors.append(M[top][top].monic())
        top += 1
    return divisors, len(divisors)
