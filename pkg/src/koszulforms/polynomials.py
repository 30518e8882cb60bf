"""Homogeneous multivariate polynomials in the coordinates x_0..x_r.

Every polynomial carries a declared total degree; the zero polynomial of
any degree exists so that graded matrix entries stay well-typed.  Monomials
are kept sparsely as ``{exponent tuple: coefficient}`` and serialized in
descending lexicographic order of exponent tuples (all monomials of a
homogeneous polynomial share the total degree, so this is the graded-lex
order restricted to one degree).
"""

from __future__ import annotations


class PolynomialError(ValueError):
    pass


class HomogPoly:
    __slots__ = ("nvars", "degree", "terms")

    def __init__(self, nvars, degree, terms=None):
        if nvars < 1:
            raise PolynomialError("need at least one variable")
        if degree < 0:
            raise PolynomialError("declared degree must be nonnegative, got %d" % degree)
        self.nvars = nvars
        self.degree = degree
        clean = {}
        for exps, c in (terms or {}).items():
            if len(exps) != nvars:
                raise PolynomialError("exponent tuple %r has wrong length" % (exps,))
            if any(e < 0 for e in exps):
                raise PolynomialError("negative exponent in %r" % (exps,))
            if sum(exps) != degree:
                raise PolynomialError(
                    "monomial %r has degree %d, declared %d" % (exps, sum(exps), degree)
                )
            if c:
                clean[tuple(exps)] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars, degree=0):
        return cls(nvars, degree, {})

    @classmethod
    def constant(cls, c, nvars):
        return cls(nvars, 0, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i, nvars, coeff=1):
        exps = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, 1, {exps: coeff})

    @classmethod
    def monomial(cls, coeff, exps):
        exps = tuple(exps)
        return cls(len(exps), sum(exps), {exps: coeff})

    # -- basic queries -----------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, HomogPoly):
            return NotImplemented
        if self.nvars != other.nvars:
            return False
        if not self.terms and not other.terms:
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, self.degree, frozenset(self.terms.items())))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if self.nvars != other.nvars:
            raise PolynomialError("variable-count mismatch: %d vs %d" % (self.nvars, other.nvars))
        if self.degree != other.degree and self.terms and other.terms:
            raise PolynomialError("degree mismatch on add: %d vs %d" % (self.degree, other.degree))
        degree = self.degree if self.terms or not other.terms else other.degree
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return HomogPoly(self.nvars, degree, terms)

    def __neg__(self):
        return HomogPoly(self.nvars, self.degree, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.nvars != other.nvars:
            raise PolynomialError("variable-count mismatch: %d vs %d" % (self.nvars, other.nvars))
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, 0) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    terms.pop(e, None)
        return HomogPoly(self.nvars, self.degree + other.degree, terms)

    def scale(self, c):
        """Multiply by a scalar (field element or int); keeps the declared degree."""
        if not c:
            return HomogPoly.zero(self.nvars, self.degree)
        return HomogPoly(self.nvars, self.degree, {e: c * v for e, v in self.terms.items()})

    # -- evaluation --------------------------------------------------------

    def eval(self, point):
        """Exact evaluation at a point given as a list of r+1 field elements."""
        if len(point) != self.nvars:
            raise PolynomialError("point has %d coordinates, need %d" % (len(point), self.nvars))
        total = 0
        for exps, c in self.terms.items():
            v = c
            for x, e in zip(point, exps):
                if e:
                    v = v * x**e
            total = v + total
        return total

    def map_coefficients(self, fn):
        """Apply ``fn`` to every coefficient (e.g. reduction into a prime field)."""
        terms = {}
        for e, c in self.terms.items():
            w = fn(c)
            if w:
                terms[e] = w
        return HomogPoly(self.nvars, self.degree, terms)

    # -- canonical text form ------------------------------------------------

    def to_str(self):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            factors = [str(c)]
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append("x%d" % i)
                elif e > 1:
                    factors.append("x%d^%d" % (i, e))
            parts.append("*".join(factors))
        return " + ".join(parts)

    @classmethod
    def from_str(cls, s, nvars, degree, field):
        """Parse the canonical text form; ``degree`` types the zero polynomial."""
        s = s.strip()
        if s == "0" or not s:
            return cls.zero(nvars, degree)
        terms = {}
        for part in s.split(" + "):
            factors = part.strip().split("*")
            coeff = field.from_str(factors[0])
            exps = [0] * nvars
            for f in factors[1:]:
                if "^" in f:
                    name, e = f.split("^")
                    exps[int(name[1:])] += int(e)
                else:
                    exps[int(f[1:])] += 1
            e = tuple(exps)
            terms[e] = terms.get(e, field.zero()) + coeff
        return cls(nvars, degree, {e: c for e, c in terms.items() if c})

    def __repr__(self):
        return self.to_str()
