"""Exact base-field arithmetic: the rationals and odd prime fields.

Field objects are lightweight element factories.  Rational elements are
plain ``fractions.Fraction`` values; prime-field elements are
``PrimeFieldElement`` wrappers.  Arithmetic mixes freely with Python ints
(signs, small integer scalars) but never with elements of a different
field.
"""

from __future__ import annotations

from fractions import Fraction


class FieldError(ValueError):
    """Ill-formed field specification or cross-field operation."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n):
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeFieldElement:
    """An element of F_p, normalized to the range 0..p-1."""

    __slots__ = ("val", "p")

    def __init__(self, val, p):
        self.val = val % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise FieldError("mixed prime fields: F_%d and F_%d" % (self.p, other.p))
            return other
        if isinstance(other, int):
            return PrimeFieldElement(other, self.p)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PrimeFieldElement(self.val + o.val, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PrimeFieldElement(self.val - o.val, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PrimeFieldElement(o.val - self.val, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PrimeFieldElement(self.val * o.val, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.val == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return PrimeFieldElement(self.val * pow(o.val, self.p - 2, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return PrimeFieldElement(-self.val, self.p)

    def __pow__(self, e):
        if e < 0:
            return (PrimeFieldElement(1, self.p) / self) ** (-e)
        return PrimeFieldElement(pow(self.val, e, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, PrimeFieldElement):
            return self.p == other.p and self.val == other.val
        if isinstance(other, int):
            return self.val == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.val))

    def __bool__(self):
        return self.val != 0

    def __str__(self):
        return str(self.val)

    def __repr__(self):
        return "%d mod %d" % (self.val, self.p)


class Rationals:
    """The field Q, with elements represented by ``Fraction``."""

    kind = "rationals"
    char = 0

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def from_str(self, s):
        return Fraction(s)

    def to_str(self, x):
        return str(x)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise FieldError("cannot coerce %r into Q" % (x,))

    def random(self, rng, span=9):
        return Fraction(rng.randint(-span, span))

    def random_nonzero(self, rng, span=9):
        while True:
            x = self.random(rng, span)
            if x:
                return x

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("rationals")

    def __repr__(self):
        return "Q"

    def spec_string(self):
        return "q"


class PrimeField:
    """The field F_p for an odd prime p (p = 2 is rejected)."""

    kind = "prime-field"

    def __init__(self, p):
        if p == 2:
            raise FieldError("characteristic 2 is not supported; 2 must be invertible")
        if not _is_prime(p):
            raise FieldError("%d is not prime" % p)
        self.p = p
        self.char = p

    def zero(self):
        return PrimeFieldElement(0, self.p)

    def one(self):
        return PrimeFieldElement(1, self.p)

    def from_int(self, n):
        return PrimeFieldElement(n, self.p)

    def from_str(self, s):
        return PrimeFieldElement(int(s), self.p)

    def to_str(self, x):
        return str(x.val)

    def coerce(self, x):
        if isinstance(x, PrimeFieldElement):
            if x.p != self.p:
                raise FieldError("element of F_%d used in F_%d" % (x.p, self.p))
            return x
        if isinstance(x, int):
            return PrimeFieldElement(x, self.p)
        if isinstance(x, Fraction):
            den = x.denominator % self.p
            if den == 0:
                raise FieldError("denominator of %s vanishes mod %d" % (x, self.p))
            return PrimeFieldElement(x.numerator * pow(den, self.p - 2, self.p), self.p)
        raise FieldError("cannot coerce %r into F_%d" % (x, self.p))

    def random(self, rng, span=None):
        return PrimeFieldElement(rng.randrange(self.p), self.p)

    def random_nonzero(self, rng, span=None):
        return PrimeFieldElement(rng.randrange(1, self.p), self.p)

    def elements(self):
        for v in range(self.p):
            yield PrimeFieldElement(v, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("prime-field", self.p))

    def __repr__(self):
        return "F_%d" % self.p

    def spec_string(self):
        return "fp:%d" % self.p


QQ = Rationals()


def parse_field_spec(s):
    """Parse a field spec string: ``q`` for the rationals, ``fp:P`` for F_P."""
    s = s.strip().lower()
    if s in ("q", "qq", "rationals"):
        return QQ
    if s.startswith("fp:"):
        return PrimeField(int(s[3:]))
    raise FieldError("unrecognized field spec %r (expected 'q' or 'fp:P')" % s)
