import random
from fractions import Fraction

import pytest

from koszulforms.fields import (
    QQ,
    FieldError,
    PrimeField,
    PrimeFieldElement,
    parse_field_spec,
)


def test_characteristic_two_rejected():
    with pytest.raises(FieldError):
        PrimeField(2)


def test_composite_rejected():
    for n in (1, 4, 9, 15, 1000001):  # 1000001 = 101 * 9901
        with pytest.raises(FieldError):
            PrimeField(n)


def test_large_prime_accepted():
    assert PrimeField(1000003).p == 1000003


def test_basic_prime_field_ops():
    f = PrimeField(7)
    a, b = f.from_int(3), f.from_int(5)
    assert a + b == f.from_int(1)
    assert a - b == f.from_int(5)
    assert a * b == f.from_int(1)
    assert a / b == a * f.from_int(3)  # 5^-1 = 3 mod 7
    assert -a == f.from_int(4)
    assert a**6 == f.one()
    assert bool(f.zero()) is False and bool(a) is True


def test_int_interop_and_cross_field_rejected():
    f = PrimeField(5)
    assert 2 * f.from_int(3) == f.one()
    assert f.from_int(3) + 4 == f.from_int(2)
    with pytest.raises(FieldError):
        f.from_int(1) + PrimeField(7).from_int(1)


def test_coerce_fraction_into_prime_field():
    f = PrimeField(5)
    assert f.coerce(Fraction(1, 2)) == f.from_int(3)  # 2^-1 = 3 mod 5
    with pytest.raises(FieldError):
        f.coerce(Fraction(1, 5))


@pytest.mark.parametrize("field", [QQ, PrimeField(7), PrimeField(1000003)])
def test_ring_axioms_randomized(field):
    rng = random.Random(11)
    for _ in range(500):
        a, b, c = (field.random(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a
        assert a * b == b * a
    for _ in range(100):
        a = field.random_nonzero(rng)
        assert a * (field.one() / a) == field.one()


def test_str_round_trip():
    f = PrimeField(13)
    for v in range(13):
        assert f.from_str(f.to_str(f.from_int(v))) == f.from_int(v)
    assert QQ.from_str(QQ.to_str(Fraction(-7, 3))) == Fraction(-7, 3)


def test_parse_field_spec():
    assert parse_field_spec("q") == QQ
    assert parse_field_spec("fp:7") == PrimeField(7)
    with pytest.raises(FieldError):
        parse_field_spec("gf:8")
    with pytest.raises(FieldError):
        parse_field_spec("fp:2")
