import random
from fractions import Fraction

import pytest

from koszulforms.fields import QQ, PrimeField
from koszulforms.polynomials import HomogPoly, PolynomialError


def x(i, nvars=2):
    return HomogPoly.variable(i, nvars, Fraction(1))


def test_add_variables():
    s = x(0) + x(1)
    assert s.terms == {(1, 0): Fraction(1), (0, 1): Fraction(1)}
    assert s.degree == 1


def test_mul_variables():
    p = x(0) * x(1)
    assert p.degree == 2
    assert p.terms == {(1, 1): Fraction(1)}


def test_scale_to_zero_keeps_degree():
    z = (x(0) + x(1)).scale(0)
    assert z.is_zero()
    assert z.degree == 1


def test_add_degree_mismatch():
    with pytest.raises(PolynomialError):
        x(0) + x(0) * x(1)


def test_mul_variable_count_mismatch():
    with pytest.raises(PolynomialError):
        x(0, 2) * HomogPoly.variable(0, 3, Fraction(1))


def test_declared_degree_validation():
    with pytest.raises(PolynomialError):
        HomogPoly(2, 3, {(1, 1): Fraction(1)})
    with pytest.raises(PolynomialError):
        HomogPoly(2, -1, {})


def test_eval_product():
    p = x(0) * x(1)
    assert p.eval([Fraction(2), Fraction(3)]) == 6


def test_eval_zero():
    z = HomogPoly.zero(2, 4)
    assert z.eval([Fraction(5), Fraction(7)]) == 0


def test_eval_sum_of_squares_mod_five():
    # hand oracle: 1^2 + 2^2 = 5 = 0 mod 5
    f5 = PrimeField(5)
    p = HomogPoly(2, 2, {(2, 0): f5.one(), (0, 2): f5.one()})
    assert p.eval([f5.from_int(1), f5.from_int(2)]) == f5.zero()


def test_eval_length_mismatch():
    with pytest.raises(PolynomialError):
        x(0).eval([Fraction(1)] * 3)


@pytest.mark.parametrize("field", [QQ, PrimeField(7)])
def test_eval_is_ring_homomorphism(field):
    rng = random.Random(23)

    def rand_poly(degree):
        terms = {}
        for _ in range(rng.randint(1, 3)):
            e0 = rng.randint(0, degree)
            terms[(e0, degree - e0)] = field.random(rng)
        return HomogPoly(2, degree, terms)

    for _ in range(500):
        f = rand_poly(rng.randint(0, 3))
        g = rand_poly(rng.randint(0, 3))
        pt = [field.random(rng), field.random(rng)]
        lhs = (f * g).eval(pt)
        rhs = f.eval(pt) * g.eval(pt)
        assert field.coerce(lhs) == field.coerce(rhs)
        s = f.scale(field.from_int(3))
        assert field.coerce(s.eval(pt)) == field.coerce(field.from_int(3) * f.eval(pt))


def test_canonical_string_and_round_trip():
    p = HomogPoly(
        3,
        2,
        {(2, 0, 0): Fraction(1), (0, 1, 1): Fraction(-2, 3), (1, 1, 0): Fraction(5)},
    )
    s = p.to_str()
    # descending lexicographic exponent order
    assert s == "1*x0^2 + 5*x0*x1 + -2/3*x1*x2"
    q = HomogPoly.from_str(s, 3, 2, QQ)
    assert q == p
    assert q.to_str() == s


def test_zero_string_round_trip():
    z = HomogPoly.zero(2, 3)
    assert z.to_str() == "0"
    assert HomogPoly.from_str("0", 2, 3, QQ) == z
    assert HomogPoly.from_str("0", 2, 3, QQ).degree == 3


def test_zero_polys_compare_equal_across_degrees():
    assert HomogPoly.zero(2, 1) == HomogPoly.zero(2, 5)
    assert HomogPoly.zero(2, 1) != HomogPoly.zero(3, 1)
