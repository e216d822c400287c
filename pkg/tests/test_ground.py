from fractions import Fraction

import pytest

from almostctl.errors import ParseError, UsageError
from almostctl.ground import (DyadicExp, FieldSpec, RingElement, RingSpec, from_level_poly,
                              level_of, parse_element, to_level_poly)
from almostctl.poly import Poly


def test_field_parse():
    assert FieldSpec.parse("fp:7") == FieldSpec.fp(7)
    assert FieldSpec.parse("q") == FieldSpec.rationals()
    with pytest.raises(UsageError):
        FieldSpec.parse("fp:6")
    with pytest.raises(UsageError):
        FieldSpec.parse("gf(4)")


def test_field_arithmetic_mod_p():
    F = FieldSpec.fp(5)
    assert F.norm(7) == 2
    assert F.inv(2) == 3
    assert F.norm(Fraction(1, 2)) == 3
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_dyadic_exponent_normalises():
    e = DyadicExp.from_fraction(Fraction(2, 4))
    assert e.value == Fraction(1, 2)
    assert e.log_den == 1
    assert DyadicExp.from_fraction(Fraction(3)).log_den == 0
    with pytest.raises((UsageError, ValueError)):
        DyadicExp.from_fraction(Fraction(1, 3))


def test_parse_and_level(domain):
    a = parse_element("x^(1/2) + 3*x^(3/4)", domain)
    assert level_of(a) == 2
    assert to_level_poly(a, 2) == Poly.from_terms(domain.field, [(2, 1), (3, 3)])
    # one level higher every exponent doubles
    assert to_level_poly(a, 3) == Poly.from_terms(domain.field, [(4, 1), (6, 3)])
    with pytest.raises(UsageError):
        to_level_poly(a, 1)


def test_level_roundtrip(domain):
    p = Poly.from_terms(domain.field, [(0, 1), (5, 2)])
    a = from_level_poly(domain, p, 3)
    assert to_level_poly(a, 3) == p


def test_truncated_kills_x(trunc, domain):
    assert parse_element("x", trunc).is_zero()
    assert parse_element("x^(3/2)", trunc).is_zero()
    assert not parse_element("x^(1/2)", trunc).is_zero()
    assert not parse_element("x", domain).is_zero()


def test_multiplication_adds_exponents(ring):
    a = parse_element("x^(1/4)", ring)
    b = parse_element("x^(1/4)", ring)
    assert a * b == parse_element("x^(1/2)", ring)


def test_parse_errors_carry_column(domain):
    with pytest.raises(ParseError) as ei:
        parse_element("x^(1/2)+3x", domain)
    assert ei.value.column is not None
    with pytest.raises(ParseError):
        parse_element("x^(1/3)", domain)


def test_unit_symbol_needs_level(domain):
    assert to_level_poly(parse_element("u", domain, unit_level=3), 3) == Poly.monomial(domain.field, 1)
    with pytest.raises(ParseError):
        parse_element("u", domain)


def test_ring_spec():
    assert RingSpec("truncated").level_bound(3) == 8
    assert RingSpec("domain").level_bound(3) is None
    with pytest.raises(UsageError):
        RingSpec("local")
    assert isinstance(RingElement.const(RingSpec(), 2), RingElement)
