from fractions import Fraction

import pytest

from valfield.errors import DivisionByZeroError, FieldMismatchError, InvalidFieldError, ParseError, ValidationError
from valfield.valued_scalar import (
    INFINITY, ExtValuation, FieldDescriptor, ValuedScalar, is_integral, parse_scalar, power_of_uniformizer,
    render_scalar, uniformizer, unit_part, valuation,
)


class TestExtValuation:
    """Test cases for valuations with infinity"""

    def test_ordering(self):
        """Test that infinity is above every integer"""
        assert ExtValuation.finite(-3) < ExtValuation.finite(2)
        assert ExtValuation.finite(10 ** 6) < INFINITY
        assert not INFINITY < INFINITY
        assert max(ExtValuation.finite(1), INFINITY) == INFINITY

    def test_comparison_with_int(self):
        """Test comparing against plain integers"""
        assert ExtValuation.finite(2) == 2
        assert ExtValuation.finite(2) >= 0
        assert INFINITY > 5
        assert hash(ExtValuation.finite(2)) == hash(2)
        assert {ExtValuation.finite(-1): "v"}[-1] == "v"

    def test_addition_absorbs_infinity(self):
        """Test that adding infinity gives infinity"""
        assert ExtValuation.finite(2) + 3 == 5
        assert (INFINITY + 3).is_infinite
        assert (ExtValuation.finite(1) + INFINITY).is_infinite

    def test_subtracting_infinity(self):
        """Test that subtracting infinity is refused"""
        assert ExtValuation.finite(2) - 5 == -3
        with pytest.raises(ValidationError):
            ExtValuation.finite(2) - INFINITY

    def test_json(self):
        """Test the JSON representation and parsing"""
        assert INFINITY.to_json() == "inf"
        assert ExtValuation.finite(-1).to_json() == -1
        assert ExtValuation.parse("inf") == INFINITY
        assert ExtValuation.parse(4) == 4
        with pytest.raises(ParseError):
            ExtValuation.parse("minus one")

    def test_repr(self):
        """Test the debugging representation"""
        assert repr(INFINITY) == "Infinity"
        assert repr(ExtValuation.finite(3)) == "Finite(3)"

    def test_int_of_infinity(self):
        """Test that infinity has no integer value"""
        with pytest.raises(ValidationError):
            int(INFINITY)


class TestFieldDescriptor:
    """Test cases for FieldDescriptor"""

    def test_padic_requires_prime(self):
        """Test that p must be prime"""
        with pytest.raises(InvalidFieldError):
            FieldDescriptor.padic(4)
        with pytest.raises(InvalidFieldError):
            FieldDescriptor.padic(1)

    def test_laurent_variable(self):
        """Test the Laurent variable defaults and validation"""
        assert FieldDescriptor.laurent().var == "t"
        with pytest.raises(InvalidFieldError):
            FieldDescriptor.laurent("2t")

    def test_unknown_kind(self):
        """Test that unknown kinds are rejected"""
        with pytest.raises(InvalidFieldError):
            FieldDescriptor.from_json({"kind": "real"})

    def test_json(self, p5, laurent):
        """Test the JSON form of descriptors"""
        assert p5.to_json() == {"kind": "p-adic", "p": 5}
        assert FieldDescriptor.from_json(laurent.to_json()) == laurent

    def test_str(self, p3, laurent):
        """Test the display names"""
        assert str(p3) == "Q_3"
        assert str(laurent) == "Q((t))"

    def test_scalar_coercion(self, p2):
        """Test coercion from int, Fraction and text"""
        assert p2.scalar(3) == p2.scalar("3")
        assert p2.scalar(Fraction(1, 2)) == p2.scalar("1/2")
        with pytest.raises(ValidationError):
            p2.scalar(True)

    def test_scalar_from_other_field(self, p2, p3):
        """Test that scalars cannot silently change field"""
        with pytest.raises(FieldMismatchError):
            p2.scalar(p3.scalar(1))


class TestValuedScalar:
    """Test cases for scalar arithmetic"""

    def test_arithmetic(self, p3):
        """Test field operations on rationals"""
        x = p3.scalar("2/3")
        y = p3.scalar(3)
        assert x + y == p3.scalar("11/3")
        assert x - y == p3.scalar("-7/3")
        assert x * y == 2
        assert x / y == p3.scalar("2/9")
        assert 1 - x == p3.scalar("1/3")
        assert -x == p3.scalar("-2/3")

    def test_powers(self, p2):
        """Test positive and negative exponents"""
        x = p2.scalar(2)
        assert x ** 3 == 8
        assert x ** -2 == p2.scalar("1/4")
        assert x ** 0 == 1

    def test_division_by_zero(self, p2):
        """Test that division by zero raises"""
        with pytest.raises(DivisionByZeroError):
            p2.scalar(1) / p2.zero
        with pytest.raises(DivisionByZeroError):
            p2.zero.inverse()

    def test_mixed_fields(self, p2, p3):
        """Test that scalars over different fields do not combine"""
        with pytest.raises(FieldMismatchError):
            p2.scalar(1) + p3.scalar(1)

    def test_truthiness(self, p2):
        """Test zero detection"""
        assert not p2.zero
        assert p2.zero.is_zero
        assert p2.one

    def test_laurent_arithmetic(self, laurent):
        """Test arithmetic on rational functions"""
        t = uniformizer(laurent)
        x = laurent.scalar("1 + t")
        assert x * x == laurent.scalar("1 + 2*t + t^2")
        assert (x - 1) / t == 1

    def test_hash_consistency(self, p2):
        """Test that equal scalars hash alike"""
        assert len({p2.scalar("2/4"), p2.scalar("1/2")}) == 1

    def test_hash_matches_int_and_fraction(self, p2, laurent):
        """Test that scalars equal to ints or Fractions hash like them"""
        for x, plain in [(p2.scalar(1), 1), (p2.scalar("-3/4"), Fraction(-3, 4)), (laurent.scalar(7), 7)]:
            assert x == plain
            assert hash(x) == hash(plain)
        assert {p2.scalar(2): "two"}[2] == "two"
        assert laurent.scalar("1 + t").as_rational() is None
        assert laurent.scalar("(2*t)/(4*t)").as_rational() == Fraction(1, 2)

    def test_repr(self, p5):
        """Test the debugging representation"""
        assert repr(p5.scalar("1/5")) == "ValuedScalar(1/5 in Q_5)"


class TestValuation:
    """Test cases for valuations and integrality"""

    def test_padic_valuation(self, p2, p5):
        """Test p-adic valuations of rationals"""
        assert valuation(p2.scalar(12)) == 2
        assert valuation(p2.scalar("3/8")) == -3
        assert valuation(p2.scalar(-7)) == 0
        assert valuation(p5.scalar("50/3")) == 2

    def test_zero_is_infinite(self, p2, laurent):
        """Test that zero has infinite valuation"""
        assert valuation(p2.zero).is_infinite
        assert valuation(laurent.zero) == INFINITY

    def test_laurent_valuation(self, laurent):
        """Test orders of rational functions"""
        assert valuation(laurent.scalar("t^2 + t^3")) == 2
        assert valuation(laurent.scalar("1/t")) == -1
        assert valuation(laurent.scalar("(1 + t)/(t^3 - t^4)")) == -3
        assert valuation(laurent.scalar("5")) == 0

    def test_ultrametric_inequality(self, p3):
        """Test val(x + y) >= min(val x, val y) with equality when the valuations differ"""
        x, y = p3.scalar(9), p3.scalar("1/3")
        assert valuation(x + y) == min(valuation(x), valuation(y))
        assert valuation(p3.scalar(3) + p3.scalar(6)) >= 1

    def test_integrality(self, p2):
        """Test membership in the valuation ring"""
        assert is_integral(p2.scalar("3/5"))
        assert not is_integral(p2.scalar("1/2"))
        assert is_integral(p2.zero)

    def test_uniformizer_powers(self, p3, laurent):
        """Test powers of the uniformizer"""
        assert power_of_uniformizer(p3, 2) == 9
        assert power_of_uniformizer(p3, -1) == p3.scalar("1/3")
        assert valuation(power_of_uniformizer(laurent, -4)) == -4

    def test_unit_part(self, p2):
        """Test that the unit part has valuation zero"""
        assert unit_part(p2.scalar(12)) == 3
        assert valuation(unit_part(p2.scalar("5/8"))) == 0
        with pytest.raises(DivisionByZeroError):
            unit_part(p2.zero)


class TestScalarText:
    """Test cases for parsing and rendering scalars"""

    def test_render_rationals(self, p2):
        """Test reduced fraction rendering"""
        assert render_scalar(p2.scalar("6/4")) == "3/2"
        assert render_scalar(p2.scalar("-4/6")) == "-2/3"
        assert render_scalar(p2.scalar("10/5")) == "2"

    def test_render_laurent(self, laurent):
        """Test rendering in ascending powers"""
        assert render_scalar(laurent.scalar("t^2 + 1")) == "1 + t^2"
        assert render_scalar(laurent.scalar("3*t - t^3")) == "3*t + -t^3"
        assert render_scalar(laurent.scalar("1/t")) == "(1)/(t)"

    def test_render_parses_back(self, laurent):
        """Test that the rendered form reads back to the same scalar"""
        x = laurent.scalar("(1 + t)/(2*t^2)")
        assert parse_scalar(laurent, render_scalar(x)) == x

    def test_parse_whitespace_and_integers(self, p3):
        """Test whitespace-insensitive parsing and bare integers"""
        assert parse_scalar(p3, " 1 / 3 ") == p3.scalar("1/3")
        assert parse_scalar(p3, 7) == 7

    def test_parse_errors(self, p3, laurent):
        """Test malformed scalars"""
        for text in ("", "1/0", "0.5", "abc"):
            with pytest.raises(ParseError):
                parse_scalar(p3, text)
        for text in ("s + 1", "t +* 2", "import os"):
            with pytest.raises(ParseError):
                parse_scalar(laurent, text)
        with pytest.raises(ParseError):
            parse_scalar(p3, 1.5)

    def test_other_laurent_variable(self):
        """Test a Laurent field in a different variable"""
        field = FieldDescriptor.laurent("s")
        x = field.scalar("s^2 + s")
        assert render_scalar(x) == "s + s^2"
        assert valuation(x) == 1
        assert isinstance(x, ValuedScalar)
