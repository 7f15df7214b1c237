"""Exact arithmetic in a discretely valued field.

Scalars live in the effective dense subfield of K: the rationals inside Q_p,
or rational functions Q(t) inside the Laurent series field Q((t)). Every
algorithm in this package stays inside that subfield, so results are exact.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Any, Optional, Union

from sympy import Symbol, isprime, multiplicity
from sympy.core.sympify import SympifyError
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.domains import QQ
from sympy.polys.polyerrors import CoercionFailed
from tokenize import TokenError

from .errors import DivisionByZeroError, FieldMismatchError, InvalidFieldError, ParseError, ValidationError

logger = logging.getLogger(__name__)

PADIC = "p-adic"
LAURENT = "laurent"

_RATIONAL_TEXT = re.compile(r"^([+-]?\d+)(?:/([+-]?\d+))?$")
_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


@lru_cache(maxsize=None)
def _laurent_domain(var: str):
    return QQ.frac_field(Symbol(var))


@total_ordering
@dataclass(frozen=True)
class ExtValuation:
    """Element of Z together with +infinity; ``value`` is None for infinity"""
    value: Optional[int] = None

    @classmethod
    def finite(cls, k: int) -> "ExtValuation":
        return cls(int(k))

    @classmethod
    def parse(cls, raw: Union[int, str]) -> "ExtValuation":
        if raw == "inf":
            return INFINITY
        try:
            return cls.finite(int(raw))
        except (TypeError, ValueError) as e:
            raise ParseError(f"Invalid valuation {raw!r}") from e

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def to_json(self) -> Union[int, str]:
        return "inf" if self.value is None else self.value

    def __int__(self) -> int:
        if self.value is None:
            raise ValidationError("Infinite valuation has no integer value")
        return self.value

    def __eq__(self, other) -> bool:
        other = _as_valuation(other)
        if other is NotImplemented:
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        # finite values hash like the int they compare equal to
        return hash(("ExtValuation", None)) if self.value is None else hash(self.value)

    def __lt__(self, other) -> bool:
        other = _as_valuation(other)
        if other is NotImplemented:
            return NotImplemented
        if self.value is None:
            return False
        if other.value is None:
            return True
        return self.value < other.value

    def __add__(self, other) -> "ExtValuation":
        other = _as_valuation(other)
        if other is NotImplemented:
            return NotImplemented
        if self.value is None or other.value is None:
            return INFINITY
        return ExtValuation(self.value + other.value)

    __radd__ = __add__

    def __neg__(self) -> "ExtValuation":
        return ExtValuation(-int(self))

    def __sub__(self, other) -> "ExtValuation":
        other = _as_valuation(other)
        if other is NotImplemented:
            return NotImplemented
        if other.value is None:
            raise ValidationError("Cannot subtract an infinite valuation")
        return self + ExtValuation(-other.value)

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    def __repr__(self) -> str:
        return "Infinity" if self.value is None else f"Finite({self.value})"


INFINITY = ExtValuation(None)


def _as_valuation(other):
    if isinstance(other, ExtValuation):
        return other
    if isinstance(other, int) and not isinstance(other, bool):
        return ExtValuation(other)
    return NotImplemented


@dataclass(frozen=True)
class FieldDescriptor:
    """Which valued field the scalars of a computation belong to"""
    kind: str
    p: Optional[int] = None
    var: Optional[str] = None

    def __post_init__(self):
        if self.kind == PADIC:
            if isinstance(self.p, bool) or not isinstance(self.p, int) or self.p < 2 or not isprime(self.p):
                raise InvalidFieldError(f"p-adic field needs a prime p, got {self.p!r}")
            object.__setattr__(self, "var", None)
        elif self.kind == LAURENT:
            var = self.var if self.var is not None else "t"
            if not isinstance(var, str) or not _IDENTIFIER.match(var):
                raise InvalidFieldError(f"Laurent variable must be an identifier, got {var!r}")
            object.__setattr__(self, "var", var)
            object.__setattr__(self, "p", None)
        else:
            raise InvalidFieldError(f"Unknown field kind {self.kind!r}")

    @classmethod
    def padic(cls, p: int) -> "FieldDescriptor":
        return cls(PADIC, p=p)

    @classmethod
    def laurent(cls, var: str = "t") -> "FieldDescriptor":
        return cls(LAURENT, var=var)

    @classmethod
    def from_json(cls, data: Any) -> "FieldDescriptor":
        if not isinstance(data, dict) or "kind" not in data:
            raise InvalidFieldError(f"Field descriptor must be an object with a kind, got {data!r}")
        if data["kind"] == PADIC:
            return cls.padic(data.get("p"))
        if data["kind"] == LAURENT:
            return cls.laurent(data.get("var", "t"))
        raise InvalidFieldError(f"Unknown field kind {data['kind']!r}")

    def to_json(self) -> dict:
        if self.is_padic:
            return {"kind": PADIC, "p": self.p}
        return {"kind": LAURENT, "var": self.var}

    @property
    def is_padic(self) -> bool:
        return self.kind == PADIC

    @property
    def domain(self):
        """The sympy domain holding scalar values: QQ or QQ(var)"""
        if self.is_padic:
            return QQ
        return _laurent_domain(self.var)

    def ground(self, numerator: int, denominator: int = 1):
        """Domain element for the rational numerator/denominator"""
        if denominator == 0:
            raise DivisionByZeroError("Zero denominator")
        return self.domain.convert_from(QQ(int(numerator), int(denominator)), QQ)

    def scalar(self, value: Any) -> "ValuedScalar":
        """Coerce ints, Fractions, strings and domain elements into this field"""
        if isinstance(value, ValuedScalar):
            if value.descriptor != self:
                raise FieldMismatchError(f"Scalar over {value.descriptor} used in {self}")
            return value
        if isinstance(value, bool):
            raise ValidationError("Booleans are not scalars")
        if isinstance(value, int):
            return ValuedScalar(self, self.ground(value))
        if isinstance(value, Fraction):
            return ValuedScalar(self, self.ground(value.numerator, value.denominator))
        if isinstance(value, str):
            return parse_scalar(self, value)
        if self.domain.of_type(value):
            return ValuedScalar(self, value)
        try:
            return ValuedScalar(self, self.domain.convert(value))
        except CoercionFailed as e:
            raise ValidationError(f"Cannot interpret {value!r} as a scalar of {self}") from e

    @property
    def zero(self) -> "ValuedScalar":
        return ValuedScalar(self, self.domain.zero)

    @property
    def one(self) -> "ValuedScalar":
        return ValuedScalar(self, self.domain.one)

    def __str__(self) -> str:
        return f"Q_{self.p}" if self.is_padic else f"Q(({self.var}))"


@dataclass(frozen=True)
class ValuedScalar:
    """Immutable exact element of K carrying its field descriptor"""
    descriptor: FieldDescriptor
    value: Any

    def _operand(self, other):
        if isinstance(other, ValuedScalar):
            if other.descriptor != self.descriptor:
                raise FieldMismatchError(f"Cannot combine scalars over {self.descriptor} and {other.descriptor}")
            return other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.descriptor.scalar(other).value
        return NotImplemented

    def _wrap(self, value) -> "ValuedScalar":
        return ValuedScalar(self.descriptor, value)

    @property
    def is_zero(self) -> bool:
        return not self.value

    def __bool__(self) -> bool:
        return bool(self.value)

    def __add__(self, other):
        value = self._operand(other)
        if value is NotImplemented:
            return NotImplemented
        return self._wrap(self.value + value)

    __radd__ = __add__

    def __sub__(self, other):
        value = self._operand(other)
        if value is NotImplemented:
            return NotImplemented
        return self._wrap(self.value - value)

    def __rsub__(self, other):
        value = self._operand(other)
        if value is NotImplemented:
            return NotImplemented
        return self._wrap(value - self.value)

    def __mul__(self, other):
        value = self._operand(other)
        if value is NotImplemented:
            return NotImplemented
        return self._wrap(self.value * value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        value = self._operand(other)
        if value is NotImplemented:
            return NotImplemented
        if not value:
            raise DivisionByZeroError(f"Division of {self} by zero")
        return self._wrap(self.value / value)

    def __rtruediv__(self, other):
        value = self._operand(other)
        if value is NotImplemented:
            return NotImplemented
        return self._wrap(value) / self

    def __neg__(self) -> "ValuedScalar":
        return self._wrap(-self.value)

    def __pow__(self, exponent: int) -> "ValuedScalar":
        if exponent < 0:
            return (self ** -exponent).inverse()
        result = self.descriptor.domain.one
        for _ in range(exponent):
            result = result * self.value
        return self._wrap(result)

    def inverse(self) -> "ValuedScalar":
        if self.is_zero:
            raise DivisionByZeroError("Zero has no inverse")
        return self._wrap(self.descriptor.domain.one / self.value)

    def __eq__(self, other) -> bool:
        if isinstance(other, ValuedScalar):
            return self.descriptor == other.descriptor and self.value == other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.value == self.descriptor.scalar(other).value
        return NotImplemented

    def as_rational(self) -> Optional[Fraction]:
        """The scalar as a Fraction, or None for a nonconstant Laurent scalar"""
        if self.descriptor.is_padic:
            q = self.value
        else:
            numer, denom = self.value.numer, self.value.denom
            if not (numer.is_ground and denom.is_ground):
                return None
            q = numer.LC / denom.LC
        return Fraction(int(q.numerator), int(q.denominator))

    def __hash__(self) -> int:
        # must agree with equality against int and Fraction
        rational = self.as_rational()
        if rational is not None:
            return hash(rational)
        return hash((self.descriptor, self.value))

    def __str__(self) -> str:
        return render_scalar(self)

    def __repr__(self) -> str:
        return f"ValuedScalar({render_scalar(self)} in {self.descriptor})"


def _t_order(poly) -> int:
    return min(monom[0] for monom in poly.monoms())


def valuation(x: ValuedScalar) -> ExtValuation:
    """Exact valuation; zero maps to infinity"""
    if x.is_zero:
        return INFINITY
    if x.descriptor.is_padic:
        p = x.descriptor.p
        numerator = abs(int(x.value.numerator))
        denominator = int(x.value.denominator)
        return ExtValuation(multiplicity(p, numerator) - multiplicity(p, denominator))
    return ExtValuation(_t_order(x.value.numer) - _t_order(x.value.denom))


def uniformizer(descriptor: FieldDescriptor) -> ValuedScalar:
    """p for Q_p, t for Q((t))"""
    if descriptor.is_padic:
        return descriptor.scalar(descriptor.p)
    domain = descriptor.domain
    return ValuedScalar(descriptor, domain.gens[0])


def power_of_uniformizer(descriptor: FieldDescriptor, k: int) -> ValuedScalar:
    return uniformizer(descriptor) ** int(k)


def is_integral(x: ValuedScalar) -> bool:
    """Membership in the valuation ring"""
    return valuation(x) >= 0


def unit_part(x: ValuedScalar) -> ValuedScalar:
    """x divided by the uniformizer power of the same valuation"""
    v = valuation(x)
    if v.is_infinite:
        raise DivisionByZeroError("Zero has no unit part")
    return x / power_of_uniformizer(x.descriptor, int(v))


def _render_rational(q) -> str:
    numerator, denominator = int(q.numerator), int(q.denominator)
    return str(numerator) if denominator == 1 else f"{numerator}/{denominator}"


def _render_polynomial(poly, var: str) -> str:
    if not poly:
        return "0"
    parts = []
    for monom, coeff in sorted(poly.terms(), key=lambda term: term[0][0]):
        k = monom[0]
        c = _render_rational(coeff)
        if k == 0:
            parts.append(c)
            continue
        power = var if k == 1 else f"{var}^{k}"
        if c == "1":
            parts.append(power)
        elif c == "-1":
            parts.append(f"-{power}")
        else:
            parts.append(f"{c}*{power}")
    return " + ".join(parts)


def render_scalar(x: ValuedScalar) -> str:
    """Canonical text: reduced a/b, or Laurent numerator[/denominator] in ascending powers"""
    if x.descriptor.is_padic:
        return _render_rational(x.value)
    var = x.descriptor.var
    numer, denom = x.value.numer, x.value.denom
    if denom == 1:
        return _render_polynomial(numer, var)
    return f"({_render_polynomial(numer, var)})/({_render_polynomial(denom, var)})"


def parse_scalar(descriptor: FieldDescriptor, text: Any) -> ValuedScalar:
    """Read the text format produced by render_scalar (whitespace-insensitive)"""
    if isinstance(text, int) and not isinstance(text, bool):
        return descriptor.scalar(text)
    if not isinstance(text, str):
        raise ParseError(f"Scalar must be a string or integer, got {text!r}")
    compact = "".join(text.split())
    if not compact:
        raise ParseError("Empty scalar")
    if descriptor.is_padic:
        match = _RATIONAL_TEXT.match(compact)
        if not match:
            raise ParseError(f"Invalid rational scalar {text!r}")
        numerator = int(match.group(1))
        denominator = int(match.group(2)) if match.group(2) else 1
        if denominator == 0:
            raise ParseError(f"Zero denominator in {text!r}")
        return ValuedScalar(descriptor, descriptor.ground(numerator, denominator))
    var = descriptor.var
    if not re.fullmatch(rf"(?:{re.escape(var)}|[0-9+\-*/^().])+", compact):
        raise ParseError(f"Invalid Laurent scalar {text!r}")
    try:
        expr = parse_expr(
            compact,
            local_dict={var: Symbol(var)},
            transformations=standard_transformations + (convert_xor,),
        )
        value = descriptor.domain.from_sympy(expr)
    except (SympifyError, SyntaxError, TokenError, TypeError, ValueError,
            CoercionFailed, ZeroDivisionError, AttributeError) as e:
        raise ParseError(f"Invalid Laurent scalar {text!r}: {e}") from e
    return ValuedScalar(descriptor, value)
