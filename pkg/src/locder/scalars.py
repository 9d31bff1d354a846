"""Exact arithmetic in Q and Q(sqrt 2).

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  :class:`QSqrt2` stores ``rat + irr*sqrt(2)`` with both parts
rational and is the coefficient type used everywhere else in the package.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

Rational = Fraction

__all__ = [
    "Rational",
    "QSqrt2",
    "as_scalar",
    "field_add",
    "field_mul",
    "field_inv",
    "ZERO",
    "ONE",
    "SQRT2",
]

_F0 = Fraction(0)
_F1 = Fraction(1)


class QSqrt2:
    """An element ``rat + irr*sqrt(2)`` of the field Q(sqrt 2)."""

    __slots__ = ("rat", "irr")

    def __init__(self, rat=0, irr=0):
        self.rat = rat if type(rat) is Fraction else Fraction(rat)
        self.irr = irr if type(irr) is Fraction else Fraction(irr)

    @classmethod
    def _raw(cls, rat: Fraction, irr: Fraction) -> QSqrt2:
        obj = object.__new__(cls)
        obj.rat = rat
        obj.irr = irr
        return obj

    # -- predicates / conversions ------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.rat) or bool(self.irr)

    def is_rational(self) -> bool:
        return not self.irr

    def norm(self) -> Fraction:
        """Field norm ``rat**2 - 2*irr**2``; zero only for the zero element."""
        return self.rat * self.rat - 2 * self.irr * self.irr

    def conjugate(self) -> QSqrt2:
        return QSqrt2._raw(self.rat, -self.irr)

    def __float__(self) -> float:
        return float(self.rat) + float(self.irr) * 2**0.5

    # -- equality / hashing ---------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, QSqrt2):
            return self.rat == other.rat and self.irr == other.irr
        if isinstance(other, (int, _RationalABC)):
            return not self.irr and self.rat == other
        return NotImplemented

    def __hash__(self) -> int:
        if not self.irr:
            return hash(self.rat)
        return hash((self.rat, self.irr))

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other) -> QSqrt2:
        if isinstance(other, QSqrt2):
            return QSqrt2._raw(self.rat + other.rat, self.irr + other.irr)
        if isinstance(other, (int, Fraction)):
            return QSqrt2._raw(self.rat + other, self.irr)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> QSqrt2:
        return QSqrt2._raw(-self.rat, -self.irr)

    def __pos__(self) -> QSqrt2:
        return self

    def __sub__(self, other) -> QSqrt2:
        if isinstance(other, QSqrt2):
            return QSqrt2._raw(self.rat - other.rat, self.irr - other.irr)
        if isinstance(other, (int, Fraction)):
            return QSqrt2._raw(self.rat - other, self.irr)
        return NotImplemented

    def __rsub__(self, other) -> QSqrt2:
        if isinstance(other, (int, Fraction)):
            return QSqrt2._raw(other - self.rat, -self.irr)
        return NotImplemented

    def __mul__(self, other) -> QSqrt2:
        if isinstance(other, QSqrt2):
            a, b, c, d = self.rat, self.irr, other.rat, other.irr
            if not b:
                if not d:
                    return QSqrt2._raw(a * c, _F0)
                return QSqrt2._raw(a * c, a * d)
            if not d:
                return QSqrt2._raw(a * c, b * c)
            return QSqrt2._raw(a * c + 2 * b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return QSqrt2._raw(self.rat * other, self.irr * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> QSqrt2:
        if not self.irr:
            if not self.rat:
                raise ZeroDivisionError("inverse of zero in Q(sqrt 2)")
            return QSqrt2._raw(1 / self.rat, _F0)
        n = self.norm()
        return QSqrt2._raw(self.rat / n, -self.irr / n)

    def __truediv__(self, other) -> QSqrt2:
        if isinstance(other, QSqrt2):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero in Q(sqrt 2)")
            return QSqrt2._raw(self.rat / other, self.irr / other)
        return NotImplemented

    def __rtruediv__(self, other) -> QSqrt2:
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    # -- display --------------------------------------------------------------

    def __repr__(self) -> str:
        return f"QSqrt2({self.rat!s}, {self.irr!s})"

    def __str__(self) -> str:
        if not self.irr:
            return str(self.rat)
        irr = "√2" if self.irr == 1 else "-√2" if self.irr == -1 else f"{self.irr}√2"
        if not self.rat:
            return irr
        sign = "" if irr.startswith("-") else "+"
        return f"{self.rat}{sign}{irr}"


def as_scalar(x) -> QSqrt2:
    """Coerce an int, Fraction or QSqrt2 to QSqrt2."""
    if isinstance(x, QSqrt2):
        return x
    if isinstance(x, (int, Fraction)):
        return QSqrt2._raw(Fraction(x), _F0)
    raise TypeError(f"cannot use {type(x).__name__} as a Q(sqrt 2) scalar")


def field_add(x: QSqrt2, y: QSqrt2) -> QSqrt2:
    return as_scalar(x) + as_scalar(y)


def field_mul(x: QSqrt2, y: QSqrt2) -> QSqrt2:
    return as_scalar(x) * as_scalar(y)


def field_inv(x: QSqrt2) -> QSqrt2:
    """Multiplicative inverse ``(a - b*sqrt2)/(a**2 - 2*b**2)``.

    Raises ZeroDivisionError on zero.
    """
    return as_scalar(x).inverse()


ZERO = QSqrt2(0, 0)
ONE = QSqrt2(1, 0)
SQRT2 = QSqrt2(0, 1)
