"""Exact ground fields: the rationals and prime fields GF(p)."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class RationalField:
    """The field of rational numbers, backed by :class:`fractions.Fraction`."""

    characteristic = 0

    def __call__(self, value) -> Fraction:
        if isinstance(value, GFElement):
            raise TypeError("cannot coerce a prime-field element to a rational")
        return Fraction(value)

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """GF(p) for a prime p."""

    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.characteristic = p

    @property
    def p(self) -> int:
        return self.characteristic

    def __call__(self, value) -> "GFElement":
        if isinstance(value, GFElement):
            if value.p != self.p:
                raise TypeError("mixing prime fields")
            return value
        if isinstance(value, int):
            return GFElement(value % self.p, self.p)
        if isinstance(value, Rational):
            num, den = value.numerator, value.denominator
            if den % self.p == 0:
                raise ZeroDivisionError(f"{value} is not defined in GF({self.p})")
            return GFElement(num * pow(den, -1, self.p) % self.p, self.p)
        raise TypeError(f"cannot coerce {value!r} to GF({self.p})")

    @property
    def zero(self) -> "GFElement":
        return GFElement(0, self.p)

    @property
    def one(self) -> "GFElement":
        return GFElement(1, self.p)

    def elements(self):
        return [GFElement(v, self.p) for v in range(self.p)]

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


class GFElement:
    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v
        self.p = p

    def _coerce(self, other):
        if isinstance(other, GFElement):
            if other.p != self.p:
                raise TypeError("mixing prime fields")
            return other.v
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Rational):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElement((self.v + o) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElement((self.v - o) % self.p, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElement((o - self.v) % self.p, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElement(self.v * o % self.p, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError("division by zero in GF(p)")
        return GFElement(self.v * pow(o, -1, self.p) % self.p, self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.v == 0:
            raise ZeroDivisionError("division by zero in GF(p)")
        return GFElement(o * pow(self.v, -1, self.p) % self.p, self.p)

    def __pow__(self, k: int):
        if k < 0:
            return GFElement(pow(pow(self.v, -1, self.p), -k, self.p), self.p)
        return GFElement(pow(self.v, k, self.p), self.p)

    def __neg__(self):
        return GFElement(-self.v % self.p, self.p)

    def __pos__(self):
        return self

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.v == o

    def __hash__(self):
        return hash((self.v, self.p))

    def __int__(self):
        return self.v

    def __repr__(self):
        return str(self.v)


QQ = RationalField()


def field_from_spec(spec: str):
    """Parse ``"QQ"``/``"rationals"`` or ``"GF(p)"``/``"p"`` into a field."""
    s = str(spec).strip().lower()
    if s in ("qq", "q", "rationals", "rational"):
        return QQ
    if s.startswith("gf(") and s.endswith(")"):
        s = s[3:-1]
    if s.startswith("prime:"):
        s = s[6:]
    try:
        return PrimeField(int(s))
    except ValueError:
        raise ValueError(f"unknown field {spec!r}") from None


def format_scalar(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)
