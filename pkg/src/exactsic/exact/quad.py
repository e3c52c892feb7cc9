"""Exact arithmetic in real quadratic fields Q(sqrt(D)).

An element is stored as a pair (a, b) of rationals meaning a + b*sqrt(D),
with D a positive squarefree integer carried by the field object.
Division goes through the conjugate,

    1 / (a + b*sqrt(D)) = (a - b*sqrt(D)) / (a^2 - D*b^2),

and the denominator on the right is a nonzero rational whenever the
element is nonzero, precisely because D is not a square.
"""

from __future__ import annotations

from .rational import QQ, qq, qq_height, is_squarefree


class QuadField:
    """The field Q(sqrt(D)) for a positive squarefree D.

    With family=True the constructor additionally insists on D = 5 mod 8,
    the congruence satisfied by the squarefree part of d + 1 for every
    dimension d = n^2 + 3 handled here (n odd makes n^2 + 4 = 5 mod 8).
    """

    __slots__ = ("D",)

    def __init__(self, D: int, family: bool = False) -> None:
        if not is_squarefree(D) or D <= 1:
            raise ValueError(f"D must be squarefree and > 1, got {D}")
        if family and D % 8 != 5:
            raise ValueError(f"family discriminants satisfy D = 5 mod 8, got {D}")
        self.D = D

    def __eq__(self, other) -> bool:
        return isinstance(other, QuadField) and self.D == other.D

    def __hash__(self) -> int:
        return hash(("QuadField", self.D))

    def __repr__(self) -> str:
        return f"QuadField({self.D})"

    def element(self, a, b=0) -> QuadElement:
        return QuadElement(qq(a), qq(b), self)

    def zero(self) -> QuadElement:
        return self.element(0)

    def one(self) -> QuadElement:
        return self.element(1)

    def sqrt_gen(self) -> QuadElement:
        """The generator sqrt(D)."""
        return self.element(0, 1)


class QuadElement:
    __slots__ = ("a", "b", "field")

    def __init__(self, a: QQ, b: QQ, field: QuadField) -> None:
        self.a = a
        self.b = b
        self.field = field

    def _check(self, other: QuadElement) -> None:
        if self.field != other.field:
            raise ValueError("elements of different quadratic fields")

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadElement):
            return self.field == other.field and self.a == other.a and self.b == other.b
        if isinstance(other, (int, QQ)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.field.D))

    def __neg__(self) -> QuadElement:
        return QuadElement(-self.a, -self.b, self.field)

    def _coerce(self, other):
        if isinstance(other, QuadElement):
            self._check(other)
            return other
        if isinstance(other, (int, QQ)):
            return QuadElement(qq(other), qq(0), self.field)
        return None

    def __add__(self, other) -> QuadElement:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElement(self.a + o.a, self.b + o.b, self.field)

    __radd__ = __add__

    def __sub__(self, other) -> QuadElement:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElement(self.a - o.a, self.b - o.b, self.field)

    def __rsub__(self, other) -> QuadElement:
        return -(self - other)

    def __mul__(self, other) -> QuadElement:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        D = self.field.D
        return QuadElement(
            self.a * o.a + D * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.field,
        )

    __rmul__ = __mul__

    def conj(self) -> QuadElement:
        """The nontrivial field automorphism sqrt(D) -> -sqrt(D)."""
        return QuadElement(self.a, -self.b, self.field)

    def norm(self) -> QQ:
        return self.a * self.a - self.field.D * self.b * self.b

    def trace(self) -> QQ:
        return 2 * self.a

    def inverse(self) -> QuadElement:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero element of a quadratic field")
        return QuadElement(self.a / n, -self.b / n, self.field)

    def __truediv__(self, other) -> QuadElement:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> QuadElement:
        return self.inverse() * other

    def __pow__(self, n: int) -> QuadElement:
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def height(self) -> int:
        return max(qq_height(self.a), qq_height(self.b))

    def __repr__(self) -> str:
        if self.b == 0:
            return str(self.a)
        s = "" if self.a == 0 else f"{self.a} "
        sign = "-" if self.b < 0 else ("+" if s else "")
        mag = abs(self.b)
        coef = "" if mag == 1 else f"{mag}*"
        if s and sign:
            return f"{s}{sign} {coef}sqrt({self.field.D})"
        return f"{sign}{coef}sqrt({self.field.D})"
