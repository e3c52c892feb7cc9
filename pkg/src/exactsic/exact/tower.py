"""Towers of finite extensions over a real quadratic field.

A TowerSpec is an ordered list of levels over Q(sqrt(D)).  Level i is
described by a monic minimal polynomial whose coefficients live in the
subtower below level i; the leading coefficient 1 is implicit everywhere.
An element of the tower is stored densely in the power-product basis

    t_1^{e_1} * t_2^{e_2} * ... * t_k^{e_k},   0 <= e_i < deg(level i),

as nested tuples: a depth-k value is a tuple of depth-(k-1) values (one
per power of t_k), and a depth-0 value is a QuadElement.  Degrees per
level are small here (2, 3, or a cyclotomic 12), so schoolbook products
with on-the-fly reduction are perfectly adequate.

Inversion runs the extended Euclidean algorithm over the subtower,
recursing down to QuadElement division.  If the gcd ever comes out with
positive degree the level polynomial was reducible, i.e. the "tower" was
not a field; that is reported as ReducibleLevelError rather than being
allowed to produce nonsense in a ring with zero divisors.

The JSON interchange format for a tower is

    {"D": 53, "levels": [{"name": "t1", "minpoly": [coeff, ...]}, ...]}

with coefficients listed constant first and the leading 1 omitted.  Each
coeff is {"den": "<int>", "num": <nested arrays>}: the nested arrays
mirror the power-product basis of the subtower, the innermost entries
being pairs ["a", "b"] of decimal integer strings for (a + b*sqrt(D))
scaled by the common denominator.
"""

from __future__ import annotations

import json
from math import lcm

from .rational import QQ, qq, qq_height
from .quad import QuadField, QuadElement


class TowerError(Exception):
    pass


class ReducibleLevelError(TowerError):
    """Raised when a level's minimal polynomial turns out to be reducible."""


# ---------------------------------------------------------------------------
# nested-value arithmetic
#
# All helpers take the depth k explicitly; depth 0 is a QuadElement and
# depth k > 0 a tuple of depth-(k-1) values of length tower.degrees[k-1].
# ---------------------------------------------------------------------------


def _zero(tower: TowerSpec, k: int):
    if k == 0:
        return tower.field.zero()
    return tuple(_zero(tower, k - 1) for _ in range(tower.degrees[k - 1]))


def _one(tower: TowerSpec, k: int):
    if k == 0:
        return tower.field.one()
    sub = [_zero(tower, k - 1) for _ in range(tower.degrees[k - 1])]
    sub[0] = _one(tower, k - 1)
    return tuple(sub)


def _from_quad(tower: TowerSpec, k: int, q: QuadElement):
    if k == 0:
        return q
    sub = [_zero(tower, k - 1) for _ in range(tower.degrees[k - 1])]
    sub[0] = _from_quad(tower, k - 1, q)
    return tuple(sub)


def _is_zero(v, k) -> bool:
    if k == 0:
        return not bool(v)
    return all(_is_zero(c, k - 1) for c in v)


def _add(v, w, k):
    if k == 0:
        return v + w
    return tuple(_add(a, b, k - 1) for a, b in zip(v, w))


def _neg(v, k):
    if k == 0:
        return -v
    return tuple(_neg(a, k - 1) for a in v)


def _sub(v, w, k):
    if k == 0:
        return v - w
    return tuple(_sub(a, b, k - 1) for a, b in zip(v, w))


def _mul(tower: TowerSpec, k: int, v, w):
    if k == 0:
        return v * w
    m = tower.degrees[k - 1]
    prod = [_zero(tower, k - 1) for _ in range(2 * m - 1)]
    for i, vi in enumerate(v):
        if _is_zero(vi, k - 1):
            continue
        for j, wj in enumerate(w):
            if _is_zero(wj, k - 1):
                continue
            prod[i + j] = _add(prod[i + j], _mul(tower, k - 1, vi, wj), k - 1)
    f = tower.levels[k - 1].minpoly
    for j in range(2 * m - 2, m - 1, -1):
        c = prod[j]
        if _is_zero(c, k - 1):
            continue
        # x^j = -x^(j-m) * (f_0 + f_1 x + ... + f_{m-1} x^{m-1})
        for i in range(m):
            if not _is_zero(f[i], k - 1):
                prod[j - m + i] = _sub(prod[j - m + i], _mul(tower, k - 1, c, f[i]), k - 1)
    return tuple(prod[:m])


def _scal(tower: TowerSpec, k: int, c, v):
    """Multiply a depth-k value by a depth-(k-1) scalar coefficientwise."""
    return tuple(_mul(tower, k - 1, c, vi) for vi in v)


# polynomial helpers over the depth-k ring, used by inversion at depth k+1

def _poly_trim(p, tower, k):
    n = len(p)
    while n > 0 and _is_zero(p[n - 1], k):
        n -= 1
    return p[:n]


def _poly_divmod(num, den, tower, k):
    num = list(num)
    dden = len(den) - 1
    lead_inv = _inv(tower, k, den[-1])
    quot = [_zero(tower, k) for _ in range(max(0, len(num) - dden))]
    for i in range(len(num) - 1, dden - 1, -1):
        c = _mul(tower, k, num[i], lead_inv)
        if _is_zero(c, k):
            continue
        quot[i - dden] = c
        for j, dj in enumerate(den):
            num[i - dden + j] = _sub(num[i - dden + j], _mul(tower, k, c, dj), k)
    return quot, _poly_trim(num, tower, k)


def _inv(tower: TowerSpec, k: int, v):
    if k == 0:
        return v.inverse()
    if _is_zero(v, k):
        raise ZeroDivisionError("zero element of a tower")
    m = tower.degrees[k - 1]
    sub = k - 1
    modulus = list(tower.levels[k - 1].minpoly) + [_one(tower, sub)]
    r0, r1 = modulus, _poly_trim(list(v), tower, sub)
    s0, s1 = [], [_one(tower, sub)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1, tower, sub)
        r0, r1 = r1, r
        s2 = list(s0)
        # s2 = s0 - q * s1
        prod_len = len(q) + len(s1) - 1
        while len(s2) < prod_len:
            s2.append(_zero(tower, sub))
        for i, qi in enumerate(q):
            if _is_zero(qi, sub):
                continue
            for j, sj in enumerate(s1):
                s2[i + j] = _sub(s2[i + j], _mul(tower, sub, qi, sj), sub)
        s0, s1 = s1, _poly_trim(s2, tower, sub)
        if not r1:
            raise ReducibleLevelError(
                f"level {tower.levels[k - 1].name!r}: minimal polynomial is reducible"
            )
    c_inv = _inv(tower, sub, r1[0])
    out = [_mul(tower, sub, c_inv, c) for c in s1]
    # reduce mod the level polynomial and pad to full length
    if len(out) >= m + 1:
        _, out = _poly_divmod(out, modulus, tower, sub)
        out = list(out)
    while len(out) < m:
        out.append(_zero(tower, sub))
    return tuple(out[:m])


def _height(v, k) -> int:
    if k == 0:
        return v.height()
    return max(_height(c, k - 1) for c in v)


def _map_leaves(v, k, fn):
    if k == 0:
        return fn(v)
    return tuple(_map_leaves(c, k - 1, fn) for c in v)


# ---------------------------------------------------------------------------
# specs and elements
# ---------------------------------------------------------------------------


class TowerLevel:
    """One extension step: a name and a monic minimal polynomial.

    minpoly holds the low-order coefficients (constant first) as nested
    values over the subtower below this level; the leading 1 is implicit,
    so the degree of the step equals len(minpoly).
    """

    __slots__ = ("name", "minpoly")

    def __init__(self, name: str, minpoly: tuple) -> None:
        if len(minpoly) < 2:
            raise ValueError(f"level {name!r}: degree must be at least 2")
        self.name = name
        self.minpoly = tuple(minpoly)

    @property
    def degree(self) -> int:
        return len(self.minpoly)

    def __repr__(self) -> str:
        return f"TowerLevel({self.name!r}, degree {self.degree})"


class TowerSpec:
    """A tower of extensions over Q(sqrt(D)), together with element factories."""

    __slots__ = ("field", "levels", "degrees", "_hash")

    def __init__(self, field: QuadField, levels=()) -> None:
        self.field = field
        self.levels = tuple(levels)
        self.degrees = tuple(lv.degree for lv in self.levels)
        self._hash = None

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def total_degree(self) -> int:
        d = 1
        for m in self.degrees:
            d *= m
        return d

    def level_index(self, name: str) -> int:
        for i, lv in enumerate(self.levels):
            if lv.name == name:
                return i
        raise KeyError(f"no level named {name!r}")

    def subtower(self, depth: int) -> TowerSpec:
        if not 0 <= depth <= self.depth:
            raise ValueError(f"depth {depth} out of range")
        return TowerSpec(self.field, self.levels[:depth])

    def extend(self, name: str, coeffs) -> TowerSpec:
        """New tower with one more level on top.

        coeffs are the low-order coefficients of the monic minimal
        polynomial, given as elements of this tower (or ints/rationals/
        QuadElements, which are coerced).  Irreducibility is not checked
        here; a reducible polynomial surfaces later as
        ReducibleLevelError from the first inversion that hits it.
        """
        nested = tuple(self.element(c)._v for c in coeffs)
        return TowerSpec(self.field, self.levels + (TowerLevel(name, nested),))

    def conjugated(self) -> TowerSpec:
        """The tower with sqrt(D) -> -sqrt(D) applied to every coefficient."""
        new_levels = []
        for i, lv in enumerate(self.levels):
            conj_poly = tuple(_map_leaves(c, i, lambda q: q.conj()) for c in lv.minpoly)
            new_levels.append(TowerLevel(lv.name, conj_poly))
        return TowerSpec(self.field, new_levels)

    # -- factories ---------------------------------------------------------

    def zero(self) -> TowerElement:
        return TowerElement(self, _zero(self, self.depth))

    def one(self) -> TowerElement:
        return TowerElement(self, _one(self, self.depth))

    def from_quad(self, q: QuadElement) -> TowerElement:
        if q.field != self.field:
            raise ValueError("QuadElement from a different base field")
        return TowerElement(self, _from_quad(self, self.depth, q))

    def from_rational(self, r) -> TowerElement:
        return self.from_quad(self.field.element(qq(r)))

    def sqrt_base(self) -> TowerElement:
        """sqrt(D) as a tower element."""
        return self.from_quad(self.field.sqrt_gen())

    def gen(self, which) -> TowerElement:
        """The generator of a level (by index or name) as a top-level element."""
        i = which if isinstance(which, int) else self.level_index(which)
        if not 0 <= i < self.depth:
            raise ValueError(f"no level {which!r}")
        v = _one(self, i)
        # one power of t_{i+1}:
        row = [_zero(self, i) for _ in range(self.degrees[i])]
        row[1] = v
        v = tuple(row)
        for j in range(i + 1, self.depth):
            row = [_zero(self, j) for _ in range(self.degrees[j])]
            row[0] = v
            v = tuple(row)
        return TowerElement(self, v)

    def element(self, x) -> TowerElement:
        """Coerce x (element, generator value, QuadElement, rational) into the tower."""
        if isinstance(x, TowerElement):
            if x.tower == self:
                return x
            return x.lift_to(self)
        if isinstance(x, QuadElement):
            return self.from_quad(x)
        if isinstance(x, (int, QQ)):
            return self.from_rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into a tower")

    # -- misc --------------------------------------------------------------

    def is_prefix_of(self, other: TowerSpec) -> bool:
        if self.field != other.field or self.depth > other.depth:
            return False
        return all(
            a.name == b.name and a.minpoly == b.minpoly
            for a, b in zip(self.levels, other.levels)
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TowerSpec)
            and self.field == other.field
            and self.degrees == other.degrees
            and all(
                a.name == b.name and a.minpoly == b.minpoly
                for a, b in zip(self.levels, other.levels)
            )
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field.D, tuple(lv.name for lv in self.levels), self.degrees))
        return self._hash

    def __repr__(self) -> str:
        names = ", ".join(f"{lv.name}:{lv.degree}" for lv in self.levels)
        return f"TowerSpec(Q(sqrt{self.field.D})[{names}], degree {self.total_degree})"


class TowerElement:
    __slots__ = ("tower", "_v")

    def __init__(self, tower: TowerSpec, nested) -> None:
        self.tower = tower
        self._v = nested

    # -- structure ---------------------------------------------------------

    @property
    def nested(self):
        return self._v

    def top_coeffs(self):
        """Coefficients over the top level as elements of the subtower."""
        if self.tower.depth == 0:
            raise ValueError("tower has no levels")
        sub = self.tower.subtower(self.tower.depth - 1)
        return [TowerElement(sub, c) for c in self._v]

    def lift_to(self, supertower: TowerSpec) -> TowerElement:
        if not self.tower.is_prefix_of(supertower):
            raise ValueError("not a subtower; cannot lift")
        v = self._v
        for j in range(self.tower.depth, supertower.depth):
            row = [_zero(supertower, j) for _ in range(supertower.degrees[j])]
            row[0] = v
            v = tuple(row)
        return TowerElement(supertower, v)

    def as_quad(self) -> QuadElement:
        v, k = self._v, self.tower.depth
        while k > 0:
            if any(not _is_zero(c, k - 1) for c in v[1:]):
                raise ValueError("element is not in the base quadratic field")
            v, k = v[0], k - 1
        return v

    def as_rational(self) -> QQ:
        q = self.as_quad()
        if q.b != 0:
            raise ValueError("element is irrational")
        return q.a

    def height(self) -> int:
        return _height(self._v, self.tower.depth)

    def map_leaves(self, fn, target: TowerSpec | None = None) -> TowerElement:
        """Apply fn to every QuadElement leaf; result lives in target (default: same tower).

        The caller is responsible for fn being compatible with the target
        tower's minimal polynomials (e.g. tau-conjugated coefficients go
        with the conjugated tower).
        """
        t = target if target is not None else self.tower
        if t.degrees != self.tower.degrees:
            raise ValueError("target tower has different shape")
        return TowerElement(t, _map_leaves(self._v, self.tower.depth, fn))

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TowerElement):
            if other.tower != self.tower:
                raise ValueError("elements of different towers")
            return other
        if isinstance(other, (int, QQ, QuadElement)):
            return self.tower.element(other)
        return None

    def __bool__(self) -> bool:
        return not _is_zero(self._v, self.tower.depth)

    def __eq__(self, other) -> bool:
        if isinstance(other, TowerElement):
            return self.tower == other.tower and self._v == other._v
        if isinstance(other, (int, QQ, QuadElement)):
            return self == self.tower.element(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.tower, self._v))

    def __neg__(self) -> TowerElement:
        return TowerElement(self.tower, _neg(self._v, self.tower.depth))

    def __add__(self, other) -> TowerElement:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TowerElement(self.tower, _add(self._v, o._v, self.tower.depth))

    __radd__ = __add__

    def __sub__(self, other) -> TowerElement:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TowerElement(self.tower, _sub(self._v, o._v, self.tower.depth))

    def __rsub__(self, other) -> TowerElement:
        return -(self - other)

    def __mul__(self, other) -> TowerElement:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TowerElement(self.tower, _mul(self.tower, self.tower.depth, self._v, o._v))

    __rmul__ = __mul__

    def inverse(self) -> TowerElement:
        return TowerElement(self.tower, _inv(self.tower, self.tower.depth, self._v))

    def __truediv__(self, other) -> TowerElement:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> TowerElement:
        return self.inverse() * other

    def __pow__(self, n: int) -> TowerElement:
        if n < 0:
            return self.inverse() ** (-n)
        result = self.tower.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self) -> str:
        return f"TowerElement({_render(self._v, self.tower, self.tower.depth)})"


def _render(v, tower, k) -> str:
    if k == 0:
        return repr(v)
    name = tower.levels[k - 1].name
    parts = []
    for e, c in enumerate(v):
        if _is_zero(c, k - 1):
            continue
        inner = _render(c, tower, k - 1)
        if e == 0:
            parts.append(inner)
        else:
            mono = name if e == 1 else f"{name}^{e}"
            parts.append(f"({inner})*{mono}")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def _den_lcm(v, k) -> int:
    if k == 0:
        return lcm(int(v.a.denominator), int(v.b.denominator))
    out = 1
    for c in v:
        out = lcm(out, _den_lcm(c, k - 1))
    return out


def _scaled_num(v, k, den: int):
    if k == 0:
        return [str(int(v.a * den)), str(int(v.b * den))]
    return [_scaled_num(c, k - 1, den) for c in v]


def _coeff_to_json(v, k) -> dict:
    den = _den_lcm(v, k)
    return {"den": str(den), "num": _scaled_num(v, k, den)}


def _coeff_from_json(obj, tower: TowerSpec, k: int):
    den = int(obj["den"])
    if den <= 0:
        raise ValueError("coefficient denominator must be positive")

    def build(num, depth):
        if depth == 0:
            a, b = num
            return tower.field.element(qq(int(a), den), qq(int(b), den))
        if len(num) != tower.degrees[depth - 1]:
            raise ValueError("coefficient array has wrong shape for the tower")
        return tuple(build(c, depth - 1) for c in num)

    return build(obj["num"], k)


def tower_to_json(tower: TowerSpec) -> dict:
    levels = []
    for i, lv in enumerate(tower.levels):
        levels.append(
            {
                "name": lv.name,
                "minpoly": [_coeff_to_json(c, i) for c in lv.minpoly],
            }
        )
    return {"D": tower.field.D, "levels": levels}


def tower_from_json(data, family: bool = False) -> TowerSpec:
    if isinstance(data, str):
        data = json.loads(data)
    field = QuadField(int(data["D"]), family=family)
    tower = TowerSpec(field)
    for lv in data["levels"]:
        k = tower.depth
        coeffs = tuple(_coeff_from_json(c, tower, k) for c in lv["minpoly"])
        tower = TowerSpec(field, tower.levels + (TowerLevel(lv["name"], coeffs),))
    return tower


# standard adjunctions ------------------------------------------------------


def adjoin_i(tower: TowerSpec, name: str = "i") -> TowerSpec:
    """Adjoin a square root of -1 via x^2 + 1."""
    return tower.extend(name, [tower.one(), tower.zero()])


def adjoin_zeta(tower: TowerSpec, p: int, name: str | None = None) -> TowerSpec:
    """Adjoin a primitive p-th root of unity via the p-th cyclotomic polynomial.

    p must be prime, so the polynomial is 1 + x + ... + x^(p-1).  Over the
    towers used here it stays irreducible (their ramification is disjoint
    from p's); if that ever fails for an unusual input, arithmetic in the
    extended tower raises ReducibleLevelError at the first inversion.
    """
    from sympy import isprime

    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    return tower.extend(name or f"zeta{p}", [tower.one()] * (p - 1))


def adjoin_tau(tower: TowerSpec, name: str = "tau8") -> TowerSpec:
    """Adjoin a primitive 8th root of unity via x^4 + 1 (standard-basis path only)."""
    z = tower.zero()
    return tower.extend(name, [tower.one(), z, z])
