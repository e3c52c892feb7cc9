"""Complex ball arithmetic and certified embeddings of tower elements.

A Ball is a complex center plus a nonnegative radius that is maintained
as a rigorous error bound through arithmetic.  Centers are mpmath numbers
computed at a working precision with 64 guard bits beyond the requested
precision; every operation inflates the radius by generous ulp margins
(a factor 2^6 above the worst-case rounding error of correctly rounded
mpmath operations), rather than by directed rounding.  Exact zeros stay
exact: the zero ball has radius 0 and survives addition and
multiplication untouched.

An EmbeddingContext fixes one complex embedding of a tower: sqrt(D) goes
to the positive square root, and each level generator goes to one chosen
root of its minimal polynomial (largest real part, ties broken by largest
imaginary part).  Each chosen root is certified by the interval Newton
test: if c - f(c)/f'(B) lands strictly inside B, then B contains exactly
one root of every polynomial whose coefficients lie in the coefficient
balls, and the contraction is iterated until the radius drops below
2^(-precision - 16).

An EmbeddingFiber enumerates *all* complex embeddings (both signs of
sqrt(D), every root at every level), organised as a tree so that callers
can ask which embeddings of the full tower extend a given embedding of a
subtower.  Reconstruction and the Galois machinery are built on fibers.
"""

from __future__ import annotations

import mpmath
from mpmath import mp, mpf, mpc

from .rational import QQ
from .quad import QuadElement
from .tower import TowerSpec, TowerElement

GUARD_BITS = 64
_MARGIN_BITS = 6


class PrecisionError(ArithmeticError):
    """A certified operation could not be completed at the current precision."""


def _eps() -> mpf:
    return mpf(2) ** (_MARGIN_BITS - mp.prec)


class Ball:
    __slots__ = ("c", "r")

    def __init__(self, center, radius=0) -> None:
        self.c = mpc(center)
        self.r = mpf(radius)
        if self.r < 0:
            raise ValueError("negative radius")

    @classmethod
    def exact_zero(cls) -> Ball:
        return cls(0, 0)

    @classmethod
    def from_rational(cls, x: QQ) -> Ball:
        c = mpf(x.numerator) / mpf(x.denominator)
        r = 0 if x == 0 else abs(c) * _eps()
        return cls(c, r)

    @property
    def contains_zero(self) -> bool:
        return abs(self.c) <= self.r

    def mag_upper(self) -> mpf:
        return abs(self.c) + self.r

    def mag_lower(self) -> mpf:
        lo = abs(self.c) - self.r
        return lo if lo > 0 else mpf(0)

    def __neg__(self) -> Ball:
        return Ball(-self.c, self.r)

    def conj(self) -> Ball:
        return Ball(mpmath.conj(self.c), self.r)

    def __add__(self, other) -> Ball:
        o = other if isinstance(other, Ball) else Ball(other)
        c = self.c + o.c
        bump = abs(c) * _eps()
        return Ball(c, (self.r + o.r) * (1 + _eps()) + bump)

    __radd__ = __add__

    def __sub__(self, other) -> Ball:
        o = other if isinstance(other, Ball) else Ball(other)
        return self + (-o)

    def __rsub__(self, other) -> Ball:
        return (-self) + other

    def __mul__(self, other) -> Ball:
        o = other if isinstance(other, Ball) else Ball(other)
        c = self.c * o.c
        r = abs(self.c) * o.r + abs(o.c) * self.r + self.r * o.r
        return Ball(c, r * (1 + 4 * _eps()) + abs(c) * _eps())

    __rmul__ = __mul__

    def inverse(self) -> Ball:
        lo = abs(self.c) - self.r
        if lo <= 0:
            raise PrecisionError("ball contains zero; cannot invert")
        c = 1 / self.c
        r = self.r / (abs(self.c) * lo)
        return Ball(c, r * (1 + 4 * _eps()) + abs(c) * _eps())

    def __truediv__(self, other) -> Ball:
        o = other if isinstance(other, Ball) else Ball(other)
        return self * o.inverse()

    def __rtruediv__(self, other) -> Ball:
        return self.inverse() * other

    def __pow__(self, n: int) -> Ball:
        if n < 0:
            return self.inverse() ** (-n)
        out = Ball(1, 0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sqrt(self) -> Ball:
        """Principal square root; requires a ball that excludes zero and
        stays clear of the negative real axis."""
        lo = abs(self.c) - self.r
        if lo <= 0:
            raise PrecisionError("ball contains zero; sqrt not certified")
        if self.c.real < 0 and abs(self.c.imag) <= self.r:
            raise PrecisionError("ball may cross the branch cut; sqrt not certified")
        c = mpmath.sqrt(self.c)
        r = self.r / (2 * mpmath.sqrt(lo))
        return Ball(c, r * (1 + 4 * _eps()) + abs(c) * _eps())

    def real_ball(self) -> Ball:
        return Ball(self.c.real, self.r)

    def contains_ball(self, other: Ball) -> bool:
        """Strict containment: other lies in the interior of self."""
        return abs(self.c - other.c) + other.r < self.r

    def overlaps(self, other: Ball) -> bool:
        return abs(self.c - other.c) <= self.r + other.r

    def __repr__(self) -> str:
        return f"Ball({mpmath.nstr(self.c, 12)} +/- {mpmath.nstr(self.r, 3)})"


# ---------------------------------------------------------------------------
# certified roots of a polynomial with ball coefficients
# ---------------------------------------------------------------------------


def _poly_eval_ball(coeffs: list[Ball], z: Ball) -> Ball:
    out = Ball.exact_zero()
    for c in reversed(coeffs):
        out = out * z + c
    return out


def _poly_derivative(coeffs: list[Ball]) -> list[Ball]:
    return [c * k for k, c in enumerate(coeffs) if k > 0]


def certified_roots(coeffs: list[Ball], target_radius: mpf, label: str = "") -> list[Ball]:
    """All roots of a monic-or-not polynomial with ball coefficients, as
    pairwise disjoint certified balls of radius <= target_radius.

    Raises PrecisionError (with a hint to raise the precision) if the
    roots cannot be separated and certified at the working precision.
    """
    deg = len(coeffs) - 1
    if deg < 1:
        raise ValueError("constant polynomial has no roots")
    centers = [c.c for c in coeffs]
    try:
        approx = mpmath.polyroots(list(reversed(centers)), maxsteps=200, extraprec=80)
    except mpmath.libmp.NoConvergence as exc:
        raise PrecisionError(
            f"root finding did not converge{' at ' + label if label else ''}; "
            "retry with higher precision"
        ) from exc
    deriv = _poly_derivative(coeffs)
    balls = []
    for z0 in approx:
        ball = _newton_certify(coeffs, deriv, mpc(z0), target_radius, label)
        balls.append(ball)
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            if balls[i].overlaps(balls[j]):
                raise PrecisionError(
                    f"root separation failed{' at ' + label if label else ''}; "
                    "retry with higher precision"
                )
    return balls


def _newton_certify(coeffs, deriv, z0: mpc, target_radius: mpf, label: str) -> Ball:
    # polish the center first
    z = z0
    for _ in range(4):
        fz = _poly_eval_ball(coeffs, Ball(z)).c
        dz = _poly_eval_ball(deriv, Ball(z)).c
        if dz == 0:
            break
        z = z - fz / dz
    dz = _poly_eval_ball(deriv, Ball(z)).c
    fz = _poly_eval_ball(coeffs, Ball(z)).c
    if dz == 0:
        raise PrecisionError(f"derivative vanishes near a root{' at ' + label if label else ''}")
    r = 4 * abs(fz / dz) + mpf(2) ** (-mp.prec + 8) * (1 + abs(z))
    for _attempt in range(40):
        B = Ball(z, r)
        fc = _poly_eval_ball(coeffs, Ball(z))
        fpB = _poly_eval_ball(deriv, B)
        if not fpB.contains_zero:
            N = Ball(z) - fc / fpB
            if B.contains_ball(N):
                # contract until small enough
                for _ in range(60):
                    if N.r <= target_radius:
                        return N
                    B = N
                    fc = _poly_eval_ball(coeffs, Ball(B.c))
                    fpB = _poly_eval_ball(deriv, B)
                    if fpB.contains_zero:
                        break
                    N2 = Ball(B.c) - fc / fpB
                    if not B.contains_ball(N2):
                        break
                    N = N2
                if N.r <= target_radius:
                    return N
                raise PrecisionError(
                    f"root ball would not contract to the requested radius"
                    f"{' at ' + label if label else ''}; retry with higher precision"
                )
        r = r * 2
    raise PrecisionError(
        f"interval Newton certification failed{' at ' + label if label else ''}; "
        "retry with higher precision"
    )


# ---------------------------------------------------------------------------
# embedding contexts
# ---------------------------------------------------------------------------


def _embed_value(v, k, sqrtD: Ball, roots: list[Ball]) -> Ball:
    if k == 0:
        out = Ball.from_rational(v.a)
        if v.b != 0:
            out = out + Ball.from_rational(v.b) * sqrtD
        return out
    t = roots[k - 1]
    out = Ball.exact_zero()
    for c in reversed(v):
        out = out * t + _embed_value(c, k - 1, sqrtD, roots)
    return out


class EmbeddingContext:
    """One fixed complex embedding of a tower, with certified root balls.

    precision is in bits; the context works internally at precision +
    GUARD_BITS.  Level roots are certified to radius <= 2^(-precision-16),
    so embeddings of moderate-height elements come out with radius below
    2^(-precision + slack) where the slack grows only with the element's
    height and the tower degree.
    """

    def __init__(self, tower: TowerSpec, precision: int = 128, conjugate_base: bool = False):
        if precision < 64:
            raise ValueError("precision must be at least 64 bits")
        self.tower = tower
        self.precision = precision
        self.wprec = precision + GUARD_BITS
        self.conjugate_base = conjugate_base
        with mpmath.workprec(self.wprec):
            s = mpmath.sqrt(mpf(tower.field.D))
            if conjugate_base:
                s = -s
            self.sqrtD = Ball(s, abs(s) * _eps())
            target = mpf(2) ** (-(precision + 16))
            self.roots: list[Ball] = []
            for i, lv in enumerate(tower.levels):
                poly = [
                    _embed_value(c, i, self.sqrtD, self.roots) for c in lv.minpoly
                ] + [Ball(1)]
                balls = certified_roots(poly, target, label=f"level {lv.name!r}")
                self.roots.append(self._select_root(balls))

    @staticmethod
    def _select_root(balls: list[Ball]) -> Ball:
        def key(b: Ball):
            return (b.c.real, b.c.imag)

        return max(balls, key=key)

    def clone(self) -> EmbeddingContext:
        return self

    def embed(self, x) -> Ball:
        """Certified ball containing the image of x under this embedding."""
        with mpmath.workprec(self.wprec):
            if isinstance(x, TowerElement):
                if x.tower != self.tower and not x.tower.is_prefix_of(self.tower):
                    raise ValueError("element does not live in this context's tower")
                return _embed_value(x.nested, x.tower.depth, self.sqrtD, self.roots)
            if isinstance(x, QuadElement):
                if x.field != self.tower.field:
                    raise ValueError("QuadElement from a different base field")
                return _embed_value(x, 0, self.sqrtD, self.roots)
            if isinstance(x, (int, QQ)):
                return Ball.from_rational(QQ(x))
            raise TypeError(f"cannot embed {type(x).__name__}")

    def __repr__(self) -> str:
        tag = "conjugate" if self.conjugate_base else "principal"
        return f"EmbeddingContext({self.tower!r}, {self.precision} bits, {tag})"


class EmbeddingFiber:
    """All complex embeddings of a tower, organised as a rooted tree.

    An embedding is addressed by (sign, path): sign is +1 or -1 for the
    image of sqrt(D), and path[i] picks one root of level i's minimal
    polynomial (as embedded along the earlier part of the path).  Root
    lists per node are certified and pairwise disjoint, so distinct paths
    give distinct embeddings.
    """

    def __init__(self, tower: TowerSpec, precision: int = 128):
        if precision < 64:
            raise ValueError("precision must be at least 64 bits")
        self.tower = tower
        self.precision = precision
        self.wprec = precision + GUARD_BITS
        self._nodes: dict[tuple[int, tuple[int, ...]], list[Ball]] = {}
        with mpmath.workprec(self.wprec):
            target = mpf(2) ** (-(precision + 16))
            for sign in (1, -1):
                s = mpmath.sqrt(mpf(tower.field.D)) * sign
                sqrtD = Ball(s, abs(s) * _eps())
                self._grow(sqrtD, sign, (), [], target)

    def _grow(self, sqrtD, sign, path, root_chain, target):
        depth = len(path)
        if depth == self.tower.depth:
            return
        lv = self.tower.levels[depth]
        poly = [_embed_value(c, depth, sqrtD, root_chain) for c in lv.minpoly] + [Ball(1)]
        balls = certified_roots(poly, target, label=f"level {lv.name!r}, path {path}")
        self._nodes[(sign, path)] = balls
        for idx, b in enumerate(balls):
            self._grow(sqrtD, sign, path + (idx,), root_chain + [b], target)

    def roots_at(self, sign: int, path: tuple[int, ...]) -> list[Ball]:
        return self._nodes[(sign, path)]

    def addresses(self, depth: int | None = None):
        """All (sign, path) pairs for embeddings of the first `depth` levels."""
        d = self.tower.depth if depth is None else depth
        out = []

        def walk(sign, path):
            if len(path) == d:
                out.append((sign, path))
                return
            for idx in range(len(self._nodes[(sign, path)])):
                walk(sign, path + (idx,))

        for sign in (1, -1):
            walk(sign, ())
        return out

    def sqrtD_ball(self, sign: int) -> Ball:
        with mpmath.workprec(self.wprec):
            s = mpmath.sqrt(mpf(self.tower.field.D)) * sign
            return Ball(s, abs(s) * _eps())

    def root_chain(self, sign: int, path: tuple[int, ...]) -> list[Ball]:
        return [self._nodes[(sign, path[:i])][path[i]] for i in range(len(path))]

    def embed(self, x, sign: int, path: tuple[int, ...]) -> Ball:
        """Image of x under the embedding addressed by (sign, path).

        x may live in a subtower; the path must cover at least x's depth.
        """
        with mpmath.workprec(self.wprec):
            sqrtD = self.sqrtD_ball(sign)
            if isinstance(x, TowerElement):
                chain = self.root_chain(sign, path[: x.tower.depth])
                return _embed_value(x.nested, x.tower.depth, sqrtD, chain)
            if isinstance(x, QuadElement):
                return _embed_value(x, 0, sqrtD, [])
            if isinstance(x, (int, QQ)):
                return Ball.from_rational(QQ(x))
            raise TypeError(f"cannot embed {type(x).__name__}")
