"""Automorphisms of a tower: discovery, orders, orbits, and root lifting.

Discovery walks the tower level by level.  A partial automorphism of the
first k levels transports level k's minimal polynomial; the extensions
are the roots of the transported polynomial inside level k+1, found with
exact arithmetic: for quadratic levels the other root comes from the
quadratic formula, whose discriminant square root is taken by algebraic
denesting (recursing through pure s = v^2 substitutions down to the
a^2 - D b^2 test in K), and for cubic levels by dividing out the known
generator root.  Nothing here factors polynomials over number fields in
general; the only numeric step is a small certified-embedding search
used when a square root lives across a non-quadratic level, and its
output is verified exactly before use.
"""

from __future__ import annotations

import itertools

import gmpy2

from .exact import (
    EmbeddingContext,
    EmbeddingFiber,
    QQ,
    QuadElement,
    ReconstructionError,
    TowerElement,
    TowerSpec,
    qq,
    rational_reconstruct,
)
from .exact.embed import PrecisionError


class GaloisError(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact square roots
# ---------------------------------------------------------------------------


def _rational_sqrt(x: QQ):
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    rn, rd = gmpy2.isqrt(num), gmpy2.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return qq(rn, rd)
    return None


def _sqrt_in_quad(z: QuadElement):
    """A square root of z inside K itself, or None."""
    a, b, D = z.a, z.b, z.field.D
    if b == 0:
        u = _rational_sqrt(a)
        if u is not None:
            return z.field.element(u)
        v = _rational_sqrt(a / D)
        if v is not None:
            return z.field.element(qq(0), v)
        return None
    disc = _rational_sqrt(a * a - D * b * b)
    if disc is None:
        return None
    for s in (（a + disc) / 2 for （a in (a,)) if False else ((a + disc) / 2, (a - disc) / 2):
        u = _rational_sqrt(s)
        if u is not None and u != 0:
            cand = z.field.element(u, b / (2 * u))
            if cand * cand == z:
                return cand
        v = _rational_sqrt(s / D)
        if v is not None and v != 0:
            cand = z.field.element(b / (2 * v * D) * D / D if False else b / (2 * v), v)
            # cand = u' + v sqrt(D) with u' = b/(2v) read off the cross term
            cand = z.field.element(b / (2 * v), v)
            if cand * cand == z:
                return cand
    return None


def _strip_to_minimal(z: TowerElement):
    """Drop top levels in which z has no nonzero coefficients."""
    while z.tower.depth > 0:
        top = z.top_coeffs()
        if any(not _nested_is_zero(c, z.tower.depth - 1) for c in top[1:]):
            break
        sub = z.tower.subtower(z.tower.depth - 1)
        z = TowerElement(sub, top[0])
    return z


def _nested_is_zero(v, depth) -> bool:
    if depth == 0:
        return v == 0
    return all(_nested_is_zero(c, depth - 1) for c in v)


def _nested_as_quad(v, depth):
    """The QuadElement a depth-k value equals, or None if it is deeper."""
    if depth == 0:
        return v
    rest = [_nested_is_zero(c, depth - 1) for c in v[1:]]
    if not all(rest):
        return None
    return _nested_as_quad(v[0], depth - 1)


def _sqrt_rec(z: TowerElement):
    """Square root of z in its own (minimal) tower, or None."""
    z = _strip_to_minimal(z)
    tw = z.tower
    if tw.depth == 0:
        q = _sqrt_in_quad(z.as_quad())
        return None if q is None else tw.from_quad(q)

    level = tw.levels[-1]
    sub = tw.subtower(tw.depth - 1)
    top = z.top_coeffs()

    if level.degree == 2:
        # z = z0 + z1 g with g^2 = -B g - C; solve (u + v g)^2 = z
        z0 = TowerElement(sub, top[0])
        z1 = TowerElement(sub, top[1])
        B = TowerElement(sub, level.minpoly[1])
        C = TowerElement(sub, level.minpoly[0])
        P = B * B - C * 4
        if P == sub.zero():
            return None
        Q = (B * z1 * 2 - z0 * 4) ** 2 - P * (z1 * z1) * 4
        e = _sqrt_rec(Q)
        if e is None:
            return None
        e = e.lift_to(sub)
        g = tw.gen(level.name)
        for sgn in (1, -1):
            s = (z0 * 4 - B * z1 * 2 + e * sgn) * P.inverse() * qq(1, 2)
            v = _sqrt_rec(s)
            if v is None:
                continue
            v = v.lift_to(sub)
            if v == sub.zero():
                if z1 != sub.zero():
                    continue
                u2 = _sqrt_rec(z0)
                if u2 is None:
                    continue
                return u2.lift_to(tw)
            u = (z1 * v.inverse() + B * v) * qq(1, 2)
            w = u.lift_to(tw) + v.lift_to(tw) * g
            if w * w == z.lift_to(tw):
                return w
        return None

    # non-quadratic top level: handle the case where everything in sight
    # lives in K(g) by searching a small standalone tower
    coeff_quads = [_nested_as_quad(c, tw.depth - 1) for c in top]
    mp_quads = [_nested_as_quad(c, tw.depth - 1) for c in level.minpoly]
    if all(c is not None for c in coeff_quads + mp_quads):
        side = TowerSpec(tw.field, []).extend(level.name, list(mp_quads))
        g = side.gen(level.name)
        acc = side.zero()
        for c in reversed(coeff_quads):
            acc = acc * g + side.from_quad(c)
        w_side = _sqrt_by_search(acc)
        if w_side is None:
            return None
        g_main = tw.gen(level.name)
        out = tw.zero()
        for c in reversed(w_side.top_coeffs()):
            out = out * g_main + TowerElement(sub, c).lift_to(tw)
        return out if out * out == z.lift_to(tw) else None

    if tw.total_degree <= 6:
        return _sqrt_by_search(z)
    return None


def _sqrt_by_search(z: TowerElement, precision: int = 192):
    """Certified-embedding sign search for sqrt(z) in z's own tower."""
    tw = z.tower
    try:
        fiber = EmbeddingFiber(tw, precision=precision)
    except PrecisionError:
        return None
    addrs = list(fiber.addresses())
    if len(addrs) > 13:
        return None
    balls = {}
    for sign, path in addrs:
        b = fiber.embed(z, sign, path)
        if b.contains_zero():
            return None
        balls[(sign, path)] = b.sqrt()
    first = addrs[0]
    for bits in range(1 << (len(addrs) - 1)):
        values = {}
        for k, addr in enumerate(addrs):
            flip = False if addr == first else bool((bits >> (k - 1)) & 1)
            values[addr] = -balls[addr] if flip else balls[addr]
        try:
            w = rational_reconstruct(values, tw, fiber=fiber)
        except (ReconstructionError, PrecisionError):
            continue
        if w * w == z:
            return w
    return None


def exact_sqrt(z, tower: TowerSpec | None = None):
    """A w with w*w = z, inside `tower` (or z's own tower); GaloisError if none found.

    z may be a QuadElement or a TowerElement of (a prefix of) the tower.
    """
    if isinstance(z, QuadElement):
        if tower is None:
            q = _sqrt_in_quad(z)
            if q is None:
                raise GaloisError(f"{z!r} has no square root in K")
            return q
        z = tower.from_quad(z)
    if tower is None:
        tower = z.tower
    zt = z.lift_to(tower) if z.tower.depth < tower.depth else z

    # generator shortcut: catches sqrt(x0) = xi and friends
    for lv in tower.levels:
        if lv.degree != 2:
            continue
        g = tower.gen(lv.name)
        ratio_src = g * g
        if ratio_src == zt:
            return g
        try:
            ratio = (zt * (g * g).inverse()).as_rational()
        except (ValueError, ZeroDivisionError):
            ratio = None
        if ratio is not None:
            r = _rational_sqrt(ratio)
            if r is not None:
                return g * r

    w = _sqrt_rec(zt)
    if w is None:
        raise GaloisError("no square root found in the tower")
    return w.lift_to(tower)


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------


def _eval_under_images(v, depth: int, tower: TowerSpec, images) -> TowerElement:
    """Evaluate a depth-`depth` nested value with each generator replaced
    by images[k] (elements of `tower`)."""
    if depth == 0:
        return tower.from_quad(v)
    acc = tower.zero()
    img = images[depth - 1]
    for c in reversed(v):
        acc = acc * img + _eval_under_images(c, depth - 1, tower, images)
    return acc


class Automorphism:
    """A field map of the tower fixing K, given by generator images."""

    __slots__ = ("tower", "images", "_verified")

    def __init__(self, tower: TowerSpec, images, verify: bool = True):
        self.tower = tower
        imgs = []
        for k, lv in enumerate(tower.levels):
            im = images[lv.name] if isinstance(images, dict) else images[k]
            imgs.append(im.lift_to(tower) if im.tower.depth < tower.depth else im)
        self.images = tuple(imgs)
        if len(self.images) != tower.depth:
            raise GaloisError("one image per level is required")
        self._verified = False
        if verify:
            self.verify()

    def verify(self) -> None:
        for k, lv in enumerate(self.tower.levels):
            img = self.images[k]
            acc = self.tower.one()
            val = self.tower.zero()
            for c in lv.minpoly:
                cc = _eval_under_images(c, k, self.tower, self.images)
                val = val + cc * acc
                acc = acc * img
            val = val + acc  # implicit leading 1
            if val != self.tower.zero():
                raise GaloisError(
                    f"image of {lv.name!r} is not a root of its transported minimal polynomial"
                )
        self._verified = True

    def apply(self, x) -> TowerElement:
        if isinstance(x, QuadElement):
            return self.tower.from_quad(x)
        if not x.tower.is_prefix_of(self.tower):
            raise GaloisError("element does not live in this automorphism's tower")
        return _eval_under_images(x.nested, x.tower.depth, self.tower, self.images)

    def __call__(self, x) -> TowerElement:
        return self.apply(x)

    def compose(self, other: Automorphism) -> Automorphism:
        """self after other."""
        return Automorphism(
            self.tower, [self.apply(im) for im in other.images], verify=False
        )

    def is_identity(self) -> bool:
        return all(
            im == self.tower.gen(lv.name) for im, lv in zip(self.images, self.tower.levels)
        )

    def order(self, bound: int = 64) -> int:
        g = self
        for n in range(1, bound + 1):
            if g.is_identity():
                return n
            g = self.compose(g)
        raise GaloisError(f"order exceeds {bound}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Automorphism)
            and self.tower == other.tower
            and self.images == other.images
        )

    def __hash__(self):
        return hash((self.tower, self.images))

    def sort_key(self):
        return repr([im.top_coeffs() for im in self.images])

    def to_json(self) -> dict:
        from .stark_io import _value_to_json

        return {
            "images": {
                lv.name: _value_to_json(im)
                for lv, im in zip(self.tower.levels, self.images)
            }
        }

    @classmethod
    def from_json(cls, obj: dict, tower: TowerSpec) -> Automorphism:
        from .stark_io import _value_from_json

        images = {k: _value_from_json(v, tower) for k, v in obj["images"].items()}
        return cls(tower, images)

    def __repr__(self) -> str:
        ims = ", ".join(
            f"{lv.name} -> {im!r}" for lv, im in zip(self.tower.levels, self.images)
        )
        return f"Automorphism({ims})"


class GaloisGroup:
    __slots__ = ("tower", "elements", "_orders")

    def __init__(self, tower: TowerSpec, elements):
        self.tower = tower
        self.elements = tuple(elements)
        self._orders = {}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def identity(self) -> Automorphism:
        for g in self.elements:
            if g.is_identity():
                return g
        raise GaloisError("group has no identity element")

    def order_of(self, g: Automorphism) -> int:
        key = g.sort_key()
        if key not in self._orders:
            self._orders[key] = g.order(bound=len(self.elements))
        return self._orders[key]

    def check_closure(self, samples: int = 12) -> None:
        import random

        rng = random.Random(1)
        keys = {g.sort_key() for g in self.elements}
        for _ in range(samples):
            a, b = rng.choice(self.elements), rng.choice(self.elements)
            if a.compose(b).sort_key() not in keys:
                raise GaloisError("composition left the element list")

    def distinguished_sigma(self, order: int, fixes: str | None = None) -> Automorphism:
        """The lexicographically first element of the given order; with
        `fixes`, also required to fix that level's generator."""
        cands = []
        for g in self.elements:
            if fixes is not None:
                k = self.tower.level_index(fixes)
                if g.images[k] != self.tower.gen(fixes):
                    continue
            if self.order_of(g) == order:
                cands.append(g)
        if not cands:
            raise GaloisError(f"no element of order {order} found")
        return min(cands, key=Automorphism.sort_key)

    def conjugation(self, ctx: EmbeddingContext | None = None) -> Automorphism:
        """The unique element acting as complex conjugation on embeddings."""
        if ctx is None:
            ctx = EmbeddingContext(self.tower, precision=128)
        found = []
        for g in self.elements:
            ok = True
            for lv in self.tower.levels:
                want = ctx.embed(self.tower.gen(lv.name)).conj()
                got = ctx.embed(g.apply(self.tower.gen(lv.name)))
                if not want.overlaps(got):
                    ok = False
                    break
            if ok:
                found.append(g)
        if len(found) != 1:
            raise GaloisError(f"expected one conjugation element, found {len(found)}")
        return found[0]


def find_automorphisms(tower: TowerSpec, ctx: EmbeddingContext | None = None) -> GaloisGroup:
    """All automorphisms of the tower over K (the abelian, normal case)."""
    partials = [()]  # tuples of images, elements of the growing subtower
    for k, lv in enumerate(tower.levels):
        sub = tower.subtower(k)
        ext = tower.subtower(k + 1)
        gen = ext.gen(lv.name)
        new_partials = []
        for partial in partials:
            lifted = tuple(im.lift_to(ext) for im in partial)
            tcoeffs = [
                _eval_under_images(c, k, ext, lifted) for c in lv.minpoly
            ]
            orig = [TowerElement(sub, c).lift_to(ext) for c in lv.minpoly]
            moved = tcoeffs != orig
            if lv.degree == 2:
                B, C = tcoeffs[1], tcoeffs[0]
                if not moved:
                    roots = [gen, -B - gen]
                else:
                    disc = B * B - C * 4
                    try:
                        w = exact_sqrt(disc, ext)
                    except GaloisError:
                        raise GaloisError(
                            f"tower is not normal over K at level {lv.name!r}"
                        ) from None
                    half = qq(1, 2)
                    roots = [(-B + w) * half, (-B - w) * half]
            elif lv.degree == 3:
                if moved:
                    raise GaloisError(
                        f"degree-3 level {lv.name!r} with moved coefficients is unsupported"
                    )
                b2, b1 = tcoeffs[2], tcoeffs[1]
                B = b2 + gen
                C = b1 + b2 * gen + gen * gen
                disc = B * B - C * 4
                try:
                    w = exact_sqrt(disc, ext)
                except GaloisError:
                    raise GaloisError(
                        f"tower is not normal over K at level {lv.name!r}"
                    ) from None
                half = qq(1, 2)
                roots = [gen, (-B + w) * half, (-B - w) * half]
            else:
                raise GaloisError(
                    f"level {lv.name!r} has degree {lv.degree}; only 2 and 3 are supported"
                )
            for r in roots:
                new_partials.append(lifted + (r,))
        partials = new_partials
    elements = [Automorphism(tower, list(p)) for p in partials]
    if len(elements) != tower.total_degree:
        raise GaloisError(
            f"found {len(elements)} automorphisms for a degree-{tower.total_degree} tower"
        )
    return GaloisGroup(tower, elements)


# ---------------------------------------------------------------------------
# orbits and root lifting
# ---------------------------------------------------------------------------


def orbit(x, sigma: Automorphism, length: int):
    out = [x if isinstance(x, TowerElement) else sigma.tower.element(x)]
    out[0] = out[0].lift_to(sigma.tower)
    for _ in range(length - 1):
        out.append(sigma.apply(out[-1]))
    return out


def root_lift(f, tower: TowerSpec, ctx: EmbeddingContext | None = None,
              precision: int = 256, height_bound: int = 10**12) -> TowerElement:
    """One x in the tower with f(x) = 0, verified by exact substitution.

    f is a PolyData or coefficient list (constant first) over K.  Degrees
    1 and 2 are solved directly; for higher degree the root is located in
    the prefix subtower of matching degree by a certified-embedding
    search over root assignments (degree at most 4).
    """
    coeffs = list(f.coeffs) if hasattr(f, "coeffs") else list(f)
    if not coeffs or coeffs[-1] != tower.field.one():
        raise GaloisError("a monic polynomial over K is required")
    m = len(coeffs) - 1
    if m == 0:
        raise GaloisError("constant polynomial has no roots")
    if m == 1:
        return tower.from_quad(-coeffs[0])
    if m == 2:
        disc = coeffs[1] * coeffs[1] - coeffs[0] * 4
        w = exact_sqrt(disc, tower)
        root = (tower.from_quad(-coeffs[1]) + w) * qq(1, 2)
        _check_root(coeffs, root, tower)
        return root
    if m > 4:
        raise GaloisError(
            f"root lifting by embedding search is limited to degree 4 (got {m})"
        )
    sub = None
    for k in range(tower.depth + 1):
        if tower.subtower(k).total_degree == m:
            sub = tower.subtower(k)
            break
    if sub is None:
        raise GaloisError(f"tower has no prefix subfield of degree {m} over K")

    fiber = EmbeddingFiber(sub, precision=precision)
    by_sign = {1: [], -1: []}
    for sign in (1, -1):
        ctx_s = EmbeddingContext(sub, precision=precision, conjugate_base=(sign == -1))
        import mpmath

        from .exact.embed import certified_roots

        with mpmath.workprec(ctx_s.wprec):
            cb = [ctx_s.embed(c) for c in coeffs]
            target = mpmath.mpf(2) ** (-(precision + 16))
            by_sign[sign] = certified_roots(cb, target, label=f"root_lift sign {sign}")

    addrs = {1: [], -1: []}
    for sign, path in fiber.addresses():
        addrs[sign].append((sign, path))
    for perm_p in itertools.permutations(range(m)):
        vals_p = {addr: by_sign[1][perm_p[i]] for i, addr in enumerate(addrs[1])}
        for perm_m in itertools.permutations(range(m)):
            values = dict(vals_p)
            for i, addr in enumerate(addrs[-1]):
                values[addr] = by_sign[-1][perm_m[i]]
            try:
                x = rational_reconstruct(values, sub, fiber=fiber,
                                         height_bound=height_bound)
            except (ReconstructionError, PrecisionError):
                continue
            try:
                _check_root(coeffs, x.lift_to(tower), tower)
            except GaloisError:
                continue
            return x.lift_to(tower)
    raise GaloisError("no root of the polynomial lies in the tower (at this precision)")


def _check_root(coeffs, x: TowerElement, tower: TowerSpec) -> None:
    acc = tower.zero()
    for c in reversed(coeffs):
        acc = acc * x + tower.from_quad(c) if isinstance(c, QuadElement) else acc * x + c
    if acc != tower.zero():
        raise GaloisError("claimed root does not satisfy the polynomial")
