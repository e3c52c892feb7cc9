"""Recovering exact values from certified balls.

Three cases, in increasing generality:

  * a rational from one ball: continued fractions on the (exact, dyadic)
    center, accepting the first convergent that lands inside the ball and
    under the height bound;
  * an element of Q(sqrt(D)) from a pair of balls for the two real
    embeddings: a 2x2 solve gives balls for the rational coordinates a
    and b of a + b*sqrt(D), then continued fractions on each;
  * a tower element from one ball per complex embedding of the tower:
    level by level, the values of the coefficients under each embedding
    of the subtower are obtained by solving a small Vandermonde system in
    the roots of that level's minimal polynomial, recursing down to the
    quadratic case.

Every result is verified by re-embedding at doubled precision before it
is returned; a failed verification raises ReconstructionError rather
than returning a plausible-looking wrong answer.  Tolerances are driven
by the radii of the input balls, never by ambient float precision.
There is deliberately no lattice reduction here: continued fractions
over Q plus the two-dimensional solves over Q(sqrt(D)) are all the
pipeline needs.
"""

from __future__ import annotations

import mpmath
from mpmath import mpf

from .rational import QQ, qq, qq_height
from .quad import QuadField, QuadElement
from .tower import TowerSpec, TowerElement
from .embed import Ball, EmbeddingFiber, PrecisionError

DEFAULT_HEIGHT_BOUND = 10**12


class ReconstructionError(ArithmeticError):
    pass


def _mpf_to_qq(x) -> QQ:
    """Exact rational value of a dyadic float.

    The conversion must not round, so mpf inputs are read out of their raw
    mantissa/exponent representation rather than passed through mpf()
    (which would re-round to the ambient precision).
    """
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise ReconstructionError("cannot reconstruct from an infinite or nan center")
        num, den = x.as_integer_ratio()
        return qq(num, den)
    raw = getattr(x, "_mpf_", None)
    if raw is None:
        raw = mpf(x)._mpf_
    sign, man, exp, _ = raw
    if man == 0:
        if x == 0:
            return qq(0)
        raise ReconstructionError("cannot reconstruct from an infinite or nan center")
    v = qq(man) * (qq(2) ** exp if exp >= 0 else 1 / (qq(2) ** (-exp)))
    return -v if sign else v


def _radius_bits(r) -> int:
    """How many bits of agreement a radius allows; large means tight."""
    if r <= 0:
        return 4096
    return max(0, int(-mpmath.log(mpf(r), 2)))


def _cf_reconstruct(center: QQ, tol: QQ, height_bound: int) -> QQ:
    """First continued-fraction convergent of center within tol, or raise."""
    if abs(center) <= tol:
        return qq(0)
    if center.denominator == 1:
        return center
    p_prev, q_prev = qq(1), qq(0)
    p_cur = q_cur = None
    x = center
    for _ in range(20_000):
        a = x.numerator // x.denominator
        if p_cur is None:
            p_cur, q_cur = qq(a), qq(1)
        else:
            p_cur, p_prev = a * p_cur + p_prev, p_cur
            q_cur, q_prev = a * q_cur + q_prev, q_cur
        cand = p_cur / q_cur
        if abs(cand - center) <= tol:
            if qq_height(cand) > height_bound:
                raise ReconstructionError(
                    f"nearest rational in the ball has height above {height_bound}"
                )
            return cand
        if qq_height(cand) > height_bound * height_bound:
            break
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    raise ReconstructionError(
        f"no rational of height <= {height_bound} inside the ball; "
        "raise the precision or the height bound"
    )


def _precision_guard(radius, height_bound: int) -> None:
    # documented heuristic: need about twice as many digits as the height has
    if radius <= 0:
        return
    if mpf(radius) * mpf(height_bound) ** 2 > 1:
        raise PrecisionError(
            "ball too wide for this height bound "
            "(need precision of roughly 2*log10(height) digits)"
        )


def _ball_tol(z: Ball) -> QQ:
    """Exact tolerance for membership in the ball, with a whisker of slack
    for the rounding of the radius bookkeeping itself."""
    if z.r == 0:
        return qq(0)
    r = _mpf_to_qq(z.r)
    return r + r / 1024


def _check_real(z: Ball, what: str) -> QQ:
    """Imaginary part must be explained by the radius; returns the center
    of the real part as an exact rational."""
    tol = _ball_tol(z)
    im = _mpf_to_qq(z.c.imag)
    if abs(im) > tol:
        raise ReconstructionError(f"{what}: ball is not consistent with a real value")
    return _mpf_to_qq(z.c.real)


def _reconstruct_rational(z: Ball, height_bound: int) -> QQ:
    _precision_guard(z.r, height_bound)
    center = _check_real(z, "rational reconstruction")
    return _cf_reconstruct(center, _ball_tol(z), height_bound)


def _reconstruct_quad(z_pair, field: QuadField, height_bound: int) -> QuadElement:
    zp, zm = z_pair
    wp = max(128, _radius_bits(zp.r) + 64, _radius_bits(zm.r) + 64)
    wp = min(wp, 1 << 20)
    with mpmath.workprec(wp):
        sqrtD = mpmath.sqrt(mpf(field.D))
        half = Ball(mpf(1) / 2)
        inv2s = Ball(1 / (2 * sqrtD), abs(1 / (2 * sqrtD)) * mpf(2) ** (8 - wp))
        a_ball = (zp + zm) * half
        b_ball = (zp - zm) * inv2s
        a = _reconstruct_rational(a_ball, height_bound)
        b = _reconstruct_rational(b_ball, height_bound)
    return field.element(a, b)


def _solve_vandermonde(roots: list[Ball], values: list[Ball]) -> list[Ball]:
    """Solve sum_j c_j * r_i^j = v_i for the c_j, by Gaussian elimination."""
    m = len(roots)
    rows = [[r**j for j in range(m)] + [values[i]] for i, r in enumerate(roots)]
    for col in range(m):
        piv = max(range(col, m), key=lambda i: rows[i][col].mag_lower())
        if rows[piv][col].mag_lower() == 0:
            raise PrecisionError("Vandermonde pivot ball touches zero; raise precision")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].inverse()
        rows[col] = [e * inv for e in rows[col]]
        for i in range(m):
            if i == col:
                continue
            factor = rows[i][col]
            if factor.c == 0 and factor.r == 0:
                continue
            rows[i] = [e - factor * rows[col][j] for j, e in enumerate(rows[i])]
    return [rows[j][m] for j in range(m)]


def _reconstruct_tower_value(values: dict, fiber: EmbeddingFiber, depth: int,
                             height_bound: int):
    """Nested value at the given depth from per-embedding balls."""
    tower = fiber.tower
    if depth == 0:
        return _reconstruct_quad((values[(1, ())], values[(-1, ())]),
                                 tower.field, height_bound)
    m = tower.degrees[depth - 1]
    sub_values = [dict() for _ in range(m)]
    for sign, path in fiber.addresses(depth - 1):
        roots = fiber.roots_at(sign, path)
        vals = [values[(sign, path + (i,))] for i in range(len(roots))]
        coeff_balls = _solve_vandermonde(roots, vals)
        for j in range(m):
            sub_values[j][(sign, path)] = coeff_balls[j]
    return tuple(
        _reconstruct_tower_value(sub_values[j], fiber, depth - 1, height_bound)
        for j in range(m)
    )


def rational_reconstruct(z, field=None, height_bound: int = DEFAULT_HEIGHT_BOUND,
                         fiber: EmbeddingFiber | None = None):
    """Exact value from certified numerical data.

    field=None          z is a Ball, result is a rational (QQ)
    field=QuadField     z is a pair of Balls (principal and conjugate
                        embedding values), result is a QuadElement
    field=TowerSpec     z maps each embedding address (sign, path) of the
                        tower to a Ball; fiber must be the EmbeddingFiber
                        those addresses come from; result is a TowerElement

    The result always re-embeds, at doubled precision, into the given
    ball(s); otherwise ReconstructionError is raised.
    """
    if field is None:
        out = _reconstruct_rational(z, height_bound)
        _verify_rational(out, z)
        return out

    if isinstance(field, QuadField):
        out = _reconstruct_quad(z, field, height_bound)
        _verify_quad(out, z)
        return out

    if isinstance(field, TowerSpec):
        if fiber is None:
            raise ValueError("tower reconstruction needs the EmbeddingFiber the balls came from")
        if fiber.tower != field:
            raise ValueError("fiber belongs to a different tower")
        missing = [a for a in fiber.addresses() if a not in z]
        if missing:
            raise ValueError(f"missing embedding values for {len(missing)} addresses")
        with mpmath.workprec(fiber.wprec):
            nested = _reconstruct_tower_value(dict(z), fiber, field.depth, height_bound)
        out = TowerElement(field, nested)
        _verify_tower(out, z, fiber)
        return out

    raise TypeError(f"unsupported reconstruction target {field!r}")


def _verify_rational(x: QQ, z: Ball) -> None:
    # the comparison is exact: |x - center| against radius with a whisker
    center = _mpf_to_qq(z.c.real)
    tol = _ball_tol(z)
    if abs(x - center) > tol or abs(_mpf_to_qq(z.c.imag)) > tol:
        raise ReconstructionError("verification failed: value does not re-embed into the ball")


def _verify_quad(x: QuadElement, z_pair) -> None:
    zp, zm = z_pair
    wp = 2 * max(128, _radius_bits(zp.r), _radius_bits(zm.r))
    wp = min(wp, 1 << 21)
    with mpmath.workprec(wp):
        s = mpmath.sqrt(mpf(x.field.D))
        for sign, z in ((1, zp), (-1, zm)):
            v = mpf(x.a.numerator) / mpf(x.a.denominator) + sign * s * (
                mpf(x.b.numerator) / mpf(x.b.denominator)
            )
            tol = z.r + (abs(v) + 1) * mpf(2) ** (-(wp // 2))
            if abs(v - z.c) > tol:
                raise ReconstructionError(
                    "verification failed: value does not re-embed into the ball"
                )


def _verify_tower(x: TowerElement, values: dict, fiber: EmbeddingFiber) -> None:
    check = getattr(fiber, "_doubled", None)
    if check is None or check.precision < 2 * fiber.precision:
        check = EmbeddingFiber(fiber.tower, 2 * fiber.precision)
        fiber._doubled = check
    for sign, path in check.addresses():
        z = _match_address(values, fiber, check, sign, path)
        if z is None:
            raise ReconstructionError(
                "verification failed: could not match embeddings across precisions"
            )
        v = check.embed(x, sign, path)
        tol = z.r + v.r + z.mag_upper() * mpf(2) ** (-fiber.precision // 2)
        if abs(v.c - z.c) > tol:
            raise ReconstructionError(
                "verification failed: value does not re-embed into the input balls"
            )


def _match_address(values, fiber, check, sign, path):
    """Root indices can come out in a different order at a different
    precision, so match the doubled-precision address to the original one
    by ball overlap along the chain."""
    orig_path = []
    for i in range(len(path)):
        target = check.roots_at(sign, tuple(path[:i]))[path[i]]
        cands = fiber.roots_at(sign, tuple(orig_path))
        hit = None
        for idx, b in enumerate(cands):
            if b.overlaps(target):
                hit = idx
                break
        if hit is None:
            return None
        orig_path.append(hit)
    return values.get((sign, tuple(orig_path)))
