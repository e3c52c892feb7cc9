import random

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from exactsic.exact import QuadField, qq
from exactsic.exact.quad import QuadElement
from exactsic.exact.tower import (
    TowerSpec,
    ReducibleLevelError,
    adjoin_i,
    adjoin_zeta,
    tower_from_json,
    tower_to_json,
)
from exactsic.exact.embed import Ball, EmbeddingContext, EmbeddingFiber, PrecisionError
from exactsic.exact.reconstruct import rational_reconstruct, ReconstructionError


K53 = QuadField(53)
A = K53.sqrt_gen()


def test_quad_conjugate_product():
    x0 = K53.element(-2) - A
    assert x0 * x0.conj() == -49
    assert A * A == 53


def test_quad_division_and_norm():
    x = K53.element(qq(3, 2), qq(-5, 7))
    assert x / x == 1
    assert x * x.inverse() == 1
    assert x.norm() == qq(3, 2) ** 2 - 53 * qq(5, 7) ** 2


def test_quad_family_congruence():
    QuadField(53, family=True)
    QuadField(29, family=True)
    with pytest.raises(ValueError):
        QuadField(17, family=True)
    with pytest.raises(ValueError):
        QuadField(12)  # not squarefree


def test_tower_level_relations(tower53):
    T = tower53
    a = T.sqrt_base()
    t1, t2, t3, xi = (T.gen(n) for n in ("t1", "t2", "t3", "xi"))
    assert t1 * t1 == -(3 * a - 23) / 2
    assert t2 * t2 == -(a + 1) + ((10 * a + 68) / 13) * t1
    assert t3**3 - 78 * t3 + 25 * a - 27 == 0
    assert xi * xi == -2 - a


def _random_element(T, rng, size=6):
    x = T.zero()
    gens = [T.one(), T.sqrt_base()] + [T.gen(i) for i in range(T.depth)]
    for _ in range(size):
        g = rng.choice(gens)
        c = qq(rng.randint(-9, 9), rng.randint(1, 5))
        x = x + c * g
        if rng.random() < 0.3:
            x = x * g
    return x


def test_ring_axioms_random(tower53):
    rng = random.Random(20260821)
    T = tower53
    for _ in range(200):
        x = _random_element(T, rng, size=3)
        y = _random_element(T, rng, size=3)
        z = _random_element(T, rng, size=3)
        assert x + y == y + x
        assert x * y == y * x
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z


def test_inverse_roundtrip_random(tower53):
    rng = random.Random(7)
    T = tower53
    for _ in range(100):
        x = _random_element(T, rng, size=4)
        if not x:
            continue
        assert x * x.inverse() == T.one()


def test_reducible_level_is_reported():
    T = TowerSpec(K53).extend("u", [K53.element(-1), K53.zero()])  # x^2 - 1
    u = T.gen("u")
    with pytest.raises(ReducibleLevelError):
        (u - 1).inverse()


def test_tower_json_roundtrip(tower53):
    data = tower_to_json(tower53)
    back = tower_from_json(data)
    assert back == tower53
    # coefficients with denominators survive
    assert back.levels[1].minpoly == tower53.levels[1].minpoly


def test_embed_base_values(tower53):
    ctx = EmbeddingContext(tower53, precision=128)
    b = ctx.embed(A)
    assert abs(b.c - mpmath.mpf("7.2801098892805181")) < 1e-12
    x0 = K53.element(-2) - A
    b0 = ctx.embed(x0)
    assert abs(b0.c - mpmath.mpf("-9.2801098892805181")) < 1e-12
    z = ctx.embed(tower53.zero())
    assert z.c == 0 and z.r == 0


def test_embed_radius_meets_contract(tower53):
    ctx = EmbeddingContext(tower53, precision=128)
    for root in ctx.roots:
        assert root.r <= mpmath.mpf(2) ** (-128)


def test_embed_is_multiplicative(tower53):
    rng = random.Random(99)
    ctx = EmbeddingContext(tower53, precision=128)
    for _ in range(20):
        x = _random_element(tower53, rng, size=3)
        y = _random_element(tower53, rng, size=3)
        bx, by, bxy = ctx.embed(x), ctx.embed(y), ctx.embed(x * y)
        with mpmath.workprec(ctx.wprec):
            prod = bx * by
            assert prod.overlaps(bxy)


def test_reconstruct_rational_examples(tower53):
    ctx = EmbeddingContext(tower53, precision=128)
    third = ctx.embed(tower53.from_rational(qq(1, 3)))
    assert rational_reconstruct(third, None, height_bound=100) == qq(1, 3)


def test_reconstruct_quad_example(tower53):
    fib = EmbeddingFiber(tower53.subtower(0), precision=128)
    want = A / 2  # 3.6400549...
    zp = fib.embed(want, 1, ())
    zm = fib.embed(want, -1, ())
    assert abs(zp.c - mpmath.mpf("3.64005494464")) < 1e-9
    got = rational_reconstruct((zp, zm), K53, height_bound=1000)
    assert got == want


def test_reconstruct_tower_roundtrip(tower53):
    sub = tower53.subtower(2)  # up to t2, degree 8 over Q
    fib = EmbeddingFiber(sub, precision=128)
    t2 = sub.gen("t2")
    vals = {addr: fib.embed(t2, *addr) for addr in fib.addresses()}
    got = rational_reconstruct(vals, sub, height_bound=10**6, fiber=fib)
    assert got == t2


@settings(max_examples=40, deadline=None)
@given(
    num=st.integers(min_value=-40, max_value=40),
    den=st.integers(min_value=1, max_value=12),
    bnum=st.integers(min_value=-40, max_value=40),
)
def test_reconstruct_embed_identity_quad(num, den, bnum):
    field = QuadField(29)
    x = field.element(qq(num, den), qq(bnum, den))
    fib = EmbeddingFiber(TowerSpec(field), precision=128)
    zp = fib.embed(x, 1, ())
    zm = fib.embed(x, -1, ())
    assert rational_reconstruct((zp, zm), field, height_bound=10**4) == x


def test_reconstruct_rejects_too_wide_ball():
    wide = Ball(mpmath.mpf("0.3333333"), mpmath.mpf("1e-3"))
    with pytest.raises(PrecisionError):
        rational_reconstruct(wide, None, height_bound=10**9)


def test_reconstruct_rejects_nonreal():
    z = Ball(mpmath.mpc(1, 1), mpmath.mpf("1e-30"))
    with pytest.raises(ReconstructionError):
        rational_reconstruct(z, None, height_bound=100)


def test_certification_fails_on_double_root():
    # (w^2 - a)^2 = w^4 - 2a w^2 + a^2 has double roots; certification
    # must refuse rather than guess
    bad = TowerSpec(K53).extend("w", [A * A, K53.zero(), -2 * A, K53.zero()])
    with pytest.raises(PrecisionError):
        EmbeddingContext(bad, precision=128)


def test_adjoin_helpers(tower53):
    Ti = adjoin_i(tower53)
    i = Ti.gen("i")
    assert i * i == -1
    Tz = adjoin_zeta(TowerSpec(K53), 5)
    z = Tz.gen("zeta5")
    assert z**5 == 1
    assert 1 + z + z**2 + z**3 + z**4 == 0


def test_subtower_lift_roundtrip(tower53):
    sub = tower53.subtower(2)
    x = (sub.gen("t1") + 2) * sub.gen("t2")
    lifted = x.lift_to(tower53)
    assert lifted.tower == tower53
    assert lifted * lifted == (x * x).lift_to(tower53)
