"""Regenerate the shipped datasets under src/exactsic/data/.

The d52 entries are transcriptions of published minimal-polynomial and
root data for the D = 53 tower; d4 and d12 carry only the towers their
special-path constructions need, and d28 is a deliberate placeholder
with no ingested polynomials.  Every transcribed value is cross-checked
exactly before anything is written (roots against their polynomials,
automorphism images against the level relations), so a typo here fails
loudly instead of poisoning the test suite.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from exactsic.exact import QuadField, TowerSpec, qq
from exactsic.stark_io import PolyData, StarkDataset, apply_tau

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "exactsic" / "data"


def build_d52():
    K = QuadField(53, family=True)

    def e(a, b=0):
        return K.element(qq(*a) if isinstance(a, tuple) else qq(a),
                         qq(*b) if isinstance(b, tuple) else qq(b))

    base = TowerSpec(K, [])
    tw = base.extend("t1", [e((-23, 2), (3, 2)), e(0)])
    t1 = tw.gen("t1")
    c0 = tw.element(e(1, 1)) - (tw.element(e((68, 13), (10, 13))) * t1)
    tw = tw.extend("t2", [c0, tw.zero()])
    tw = tw.extend("t3", [e(-27, 25), e(-78), e(0)])
    tw = tw.extend("xi", [e(2, 1), e(0)])

    t1, t2, t3 = tw.gen("t1"), tw.gen("t2"), tw.gen("t3")
    A = tw.from_quad(K.sqrt_gen())

    r1 = PolyData(
        [e(1), e((-39, 2), (-5, 2)), e(154, 21), e((-39, 2), (-5, 2)), e(1)],
        provenance="paper-fixture",
    )

    p2t = PolyData(
        [
            e(1),
            e((1, 2), (-1, 2)),
            e((-43, 2), (7, 2)),
            e((-113, 2), (15, 2)),
            e((573, 2), (-79, 2)),
            e((391, 2), (-53, 2)),
            e(-891, 122),
            e((391, 2), (-53, 2)),
            e((573, 2), (-79, 2)),
            e((-113, 2), (15, 2)),
            e((-43, 2), (7, 2)),
            e((1, 2), (-1, 2)),
            e(1),
        ],
        provenance="paper-fixture",
    )
    p1t = PolyData(
        [e(57, 4), e((129, 2), (-9, 2)), e(41, -4), e((-15, 2), (3, 2)), e(1)],
        provenance="paper-fixture",
    )

    # r2 is pinned by r2^tau(t^2) = p2t(t) * p2t(-t)
    prod = p2t.mul(p2t.negated_variable())
    assert all(prod.coeffs[k] == 0 for k in range(1, 25, 2))
    p2 = PolyData(list(prod.coeffs[0:25:2]), provenance="computed")
    r2 = apply_tau(p2)
    assert r2.degree == 12 and r2.palindromic_unit() == 1

    # transcribed roots
    alpha0 = (
        (t2 * (t1 * e(58, 8) + e(55, 3)) + t1 * e(18, 2) + e(-30, 6)) * qq(-1, 16)
    )
    beta0 = (
        (t3 * t3 * (t2 * (t1 * (-2) + e(-11, 1)) - t1 * e((42, 13), (10, 13)) + e(-10, 2))
         - t3 * (t2 * (t1 * e(33, 5) + e(-11, 11)) - t1 * 4 + e(-130, 22))
         - t2 * (t1 * e(826, 120) + e(283, 127))
         + t1 * e(318, 70) + e(490, -74))
        * qq(1, 720)
    )

    # cross-checks: the roots satisfy their polynomials exactly
    assert p1t(alpha0) == tw.zero()
    assert p2t(beta0) == tw.zero()
    p1 = apply_tau(r1)
    x0 = e(-2, -1)
    assert p1(alpha0 * alpha0 * x0.inverse()) == tw.zero()

    sigma = {
        "t1": -t1,
        "t2": -(t1 * e(30, 4) + e(23, 3)) * t2 * qq(1, 4),
        "t3": -(t3 * t3 * e(-1, 1) - t3 * e(-41, 1) + e(52, -52)) * qq(1, 30),
        "xi": tw.gen("xi"),
    }
    # automorphism sanity: images satisfy the level relations
    assert sigma["t1"] * sigma["t1"] == t1 * t1
    st2 = sigma["t2"]
    assert st2 * st2 == -(A + 1) + (tw.from_quad(e((68, 13), (10, 13))) * sigma["t1"])
    st3 = sigma["t3"]
    assert st3 * st3 * st3 - st3 * 78 + e(-27, 25) == tw.zero()

    ds = StarkDataset(52, 13, 53, 1, tw, r1=r1, r2=r2,
                      roots={"alpha0": alpha0, "beta0": beta0}, sigma=sigma)
    return ds


def build_d4():
    K = QuadField(5, family=True)
    tw = TowerSpec(K, []).extend("xi", [K.element(qq(2), qq(1)), K.element(qq(0))])
    return StarkDataset(4, 1, 5, 1, tw)


def build_d12():
    K = QuadField(13, family=True)

    def e(a, b=0):
        return K.element(qq(*a) if isinstance(a, tuple) else qq(a),
                         qq(*b) if isinstance(b, tuple) else qq(b))

    base = TowerSpec(K, [])
    tw = base.extend("t1", [e((1, 2), (1, 2)), e(0)])
    t1 = tw.gen("t1")
    eps0 = (tw.from_quad(e(1, -1)) - t1 * 2) * qq(1, 4)
    eps1 = (tw.from_quad(e(1, -1)) + t1 * 2) * qq(1, 4)
    assert eps0 * eps1 == tw.one()
    tw = tw.extend("sqrt_eps", [-tw.element(eps0), tw.zero()])
    tw = tw.extend("xi", [e(2, 1), e(0)])
    return StarkDataset(12, 3, 13, 1, tw)


def build_d28():
    K = QuadField(29, family=True)
    tw = TowerSpec(K, [])
    return StarkDataset(28, 7, 29, 1, tw)


def main():
    OUT.mkdir(exist_ok=True)
    for name, builder in [("d4", build_d4), ("d12", build_d12),
                          ("d28", build_d28), ("d52", build_d52)]:
        ds = builder()
        text = ds.dumps()
        # round-trip before writing
        again = StarkDataset.loads(text)
        assert again.d == ds.d and again.tower == ds.tower
        (OUT / f"{name}.json").write_text(text + "\n", encoding="utf-8")
        print(f"wrote {name}.json (d={ds.d}, tower degree {ds.tower.total_degree})")


if __name__ == "__main__":
    main()
