import pytest
from hypothesis import given, settings, strategies as st

from exactsic.towers import (
    FamilyError,
    chsh,
    d_ell,
    ell0,
    family_discriminants,
    four_p_split,
    proposition_scans,
    scan_four_p,
    tower_record,
    xi_norm_check,
)

D_FIXTURES = [5, 13, 29, 53]

# the opening tower over D = 5
D5_DIMS = [4, 8, 19, 48, 124, 323, 844, 2208, 5779, 15128, 39604]


def test_d5_tower():
    assert [d_ell(5, l) for l in range(1, 12)] == D5_DIMS


def test_d0_is_three():
    for D in D_FIXTURES:
        assert d_ell(D, 0) == 3


def test_d2_via_chebyshev():
    assert chsh(2).coeffs == (0, -2, 1)
    assert d_ell(5, 2) == chsh(2)(4) == 8


def test_chsh_small():
    assert chsh(0).coeffs == (3,)
    assert chsh(1).coeffs == (0, 1)
    assert chsh(3).coeffs == (3, 0, -3, 1)


def test_chsh_nesting_identity():
    for m in range(13):
        for n in range(13):
            assert chsh(m).compose(chsh(n)) == chsh(m * n).coeffs


def test_dims_match_chebyshev_of_d1():
    for D in D_FIXTURES:
        rec = tower_record(D)
        d1 = rec.d(1)
        for l in range(9):
            assert rec.d(l) == chsh(l)(d1)


def test_dims_strictly_increasing():
    for D in D_FIXTURES:
        rec = tower_record(D)
        prev = 0
        for l in range(1, 10):
            cur = rec.d(l)
            assert cur > prev
            prev = cur


def test_unit_norm_minus_one():
    for D in D_FIXTURES:
        u = tower_record(D).u_K
        assert u * u.conj() == -1


def test_recursion_from_three_back():
    for D in D_FIXTURES:
        rec = tower_record(D)
        for l in range(1, 4):
            for n in range(3, 8):
                assert rec.d(n * l) == (
                    rec.d(l) * rec.d((n - 1) * l)
                    - rec.d(l) * rec.d((n - 2) * l)
                    + rec.d((n - 3) * l)
                )


def test_congruences():
    for D in [5, 13, 53]:
        rec = tower_record(D)
        for l in range(1, 7):
            for lam in range(1, 10):
                if lam % 3 == 0:
                    assert rec.d(lam * l) % rec.d(l) == 3 % rec.d(l)
                else:
                    assert rec.d(lam * l) % rec.d(l) == 0


def test_d3l_odd_and_three_divides_somewhere():
    for D in D_FIXTURES:
        rec = tower_record(D)
        for l in range(1, 6):
            assert rec.d(3 * l) % 2 == 1
        assert any(rec.d(i) % 3 == 0 for i in (1, 2, 4))


def test_ell0_examples():
    assert ell0(31, 5) == 5
    assert d_ell(5, 5) == 124 == 4 * 31
    assert ell0(2, 5) == 1


def test_ell0_matches_divisibility_scan():
    rec = tower_record(5)
    for q in [2, 7, 11, 29, 31, 211]:
        first = ell0(q, 5)
        hits = [l for l in range(1, 25) if rec.d(l) % q == 0]
        if first == "never":
            assert hits == []
        else:
            assert hits and hits[0] == first


def test_ell0_rejects_three():
    with pytest.raises(ValueError):
        ell0(3, 5)


def test_family_error():
    with pytest.raises(FamilyError):
        d_ell(12, 1)  # not squarefree
    with pytest.raises(FamilyError):
        d_ell(17, 1)  # wrong residue class


def test_family_table_members():
    found, _ = family_discriminants(3000, t_bound=3000)
    for D in [5, 29, 53, 173, 293, 629, 965, 1229, 1685, 1853, 2405]:
        assert D in found


def test_scan_four_p_d5():
    assert scan_four_p(5, 11) == [1, 5, 7, 11]


def test_four_p_split():
    assert four_p_split(4) == 1
    assert four_p_split(28) == 7
    assert four_p_split(48) is None
    assert four_p_split(8) is None  # 2 is not an odd prime


def test_proposition_scans_clean():
    report = proposition_scans()
    assert report["ok"]
    assert report["fourp"]["violations"] == []
    assert report["newprime"]["violations"] == []
    # D = 5 has d1 = 4 = 2^1 + 2, so the level-2 guard must surface
    assert any(g["D"] == 5 for g in report["newprime"]["guard_hits"])
    assert report["qgrowth"]["violations"] == []
    assert report["qgrowth"]["cases"] > 0
    assert report["growth"]["violations"] == []
    assert report["gcd"]["violations"] == []


def test_xi_norm_check():
    for D in D_FIXTURES:
        rep = xi_norm_check(D)
        assert rep["ok"]
        assert rep["routes_agree"]
        assert rep["v2"] == 2
        assert rep["sanity_v2_of_norm_2"] == 4


@settings(max_examples=30, deadline=None)
@given(n=st.integers(min_value=0, max_value=40), x=st.integers(min_value=-30, max_value=30))
def test_chsh_recursion_pointwise(n, x):
    if n < 3:
        return
    assert chsh(n)(x) == x * chsh(n - 1)(x) - x * chsh(n - 2)(x) + chsh(n - 3)(x)
