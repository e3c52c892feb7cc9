import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactsic.heisenberg import (
    BlockOperator,
    MonomialOp,
    clifford_specials,
    crt_combine,
    diagonal_symplectic,
    monomial_rep4,
    parity_op,
    standard_rep,
    standard_x,
    standard_z,
    zauner_perm,
)


def test_standard_z_dim4_is_omega_diagonal():
    z = standard_z(4)
    assert z.cols == (0, 1, 2, 3)
    # tau^2 = omega = i, so the diagonal is (1, i, i^2, i^3)
    assert z.exps == (0, 2, 4, 6)


def test_standard_commutation_zx_eq_omega_xz():
    for dim in (3, 4, 5, 13):
        x, z = standard_x(dim), standard_z(dim)
        assert (z @ x) == (x @ z).scaled(2)


def test_standard_generators_have_order_d():
    for dim in (3, 4, 7):
        assert (standard_x(dim) ** dim).is_identity()
        assert (standard_z(dim) ** dim).is_identity()


def test_displacement_product_central_phase():
    # D_ij D_kl = tau^(jk - il) D_(i+k)(j+l), exact when the index sums
    # stay below d so no wraparound sign enters
    rng = random.Random(7)
    for dim, rep in [(4, standard_rep), (5, standard_rep), (13, standard_rep)]:
        for _ in range(20):
            i, j = rng.randrange(dim), rng.randrange(dim)
            k, l = rng.randrange(dim), rng.randrange(dim)
            prod = rep(dim, (i, j)) @ rep(dim, (k, l))
            target = rep(dim, ((i + k) % dim, (j + l) % dim))
            c = prod.proportional_exponent(target)
            assert c is not None
            if i + k < dim and j + l < dim:
                assert c == (j * k - i * l) % prod.order


def test_monomial_rep4_group_law():
    rng = random.Random(11)
    for _ in range(20):
        i, j, k, l = (rng.randrange(4) for _ in range(4))
        prod = monomial_rep4((i, j)) @ monomial_rep4((k, l))
        c = prod.proportional_exponent(monomial_rep4(((i + k) % 4, (j + l) % 4)))
        assert c is not None
        if i + k < 4 and j + l < 4:
            assert c == (j * k - i * l) % 8


def test_monomial_rep4_order_two_displacements_are_diagonal():
    assert monomial_rep4((2, 0)) == MonomialOp.diagonal(4, [0, 0, 4, 4])
    assert monomial_rep4((0, 2)) == MonomialOp.diagonal(4, [0, 4, 0, 4])
    assert monomial_rep4((2, 2)) == MonomialOp.diagonal(4, [4, 0, 0, 4])


def test_standard_rep_order_two_displacement_is_sigma_z_like():
    # in the standard basis D_(0,2) = Z^2 = diag(1, -1, 1, -1)
    assert standard_rep(4, (0, 2)) == MonomialOp.diagonal(4, [0, 4, 0, 4])


def test_clifford_specials_fixed_matrices():
    sp = clifford_specials()
    uz = sp["U_Z4"]
    assert uz == MonomialOp.permutation(4, [1, 2, 0, 3])
    assert (uz**3).is_identity()
    assert not (uz**2).is_identity()

    up = sp["U_P4"]
    assert up == MonomialOp.diagonal(4, [0, 0, 0, 4])
    assert (up**2).is_identity()

    diag, conj_first = sp["A_J4"]
    assert conj_first is True
    assert diag == MonomialOp.diagonal(4, [0, 2, 6, 0])  # diag(1, i, -i, 1)

    t = sp["T_basis"]
    assert t["scale"] == "1/sqrt(2)"
    assert t["exps"][2] == (3, None, 7, None)


def test_um_conjugates_rotation_to_its_square():
    sp = clifford_specials()
    um, uz = sp["U_M4"], sp["U_Z4"]
    assert um @ uz @ um.inverse() == uz**2


def test_rotation_action_on_dim4_displacements():
    # U_Z4 D_(i,j) U_Z4^-1 is proportional to D_(-j, i-j)
    uz = clifford_specials()["U_Z4"]
    for i in range(4):
        for j in range(4):
            conj = uz @ monomial_rep4((i, j)) @ uz.inverse()
            target = monomial_rep4(((-j) % 4, (i - j) % 4))
            assert conj.proportional_exponent(target) is not None


def test_parity_action_on_dim4_displacements():
    up = clifford_specials()["U_P4"]
    for i in range(4):
        for j in range(4):
            conj = up @ monomial_rep4((i, j)) @ up.inverse()
            assert conj.proportional_exponent(monomial_rep4((-i, -j))) is not None


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_diagonal_symplectic_action(p):
    # U_F D_(i,j) U_F^-1 proportional to D_(delta^-1 i, delta j)
    rng = random.Random(p)
    delta = rng.choice([d for d in range(2, p) if d != 1])
    uf = diagonal_symplectic(p, delta)
    dinv = pow(delta, -1, p)
    for i in range(p):
        for j in range(p):
            conj = uf @ standard_rep(p, (i, j)) @ uf.inverse()
            target = standard_rep(p, ((dinv * i) % p, (delta * j) % p))
            assert conj.proportional_exponent(target) is not None


def test_zauner_perm_d52_factor():
    # p = 13, theta = 7, ell = 1: delta = 7^4 = 9 mod 13
    uf = zauner_perm(13, 7, 1)
    assert uf.cols == tuple((9 * r) % 13 for r in range(13))
    assert (uf**3).is_identity()
    assert not uf.is_identity()
    assert (uf @ uf.inverse()).is_identity()
    # the inverse flag picks delta^-1 = 3
    assert zauner_perm(13, 7, 1, inverse=True).cols == tuple((3 * r) % 13 for r in range(13))


def test_zauner_perm_rejects_non_generator():
    with pytest.raises(ValueError, match="generate"):
        zauner_perm(13, 3, 1)
    with pytest.raises(ValueError, match="divide"):
        zauner_perm(13, 7, 3)


def test_parity_op_squares_to_identity():
    for p in (5, 13):
        assert (parity_op(p) ** 2).is_identity()
        assert not parity_op(p).is_identity()


def test_apply_with_materialised_phases():
    z = standard_z(4)
    out = z.apply([1, 1, 1, 1], phase_fn=lambda e: 1j ** (e // 2))
    assert out == [1, 1j, (-1 + 0j), (-1j)]

    x = standard_x(4)
    assert x.apply([10, 20, 30, 40]) == [40, 10, 20, 30]


def test_apply_requires_phase_fn_when_phases_present():
    with pytest.raises(ValueError, match="materialiser"):
        standard_z(4).apply([1, 1, 1, 1])


def test_omega_exponent_rewrite():
    z = standard_z(5)
    assert z.omega_exps() == (0, 1, 2, 3, 4)
    with pytest.raises(ValueError):
        standard_z(4).omega_exps()


def test_block_operator_moves_blocks_and_entries():
    uz = clifford_specials()["U_Z4"]
    xp = standard_x(3)
    op = crt_combine(uz, xp)
    blocks = [[1, 2, 3], [4, 5, 6], [7, 8, 9], [10, 11, 12]]
    out = op.apply(blocks, phase4=None, phasep=None)
    # block r receives block cols[r] = (1,2,0,3), cyclically shifted
    assert out == [[6, 4, 5], [9, 7, 8], [3, 1, 2], [12, 10, 11]]


def test_block_operator_conjugate_first():
    diag, conj_first = clifford_specials()["A_J4"]
    op = BlockOperator(diag, MonomialOp.identity(3), conjugate_first=conj_first)
    blocks = [[1j, 0, 0], [1j, 0, 0], [1j, 0, 0], [1j, 0, 0]]
    out = op.apply(
        blocks,
        phase4=lambda e: 1j ** (e // 2),
        phasep=None,
        conj=lambda x: x.conjugate(),
    )
    assert out[0][0] == -1j
    assert out[1][0] == 1  # i * conj(i)
    assert out[2][0] == -1  # -i * conj(i)
    with pytest.raises(ValueError, match="conjugation"):
        op.apply(blocks, phase4=lambda e: 1j ** (e // 2), phasep=None)


def test_inverse_and_associativity_randomised():
    rng = random.Random(3)
    for dim in (4, 13):
        ops = []
        for _ in range(6):
            cols = list(range(dim))
            rng.shuffle(cols)
            exps = [rng.randrange(2 * dim) for _ in range(dim)]
            ops.append(MonomialOp(dim, cols, exps))
        for op in ops:
            assert (op @ op.inverse()).is_identity()
            assert (op.inverse() @ op).is_identity()
        for _ in range(20):
            a, b, c = (rng.choice(ops) for _ in range(3))
            assert (a @ b) @ c == a @ (b @ c)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=0, max_value=12),
    st.integers(min_value=0, max_value=12),
    st.integers(min_value=0, max_value=12),
    st.integers(min_value=0, max_value=12),
)
def test_displacement_inverse_index(i, j, k, l):
    # D_(i,j)^-1 is proportional to D_(-i,-j) in dimension 13
    d = standard_rep(13, (i, j))
    assert d.inverse().proportional_exponent(standard_rep(13, (-i, -j))) is not None
    # and products always land on the summed index up to phase
    prod = standard_rep(13, (i, j)) @ standard_rep(13, (k, l))
    assert prod.proportional_exponent(standard_rep(13, (i + k, j + l))) is not None


def test_rejects_non_permutation():
    with pytest.raises(ValueError, match="permutation"):
        MonomialOp(3, [0, 0, 1], [0, 0, 0])
