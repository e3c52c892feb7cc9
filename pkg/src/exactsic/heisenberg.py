"""Weyl-Heisenberg and Clifford operators as exact monomial matrices.

Operators are stored as monomial matrices: one nonzero entry per row,
each entry a power of the dimension's phase carrier tau = -exp(i*pi/dim)
(tau^2 = omega, the principal dim-th root of unity).  tau has
multiplicative order dim for odd dim and 2*dim for even dim, and phase
exponents are reduced modulo that order.  Nothing here ever touches a
floating point number or a field element: phases stay symbolic until an
overlap is evaluated, at which point the caller materialises exponents
into whatever exact field it is working in.

Two representations matter:

  * the standard representation, any dimension: Z = diag(1, omega, ...),
    X the cyclic shift, and X^i Z^j with entries omega^(j*s) at (s+i, s);
  * the adapted representation in dimension 4, in which the order-2
    displacements come out diagonal and the rotation that cubes to the
    identity is a bare permutation.  The basis change is the enphased
    Hadamard-type matrix returned by clifford_specials() as T_basis.

For d = 4p the two factors are combined blockwise (crt_combine): a
4-dimensional monomial op acting on the block index tensored with a
p-dimensional monomial op acting inside each block, optionally preceded
by complex conjugation for the anti-unitary symmetries.
"""

from __future__ import annotations


def _phase_order(dim: int) -> int:
    return dim if dim % 2 == 1 else 2 * dim


class MonomialOp:
    """One nonzero entry per row: row r holds tau^exps[r] at column cols[r]."""

    __slots__ = ("dim", "cols", "exps", "order")

    def __init__(self, dim: int, cols, exps, order: int | None = None) -> None:
        self.dim = dim
        self.order = _phase_order(dim) if order is None else order
        self.cols = tuple(c % dim for c in cols)
        self.exps = tuple(e % self.order for e in exps)
        if sorted(self.cols) != list(range(dim)):
            raise ValueError("not a permutation: some column used twice")

    @classmethod
    def identity(cls, dim: int) -> MonomialOp:
        return cls(dim, range(dim), [0] * dim)

    @classmethod
    def diagonal(cls, dim: int, exps) -> MonomialOp:
        return cls(dim, range(dim), exps)

    @classmethod
    def permutation(cls, dim: int, cols) -> MonomialOp:
        return cls(dim, cols, [0] * dim)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MonomialOp)
            and self.dim == other.dim
            and self.cols == other.cols
            and self.exps == other.exps
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.cols, self.exps))

    def __matmul__(self, other: MonomialOp) -> MonomialOp:
        """self @ other = apply other first, then self."""
        if self.dim != other.dim or self.order != other.order:
            raise ValueError("operators act on different spaces")
        cols = [other.cols[self.cols[r]] for r in range(self.dim)]
        exps = [self.exps[r] + other.exps[self.cols[r]] for r in range(self.dim)]
        return MonomialOp(self.dim, cols, exps, self.order)

    def inverse(self) -> MonomialOp:
        cols = [0] * self.dim
        exps = [0] * self.dim
        for r in range(self.dim):
            cols[self.cols[r]] = r
            exps[self.cols[r]] = -self.exps[r]
        return MonomialOp(self.dim, cols, exps, self.order)

    def __pow__(self, n: int) -> MonomialOp:
        if n < 0:
            return self.inverse() ** (-n)
        out = MonomialOp.identity(self.dim)
        base = self
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out

    def scaled(self, central_exp: int) -> MonomialOp:
        """tau^central_exp times self."""
        return MonomialOp(self.dim, self.cols, [e + central_exp for e in self.exps], self.order)

    def proportional_exponent(self, other: MonomialOp):
        """c with self = tau^c * other, or None if not proportional."""
        if self.dim != other.dim or self.cols != other.cols:
            return None
        c = (self.exps[0] - other.exps[0]) % self.order
        for r in range(1, self.dim):
            if (self.exps[r] - other.exps[r]) % self.order != c:
                return None
        return c

    def omega_exps(self):
        """Phase exponents rewritten in powers of omega (odd dimension only)."""
        if self.dim % 2 == 0:
            raise ValueError("omega exponents only well defined in odd dimension")
        half = (self.dim + 1) // 2  # tau = omega^half
        return tuple((e * half) % self.dim for e in self.exps)

    def apply(self, vec, phase_fn=None):
        """New vector with out[r] = tau^exps[r] * vec[cols[r]].

        phase_fn maps a nonzero tau-exponent to a scalar in the caller's
        ring; it is only consulted where the exponent is nonzero.
        """
        if len(vec) != self.dim:
            raise ValueError("vector length mismatch")
        out = []
        for r in range(self.dim):
            v = vec[self.cols[r]]
            if self.exps[r] != 0:
                if phase_fn is None:
                    raise ValueError("operator has phases; a phase materialiser is required")
                v = phase_fn(self.exps[r]) * v
            out.append(v)
        return out

    def is_identity(self) -> bool:
        return self == MonomialOp.identity(self.dim)

    def __repr__(self) -> str:
        return f"MonomialOp(dim={self.dim}, cols={self.cols}, exps={self.exps})"


# ---------------------------------------------------------------------------
# standard representation
# ---------------------------------------------------------------------------


def standard_x(dim: int) -> MonomialOp:
    return MonomialOp.permutation(dim, [(r - 1) % dim for r in range(dim)])


def standard_z(dim: int) -> MonomialOp:
    return MonomialOp.diagonal(dim, [2 * r for r in range(dim)])


def standard_rep(dim: int, idx: tuple[int, int]) -> MonomialOp:
    """The displacement with index (i, j): tau^(i*j) X^i Z^j."""
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    i, j = idx[0] % dim, idx[1] % dim
    op = (standard_x(dim) ** i) @ (standard_z(dim) ** j)
    return op.scaled(i * j)


# ---------------------------------------------------------------------------
# the adapted representation in dimension 4
# ---------------------------------------------------------------------------

# X and Z after conjugation by T_basis, written out as tau-exponents:
# X -> tau * [[0,i,0,0],[-1,0,0,0],[0,0,0,-i],[0,0,-1,0]] and
# Z -> tau * [[0,-1],[i,0]] (x) [[1,0],[0,i]].
# The phases are pinned by ZX = omega XZ together with the requirement
# that the order-3 rotation below act as a bare permutation; flipping
# the sign of X's lower block breaks 12 of the 16 rotation actions.
_X4_AD = MonomialOp(4, cols=[1, 0, 3, 2], exps=[3, 5, 7, 5])
_Z4_AD = MonomialOp(4, cols=[2, 3, 0, 1], exps=[5, 7, 3, 5])


def monomial_rep4(idx: tuple[int, int]) -> MonomialOp:
    """The displacement (i, j) for d = 4 in the adapted basis."""
    i, j = idx[0] % 4, idx[1] % 4
    op = (_X4_AD**i) @ (_Z4_AD**j)
    return op.scaled(i * j)


def clifford_specials() -> dict:
    """The fixed 4-dimensional Clifford data in the adapted basis.

    U_Z4   order-3 rotation, here a bare permutation cycling 0->2->1->0
           and fixing 3 (as a row map: out[0]=in[1], out[1]=in[2],
           out[2]=in[0], out[3]=in[3])
    U_P4   parity, diag(1,1,1,-1)
    A_J4   the anti-unitary symmetry: (diagonal diag(1,i,-i,1), True)
           meaning conjugate first, then apply the diagonal
    U_M4   the order-change conjugator with U_M U_Z4 U_M^-1 = U_Z4^2
    T_basis  the basis change from the standard to the adapted basis:
           a 4x4 grid of tau-exponents (None for zero entries) with an
           overall factor 1/sqrt(2)
    """
    u_z4 = MonomialOp.permutation(4, [1, 2, 0, 3])
    u_p4 = MonomialOp.diagonal(4, [0, 0, 0, 4])
    a_j4 = (MonomialOp.diagonal(4, [0, 2, 6, 0]), True)
    u_m4 = MonomialOp(4, cols=[0, 2, 1, 3], exps=[0, 0, 0, 6])
    t_basis = {
        "scale": "1/sqrt(2)",
        "exps": (
            (0, None, 0, None),
            (None, 5, None, 5),
            (3, None, 7, None),
            (None, 0, None, 4),
        ),
    }
    return {"U_Z4": u_z4, "U_P4": u_p4, "A_J4": a_j4, "U_M4": u_m4, "T_basis": t_basis}


# ---------------------------------------------------------------------------
# diagonal symplectic unitaries in odd prime dimension
# ---------------------------------------------------------------------------


def _mult_order(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ValueError("not invertible")
    k, x = 1, a
    while x != 1:
        x = (x * a) % p
        k += 1
    return k


def diagonal_symplectic(p: int, delta: int) -> MonomialOp:
    """U_F for F = [[delta^-1, 0], [0, delta]]: (U_F v)[r] = v[delta*r mod p]."""
    delta %= p
    if delta == 0:
        raise ValueError("delta must be invertible mod p")
    return MonomialOp.permutation(p, [(delta * r) % p for r in range(p)])


def zauner_perm(p: int, theta: int, ell: int, inverse: bool = False) -> MonomialOp:
    """The order-3ell rotation on the p-dimensional factor.

    delta = theta^((p-1)/(3 ell)) mod p for a generator theta of the
    multiplicative group; the inverse flag swaps in delta^-1, which is
    the other conjugation option on this factor.
    """
    if (p - 1) % (3 * ell) != 0:
        raise ValueError(f"3*ell = {3*ell} does not divide p - 1 = {p-1}")
    if _mult_order(theta, p) != p - 1:
        raise ValueError(f"{theta} does not generate the multiplicative group mod {p}")
    delta = pow(theta, (p - 1) // (3 * ell), p)
    if inverse:
        delta = pow(delta, -1, p)
    return diagonal_symplectic(p, delta)


def parity_op(p: int) -> MonomialOp:
    """delta = -1: the parity permutation on the p-dimensional factor."""
    return diagonal_symplectic(p, p - 1)


# ---------------------------------------------------------------------------
# block combination for d = 4p
# ---------------------------------------------------------------------------


class BlockOperator:
    """op4 acting on the block index, opp acting inside each length-p block,
    optionally preceded by complex conjugation (for anti-unitaries)."""

    __slots__ = ("op4", "opp", "conjugate_first")

    def __init__(self, op4: MonomialOp, opp: MonomialOp, conjugate_first: bool = False):
        if op4.dim != 4:
            raise ValueError("block part must be 4-dimensional")
        self.op4 = op4
        self.opp = opp
        self.conjugate_first = conjugate_first

    def apply(self, blocks, phase4, phasep, conj=None):
        """blocks: sequence of 4 length-p vectors; returns the same shape.

        phase4 and phasep materialise tau-exponents of the two factors;
        conj is the ring's complex conjugation, required when the
        operator is anti-unitary.
        """
        if self.conjugate_first:
            if conj is None:
                raise ValueError("anti-unitary application needs a conjugation map")
            blocks = [[conj(x) for x in b] for b in blocks]
        moved = [self.opp.apply(blocks[self.op4.cols[r]], phasep) for r in range(4)]
        out = []
        for r in range(4):
            e = self.op4.exps[r]
            if e == 0:
                out.append(moved[r])
            else:
                ph = phase4(e)
                out.append([ph * x for x in moved[r]])
        return out

    def __repr__(self) -> str:
        tag = ", conjugate" if self.conjugate_first else ""
        return f"BlockOperator({self.op4!r}, {self.opp!r}{tag})"


def crt_combine(op4: MonomialOp, opp: MonomialOp, conjugate_first: bool = False) -> BlockOperator:
    return BlockOperator(op4, opp, conjugate_first)
