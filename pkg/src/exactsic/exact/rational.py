"""Thin wrapper around gmpy2 rationals.

gmpy2.mpq already keeps numerator and denominator coprime with a positive
denominator, which is exactly the invariant we need, so the "type" here is
just an alias plus a few constructors.  Keeping the alias in one place
means the rest of the package never imports gmpy2 directly for rationals.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz

QQ = mpq


def qq(num, den=1) -> QQ:
    """Exact rational from ints, strings, or another rational."""
    return mpq(num, den)


def qq_int(x: QQ) -> int:
    """The value of x as a Python int; raises if x is not integral."""
    if x.denominator != 1:
        raise ValueError(f"not an integer: {x}")
    return int(x.numerator)


def qq_height(x: QQ) -> int:
    """max(|numerator|, denominator), the usual naive height."""
    return max(abs(int(x.numerator)), int(x.denominator))


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = mpz(n).isqrt()
    return r * r == n


def squarefree_part(n: int) -> int:
    """Largest squarefree divisor f of n > 0 with n = f * t^2, by trial division."""
    if n <= 0:
        raise ValueError("positive integers only")
    f = 1
    q = 2
    while q * q <= n:
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            if e % 2 == 1:
                f *= q
        q += 1 if q == 2 else 2
    return f * n


def is_squarefree(n: int) -> bool:
    if n <= 0:
        return False
    q = 2
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 1 if q == 2 else 2
    return True
