"""Polynomials over GF(2), bit-packed into Python integers.

The polynomial c_n z^n + ... + c_1 z + c_0 is stored as the integer
c_n 2^n + ... + c_1 2 + c_0.  :class:`F2Poly` is an ``int`` subclass, so
any F2Poly can be handed straight to the bit-level helpers below (and to
the hot loops of the lattice code) without conversion.  Plain ``int``
operators (``^``, ``<<``, ``&``) keep their integer meaning and return
plain ints; ``+``, ``-``, ``*``, ``//``, ``%`` and ``divmod`` are the
polynomial operations.
"""

from __future__ import annotations

import math

#: Degree of the zero polynomial (its norm is minus infinity).
ZERO_DEGREE = -math.inf


def degree(a: int):
    """Degree of the int-encoded polynomial ``a``; :data:`ZERO_DEGREE` for 0."""
    return a.bit_length() - 1 if a else ZERO_DEGREE


def clmul(a: int, b: int) -> int:
    """Carry-less (GF(2)[z]) product, schoolbook shift-and-xor.

    Loops over the set bits of the sparser operand, which matters for the
    characteristic polynomial of MT19937 (135 terms out of 19938).
    """
    if a.bit_count() < b.bit_count():
        a, b = b, a
    c = 0
    while b:
        low = b & -b
        c ^= a << (low.bit_length() - 1)
        b ^= low
    return c


def cldivmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("division by zero polynomial")
    db = b.bit_length() - 1
    q = 0
    while True:
        s = a.bit_length() - 1 - db
        if s < 0:
            return q, a
        q |= 1 << s
        a ^= b << s


def clmod(a: int, b: int) -> int:
    return cldivmod(a, b)[1]


def clextgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b)."""
    if a == 0 and b == 0:
        raise ValueError("gcd of two zero polynomials is undefined")
    r0, r1 = a, b
    s0, s1 = 1, 0
    t0, t1 = 0, 1
    while r1:
        # one shift-xor at a time; avoids materialising the quotient
        s = r0.bit_length() - r1.bit_length()
        if s < 0:
            r0, r1 = r1, r0
            s0, s1 = s1, s0
            t0, t1 = t1, t0
            continue
        r0 ^= r1 << s
        s0 ^= s1 << s
        t0 ^= t1 << s
    return r0, s0, t0


def clinvmod(a: int, m: int) -> int:
    if m.bit_length() < 2:
        raise ValueError("modulus must have degree >= 1")
    g, s, _ = clextgcd(clmod(a, m), m)
    if g != 1:
        raise ValueError("polynomial is not invertible modulo m")
    return clmod(s, m)


def berlekamp_massey(bits) -> "F2Poly":
    """Minimal polynomial of a binary sequence.

    Returns the monic C(z) = sum c_j z^j of least degree L such that
    ``sum_j c_j * bits[i + j] == 0`` for every 0 <= i < len(bits) - L.
    An all-zero sequence gives the constant polynomial 1.

    Internally runs the usual connection-polynomial recursion on ints
    (bit i of the connection polynomial = coefficient of x^i) and reverses
    the result at the end.
    """
    conn, prev = 1, 1
    L, m = 0, -1
    window = 0  # bit i holds bits[n - i]
    for n, bit in enumerate(bits):
        window = (window << 1) | (bit & 1)
        if (conn & window).bit_count() & 1:
            shifted = prev << (n - m)
            if 2 * L <= n:
                prev = conn
                L = n + 1 - L
                m = n
            conn ^= shifted
    return F2Poly(_reverse(conn, L + 1))


def _reverse(a: int, nbits: int) -> int:
    return int(format(a, f"0{nbits}b")[::-1], 2)


class F2Poly(int):
    """Immutable polynomial over GF(2); bit j is the coefficient of z^j."""

    __slots__ = ()

    def __new__(cls, value=0):
        if isinstance(value, str):
            value = int(value, 16)
        elif not isinstance(value, int):
            # iterable of exponents
            acc = 0
            for e in value:
                acc ^= 1 << e
            value = acc
        if value < 0:
            raise ValueError("negative integers do not encode polynomials")
        return super().__new__(cls, value)

    @classmethod
    def from_coefficients(cls, coeffs) -> "F2Poly":
        """Build from a coefficient sequence, lowest exponent first."""
        acc = 0
        for j, c in enumerate(coeffs):
            if c & 1:
                acc |= 1 << j
        return cls(acc)

    @property
    def degree(self):
        return degree(self)

    @property
    def weight(self) -> int:
        return self.bit_count()

    def coefficients(self) -> list[int]:
        return [(self >> j) & 1 for j in range(self.bit_length())]

    def exponents(self) -> list[int]:
        return [j for j in range(self.bit_length()) if (self >> j) & 1]

    def __add__(self, other):
        return F2Poly(int(self) ^ int(other))

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        return F2Poly(clmul(int(self), int(other)))

    __rmul__ = __mul__

    def __divmod__(self, other):
        q, r = cldivmod(int(self), int(other))
        return F2Poly(q), F2Poly(r)

    def __rdivmod__(self, other):
        return divmod(F2Poly(other), self)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e, mod=None):
        result, base = 1, int(self)
        if mod is not None:
            base = clmod(base, int(mod))
        while e:
            if e & 1:
                result = clmul(result, base)
                if mod is not None:
                    result = clmod(result, int(mod))
            e >>= 1
            if e:
                base = clmul(base, base)
                if mod is not None:
                    base = clmod(base, int(mod))
        return F2Poly(result)

    def __call__(self, z: int) -> int:
        """Evaluate at z in GF(2)."""
        if z & 1:
            return self.bit_count() & 1
        return int(self) & 1

    def hex(self) -> str:
        """Hex coefficient string; z^0 lives in the least significant digit."""
        return format(int(self), "x")

    def render(self) -> str:
        return f"{self.hex()} (degree {self.degree}, weight {self.weight})"

    def __repr__(self):
        return f"F2Poly(0x{self.hex()})"

    def __str__(self):
        if not self:
            return "0"
        terms = []
        for e in reversed(self.exponents()):
            terms.append("1" if e == 0 else "z" if e == 1 else f"z^{e}")
        return " + ".join(terms)

    def __hash__(self):
        return int.__hash__(self)


def poly_mul(a, b) -> F2Poly:
    return F2Poly(clmul(int(a), int(b)))


def poly_divrem(a, b) -> tuple[F2Poly, F2Poly]:
    q, r = cldivmod(int(a), int(b))
    return F2Poly(q), F2Poly(r)


def poly_extgcd(a, b) -> tuple[F2Poly, F2Poly, F2Poly]:
    g, s, t = clextgcd(int(a), int(b))
    return F2Poly(g), F2Poly(s), F2Poly(t)


def poly_inverse_mod(a, m) -> F2Poly:
    return F2Poly(clinvmod(int(a), int(m)))


def poly_weight(a) -> int:
    return int(a).bit_count()
