import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from f2merit.f2poly import (
    ZERO_DEGREE,
    F2Poly,
    berlekamp_massey,
    cldivmod,
    clmul,
    degree,
    poly_divrem,
    poly_extgcd,
    poly_inverse_mod,
    poly_mul,
    poly_weight,
)

X = F2Poly(0b10)
ONE = F2Poly(1)

polys = st.integers(min_value=0, max_value=(1 << 300) - 1).map(F2Poly)
nonzero = st.integers(min_value=1, max_value=(1 << 300) - 1).map(F2Poly)


def lfsr_stream(poly: int, seed: int, count: int) -> list[int]:
    """s_{i+L} = sum_{j<L} c_j s_{i+j}, with C(z) = z^L + ... + c_0."""
    L = poly.bit_length() - 1
    s = [(seed >> i) & 1 for i in range(L)]
    while len(s) < count:
        bit = 0
        for j in range(L):
            if (poly >> j) & 1:
                bit ^= s[-L + j]
        s.append(bit)
    return s[:count]


# small primitive polynomials (degree 2..16)
PRIMITIVE = [0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1002D]


class TestExamples:
    def test_mul(self):
        assert (X + 1) * (X + 1) == X * X + 1
        assert (X * X + X + 1) * (X + 1) == F2Poly(0b1001)
        assert F2Poly(0b1011) * 0 == 0

    def test_divrem(self):
        assert poly_divrem(0b1001, 0b11) == (0b111, 0)
        assert poly_divrem(0b10000, 0b101) == (0b101, 1)
        assert poly_divrem(0b11, 0b1000) == (0, 0b11)
        with pytest.raises(ZeroDivisionError):
            poly_divrem(5, 0)

    def test_extgcd(self):
        g, s, t = poly_extgcd(0b110, 0b10)
        assert g == 0b10 and s * 0b110 + t * 0b10 == g
        assert poly_extgcd(0b11, 0b10) == (1, 1, 1)
        assert poly_extgcd(0b1101, 0) == (0b1101, 1, 0)
        with pytest.raises(ValueError):
            poly_extgcd(0, 0)

    def test_inverse(self):
        assert poly_inverse_mod(X, 0b111) == X + 1
        assert poly_inverse_mod(1, 0b1011) == 1
        with pytest.raises(ValueError):
            poly_inverse_mod(X, 0b100)

    def test_weight_and_degree(self):
        assert poly_weight(0b10011) == 3
        assert poly_weight(0) == 0
        assert degree(0) == ZERO_DEGREE == -math.inf
        assert F2Poly(0).degree == ZERO_DEGREE
        assert F2Poly(1).degree == 0 and F2Poly(0b10011).degree == 4

    def test_bm_examples(self):
        assert berlekamp_massey(lfsr_stream(0b10011, 1, 8)) == 0b10011
        assert berlekamp_massey([1] * 10) == 0b11
        assert berlekamp_massey([0] * 10) == 1

    def test_hex_rendering(self):
        # lowest exponent in the least significant hex digit
        assert F2Poly(0b10011).hex() == "13"
        assert F2Poly(0b10011).render() == "13 (degree 4, weight 3)"


class TestInvariants:
    @given(polys, polys, polys)
    def test_ring_laws(self, a, b, c):
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)
        assert a + a == 0
        assert a * b == b * a

    @given(nonzero, nonzero)
    def test_mul_degree(self, a, b):
        assert (a * b).degree == a.degree + b.degree

    @given(polys, nonzero)
    def test_divrem_round_trip(self, a, b):
        q, r = poly_divrem(a, b)
        assert q * b + r == a
        assert r.degree < b.degree

    @given(polys, polys)
    def test_bezout(self, a, b):
        if a == 0 and b == 0:
            return
        g, s, t = poly_extgcd(a, b)
        assert s * a + t * b == g
        assert a % g == 0 and b % g == 0

    @given(nonzero, st.integers(min_value=2, max_value=(1 << 200) - 1).map(F2Poly))
    def test_inverse_round_trip(self, a, m):
        g = poly_extgcd(a, m)[0]
        if g != 1:
            with pytest.raises(ValueError):
                poly_inverse_mod(a, m)
            return
        inv = poly_inverse_mod(a, m)
        assert (inv * a) % m == 1
        assert inv.degree < m.degree

    @given(st.sampled_from(PRIMITIVE), st.integers(min_value=1, max_value=(1 << 17) - 1))
    def test_bm_recovers_primitive(self, poly, seed):
        L = poly.bit_length() - 1
        seed &= (1 << L) - 1
        if not seed:
            seed = 1
        bits = lfsr_stream(poly, seed, 2 * L)
        assert berlekamp_massey(bits) == poly

    @settings(max_examples=50)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=80))
    def test_bm_generates_sequence(self, bits):
        # the returned polynomial must produce the whole input sequence
        C = berlekamp_massey(bits)
        L = C.degree
        for i in range(len(bits) - L):
            acc = 0
            for j in range(L + 1):
                if (C >> j) & 1:
                    acc ^= bits[i + j]
            assert acc == 0


def test_clmul_matches_schoolbook():
    rng = random.Random(3)
    for _ in range(200):
        a, b = rng.getrandbits(90), rng.getrandbits(70)
        ref = 0
        for i in range(b.bit_length()):
            if (b >> i) & 1:
                ref ^= a << i
        assert clmul(a, b) == ref
        if b:
            q, r = cldivmod(a, b)
            assert clmul(q, b) ^ r == a


def test_poly_mul_wrapper_types():
    assert isinstance(poly_mul(3, 3), F2Poly)
    assert poly_mul(3, 3) == 5
