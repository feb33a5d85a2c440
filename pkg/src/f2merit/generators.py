"""F2-linear generators: x_i = A x_{i-1}, y_i = B x_i, u_i = 0.y_{i,0}y_{i,1}...

Three kinds are provided:

* ``MT19937``: the Mersenne Twister with its usual tempering.
* ``MEMT19937II``: the same transition, with the tempering replaced by
  an output map built from m_i, m_{i-473} and m_{i-588}.
* ``SmallDense``: arbitrary dense A (p x p) and B (w x p) over GF(2).  These
  are the small test generators used by the brute-force oracle.

Bit index 0 of an output word is its most significant bit, so bit ``l`` of
word ``y`` is ``(y >> (w - 1 - l)) & 1``.  Every bit index in the package
follows this convention.
"""

from __future__ import annotations

import enum
import functools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .f2poly import F2Poly, berlekamp_massey, clextgcd, clmul

# MT19937 parameters (Matsumoto & Nishimura, 1998)
N, M, R, W = 624, 397, 31, 32
P_MT = N * W - R  # 19937
MATRIX_A = 0x9908B0DF
UPPER_MASK = 0x80000000
LOWER_MASK = 0x7FFFFFFF
MASK32 = 0xFFFFFFFF

# MEMT19937-II output map
MEMT_LAG1, MEMT_MASK1 = 473, 0xB219BEAB
MEMT_LAG2, MEMT_MASK2 = 588, 0x56BDE52A
MEMT_SHIFT1, MEMT_SHIFT2 = 8, 14


class Kind(str, enum.Enum):
    MT19937 = "MT19937"
    MEMT19937II = "MEMT19937II"
    SMALL_DENSE = "SmallDense"


@dataclass(frozen=True)
class GeneratorSpec:
    """Static description of a generator.

    For SmallDense, ``A`` and ``B`` are tuples of row bitmasks: bit ``j`` of
    ``A[i]`` is entry (i, j).  Row ``l`` of ``B`` produces output bit ``l``
    (bit 0 = MSB of the word).
    """

    kind: Kind
    p: int
    w: int
    A: tuple = field(default=(), repr=False)
    B: tuple = field(default=(), repr=False)
    name: str = ""

    def __post_init__(self):
        if self.p < 1 or self.w < 1:
            raise ValueError("p and w must be positive")
        if self.kind in (Kind.MT19937, Kind.MEMT19937II):
            if (self.p, self.w) != (P_MT, W):
                raise ValueError("MT-family generators have p = 19937, w = 32")
        else:
            if len(self.A) != self.p or len(self.B) != self.w:
                raise ValueError("A must have p rows and B must have w rows")
            limit = 1 << self.p
            if any(not 0 <= r < limit for r in self.A + self.B):
                raise ValueError("matrix row wider than p bits")
            if bit_matrix_rank(self.A, self.p) != self.p:
                raise ValueError("transition matrix A is singular over GF(2)")
        if not self.name:
            object.__setattr__(self, "name", self.kind.value)

    @property
    def label(self) -> str:
        return self.name


MT19937 = GeneratorSpec(Kind.MT19937, P_MT, W)
MEMT19937II = GeneratorSpec(Kind.MEMT19937II, P_MT, W, name="MEMT19937-II")


def small_dense(A, B, name="SmallDense") -> GeneratorSpec:
    A = tuple(int(r) for r in A)
    B = tuple(int(r) for r in B)
    return GeneratorSpec(Kind.SMALL_DENSE, len(A), len(B), A, B, name)


def companion_spec(poly: int, w: int = 1) -> GeneratorSpec:
    """SmallDense generator whose A is the companion matrix of ``poly``.

    State bit j holds s_{i+j} of the recurrence with characteristic
    polynomial ``poly``; output bit l reads state bit l.
    """
    p = poly.bit_length() - 1
    A = [1 << (i + 1) for i in range(p - 1)]
    A.append(poly & ((1 << p) - 1))
    B = [1 << l for l in range(w)]
    return small_dense(A, B, name=f"companion({poly:#x})")


def load_small_dense(path) -> GeneratorSpec:
    """Load a SmallDense generator from a JSON config.

    Expected fields: ``p``, ``w``, ``A`` (p hex strings), ``B`` (w hex
    strings), optional ``name``.
    """
    doc = json.loads(Path(path).read_text())
    A = [int(r, 16) for r in doc["A"]]
    B = [int(r, 16) for r in doc["B"]]
    if len(A) != doc["p"] or len(B) != doc["w"]:
        raise ValueError(f"{path}: row counts disagree with p and w")
    return small_dense(A, B, name=doc.get("name", Path(path).stem))


def dump_small_dense(spec: GeneratorSpec) -> dict:
    width = (spec.p + 3) // 4
    return {
        "name": spec.name,
        "p": spec.p,
        "w": spec.w,
        "A": [format(r, f"0{width}x") for r in spec.A],
        "B": [format(r, f"0{width}x") for r in spec.B],
    }


def bit_matrix_rank(rows, ncols=None) -> int:
    pivots = {}  # leading bit -> reduced row
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in pivots:
                pivots[top] = r
                break
            r ^= pivots[top]
    return len(pivots)


def mat_vec(rows, x: int) -> int:
    """GF(2) product: bit i of the result is <rows[i], x>."""
    out = 0
    for i, r in enumerate(rows):
        if (r & x).bit_count() & 1:
            out |= 1 << i
    return out


# ---------------------------------------------------------------------------
# states


def init_genrand(seed: int) -> list[int]:
    """MT19937 reference initialisation of the 624-word array."""
    mt = [0] * N
    mt[0] = seed & MASK32
    for i in range(1, N):
        prev = mt[i - 1]
        mt[i] = (1812433253 * (prev ^ (prev >> 30)) + i) & MASK32
    return mt


def twist(mt: list[int]) -> list[int]:
    """Next 624 raw words m_{k+624..k+1247} from m_{k..k+623}."""
    new = mt[:]  # in-place recurrence on a copy
    for k in range(N):
        y = (new[k] & UPPER_MASK) | (new[(k + 1) % N] & LOWER_MASK)
        v = new[(k + M) % N] ^ (y >> 1)
        if y & 1:
            v ^= MATRIX_A
        new[k] = v
    return new


def temper(y: int) -> int:
    y ^= y >> 11
    y ^= (y << 7) & 0x9D2C5680
    y ^= (y << 15) & 0xEFC60000
    y ^= y >> 18
    return y


def untemper(y: int) -> int:
    y ^= y >> 18
    y ^= (y << 15) & 0xEFC60000
    t = y
    for _ in range(4):
        t = y ^ ((t << 7) & 0x9D2C5680)
    y = t
    t = y
    for _ in range(2):
        t = y ^ (t >> 11)
    return t


def memt_output(m_i: int, m_lag1: int, m_lag2: int) -> int:
    z = m_i
    z ^= m_lag1 & MEMT_MASK1
    z ^= (z << MEMT_SHIFT1) & MASK32
    z ^= (z << MEMT_SHIFT2) & MASK32
    return z ^ (m_lag2 & MEMT_MASK2)


class GeneratorState:
    """Mutable running generator; see :func:`make_generator`."""

    spec: GeneratorSpec
    steps: int

    def next_word(self) -> int:
        raise NotImplementedError

    def clone(self) -> "GeneratorState":
        raise NotImplementedError

    def words(self, count: int) -> list[int]:
        return [self.next_word() for _ in range(count)]

    def __iter__(self):
        return self

    def __next__(self):
        return self.next_word()


class MTState(GeneratorState):
    """MT19937 / MEMT19937-II state.

    ``prev`` and ``cur`` hold two consecutive blocks of raw words, so the
    MEMT output map can reach back up to 588 words.
    """

    def __init__(self, spec: GeneratorSpec, mt: list[int]):
        self.spec = spec
        self.steps = 0
        self.cur = list(mt)
        self.prev = None
        self.pos = N

    def clone(self):
        other = MTState.__new__(MTState)
        other.spec = self.spec
        other.steps = self.steps
        other.cur = self.cur[:]
        other.prev = None if self.prev is None else self.prev[:]
        other.pos = self.pos
        return other

    def _refill(self):
        self.prev = self.cur
        self.cur = twist(self.cur)
        self.pos = 0

    def next_raw(self) -> int:
        """Next raw (untempered) word m_i."""
        if self.pos >= N:
            self._refill()
        v = self.cur[self.pos]
        self.pos += 1
        self.steps += 1
        return v

    def next_word(self) -> int:
        if self.pos >= N:
            self._refill()
        j = self.pos
        self.pos += 1
        self.steps += 1
        cur = self.cur
        if self.spec.kind is Kind.MT19937:
            return temper(cur[j])
        prev = self.prev
        a = cur[j - MEMT_LAG1] if j >= MEMT_LAG1 else prev[j + N - MEMT_LAG1]
        b = cur[j - MEMT_LAG2] if j >= MEMT_LAG2 else prev[j + N - MEMT_LAG2]
        return memt_output(cur[j], a, b)

    def words(self, count: int) -> list[int]:
        if self.spec.kind is not Kind.MT19937:
            return super().words(count)
        out = []
        while len(out) < count:
            if self.pos >= N:
                self._refill()
            take = min(N - self.pos, count - len(out))
            out.extend(map(temper, self.cur[self.pos:self.pos + take]))
            self.pos += take
        self.steps += count
        return out


class SmallDenseState(GeneratorState):
    """Dense generator; emits y = B x for the current x, then x <- A x.

    With this order the first word is B x_0, so the state-to-outputs map over
    k words is (B; BA; ...; BA^{k-1}).
    """

    def __init__(self, spec: GeneratorSpec, x: int):
        self.spec = spec
        self.steps = 0
        self.x = x
        self._out_rows = tuple(reversed(spec.B))  # MSB-first packing

    def clone(self):
        other = SmallDenseState(self.spec, self.x)
        other.steps = self.steps
        return other

    def next_word(self) -> int:
        y = mat_vec(self._out_rows, self.x)
        self.x = mat_vec(self.spec.A, self.x)
        self.steps += 1
        return y


def make_generator(spec: GeneratorSpec, seed: int | None = None, state=None) -> GeneratorState:
    """Create a running generator.

    Exactly one of ``seed`` (MT family only: 32-bit integer expanded with the
    reference initialisation) or ``state`` (raw state: 624 words for the MT
    family, a p-bit integer for SmallDense) must be given.  The all-zero
    state is rejected.
    """
    if (seed is None) == (state is None):
        raise ValueError("give exactly one of seed or state")
    if spec.kind is Kind.SMALL_DENSE:
        if seed is not None:
            raise ValueError("SmallDense generators take a raw state")
        x = int(state)
        if not 0 < x < (1 << spec.p):
            raise ValueError("raw state must be a nonzero p-bit integer")
        return SmallDenseState(spec, x)
    if seed is not None:
        mt = init_genrand(seed)
    else:
        mt = [int(v) & MASK32 for v in state]
        if len(mt) != N:
            raise ValueError(f"raw MT state must have {N} words")
    if not (mt[0] & UPPER_MASK) and not any(mt[1:]):
        raise ValueError("raw state is zero")
    return MTState(spec, mt)


def default_state(spec: GeneratorSpec) -> GeneratorState:
    """A fixed nonzero starting point used for structural analyses."""
    if spec.kind is Kind.SMALL_DENSE:
        return make_generator(spec, state=1)
    return make_generator(spec, seed=5489)


def random_state(spec: GeneratorSpec, rng: random.Random) -> GeneratorState:
    if spec.kind is Kind.SMALL_DENSE:
        x = 0
        while not x:
            x = rng.getrandbits(spec.p)
        return make_generator(spec, state=x)
    return make_generator(spec, state=[rng.getrandbits(32) for _ in range(N)])


def step_and_output(state: GeneratorState) -> int:
    return state.next_word()


def output_bit(word: int, bit: int, w: int) -> int:
    return (word >> (w - 1 - bit)) & 1


def bit_stream(state: GeneratorState, bit: int, count: int) -> list[int]:
    """Bit ``bit`` of the next ``count`` outputs of a fresh copy of ``state``."""
    w = state.spec.w
    if not 0 <= bit < w:
        raise ValueError(f"bit index {bit} outside [0, {w})")
    shift = w - 1 - bit
    return [(y >> shift) & 1 for y in state.clone().words(count)]


def bit_streams(state: GeneratorState, v: int, count: int) -> list[int]:
    """Streams 0..v-1 packed as ints: bit i of entry l is y_{i,l}."""
    w = state.spec.w
    words = state.clone().words(count)
    streams = []
    for l in range(v):
        shift = w - 1 - l
        streams.append(int("".join(str((y >> shift) & 1) for y in reversed(words)), 2))
    return streams


@functools.lru_cache(maxsize=None)
def characteristic_poly(spec: GeneratorSpec) -> F2Poly:
    """P(z) = det(zI - A), recovered by Berlekamp-Massey from output bit 0."""
    bits = bit_stream(default_state(spec), 0, 2 * spec.p)
    P = berlekamp_massey(bits)
    if P.degree != spec.p:
        raise ValueError(
            f"{spec.label}: bit-0 stream has linear complexity {P.degree} < p = {spec.p}; "
            "generator is not of maximal period"
        )
    return P


def numerator_polys(state: GeneratorState, v: int, P: int | None = None) -> list[F2Poly]:
    """Numerators h_0..h_{v-1} with G_l(z) = h_l(z) / P(z).

    h_{l,j} = sum_{k=j+1}^{p} P_k y_{k-1-j, l}, i.e. the polynomial part of
    P(z) * sum_{i<p} y_{i,l} z^{-i-1}.
    """
    spec = state.spec
    if not 1 <= v <= spec.w:
        raise ValueError(f"v must lie in [1, {spec.w}]")
    if P is None:
        P = characteristic_poly(spec)
    p = P.bit_length() - 1
    hs = []
    # bit (p-1-i) of rev holds y_{i,l}, i.e. rev = z^p * (truncated series)
    for stream in bit_streams(state, v, p):
        rev = int(format(stream, f"0{p}b")[::-1], 2)
        hs.append(F2Poly(clmul(int(P), rev) >> p))
    if hs[0] == 0:
        raise ValueError("h_0 = 0: zero bit-0 stream from a nonzero state")
    if clextgcd(int(hs[0]), int(P))[0] != 1:
        raise ValueError("gcd(h_0, P) != 1; P is not irreducible")
    return hs


def tempered_recurrence_check(spec: GeneratorSpec = MT19937, steps: int = 10_000,
                              outputs: list[int] | None = None) -> bool:
    """Check the MT recurrence directly on tempered outputs.

    y_i = y_{i+M-N} ^ T(twist(upper bit of T^-1 y_{i-N} | lower 31 bits of T^-1 y_{i+1-N}))
    for i = N .. N+steps-1, where T is the tempering.
    """
    if spec.kind is not Kind.MT19937:
        raise ValueError("the tempered-output recurrence is specific to MT19937")
    if steps <= 0:
        return True
    if outputs is None:
        outputs = make_generator(spec, seed=5489).words(N + steps)
    for i in range(N, N + steps):
        lo = untemper(outputs[i + 1 - N]) & LOWER_MASK
        hi = untemper(outputs[i - N]) & UPPER_MASK
        y = hi | lo
        t = y >> 1
        if y & 1:
            t ^= MATRIX_A
        if outputs[i] != outputs[i + M - N] ^ temper(t):
            return False
    return True
