"""Brute-force ground truth for small generators.

Everything here works directly on the linear map

    Phi_k : state x_0  ->  (trunc_v(y_0), ..., trunc_v(y_{k-1}))

as an explicit GF(2) matrix, with no lattice machinery.  k(v) is the
largest k for which Phi_k is onto (equivalently: every cell receives the
same number of states), and the relations on those k*v bits are the dual
code of the image of Phi_k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .f2poly import berlekamp_massey
from .generators import (
    GeneratorSpec,
    Kind,
    bit_matrix_rank,
    make_generator,
    small_dense,
)
from .merit import LinearRelation

MAX_ORACLE_P = 24
MAX_COUNTING_P = 12
MAX_DUAL_DIM = 24


class OracleLimitError(ValueError):
    pass


@dataclass
class BitMatrix:
    """Row-major GF(2) matrix; bit j of ``rows[i]`` is entry (i, j)."""

    rows: list[int]
    ncols: int

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def rank(self) -> int:
        return bit_matrix_rank(self.rows)

    def rref(self) -> "BitMatrix":
        rows = list(self.rows)
        out = []
        for col in range(self.ncols - 1, -1, -1):
            bit = 1 << col
            idx = next((i for i, r in enumerate(rows) if r & bit), None)
            if idx is None:
                continue
            piv = rows.pop(idx)
            rows = [r ^ piv if r & bit else r for r in rows]
            out = [r ^ piv if r & bit else r for r in out]
            out.append(piv)
        return BitMatrix(out, self.ncols)

    def column(self, j: int) -> int:
        """Column j packed as an int (bit i = entry (i, j))."""
        c = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                c |= 1 << i
        return c

    def left_nullspace(self) -> list[int]:
        """Basis of {c : sum_i c_i rows[i] = 0}, each c packed over row indices."""
        pivots: dict[int, tuple[int, int]] = {}
        null = []
        for i, r in enumerate(self.rows):
            combo = 1 << i
            while r:
                top = r.bit_length() - 1
                if top not in pivots:
                    pivots[top] = (r, combo)
                    break
                pr, pc = pivots[top]
                r ^= pr
                combo ^= pc
            else:
                null.append(combo)
        return null


def _check_small(spec: GeneratorSpec, limit: int = MAX_ORACLE_P):
    if spec.kind is not Kind.SMALL_DENSE:
        raise OracleLimitError("the oracle only handles SmallDense generators")
    if spec.p > limit:
        raise OracleLimitError(f"p = {spec.p} exceeds the oracle limit {limit}")


def _columns(spec: GeneratorSpec, k: int, v: int) -> list[int]:
    """Phi_k e_s for every unit state, packed with bit (i*v + l) = y_{i,l}."""
    w = spec.w
    cols = []
    for s in range(spec.p):
        words = make_generator(spec, state=1 << s).words(k)
        c = 0
        for i, y in enumerate(words):
            for l in range(v):
                if (y >> (w - 1 - l)) & 1:
                    c |= 1 << (i * v + l)
        cols.append(c)
    return cols


def output_map_matrix(spec: GeneratorSpec, k: int, v: int) -> BitMatrix:
    """(k*v) x p matrix of Phi_k; row i*v + l is output bit l of word i."""
    _check_small(spec)
    if not 1 <= v <= spec.w:
        raise ValueError(f"v must lie in [1, {spec.w}]")
    cols = _columns(spec, k, v)
    rows = []
    for r in range(k * v):
        acc = 0
        for s, c in enumerate(cols):
            if (c >> r) & 1:
                acc |= 1 << s
        rows.append(acc)
    return BitMatrix(rows, spec.p)


def rank_k_v(spec: GeneratorSpec, v: int) -> int:
    """Largest k with rank(Phi_k) = k*v."""
    k = 0
    while (k + 1) * v <= spec.p and output_map_matrix(spec, k + 1, v).rank() == (k + 1) * v:
        k += 1
    return k


def counting_k_v(spec: GeneratorSpec, v: int) -> int:
    """Largest k for which all 2^p initial states fill the 2^{kv} cells evenly."""
    _check_small(spec, MAX_COUNTING_P)
    p = spec.p
    best = 0
    for k in range(1, p // v + 1):
        cols = _columns(spec, k, v)
        # images of every state, built in Gray-code order
        images = np.zeros(1 << p, dtype=np.int64)
        cur = 0
        for s in range(1, 1 << p):
            cur ^= cols[(s & -s).bit_length() - 1]
            images[s] = cur
        counts = np.bincount(images, minlength=1 << (k * v))
        if counts.min() != counts.max() or counts[0] != 1 << (p - k * v):
            break
        best = k
    return best


def brute_k_v(spec: GeneratorSpec, v: int) -> int:
    """k(v) by the rank criterion; cross-checked by cell counting when p <= 12."""
    _check_small(spec)
    k = rank_k_v(spec, v)
    if spec.p <= MAX_COUNTING_P:
        counted = counting_k_v(spec, v)
        if counted != k:
            raise AssertionError(f"rank criterion gives k({v}) = {k}, counting gives {counted}")
    return k


def dual_code(spec: GeneratorSpec, k: int, v: int) -> list[int]:
    """Basis of C^perp for the image C of Phi_k (bit i*v + l <-> term (i, l))."""
    phi = output_map_matrix(spec, k, v)
    basis = phi.left_nullspace()
    if len(basis) > MAX_DUAL_DIM:
        raise OracleLimitError(f"dual code dimension {len(basis)} exceeds {MAX_DUAL_DIM}")
    return basis


def dual_code_min_weight(spec: GeneratorSpec, k: int, v: int):
    """Minimum Hamming weight of C^perp \\ {0}; None when C^perp = {0}."""
    basis = dual_code(spec, k, v)
    if not basis:
        return None
    best = None
    cur = 0
    for s in range(1, 1 << len(basis)):
        cur ^= basis[(s & -s).bit_length() - 1]
        wt = cur.bit_count()
        if best is None or wt < best:
            best = wt
    return best


def codeword_relation(c: int, v: int) -> LinearRelation:
    terms = []
    idx = 0
    while c:
        if c & 1:
            terms.append(divmod(idx, v))
        c >>= 1
        idx += 1
    return LinearRelation(tuple(terms), v)


def orbit_is_maximal(spec: GeneratorSpec) -> bool:
    """Direct check that state 1 first returns at step 2^p - 1."""
    p = spec.p
    # byte-sliced lookup tables for x -> A x
    tables = []
    for base in range(0, p, 8):
        width = min(8, p - base)
        tab = [0] * (1 << width)
        for chunk in range(1 << width):
            x = chunk << base
            y = 0
            for i, r in enumerate(spec.A):
                if (r & x).bit_count() & 1:
                    y |= 1 << i
            tab[chunk] = y
        tables.append((base, (1 << width) - 1, tab))
    x = 1
    period = (1 << p) - 1
    for step in range(1, period + 1):
        y = 0
        for base, mask, tab in tables:
            y ^= tab[(x >> base) & mask]
        x = y
        if x == 1:
            return step == period
    return False


def random_maximal_spec(rng: random.Random, p: int, w: int, max_tries: int = 100_000) -> GeneratorSpec:
    """Random dense generator with primitive transition, nonzero output bit 0.

    A is drawn until it is invertible, the bit-0 stream has linear
    complexity p, and the state orbit has period 2^p - 1.
    """
    if p > 20:
        raise OracleLimitError("maximal-period check is limited to p <= 20")
    for _ in range(max_tries):
        A = [rng.getrandbits(p) for _ in range(p)]
        if bit_matrix_rank(A) != p:
            continue
        B = [rng.getrandbits(p) for _ in range(w)]
        spec = small_dense(A, B, name=f"random-p{p}-w{w}")
        bits = make_generator(spec, state=1).words(2 * p)
        if berlekamp_massey([(y >> (w - 1)) & 1 for y in bits]).degree != p:
            continue
        if orbit_is_maximal(spec):
            return spec
    raise RuntimeError(f"no maximal generator found for p={p} in {max_tries} tries")
