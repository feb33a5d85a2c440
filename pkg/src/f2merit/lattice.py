"""Dual lattice of an F2-linear generator and its reduction.

For v-bit accuracy the lattice L*_v is spanned by

    w_1 = (P, 0, ..., 0),   w_{l+1} = (hbar_l, 0, .., 1, .., 0)   (l = 1..v-1)

with hbar_l = h_0^{-1} h_l mod P.  A reduced basis gives the successive
minima, and the first one is k(v), the dimension of equidistribution with
v-bit accuracy.

Entries are int-encoded polynomials (see :mod:`f2merit.f2poly`).  The
reduction brings the basis to weak Popov form: every row's pivot (the
column of its highest-degree entry, ties going to the largest column) is
different.  Such a basis is row reduced, so its row degrees are the
successive minima.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .f2poly import F2Poly, clinvmod, clmod, clmul
from .generators import GeneratorSpec, GeneratorState, characteristic_poly, default_state, numerator_polys

log = logging.getLogger(__name__)


class DependentRowsError(ArithmeticError):
    """A basis row reduced to zero: the input rows were not independent."""


@dataclass
class LatticeBasis:
    rows: list[list[int]]
    det_degree: int | None = None  # degree of the determinant when known

    @property
    def v(self) -> int:
        return len(self.rows)

    def poly(self, i: int, j: int) -> F2Poly:
        return F2Poly(self.rows[i][j])


@dataclass
class ReducedBasis:
    rows: list[list[int]]
    minima: list[int]
    pivots: list[int] = field(default_factory=list)

    @property
    def v(self) -> int:
        return len(self.rows)

    @property
    def v_prime(self) -> int:
        """Number of rows attaining the first minimum."""
        return sum(1 for m in self.minima if m == self.minima[0])

    @property
    def k(self) -> int:
        return self.minima[0]

    def shortest_rows(self) -> list[list[int]]:
        return self.rows[: self.v_prime]


def row_norm(row) -> int:
    return max(e.bit_length() for e in row) - 1


def _pivot(row) -> tuple[int, int]:
    """(degree, column) of the row's pivot; ties go to the largest column."""
    best_deg, best_col = -1, -1
    for j, e in enumerate(row):
        d = e.bit_length() - 1
        if d >= best_deg and d >= 0:
            best_deg, best_col = d, j
    return best_deg, best_col


def _add_shifted(row, other, s):
    """row += z^s * other, in place."""
    for j, e in enumerate(other):
        if e:
            row[j] ^= e << s


def reduce_basis(basis: LatticeBasis | list) -> ReducedBasis:
    """Weak Popov reduction by pivot-collision cancellation.

    Whenever two rows share a pivot column, the one with the higher pivot
    degree has its leading term cancelled by a z-power multiple of the other.
    Rows that are already in weak Popov form relative to each other are never
    touched, so feeding a reduced basis plus one new row only costs the
    reduction of that row (which is how :func:`reduced_bases` grows v).
    """
    if isinstance(basis, LatticeBasis):
        det_degree = basis.det_degree
        rows = [list(r) for r in basis.rows]
    else:
        det_degree = None
        rows = [list(r) for r in basis]
    owner: dict[int, int] = {}  # pivot column -> row index
    pending = list(range(len(rows)))
    pending.reverse()
    while pending:
        i = pending.pop()
        row = rows[i]
        while True:
            d, c = _pivot(row)
            if c < 0:
                raise DependentRowsError("basis rows are linearly dependent")
            j = owner.get(c)
            if j is None:
                owner[c] = i
                break
            other = rows[j]
            d_other = other[c].bit_length() - 1
            if d >= d_other:
                _add_shifted(row, other, d - d_other)
            else:
                # the shorter row takes over the column; the evicted row is re-queued
                _add_shifted(other, row, d_other - d)
                owner[c] = i
                pending.append(j)
                break
    order = sorted(range(len(rows)), key=lambda i: (row_norm(rows[i]), _pivot(rows[i])[1]))
    rows = [rows[i] for i in order]
    minima = [row_norm(r) for r in rows]
    if det_degree is not None and sum(minima) != det_degree:
        raise AssertionError(
            f"sum of successive minima {sum(minima)} != determinant degree {det_degree}"
        )
    return ReducedBasis(rows, minima, [_pivot(r)[1] for r in rows])


class DualLattice:
    """Shared data for the dual lattices L*_1..L*_w of one generator."""

    def __init__(self, spec: GeneratorSpec, state: GeneratorState | None = None, v_max: int | None = None):
        self.spec = spec
        self.state = state if state is not None else default_state(spec)
        self.v_max = spec.w if v_max is None else v_max
        self.P = characteristic_poly(spec)
        self.p = self.P.bit_length() - 1
        self.h = numerator_polys(self.state, self.v_max, self.P)
        h0inv = clinvmod(int(self.h[0]), int(self.P))
        self.hbar = [1] + [clmod(clmul(h0inv, int(h)), int(self.P)) for h in self.h[1:]]

    def basis(self, v: int) -> LatticeBasis:
        """Generators w_1..w_v of L*_v (no reduction)."""
        if not 1 <= v <= self.v_max:
            raise ValueError(f"v must lie in [1, {self.v_max}]")
        rows = [[int(self.P)] + [0] * (v - 1)]
        for l in range(1, v):
            row = [0] * v
            row[0] = self.hbar[l]  # -hbar = hbar over GF(2)
            row[l] = 1
            rows.append(row)
        return LatticeBasis(rows, det_degree=self.p)

    def new_row(self, v: int) -> list[int]:
        row = [0] * v
        row[0] = self.hbar[v - 1]
        row[v - 1] = 1
        return row


def build_dual_basis(gen: GeneratorState | GeneratorSpec, v: int) -> LatticeBasis:
    if isinstance(gen, GeneratorSpec):
        gen = default_state(gen)
    return DualLattice(gen.spec, gen, v_max=v).basis(v)


def reduced_bases(gen: GeneratorState | GeneratorSpec | DualLattice, v_max: int | None = None):
    """Yield (v, ReducedBasis) for v = 1..v_max.

    L*_v contains L*_{v-1} (padded with a zero coordinate), so the reduced
    basis for v-1 plus the new generator w_v spans L*_v.
    """
    if isinstance(gen, DualLattice):
        lat = gen
    elif isinstance(gen, GeneratorSpec):
        lat = DualLattice(gen, v_max=v_max)
    else:
        lat = DualLattice(gen.spec, gen, v_max=v_max)
    v_max = lat.v_max if v_max is None else v_max
    rows: list[list[int]] = []
    for v in range(1, v_max + 1):
        if v == 1:
            start = [[int(lat.P)]]
        else:
            start = [r + [0] for r in rows] + [lat.new_row(v)]
        red = reduce_basis(LatticeBasis(start, det_degree=lat.p))
        rows = red.rows
        log.debug("v=%d minima=%s", v, red.minima)
        yield v, red


def k_of_v(reduced: ReducedBasis) -> int:
    return reduced.minima[0]


@dataclass
class DefectProfile:
    p: int
    rows: list[tuple[int, int, int]]  # (v, k(v), d(v))
    minima: dict[int, list[int]]

    @property
    def delta(self) -> int:
        return sum(d for _, _, d in self.rows)

    def k(self, v: int) -> int:
        return self.rows[v - 1][1]


def defect_profile(gen, v_max: int | None = None, keep_bases: dict | None = None) -> DefectProfile:
    """k(v), d(v) = floor(p/v) - k(v) for v = 1..v_max, and their total.

    When ``keep_bases`` is a dict it receives the ReducedBasis for each v.
    """
    rows, minima, p = [], {}, None
    for v, red in reduced_bases(gen, v_max):
        p = sum(red.minima)
        k = red.k
        rows.append((v, k, p // v - k))
        minima[v] = red.minima
        if keep_bases is not None:
            keep_bases[v] = red
    return DefectProfile(p, rows, minima)
