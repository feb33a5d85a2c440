"""Minimum weight N_v of the minimal F2-linear relations.

A vector (w_0(z), ..., w_{v-1}(z)) of the dual lattice L*_v is the same
thing as the relation

    sum_l sum_j [z^j] w_l(z) * y_{i+j, l} = 0    for all i >= 0,

so a relation is stored as its set of (lag, bit) terms.  The shortest
vectors of L*_v are exactly the nonzero GF(2) combinations of the first v'
rows of a reduced basis; they are walked in Gray-code order with a single
row xor per step.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .generators import GeneratorSpec, GeneratorState, bit_streams, default_state, random_state
from .lattice import DualLattice, ReducedBasis, reduced_bases

log = logging.getLogger(__name__)

DEFAULT_MAX_ENUM = 1 << 28
DEFAULT_SAMPLES = 1 << 20
MAX_ARGMIN = 4096


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class LatticeVector:
    entries: tuple[int, ...]

    @property
    def norm(self) -> int:
        return max(e.bit_length() for e in self.entries) - 1

    @property
    def weight(self) -> int:
        return sum(e.bit_count() for e in self.entries)

    def __xor__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(tuple(a ^ b for a, b in zip(self.entries, other.entries)))


@dataclass(frozen=True, order=True)
class LinearRelation:
    """XOR of y_{i+lag, bit} over ``terms`` vanishes for every i."""

    terms: tuple[tuple[int, int], ...]
    v: int = 0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted(set(map(tuple, self.terms)))))

    @property
    def weight(self) -> int:
        return len(self.terms)

    @property
    def max_lag(self) -> int:
        return max(j for j, _ in self.terms)

    @property
    def lags(self) -> list[int]:
        return sorted({j for j, _ in self.terms})

    def to_vector(self, v: int | None = None) -> LatticeVector:
        v = self.v if v is None else v
        entries = [0] * v
        for j, l in self.terms:
            entries[l] |= 1 << j
        return LatticeVector(tuple(entries))

    def __xor__(self, other):
        return LinearRelation(tuple(set(self.terms) ^ set(other.terms)), self.v)

    def render(self) -> str:
        """Relation in the y_{i+j, l} notation."""
        parts = []
        for j, l in self.terms:
            idx = "i" if j == 0 else f"i + {j}"
            parts.append(f"y_{{{idx}, {l}}}")
        return " + ".join(parts) + " = 0"

    def to_dict(self) -> dict:
        return {
            "v": self.v,
            "weight": self.weight,
            "terms": [{"lag": j, "bit": l} for j, l in self.terms],
        }

    @classmethod
    def from_dict(cls, doc) -> "LinearRelation":
        return cls(tuple((t["lag"], t["bit"]) for t in doc["terms"]), doc.get("v", 0))


def vector_to_relation(vec, v: int | None = None) -> LinearRelation:
    entries = vec.entries if isinstance(vec, LatticeVector) else tuple(vec)
    if not any(entries):
        raise ValueError("the zero vector carries no relation")
    v = len(entries) if v is None else v
    terms = []
    for l, e in enumerate(entries):
        j = 0
        while e:
            if e & 1:
                terms.append((j, l))
            e >>= 1
            j += 1
    return LinearRelation(tuple(terms), v)


@dataclass
class MeritReport:
    v: int
    k: int
    v_prime: int
    n_vectors: int
    N_v: int
    relations: list[LinearRelation] = field(default_factory=list)
    n_argmin: int = 0
    exact: bool = True
    samples: int = 0

    def to_dict(self) -> dict:
        doc = {
            "v": self.v,
            "k": self.k,
            "v_prime": self.v_prime,
            "shortest_vectors": self.n_vectors,
            "N_v": self.N_v,
            "exact": self.exact,
            "argmin_count": self.n_argmin,
        }
        if not self.exact:
            doc["samples"] = self.samples
            doc["note"] = "sampled: N_v is an upper bound"
        return doc


def _pack_rows(rows: list[list[int]], k: int) -> np.ndarray:
    """Pack each vector into uint64 words, entry l at bit offset l*(k+1)."""
    stride = k + 1
    nbits = stride * len(rows[0])
    nwords = (nbits + 63) // 64
    packed = np.zeros((len(rows), nwords), dtype=np.uint64)
    for r, row in enumerate(rows):
        acc = 0
        for l, e in enumerate(row):
            acc |= e << (l * stride)
        packed[r] = np.frombuffer(acc.to_bytes(nwords * 8, "little"), dtype=np.uint64)
    return packed


def _combine(rows, pattern: int) -> LatticeVector:
    v = len(rows[0])
    acc = [0] * v
    b = 0
    while pattern:
        if pattern & 1:
            for l in range(v):
                acc[l] ^= rows[b][l]
        pattern >>= 1
        b += 1
    return LatticeVector(tuple(acc))


def enumerate_min_weight(reduced: ReducedBasis, max_enum: int = DEFAULT_MAX_ENUM, *,
                         sample: bool = True, samples: int = DEFAULT_SAMPLES,
                         sample_seed: int = 0, workers: int = 1) -> MeritReport:
    """N_v over the 2^{v'} - 1 shortest vectors of a reduced basis.

    When 2^{v'} exceeds ``max_enum`` the walk is replaced by ``samples``
    uniformly drawn patterns (``sample=True``) and the report is flagged as
    an upper bound, or :class:`BudgetExceeded` is raised (``sample=False``).
    ``workers`` splits the Gray walk into contiguous index ranges run on
    threads; results are merged into the same deterministic report.
    """
    vp, k, v = reduced.v_prime, reduced.k, reduced.v
    short = reduced.shortest_rows()
    packed = _pack_rows(short, k)
    total = (1 << vp) - 1
    if (1 << vp) <= max_enum:
        bounds = np.linspace(1, 1 << vp, max(1, workers) + 1).astype(np.int64)
        ranges = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        if len(ranges) == 1:
            parts = [_kernels.gray_walk(packed, ranges[0][0], ranges[0][1], MAX_ARGMIN)]
        else:
            with ThreadPoolExecutor(len(ranges)) as ex:
                parts = list(ex.map(lambda r: _kernels.gray_walk(packed, r[0], r[1], MAX_ARGMIN), ranges))
        best = min(int(p[0]) for p in parts)
        patterns = [int(g) for p in parts if int(p[0]) == best for g in p[1]]
        n_argmin = sum(int(p[2]) for p in parts if int(p[0]) == best)
        exact, nsamp = True, 0
    else:
        if not sample:
            raise BudgetExceeded(f"v'={vp}: 2^{vp} shortest vectors exceed the budget {max_enum}")
        b, found = _kernels.sample_min_weight(packed, samples, sample_seed, MAX_ARGMIN)
        best = int(b)
        patterns = [int(g) for g in found]
        n_argmin = len(set(patterns))
        exact, nsamp = False, samples
    rels = set()
    for g in patterns:
        vec = _combine(short, g)
        if vec.norm != k or vec.weight != best:
            raise AssertionError(f"pattern {g:#x}: norm {vec.norm}, weight {vec.weight}")
        rels.add(vector_to_relation(vec, v))
    relations = sorted(rels, key=lambda r: r.terms)
    return MeritReport(v, k, vp, total, best, relations, n_argmin, exact, nsamp)


def walk_shortest(reduced: ReducedBasis):
    """Yield (pattern, LatticeVector) over all shortest vectors in Gray order (pure Python)."""
    short = reduced.shortest_rows()
    vp = len(short)
    cur = [0] * reduced.v
    g = 0
    for s in range(1, 1 << vp):
        b = (s & -s).bit_length() - 1
        g ^= 1 << b
        for l, e in enumerate(short[b]):
            cur[l] ^= e
        yield g, LatticeVector(tuple(cur))


def reduced_basis_for(gen, v: int) -> ReducedBasis:
    red = None
    for _, red in reduced_bases(gen, v):
        pass
    return red


def merit_report(gen, v: int, **kwargs) -> MeritReport:
    return enumerate_min_weight(reduced_basis_for(gen, v), **kwargs)


def minimal_relations(gen, v: int, max_enum: int = DEFAULT_MAX_ENUM) -> list[LinearRelation]:
    """All minimum-weight minimal relations with v-bit accuracy (exact walk only)."""
    report = merit_report(gen, v, max_enum=max_enum, sample=False)
    return report.relations


def verify_relation(gen: GeneratorState | GeneratorSpec, rel: LinearRelation, span: int) -> bool:
    """True iff the relation's terms XOR to zero for every i in [0, span)."""
    if not rel.terms:
        raise ValueError("empty relation")
    if span <= 0:
        return True
    if isinstance(gen, GeneratorSpec):
        gen = default_state(gen)
    v = max(l for _, l in rel.terms) + 1
    streams = bit_streams(gen, v, span + rel.max_lag)
    acc = 0
    for j, l in rel.terms:
        acc ^= streams[l] >> j
    return acc & ((1 << span) - 1) == 0


def verify_relation_seeds(spec: GeneratorSpec, rel: LinearRelation, span: int, nseeds: int = 5, seed: int = 0) -> bool:
    import random

    rng = random.Random(seed)
    return all(verify_relation(random_state(spec, rng), rel, span) for _ in range(nseeds))
