"""Birthday spacings test on lagged output tuples.

Point i is (u_{s i + j_1}, ..., u_{s i + j_t}) with stride s = j_t + 1,
each coordinate cut to its top v bits (d = 2^v cells per axis).  Boxes are
numbered lexicographically, first lag most significant.  Per replication
the n box numbers are sorted, their n - 1 spacings are sorted, and Y_r
counts the adjacent equal spacings.  Under H0 the sum of Y_r over N
replications is close to Poisson with mean N * n^3 / (4 d^t).
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .generators import GeneratorSpec, Kind, init_genrand, make_generator

_TAIL_EPS = 1e-18
_TINY = 5e-324  # keeps p-values inside (0, 1]


@dataclass
class BirthdayParams:
    N: int
    n: int
    log2d: int
    t: int
    lags: tuple[int, ...]
    base_seed: int = 1

    def __post_init__(self):
        self.lags = tuple(int(j) for j in self.lags)
        if len(self.lags) != self.t:
            raise ValueError(f"expected {self.t} lags, got {len(self.lags)}")
        if any(j < 0 for j in self.lags) or list(self.lags) != sorted(set(self.lags)):
            raise ValueError("lags must be distinct, non-negative and increasing")
        if self.log2d * self.t > 63:
            raise ValueError("v * t must be at most 63 (64-bit box indices)")
        if self.log2d < 1 or self.n < 3 or self.N < 1:
            raise ValueError("need log2d >= 1, n >= 3, N >= 1")

    @property
    def d(self) -> int:
        return 1 << self.log2d

    @property
    def stride(self) -> int:
        return self.lags[-1] + 1

    @property
    def lam(self) -> float:
        return self.n ** 3 / (4.0 * 2.0 ** (self.log2d * self.t))

    def seeds(self) -> list[int]:
        """Integer seeds of the N replications: (base-1)*N + 1 .. base*N."""
        first = (self.base_seed - 1) * self.N + 1
        return list(range(first, first + self.N))


@dataclass
class BirthdayReport:
    generator: str
    params: BirthdayParams
    counts: list[int]
    mean: float
    p_value: float
    seconds: float = field(default=0.0, compare=False)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def to_dict(self) -> dict:
        return {
            "generator": self.generator,
            "params": asdict(self.params) | {"lags": list(self.params.lags)},
            "lambda": self.params.lam,
            "counts": self.counts,
            "total": self.total,
            "mean": self.mean,
            "p_value": self.p_value,
            "log10_p_value": math.log10(self.p_value),
            "seconds": round(self.seconds, 3),
        }


_STIRLING = (1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188)
_LN_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def _stirlerr(n: float) -> float:
    """log(n!) - log(sqrt(2 pi n) (n/e)^n)."""
    if n <= 15:
        return math.lgamma(n + 1) - (n + 0.5) * math.log(n) + n - _LN_SQRT_2PI
    nn = n * n
    s0, s1, s2, s3, s4 = _STIRLING
    if n > 500:
        return (s0 - s1 / nn) / n
    if n > 80:
        return (s0 - (s1 - s2 / nn) / nn) / n
    if n > 35:
        return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n


def _bd0(x: float, m: float) -> float:
    """x log(x/m) + m - x without cancellation near x = m."""
    if abs(x - m) < 0.1 * (x + m):
        v = (x - m) / (x + m)
        s = (x - m) * v
        ej = 2 * x * v
        j = 1
        while True:
            ej *= v * v
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / m) + m - x


def _log_pmf(k: int, mu: float) -> float:
    """log P(X = k), Loader's saddle-point form (accurate for large k and mu)."""
    if k == 0:
        return -mu
    return -_stirlerr(k) - _bd0(k, mu) - 0.5 * math.log(2 * math.pi * k)


def poisson_right_tail(mu: float, y: int) -> float:
    """P(X >= y) for X ~ Poisson(mu), summed in log space.

    For y >= mu the terms from y upward are summed (they decay); for y < mu
    the lower tail P(X <= y - 1) is summed downward and complemented, which
    avoids cancellation since the answer is then not small.
    """
    if not mu > 0:
        raise ValueError("Poisson mean must be positive")
    if y <= 0:
        return 1.0
    if y < mu:
        # terms k = y-1, y-2, ..., 0 relative to the first one
        log_first = _log_pmf(y - 1, mu)
        total, term = 1.0, 1.0
        for k in range(y - 1, 0, -1):
            term *= k / mu
            total += term
            if term < _TAIL_EPS * total:
                break
        return max(1.0 - math.exp(log_first + math.log(total)), _TINY)
    log_first = _log_pmf(y, mu)
    total, term = 1.0, 1.0
    k = y
    while True:
        k += 1
        term *= mu / k
        total += term
        if term < _TAIL_EPS * total:
            break
    return min(1.0, max(math.exp(log_first + math.log(total)), _TINY))


def collisions(boxes) -> int:
    """Adjacent equalities among the sorted spacings of the box numbers."""
    b = np.sort(np.asarray(boxes, dtype=np.uint64))
    if b.shape[0] < 3:
        return 0
    sp = np.diff(b)
    sp.sort()
    return int(np.count_nonzero(sp[1:] == sp[:-1]))


def lagged_points(gen, params: BirthdayParams) -> np.ndarray:
    """Box numbers of the n lagged points from a running generator (pure Python path)."""
    w = gen.spec.w
    v = params.log2d
    if v > w:
        raise ValueError("cannot take more bits than the word size")
    shift = w - v
    lags = params.lags
    stride = params.stride
    boxes = np.empty(params.n, dtype=np.uint64)
    for i in range(params.n):
        words = gen.words(stride)
        acc = 0
        for j in lags:
            acc = (acc << v) | (words[j] >> shift)
        boxes[i] = acc
    return boxes


def _fast_boxes(spec: GeneratorSpec, seed: int, params: BirthdayParams) -> np.ndarray:
    kind = 0 if spec.kind is Kind.MT19937 else 1
    block = np.array(init_genrand(seed), dtype=np.uint32)
    lags = np.array(params.lags, dtype=np.int64)
    return _kernels.mt_lagged_boxes(kind, block, params.n, lags, params.log2d)


def replication_boxes(spec: GeneratorSpec, seed: int, params: BirthdayParams, fast: bool = True) -> np.ndarray:
    if fast and spec.kind in (Kind.MT19937, Kind.MEMT19937II):
        return _fast_boxes(spec, seed, params)
    return lagged_points(make_generator(spec, seed=seed), params)


def birthday_spacings(gen_factory, params: BirthdayParams, progress=None) -> BirthdayReport:
    """Run N replications and combine them into one Poisson p-value.

    ``gen_factory`` is either a GeneratorSpec (MT family: seeded with the
    integer seeds of :meth:`BirthdayParams.seeds`, using the compiled stream
    kernel) or a callable ``seed -> GeneratorState``.
    """
    start = time.perf_counter()
    counts = []
    for r, seed in enumerate(params.seeds()):
        if isinstance(gen_factory, GeneratorSpec):
            boxes = replication_boxes(gen_factory, seed, params)
            name = gen_factory.label
        else:
            gen = gen_factory(seed)
            boxes = lagged_points(gen, params)
            name = gen.spec.label
        counts.append(collisions(boxes))
        if progress:
            progress(f"replication {r + 1}/{params.N} (seed {seed}): Y = {counts[-1]}")
    mean = params.N * params.lam
    p = poisson_right_tail(mean, sum(counts))
    return BirthdayReport(name, params, counts, mean, p, time.perf_counter() - start)
