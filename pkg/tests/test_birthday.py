import math
import random
from types import SimpleNamespace

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from f2merit.birthday import (
    BirthdayParams,
    birthday_spacings,
    collisions,
    lagged_points,
    poisson_right_tail,
    replication_boxes,
)
from f2merit.generators import MEMT19937II, MT19937, make_generator


class Counter:
    """Fake generator whose i-th output word is i."""

    def __init__(self, w=16):
        self.spec = SimpleNamespace(w=w, label="counter")
        self.i = 0

    def words(self, count):
        out = list(range(self.i, self.i + count))
        self.i += count
        return out


class Constant(Counter):
    def words(self, count):
        return [0xBEEF] * count


def mp_tail(mu, y):
    """P(X >= y) by direct high-precision summation."""
    mpmath.mp.dps = 40
    mu = mpmath.mpf(mu)
    if y <= 0:
        return mpmath.mpf(1)
    if y < mu:
        return 1 - mpmath.fsum(mpmath.exp(k * mpmath.log(mu) - mu - mpmath.loggamma(k + 1)) for k in range(y))
    total, k = mpmath.mpf(0), y
    while True:
        term = mpmath.exp(k * mpmath.log(mu) - mu - mpmath.loggamma(k + 1))
        total += term
        if term < total * mpmath.mpf(10) ** -30:
            return total
        k += 1


def boxes_of(points, v, t):
    return [sum(c << (v * (t - 1 - m)) for m, c in enumerate(p)) for p in points]


class TestIndexing:
    def test_successive(self):
        params = BirthdayParams(1, 3, 16, 3, (0, 1, 2))
        got = lagged_points(Counter(), params).tolist()
        assert got == boxes_of([(0, 1, 2), (3, 4, 5), (6, 7, 8)], 16, 3)

    def test_mt_lags(self):
        params = BirthdayParams(1, 3, 16, 3, (0, 396, 623))
        got = lagged_points(Counter(), params).tolist()
        assert got[1] == boxes_of([(624, 1020, 1247)], 16, 3)[0]

    def test_top_bits(self):
        gen = Counter(w=16)
        params = BirthdayParams(1, 4, 4, 2, (0, 1))
        gen.words = lambda c: [0xABCD, 0x1234] * (c // 2)
        assert lagged_points(gen, params).tolist() == [0xA1] * 4

    def test_constant(self):
        params = BirthdayParams(1, 50, 8, 3, (0, 2, 5))
        boxes = lagged_points(Constant(), params)
        assert len(set(boxes.tolist())) == 1
        assert collisions(boxes) == 48

    @pytest.mark.parametrize("spec", [MT19937, MEMT19937II], ids=lambda s: s.label)
    def test_compiled_matches_python(self, spec):
        params = BirthdayParams(1, 3000, 21, 3, (0, 396, 623))
        fast = replication_boxes(spec, 7, params)
        slow = replication_boxes(spec, 7, params, fast=False)
        assert np.array_equal(fast, slow)


class TestParams:
    def test_lambda(self):
        lam = BirthdayParams(5, 20_000_000, 21, 3, (0, 396, 623)).lam
        assert 216.7 < lam < 216.9

    def test_guards(self):
        with pytest.raises(ValueError):
            BirthdayParams(1, 100, 22, 3, (0, 1, 2))
        with pytest.raises(ValueError):
            BirthdayParams(1, 100, 10, 3, (0, 2, 1))
        with pytest.raises(ValueError):
            BirthdayParams(1, 100, 10, 2, (0, 1, 2))
        with pytest.raises(ValueError):
            BirthdayParams(1, 2, 10, 1, (0,))

    def test_seed_blocks(self):
        assert BirthdayParams(5, 10, 8, 1, (0,), base_seed=1).seeds() == [1, 2, 3, 4, 5]
        assert BirthdayParams(5, 10, 8, 1, (0,), base_seed=3).seeds() == [11, 12, 13, 14, 15]


class TestCollisions:
    def test_small_hand_case(self):
        # boxes 0, 3, 6, 7, 10 -> spacings 3, 3, 1, 3 -> sorted 1, 3, 3, 3 -> 2 equalities
        assert collisions([7, 0, 10, 3, 6]) == 2

    @settings(max_examples=50)
    @given(st.lists(st.integers(0, 2**20), min_size=3, max_size=200), st.randoms())
    def test_permutation_invariant(self, boxes, rnd):
        shuffled = boxes[:]
        rnd.shuffle(shuffled)
        assert collisions(boxes) == collisions(shuffled)

    @given(st.lists(st.integers(0, 2**63 - 1), min_size=3, max_size=100))
    def test_bounds(self, boxes):
        assert 0 <= collisions(boxes) <= len(boxes) - 2


class TestPoisson:
    def test_trivial(self):
        assert poisson_right_tail(3.0, 0) == 1.0
        for mu in (0.1, 2.5, 40.0):
            assert math.isclose(poisson_right_tail(mu, 1), -math.expm1(-mu), rel_tol=1e-12)
        with pytest.raises(ValueError):
            poisson_right_tail(0.0, 3)

    def test_against_oracle_point(self):
        got = poisson_right_tail(216.77, 300)
        assert math.isclose(got, float(mp_tail(216.77, 300)), rel_tol=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.01, 1e4), st.floats(0.0, 3.0))
    def test_against_oracle(self, mu, frac):
        y = int(mu * frac)
        got = poisson_right_tail(mu, y)
        ref = float(mp_tail(mu, y))
        assert 0 < got <= 1
        if ref > 1e-300:
            assert math.isclose(got, ref, rel_tol=1e-10)


def test_report_reproducible():
    params = BirthdayParams(2, 20_000, 12, 3, (0, 1, 2))
    a = birthday_spacings(MEMT19937II, params)
    b = birthday_spacings(MEMT19937II, params)
    assert a.counts == b.counts and a.p_value == b.p_value
    assert 0 < a.p_value <= 1 and all(y >= 0 for y in a.counts)


def test_factory_path_matches_spec_path():
    params = BirthdayParams(2, 2_000, 10, 3, (0, 3, 7))
    a = birthday_spacings(MT19937, params)
    b = birthday_spacings(lambda s: make_generator(MT19937, seed=s), params)
    assert a.counts == b.counts


@pytest.mark.parametrize("spec", [MEMT19937II, MT19937], ids=lambda s: s.label)
def test_calibration(spec):
    # 200 independent runs of N = 5, n = 1e5, d = 2^14, t = 3, successive lags;
    # N * lambda ~ 284 keeps the discreteness of the Poisson p-value small
    pvals = []
    for base in range(1, 201):
        params = BirthdayParams(5, 100_000, 14, 3, (0, 1, 2), base_seed=base)
        pvals.append(birthday_spacings(spec, params).p_value)
    assert stats.kstest(pvals, "uniform").pvalue > 1e-3
