import random

import pytest

from f2merit.generators import MT19937, characteristic_poly, make_generator
from f2merit.lattice import reduced_bases
from f2merit.merit import (
    BudgetExceeded,
    LatticeVector,
    LinearRelation,
    _combine,
    enumerate_min_weight,
    minimal_relations,
    vector_to_relation,
    verify_relation,
    verify_relation_seeds,
    walk_shortest,
)
from f2merit.oracle import random_maximal_spec

SIX_TERM = LinearRelation(((0, 1), (0, 16), (396, 2), (396, 17), (623, 2), (623, 17)), 21)
FIVE_TERM = LinearRelation(((0, 2), (792, 4), (792, 11), (1246, 4), (1246, 11)), 12)


@pytest.fixture(scope="module")
def wide_bases():
    """Reduced bases of small generators with v' >= 5."""
    rng = random.Random(21)
    found = []
    while len(found) < 4:
        spec = random_maximal_spec(rng, 16, 8)
        for v, red in reduced_bases(spec):
            if red.v_prime >= 5:
                found.append((spec, v, red))
                break
    return found


class TestRelations:
    def test_single_term(self):
        assert vector_to_relation((0, 0, 0b1000), 3).terms == ((3, 2),)

    def test_xor_is_symmetric_difference(self):
        a = vector_to_relation((0b101, 0b1), 2)
        b = vector_to_relation((0b100, 0b11), 2)
        assert (a ^ b).terms == tuple(sorted(set(a.terms) ^ set(b.terms)))
        va, vb = LatticeVector((0b101, 0b1)), LatticeVector((0b100, 0b11))
        assert vector_to_relation(va ^ vb, 2) == a ^ b

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            vector_to_relation((0, 0), 2)

    def test_dict_round_trip(self):
        assert LinearRelation.from_dict(SIX_TERM.to_dict()) == SIX_TERM
        assert SIX_TERM.to_dict()["weight"] == 6

    def test_render(self):
        assert FIVE_TERM.render() == (
            "y_{i, 2} + y_{i + 792, 4} + y_{i + 792, 11} + y_{i + 1246, 4} + y_{i + 1246, 11} = 0"
        )

    def test_v1_is_recurrence(self):
        P = characteristic_poly(MT19937)
        rel = vector_to_relation((int(P),), 1)
        assert rel.weight == 135
        assert rel.lags == P.exponents()


class TestVerify:
    def test_six_term_holds(self):
        assert verify_relation_seeds(MT19937, SIX_TERM, 10_000, nseeds=5, seed=1)

    def test_injected_term_fails(self):
        bad = LinearRelation(SIX_TERM.terms + ((0, 0),), 21)
        assert not verify_relation(make_generator(MT19937, seed=5489), bad, 50)

    def test_span_zero(self):
        assert verify_relation(make_generator(MT19937, seed=1), SIX_TERM, 0)

    def test_empty(self):
        with pytest.raises(ValueError):
            verify_relation(make_generator(MT19937, seed=1), LinearRelation((), 1), 10)


class TestEnumeration:
    def test_gray_walk_checkpoints(self, wide_bases):
        rng = random.Random(0)
        for _, _, red in wide_bases:
            short = red.shortest_rows()
            walked = list(walk_shortest(red))
            assert len(walked) == (1 << red.v_prime) - 1
            assert len({g for g, _ in walked}) == len(walked)
            for g, vec in rng.sample(walked, min(100, len(walked))):
                assert _combine(short, g) == vec
            assert all(vec.norm == red.k for _, vec in walked)

    def test_compiled_matches_python(self, wide_bases):
        for _, v, red in wide_bases:
            rep = enumerate_min_weight(red)
            weights = [vec.weight for _, vec in walk_shortest(red)]
            assert rep.N_v == min(weights)
            assert rep.n_argmin == weights.count(rep.N_v)
            best = {vector_to_relation(vec, v) for _, vec in walk_shortest(red) if vec.weight == rep.N_v}
            assert set(rep.relations) == best
            assert rep.n_vectors == (1 << red.v_prime) - 1 and rep.exact

    def test_threads_agree(self, wide_bases):
        for _, _, red in wide_bases:
            one = enumerate_min_weight(red)
            many = enumerate_min_weight(red, workers=3)
            assert (one.N_v, one.relations, one.n_argmin) == (many.N_v, many.relations, many.n_argmin)

    def test_budget(self, wide_bases):
        _, _, red = wide_bases[0]
        with pytest.raises(BudgetExceeded):
            enumerate_min_weight(red, max_enum=4, sample=False)
        sampled = enumerate_min_weight(red, max_enum=4, samples=1 << 12)
        assert not sampled.exact
        assert sampled.N_v >= enumerate_min_weight(red).N_v
        assert sampled.to_dict()["note"].startswith("sampled")

    def test_argmin_relations_hold(self, wide_bases):
        rng = random.Random(3)
        for spec, v, red in wide_bases:
            for rel in enumerate_min_weight(red).relations:
                assert rel.max_lag == red.k
                for _ in range(5):
                    gen = make_generator(spec, state=rng.randrange(1, 1 << spec.p))
                    assert verify_relation(gen, rel, 500)


def test_mt_v12_relations(mt_profile):
    _, bases = mt_profile
    rep = enumerate_min_weight(bases[12])
    assert (rep.N_v, rep.v_prime, rep.k) == (5, 2, 1246)
    assert rep.relations == [FIVE_TERM]


def test_minimal_relations_small():
    spec = random_maximal_spec(random.Random(5), 10, 3)
    rels = minimal_relations(spec, 2)
    assert rels and len({r.weight for r in rels}) == 1
