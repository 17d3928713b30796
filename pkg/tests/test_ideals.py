import random

import pytest

from conftest import P
from oracles import (
    degree_piece_dim, hilbert_count, intersection_dim, monomial_in,
    monomials_of_degree,
)
from reeslab import (
    Ideal, Polynomial, Ring, build_setup, colon_element, colon_ideal, contains,
    depth_probe, downgrade_sequence, hilbert_numerator, ideal_equal,
    ideal_power, ideal_product, ideal_sum, intersect, krull_dimension,
    minimalize_generators, saturate,
)
from reeslab.ideals import hilbert_data, iterated_colon, saturation_chain

R1 = Ring(1)
X, Y = R1.x(1), R1.T(1)  # two variables x > y
R2 = Ring(2)


def ideal(*gens):
    return Ideal(gens[0].ring, tuple(gens))


def mono(ring, e):
    return Polynomial(ring, {tuple(e): 1})


class TestSumProductPower:
    def test_sum(self):
        assert ideal_equal(ideal_sum(ideal(X), ideal(Y)), ideal(X, Y))

    def test_product(self):
        assert ideal_equal(ideal_product(ideal(X, Y), ideal(X, Y)), ideal(X ** 2, X * Y, Y ** 2))

    def test_power(self):
        p = ideal_power(ideal(X, Y), 3)
        assert len(p.gens) == 4
        assert ideal_equal(p, ideal(X ** 3, X ** 2 * Y, X * Y ** 2, Y ** 3))

    def test_power_needs_positive_exponent(self):
        with pytest.raises(ValueError):
            ideal_power(ideal(X), 0)


class TestIntersect:
    def test_monomial(self):
        assert ideal_equal(intersect(ideal(X ** 2, X * Y), ideal(Y)), ideal(X * Y))

    def test_coprime_principal(self):
        assert ideal_equal(intersect(ideal(X), ideal(Y)), ideal(X * Y))

    def test_with_unit(self):
        i = ideal(X ** 2 + Y ** 2)
        assert ideal_equal(intersect(i, ideal(R1.one())), i)

    def test_with_zero(self):
        r = intersect(ideal(X), Ideal(R1, ()))
        assert not r.nonzero_gens

    def test_degree_pieces_match_linear_algebra(self):
        a = [X ** 2, X * Y]
        b = [Y]
        got = intersect(ideal(*a), ideal(*b))
        for D in range(1, 4):
            expected = intersection_dim([g.terms for g in a], [g.terms for g in b], 2, D, P)
            assert degree_piece_dim([g.terms for g in got.gens], 2, D, P) == expected

    @pytest.mark.parametrize("seed", range(10))
    def test_random_homogeneous(self, seed):
        rng = random.Random(seed)
        ring = Ring(2)

        def form(deg):
            monos = monomials_of_degree(4, deg)
            return Polynomial(ring, {m: rng.randrange(1, P) for m in rng.sample(monos, 3)})

        a = [form(rng.randint(1, 2)) for _ in range(2)]
        b = [form(rng.randint(1, 2)) for _ in range(2)]
        got = intersect(Ideal(ring, tuple(a)), Ideal(ring, tuple(b)))
        for D in range(1, 5):
            expected = intersection_dim([g.terms for g in a], [g.terms for g in b], 4, D, P)
            assert degree_piece_dim([g.terms for g in got.gens], 4, D, P) == expected


class TestColon:
    def test_element(self):
        assert ideal_equal(colon_element(ideal(X ** 2, X * Y), X), ideal(X, Y))

    def test_by_one(self):
        i = ideal(X ** 2, X * Y)
        assert ideal_equal(colon_element(i, R1.one()), i)

    def test_by_member_is_unit(self):
        assert colon_element(ideal(X ** 2, X * Y), X * Y).groebner().is_unit()

    def test_f1_in_first_colon(self, example_setup):
        s = example_setup
        seq = downgrade_sequence(s, "min")
        start = Ideal(s.ring, s.minors + (s.f,))
        c = colon_element(start, s.ring.x(1))
        assert contains(c, seq[1])

    def test_ideal_colon_monomial(self):
        # (x^2):x = (x), (x^2):y = (x^2), intersection (x^2)
        got = colon_ideal(ideal(X ** 2), ideal(X, Y))
        assert ideal_equal(got, ideal(X ** 2))
        for D in range(0, 5):
            for m in monomials_of_degree(2, D):
                brute = monomial_in([(2, 0)], (m[0] + 1, m[1])) and monomial_in([(2, 0)], (m[0], m[1] + 1))
                assert contains(got, mono(R1, m)) == brute

    def test_ideal_colon_into_maximal(self):
        got = colon_ideal(ideal(X ** 2, X * Y, Y ** 2), ideal(X, Y))
        assert ideal_equal(got, ideal(X, Y))

    @pytest.mark.parametrize("seed", range(15))
    def test_random_monomial_colon(self, seed):
        rng = random.Random(seed)
        nv = 3
        ring = Ring(1, tags=1)  # three variables
        I = [tuple(rng.randint(0, 3) for _ in range(nv)) for _ in range(rng.randint(1, 4))]
        J = [tuple(rng.randint(0, 2) for _ in range(nv)) for _ in range(rng.randint(1, 3))]
        I = [m for m in I if any(m)] or [(1, 0, 0)]
        got = colon_ideal(Ideal(ring, tuple(mono(ring, m) for m in I)),
                          Ideal(ring, tuple(mono(ring, m) for m in J)))
        for D in range(0, 5):
            for m in monomials_of_degree(nv, D):
                brute = all(monomial_in(I, tuple(a + b for a, b in zip(m, g))) for g in J)
                assert contains(got, mono(ring, m)) == brute

    def test_iterated_equals_power(self):
        i = ideal(X ** 3, X ** 2 * Y)
        m = ideal(X, Y)
        assert ideal_equal(iterated_colon(i, m, 2), colon_ideal(i, ideal_power(m, 2)))


class TestSaturate:
    def test_embedded_component(self):
        sat, index = saturate(ideal(X ** 2, X * Y), ideal(X, Y))
        assert ideal_equal(sat, ideal(X))
        assert index == 1

    def test_already_saturated(self):
        sat, index = saturate(ideal(X), ideal(X, Y))
        assert ideal_equal(sat, ideal(X)) and index == 0

    def test_primary_to_maximal_gives_unit(self):
        sat, index = saturate(ideal(X ** 2, Y ** 3), ideal(X, Y))
        assert sat.groebner().is_unit()
        assert index == 4  # socle degree of k[x,y]/(x^2,y^3) is 3

    def test_chain_is_increasing_and_stable(self):
        i = ideal(X ** 3, X ** 2 * Y)
        m = ideal(X, Y)
        chain = saturation_chain(i, m)
        for a, b in zip(chain, chain[1:]):
            assert all(contains(b, g) for g in a.nonzero_gens)
        last = chain[-1]
        assert ideal_equal(colon_ideal(last, m), last)

    def test_colon_times_other_inside(self):
        i = ideal(X ** 3, X ** 2 * Y)
        m = ideal(X, Y)
        c = colon_ideal(i, m)
        prod = ideal_product(c, m)
        assert all(contains(i, g) for g in prod.nonzero_gens)


class TestMinimalize:
    def test_redundant_power(self):
        assert set(minimalize_generators([X, X ** 2, Y])) == {X, Y}

    def test_empty(self):
        assert minimalize_generators([]) == []

    def test_linear_combination_dropped(self):
        gens = [X ** 2, Y ** 2, X ** 2 + Y ** 2, X * Y]
        out = minimalize_generators(gens)
        assert len(out) == 3

    def test_example_count(self, example_setup):
        s = example_setup
        gens = list(s.minors) + list(downgrade_sequence(s, "min").entries)
        out = minimalize_generators(gens)
        assert len(out) == 7
        # irredundant: no generator lies in the ideal of the others
        for k, g in enumerate(out):
            rest = out[:k] + out[k + 1:]
            assert not contains(Ideal(s.ring, tuple(rest)), g)

    def test_requires_homogeneous(self):
        with pytest.raises(ValueError):
            minimalize_generators([X + 1])


class TestHilbert:
    def test_principal_linear(self):
        h = hilbert_numerator([(1, 0)], 2)
        assert h.numerator == (1, -1)
        assert h.pole_order == 1

    def test_maximal_squared(self):
        h = hilbert_numerator([(2, 0), (1, 1), (0, 2)], 2)
        assert list(h.numerator) == [1, 0, -3, 2]
        assert h.pole_order == 0
        assert h.series(4) == [1, 2, 0, 0, 0]

    def test_zero_ideal(self):
        h = hilbert_numerator([], 3)
        assert h.numerator == (1,)
        assert h.pole_order == 3

    def test_unit(self):
        assert hilbert_numerator([(0, 0)], 2).pole_order == -1

    @pytest.mark.parametrize("seed", range(60))
    def test_against_monomial_count(self, seed):
        rng = random.Random(seed)
        nv = rng.randint(1, 4)
        gens = [tuple(rng.randint(0, 3) for _ in range(nv)) for _ in range(rng.randint(0, 5))]
        gens = [g for g in gens if any(g)]
        h = hilbert_numerator(gens, nv)
        series = h.series(8)
        for D in range(9):
            assert series[D] == hilbert_count(gens, nv, D)

    def test_ideal_level(self):
        h = hilbert_data(ideal(X ** 2 + Y ** 2, X * Y))
        assert h.series(5) == [1, 2, 1, 0, 0, 0]


class TestKrullDimension:
    def test_zero_ideal(self):
        assert krull_dimension(Ideal(R2, ())) == 4

    def test_maximal(self):
        assert krull_dimension(Ideal(R2, tuple(R2.gen(i) for i in range(4)))) == 0

    def test_unit(self):
        assert krull_dimension(Ideal(R2, (R2.one(),))) == -1

    def test_minors(self):
        # determinantal ideal of a generic 2 x n matrix has codim n - 1
        assert krull_dimension(build_setup(3, "x1^2").i2psi()) == 4


class TestDepthProbe:
    def test_zero_ideal(self):
        r = depth_probe(Ideal(R2, ()), 4)
        assert r.depth == 4 and r.agreement

    def test_trials_are_seeded(self):
        r = depth_probe(Ideal(R2, ()), 4, trials=3, seed=7)
        assert [s for s, _ in r.trials] == [7000, 7001, 7002]

    def test_embedded_component_has_depth_zero(self):
        r = depth_probe(ideal(X ** 2, X * Y), 1)
        assert r.depth == 0

    def test_rees_cm_case(self):
        s = build_setup(3, "x1^2 + x2*x3")
        from reeslab import rees_ideal_downgrade
        r = depth_probe(rees_ideal_downgrade(s), 3)
        assert r.depth == 3 and r.agreement

    def test_example(self, example_setup):
        from reeslab import rees_ideal_downgrade
        r = depth_probe(rees_ideal_downgrade(example_setup), 3)
        assert r.depth == 2 and r.agreement
        assert r.trial_depths == [2, 2, 2]


class TestSmallIdentities:
    def test_sum_with_zero(self):
        i = ideal(X ** 2, X * Y)
        assert ideal_equal(ideal_sum(i, Ideal(R1, ())), i)

    def test_first_power(self):
        i = ideal(X ** 2 + Y ** 2, X * Y)
        assert ideal_equal(ideal_power(i, 1), i)

    def test_square_expands_binomially(self):
        r = Ring(3)
        sq = ideal_power(Ideal(r, (r.x(3), r.T(3))), 2)
        assert set(sq.gens) == {r.x(3) ** 2, r.x(3) * r.T(3), r.T(3) ** 2}

    def test_self_intersection(self):
        i = ideal(X ** 2 + Y ** 2, X * Y)
        assert ideal_equal(intersect(i, i), i)

    def test_colon_by_unit_ideal(self):
        i = ideal(X ** 2, X * Y)
        assert ideal_equal(colon_ideal(i, ideal(R1.one())), i)

    def test_saturate_by_unit_ideal(self):
        i = ideal(X ** 2, X * Y)
        sat, index = saturate(i, ideal(R1.one()))
        assert ideal_equal(sat, i) and index == 0

    @pytest.mark.parametrize("g", [X, Y, X + Y, X ** 2 - 3 * Y ** 2])
    def test_colon_element_times_g_inside(self, g):
        i = ideal(X ** 3, X ** 2 * Y + Y ** 3)
        c = colon_element(i, g)
        assert all(contains(i, h * g) for h in c.nonzero_gens)
