"""Exact-distribution calculus: frozen oracles and invariants."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from poqlab.core import (
    INF,
    CMP_SLACK,
    ExactDistribution,
    all_bitstrings,
    averaged_marginal,
    binary_digits,
    bit_sampler,
    exact_pmf,
    floor_log2,
    kl_divergence,
    leq_with_slack,
    marginal,
    mix,
    pinsker_bound,
    point_mass,
    power,
    product,
    statistical_distance,
    uniform_bits,
    uniform_over,
)
from poqlab.errors import BudgetExceeded, MalformedTuple

F = Fraction


def dist(**mass):
    return ExactDistribution({k: F(v) for k, v in mass.items()})


# --- distributions on small supports used across the suite -----------------

def small_dists():
    return [
        point_mass("0"),
        point_mass("1"),
        uniform_bits(1),
        uniform_bits(2),
        ExactDistribution({"0": F(3, 4), "1": F(1, 4)}),
        ExactDistribution({"00": F(1, 2), "01": F(1, 4), "10": F(1, 8), "11": F(1, 8)}),
        ExactDistribution({"0": F(5, 7), "1": F(2, 7)}),
    ]


class TestExactDistribution:
    def test_masses_must_sum_to_one(self):
        with pytest.raises(ValueError):
            ExactDistribution({"0": F(1, 2)})

    def test_negative_mass_rejected(self):
        with pytest.raises(ValueError):
            ExactDistribution({"0": F(3, 2), "1": F(-1, 2)})

    def test_support_drops_zero_mass(self):
        d = ExactDistribution({"0": F(1), "1": F(0)})
        assert d.support == {"0"}

    def test_condition_renormalizes(self):
        d = dist(a=F(1, 2), b=F(1, 4), c=F(1, 4))
        got = d.condition(lambda x: x != "a")
        assert got == dist(b=F(1, 2), c=F(1, 2))


class TestExactPmf:
    def test_constant_sampler_point_mass(self):
        s = bit_sampler("const", lambda lam: lam, lambda lam: lam,
                        lambda lam, seed: "0" * lam)
        assert exact_pmf(s, 3) == point_mass("000")

    def test_identity_sampler_uniform(self):
        s = bit_sampler("id", lambda lam: 2, lambda lam: 2,
                        lambda lam, seed: seed)
        assert exact_pmf(s, 1) == uniform_bits(2)

    def test_majority_of_three(self):
        # oracle: enumerate all 8 seeds by hand -> 4 seeds of each majority
        s = bit_sampler("maj3", lambda lam: 3, lambda lam: 1,
                        lambda lam, seed: "1" if seed.count("1") >= 2 else "0")
        assert exact_pmf(s, 1) == dist(**{"0": F(1, 2), "1": F(1, 2)})

    def test_budget_enforced(self):
        s = bit_sampler("big", lambda lam: 30, lambda lam: 1,
                        lambda lam, seed: "0")
        with pytest.raises(BudgetExceeded):
            exact_pmf(s, 1, max_enumeration=1 << 10)


class TestStatisticalDistance:
    def test_identical_is_zero(self):
        for d in small_dists():
            assert statistical_distance(d, d) == 0

    def test_disjoint_point_masses(self):
        assert statistical_distance(point_mass("0"), point_mass("1")) == 1

    def test_quarter_gap(self):
        assert statistical_distance(uniform_bits(1), dist(**{"0": F(3, 4), "1": F(1, 4)})) == F(1, 4)

    def test_symmetry_and_triangle(self):
        ds = small_dists()
        for p in ds:
            for q in ds:
                assert statistical_distance(p, q) == statistical_distance(q, p)
                for r in ds:
                    assert statistical_distance(p, r) <= (
                        statistical_distance(p, q) + statistical_distance(q, r))


class TestKl:
    def test_self_divergence_zero(self):
        for d in small_dists():
            assert abs(kl_divergence(d, d)) < CMP_SLACK

    def test_point_vs_uniform_is_one_bit(self):
        got = kl_divergence(point_mass("0"), uniform_bits(1))
        assert abs(got - 1) < CMP_SLACK

    def test_support_violation_infinite(self):
        assert kl_divergence(uniform_bits(1), point_mass("0")) is INF

    def test_pinsker_on_pairs(self):
        # SD <= sqrt(ln2/2 * KL) across all test pairs with containment
        for p in small_dists():
            for q in small_dists():
                bound = pinsker_bound(p, q)
                if bound is INF:
                    continue
                assert leq_with_slack(statistical_distance(p, q), bound)


class TestMarginal:
    def test_product_marginal_recovers_factor(self):
        d = dist(**{"0": F(3, 4), "1": F(1, 4)})
        assert marginal(power(d, 2), 1, 2) == d
        assert marginal(power(d, 2), 2, 2) == d

    def test_diagonal_marginals_uniform(self):
        diag = uniform_over(["00", "11"])
        assert marginal(diag, 1, 2) == uniform_bits(1)
        assert marginal(diag, 2, 2) == uniform_bits(1)

    def test_point_mass_tuple(self):
        d = point_mass("0110")
        assert marginal(d, 2, 2) == point_mass("10")

    def test_malformed(self):
        with pytest.raises(MalformedTuple):
            marginal(point_mass("010"), 1, 2)

    def test_marginal_kl_superadditive(self):
        # sum_i KL(R_i || D) <= KL(R || D^N) on explicit tuple distributions
        base = dist(**{"0": F(1, 3), "1": F(2, 3)})
        tuples = [
            uniform_over(["00", "11"]),
            ExactDistribution({"00": F(1, 2), "01": F(1, 6), "10": F(1, 6), "11": F(1, 6)}),
            power(dist(**{"0": F(1, 4), "1": F(3, 4)}), 2),
        ]
        for r in tuples:
            lhs = sum(kl_divergence(marginal(r, i, 2), base) for i in (1, 2))
            rhs = kl_divergence(r, power(base, 2))
            assert leq_with_slack(lhs, rhs)


class TestDataProcessing:
    @given(st.integers(0, 200), st.integers(0, 200), st.integers(1, 4))
    @settings(max_examples=60, deadline=None)
    def test_sd_monotone_under_maps(self, seed_p, seed_q, table_seed):
        import random

        rng = random.Random(seed_p * 40009 + seed_q * 211 + table_seed)
        xs = list(all_bitstrings(2))
        wp = [rng.randint(0, 4) for _ in xs]
        wq = [rng.randint(0, 4) for _ in xs]
        if sum(wp) == 0 or sum(wq) == 0:
            return
        p = ExactDistribution({x: F(w, sum(wp)) for x, w in zip(xs, wp) if w})
        q = ExactDistribution({x: F(w, sum(wq)) for x, w in zip(xs, wq) if w})
        table = {x: rng.choice(["a", "b"]) for x in xs}
        assert statistical_distance(p.map(table.get), q.map(table.get)) <= \
            statistical_distance(p, q)

    def test_sd_monotone_under_kernels(self):
        p = dist(**{"0": F(2, 3), "1": F(1, 3)})
        q = uniform_bits(1)
        noisy = lambda x: mix([(F(3, 4), point_mass(x)), (F(1, 4), uniform_bits(1))])
        assert statistical_distance(p.compose(noisy), q.compose(noisy)) <= \
            statistical_distance(p, q)

    def test_acceptance_shift_bound(self):
        # |Pr_P[V] - Pr_Q[V]| <= SD(P, Q) for every predicate, by enumeration
        ds = small_dists()
        for p in ds:
            for q in ds:
                pts = sorted(p.support | q.support)
                for mask in range(1 << len(pts)):
                    event = {x for i, x in enumerate(pts) if mask >> i & 1}
                    gap = abs(p.expect(event.__contains__) - q.expect(event.__contains__))
                    assert gap <= statistical_distance(p, q)


class TestBitHelpers:
    @given(st.fractions(min_value=0, max_value=F(99, 100)), st.integers(1, 12))
    @settings(max_examples=80, deadline=None)
    def test_binary_digits_truncation(self, x, n):
        digits = binary_digits(x, n)
        approx = sum(F(1, 2 ** (i + 1)) for i, b in enumerate(digits) if b == "1")
        assert approx <= x < approx + F(1, 2 ** n)

    @given(st.fractions(min_value=F(1, 1000), max_value=1000))
    @settings(max_examples=80, deadline=None)
    def test_floor_log2(self, x):
        k = floor_log2(x)
        assert F(2) ** k <= x < F(2) ** (k + 1)

    def test_averaged_marginal(self):
        d = ExactDistribution({"01": F(1, 2), "10": F(1, 2)})
        assert averaged_marginal(d, 2) == uniform_bits(1)

    def test_product_tuple_joiner(self):
        d = product(uniform_bits(1), point_mass("1"), joiner=tuple)
        assert d == uniform_over([("0", "1"), ("1", "1")])
