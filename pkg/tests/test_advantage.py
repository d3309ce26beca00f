"""Advantage-protocol completeness, soundness chain, and good sets."""

from fractions import Fraction

import pytest

from poqlab.core import (
    ExactDistribution,
    SeededSampler,
    averaged_marginal,
    bit_sampler,
    exact_pmf,
    point_mass,
    statistical_distance,
    uniform_bits,
    uniform_over,
)
from poqlab.errors import EmptyAcceptingSet
from poqlab.advantage import (
    AdvantageProtocol,
    build_advantage_protocol,
    completeness_report,
    good_set_dist,
    good_set_report,
    paper_repetition_count,
    repeat_sampler,
    solver_to_sampler,
    soundness_bound_audit,
)
from poqlab.protocols import ivpoq_accept_prob

F = Fraction


def uniform1():
    return bit_sampler("uniform1", lambda lam: 1, lambda lam: 1,
                       lambda lam, seed: seed)


def const0():
    return bit_sampler("const0", lambda lam: 0, lambda lam: 1,
                       lambda lam, seed: "0")


def biased14():
    # one bit, Pr[1] = 1/4
    return bit_sampler("biased14", lambda lam: 2, lambda lam: 1,
                       lambda lam, seed: "1" if seed == "11" else "0")


def fixed_tuple_sampler(tuple_bits, n_out):
    return SeededSampler(f"point[{tuple_bits}]", lambda lam: 1,
                         lambda lam: n_out, lambda lam, seed: tuple_bits)


class TestSchedule:
    def test_repetition_count(self):
        assert paper_repetition_count(2, 3) == 16   # q^4 >= lam
        assert paper_repetition_count(1, 6) == 6    # fallback to lam

    def test_repeat_sampler_is_product(self):
        rep = repeat_sampler(biased14(), 2)
        base = exact_pmf(biased14(), 1)
        got = exact_pmf(rep, 1)
        from poqlab.core import power

        assert got == power(base, 2)

    def test_build_uses_paper_count(self):
        protocol = build_advantage_protocol(uniform1(), 1, lam_floor=4,
                                            k_threshold=1)
        assert protocol.n_runs == 4
        # N >= lambda, so m*N >= lambda holds for any 1-bit-plus sampler
        assert protocol.tuple_sampler.out_len(4) >= 4


class TestCompleteness:
    def test_point_mass_sampler_always_accepts(self):
        protocol = AdvantageProtocol(const0(), n_runs=2, k_threshold=1)
        report = completeness_report(protocol, 2)
        assert report.quantities["honest_acceptance"] == 1
        assert report.all_passed

    def test_uniform_two_runs_threshold_one(self):
        # all four 2-bit tuples have K^t >= 2 >= log2(4) - 1, so the honest
        # prover is always accepted (derived by enumerating the program tree)
        protocol = AdvantageProtocol(uniform1(), n_runs=2, k_threshold=1)
        report = completeness_report(protocol, 2)
        assert report.quantities["honest_acceptance"] == 1
        assert report.all_passed

    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("n_runs", [2, 4])
    def test_floor_across_samplers(self, k, n_runs):
        for sampler in [uniform1(), biased14(), const0()]:
            protocol = AdvantageProtocol(sampler, n_runs=n_runs, k_threshold=k)
            for lam in (2, 3):
                report = completeness_report(protocol, lam)
                assert report.all_passed, report.as_record()

    def test_ivpoq_view_matches(self):
        protocol = AdvantageProtocol(uniform1(), n_runs=2, k_threshold=1)
        scheme = protocol.as_ivpoq()
        report = completeness_report(protocol, 2)
        assert ivpoq_accept_prob(scheme, scheme.prover, 2) == \
            report.quantities["honest_acceptance"]
        assert scheme.is_noninteractive(2)


class TestSolverToSampler:
    def test_honest_prover_recovers_base(self):
        protocol = AdvantageProtocol(biased14(), n_runs=2, k_threshold=1)
        b = solver_to_sampler(protocol.tuple_sampler, 2)
        assert exact_pmf(b, 1) == exact_pmf(biased14(), 1)

    def test_diagonal_tuple_solver(self):
        solver = bit_sampler("diag", lambda lam: 1, lambda lam: 2,
                             lambda lam, seed: seed + seed)
        b = solver_to_sampler(solver, 2)
        assert exact_pmf(b, 1) == uniform_bits(1)

    def test_point_tuple_solver(self):
        solver = fixed_tuple_sampler("1111", 4)
        b = solver_to_sampler(solver, 4)
        assert exact_pmf(b, 1) == point_mass("1")

    def test_three_blocks_non_dyadic_choice(self):
        solver = fixed_tuple_sampler("011", 3)
        b = solver_to_sampler(solver, 3)
        assert exact_pmf(b, 1) == ExactDistribution({"0": F(1, 3), "1": F(2, 3)})

    def test_matches_averaged_marginal_for_every_solver(self):
        solvers = [
            fixed_tuple_sampler("01", 2),
            bit_sampler("skew", lambda lam: 2, lambda lam: 2,
                        lambda lam, seed: "11" if seed == "11" else "00"),
        ]
        for solver in solvers:
            got = exact_pmf(solver_to_sampler(solver, 2), 1)
            want = averaged_marginal(exact_pmf(solver, 1), 2)
            assert got == want


class TestSoundnessChain:
    def test_honest_prover_audit(self):
        protocol = AdvantageProtocol(uniform1(), n_runs=2, k_threshold=2)
        report = soundness_bound_audit(protocol, protocol.tuple_sampler, 2)
        assert report.all_passed, [c.description for c in report.checks
                                   if not c.passed]
        assert report.quantities["delta"] <= F(1, 4)
        assert report.quantities["sd_base_vs_mixed"] == 0

    def test_point_mass_cheater(self):
        protocol = AdvantageProtocol(uniform1(), n_runs=2, k_threshold=2)
        cheater = fixed_tuple_sampler("00", 2)
        report = soundness_bound_audit(protocol, cheater, 2)
        assert report.all_passed, [c.description for c in report.checks
                                   if not c.passed]
        # the cheater collapses to a point; its coordinate sampler sits at
        # distance 1/2 from the uniform base
        assert report.quantities["sd_base_vs_mixed"] == F(1, 2)

    def test_skewed_cheater(self):
        protocol = AdvantageProtocol(biased14(), n_runs=2, k_threshold=1)
        cheater = bit_sampler("skew", lambda lam: 2, lambda lam: 2,
                              lambda lam, seed: "11" if seed == "11" else "00")
        report = soundness_bound_audit(protocol, cheater, 2)
        assert report.all_passed, [c.description for c in report.checks
                                   if not c.passed]

    def test_zero_mass_witness_surfaced(self):
        protocol = AdvantageProtocol(const0(), n_runs=2, k_threshold=1)
        cheater = bit_sampler("half-off", lambda lam: 1, lambda lam: 2,
                              lambda lam, seed: "00" if seed == "0" else "11")
        report = soundness_bound_audit(protocol, cheater, 2)
        assert report.quantities["zero_mass_witness_rate"] == F(1, 2)
        assert report.all_passed

    def test_never_accepted_raises(self):
        protocol = AdvantageProtocol(const0(), n_runs=2, k_threshold=1)
        cheater = fixed_tuple_sampler("11", 2)  # outside the base support
        with pytest.raises(EmptyAcceptingSet):
            soundness_bound_audit(protocol, cheater, 2)

    def test_final_bound_binds_across_cheaters(self):
        protocol = AdvantageProtocol(uniform1(), n_runs=4, k_threshold=2)
        cheaters = [
            protocol.tuple_sampler,
            fixed_tuple_sampler("0101", 4),
            bit_sampler("pairs", lambda lam: 2, lambda lam: 4,
                        lambda lam, seed: seed + seed),
        ]
        for cheater in cheaters:
            report = soundness_bound_audit(protocol, cheater, 2)
            assert report.all_passed, (cheater.id,
                                       [c.description for c in report.checks
                                        if not c.passed])


class TestGoodSet:
    def test_equal_distributions_full_support(self):
        q = uniform_bits(2)
        good, miss = good_set_dist(q, q, 1)
        assert good >= q.support
        assert miss == 0

    def test_spec_arithmetic_case(self):
        # q uniform on one bit, s = (3/4, 1/4), p = 1: |1/2 - 3/4| = 1/4
        # exceeds (1/2)/3, so nothing is good and the whole mass misses
        q = uniform_bits(1)
        s = ExactDistribution({"0": F(3, 4), "1": F(1, 4)})
        good, miss = good_set_dist(q, s, 1)
        assert good == frozenset()
        assert miss == 1
        report = good_set_report(q, s, 1)
        assert report.quantities["markov_bound"] == F(3, 2)
        assert report.all_passed

    def test_disjoint_supports(self):
        q = point_mass("00")
        s = point_mass("11")
        good, miss = good_set_dist(q, s, 1)
        assert miss == 1
        report = good_set_report(q, s, 1)
        assert report.all_passed  # 6p * SD = 6 >= 1

    def test_markov_bound_across_corpus(self):
        import random

        rng = random.Random(7)
        for trial in range(20):
            pts = [format(i, "02b") for i in range(4)]
            wq = [rng.randint(0, 5) for _ in pts]
            ws = [rng.randint(0, 5) for _ in pts]
            if sum(wq) == 0 or sum(ws) == 0:
                continue
            q = ExactDistribution({x: F(w, sum(wq)) for x, w in zip(pts, wq) if w})
            s = ExactDistribution({x: F(w, sum(ws)) for x, w in zip(pts, ws) if w})
            for p in (1, 2, F(3, 2)):
                report = good_set_report(q, s, p)
                assert report.all_passed
