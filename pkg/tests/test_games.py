"""OWF / DistOWF / puzzle games and the appendix-style constructions."""

from fractions import Fraction

import pytest

from poqlab.core import all_bitstrings, point_mass, uniform_over
from poqlab.errors import EmptyPreimage, NoFeasibleLambda
from poqlab.games import (
    Adversary,
    CandidateMachine,
    FunctionFamily,
    adversary_pair_distribution,
    canonical_inverter,
    candidate_from_family,
    deterministic_adversary,
    distowf_distance,
    encode_block_result,
    fixed_adversary,
    identity_candidate,
    ideal_pair_distribution,
    inheritance_adversary,
    lift_from_cofinite,
    never_halting_candidate,
    noisy_inverter,
    owf_advantage,
    owf_to_owpuzz,
    pad_to_quadratic,
    puzzle_adversary_from_owf_adversary,
    puzzle_game,
    puzzle_success,
    universal_owf,
)

F = Fraction


def identity_family():
    return FunctionFamily("identity", lambda lam: lam,
                          lambda lam, x: x, length_generic=True)


def constant_family():
    return FunctionFamily("const0", lambda lam: lam,
                          lambda lam, x: "0" * len(x), length_generic=True)


def xorfold_family():
    return FunctionFamily("xorfold", lambda lam: lam,
                          lambda lam, x: str(x.count("1") % 2),
                          length_generic=True)


def droplast_family():
    return FunctionFamily("droplast", lambda lam: lam,
                          lambda lam, x: x[:-1], length_generic=True)


class TestOwfAdvantage:
    def test_identity_perfectly_inverted(self):
        f = identity_family()
        adv = deterministic_adversary("echo", lambda lam, y: y)
        assert owf_advantage(f, adv, 3) == 1

    def test_constant_any_answer_works(self):
        f = constant_family()
        adv = fixed_adversary("guess", "10")
        assert owf_advantage(f, adv, 2) == 1

    def test_xorfold_fixed_guess_half(self):
        # oracle: 4 inputs, f(00)=0 matches {00, 11} -> 2/4
        f = xorfold_family()
        adv = fixed_adversary("zeros", "00")
        assert owf_advantage(f, adv, 2) == F(1, 2)

    def test_wrong_length_never_succeeds(self):
        f = constant_family()
        adv = fixed_adversary("short", "1")
        assert owf_advantage(f, adv, 2) == 0


class TestCanonicalInverter:
    def test_identity_inverter_is_identity(self):
        f = identity_family()
        inv = canonical_inverter(f, 2)
        assert inv.respond(2, "01") == point_mass("01")

    def test_droplast_uniform_extensions(self):
        inv = canonical_inverter(droplast_family(), 3)
        assert inv.respond(3, "01") == uniform_over(["010", "011"])

    def test_xorfold_preimage(self):
        inv = canonical_inverter(xorfold_family(), 2)
        assert inv.respond(2, "0") == uniform_over(["00", "11"])

    def test_non_image_raises(self):
        inv = canonical_inverter(constant_family(), 2)
        with pytest.raises(EmptyPreimage):
            inv.respond(2, "11")

    def test_distowf_distance_zero(self):
        for f in [identity_family(), constant_family(), xorfold_family(),
                  droplast_family()]:
            lam = 3
            inv = canonical_inverter(f, lam)
            assert distowf_distance(f, inv, lam) == 0

    def test_perfect_distributional_implies_perfect_inversion(self):
        for f in [identity_family(), xorfold_family(), droplast_family()]:
            inv = canonical_inverter(f, 3)
            assert owf_advantage(f, inv, 3) == 1

    def test_advantage_at_least_one_minus_distance(self):
        # game-level implication, exact on every corpus pair
        advs = [fixed_adversary("zeros", "00"),
                deterministic_adversary("echo-prefix", lambda lam, y: (y + "00")[:2])]
        for f in [identity_family(), constant_family(), xorfold_family()]:
            for adv in advs:
                assert owf_advantage(f, adv, 2) >= 1 - distowf_distance(f, adv, 2)


class TestDistOwf:
    def test_constant_fixed_answer(self):
        # oracle: SD between uniform pairs and point pairs = 1 - 2^-n
        f = constant_family()
        adv = fixed_adversary("x0", "00")
        assert distowf_distance(f, adv, 2) == F(3, 4)

    def test_identity_echo_zero(self):
        f = identity_family()
        adv = deterministic_adversary("echo", lambda lam, y: y)
        assert distowf_distance(f, adv, 3) == 0

    def test_noisy_inverter_distance_scales(self):
        f = xorfold_family()
        exact = canonical_inverter(f, 2)
        for eta in (F(0), F(1, 4), F(1, 2)):
            noisy = noisy_inverter(f, 2, eta)
            d = distowf_distance(f, noisy, 2)
            # mixing toward uniform moves half the noise mass off-posterior
            assert d == eta / 2, (eta, d)
            assert distowf_distance(f, exact, 2) <= d

    def test_pair_distributions_well_formed(self):
        f = droplast_family()
        adv = canonical_inverter(f, 3)
        ideal = ideal_pair_distribution(f, 3)
        advp = adversary_pair_distribution(f, adv, 3)
        assert ideal == advp


class TestOwfToOwpuzz:
    def test_correctness_exactly_one(self):
        for f in [identity_family(), constant_family(), xorfold_family()]:
            puzzle = owf_to_owpuzz(f)
            for lam in (1, 2, 3):
                assert puzzle.correctness(lam) == 1

    def test_brute_force_breaks(self):
        f = identity_family()
        puzzle = owf_to_owpuzz(f)
        adv = puzzle_adversary_from_owf_adversary(f, canonical_inverter(f, 2))
        assert puzzle_success(puzzle, adv, 2) == 1

    def test_wrong_length_answer_fails(self):
        puzzle = owf_to_owpuzz(identity_family())
        adv = fixed_adversary("short", "0")
        assert puzzle_success(puzzle, adv, 2) == 0

    def test_success_equals_owf_advantage(self):
        # the two game values agree exactly for every induced adversary
        f = xorfold_family()
        puzzle = owf_to_owpuzz(f)
        for base in [fixed_adversary("zeros", "00"),
                     canonical_inverter(f, 2),
                     noisy_inverter(f, 2, F(1, 3))]:
            induced = puzzle_adversary_from_owf_adversary(f, base)
            assert puzzle_success(puzzle, induced, 2) == owf_advantage(f, base, 2)

    def test_game_report(self):
        puzzle = owf_to_owpuzz(xorfold_family())
        adv = puzzle_adversary_from_owf_adversary(
            xorfold_family(), fixed_adversary("zeros", "00"))
        report = puzzle_game(puzzle, adv, 2)
        assert report.quantities["correctness"] == 1
        assert report.quantities["success"] == F(1, 2)


class TestUniversalOwf:
    def test_single_block(self):
        g = universal_owf((identity_candidate(),))
        assert g.eval(1, "1") == encode_block_result("1")

    def test_all_diverge_two_bottom_markers(self):
        g = universal_owf((never_halting_candidate(), never_halting_candidate()))
        assert g.eval(4, "1010") == "00"

    def test_identity_candidate_copies_first_block(self):
        g = universal_owf((identity_candidate(), never_halting_candidate()))
        out = g.eval(4, "1001")
        assert out == encode_block_result("10") + "0"
        assert "10" in out

    def test_ignores_suffix_beyond_square(self):
        g = universal_owf((identity_candidate(),))
        assert g.eval(5, "10111") == g.eval(4, "1011")

    def test_candidate_inheritance_inequality(self):
        # an adversary against g yields an inverter for a planted candidate
        # with at least the same success, exactly
        f = xorfold_family()
        n = 2
        registries = [
            (candidate_from_family(f), never_halting_candidate()),
            (never_halting_candidate(), candidate_from_family(f)),
            (identity_candidate(), candidate_from_family(f)),
        ]
        for candidates in registries:
            j = next(i + 1 for i, c in enumerate(candidates)
                     if c.name == f"family[{f.id}]")
            g = universal_owf(candidates)
            g_adv = canonical_inverter(g, n * n)
            g_success = owf_advantage(g, g_adv, n * n)
            induced = inheritance_adversary(candidates, f, j, g_adv, n)
            f_success = owf_advantage(f, induced, n)
            assert f_success >= g_success
            assert g_success > 0


class TestPadding:
    def test_prefix_index_arithmetic(self):
        padded = pad_to_quadratic(xorfold_family(), 3)
        assert padded.prefix_len(8) == 2   # 2^3 = 8 <= 8 < 3^3
        assert padded.prefix_len(26) == 2
        assert padded.prefix_len(27) == 3

    def test_quadratic_exponent_splits(self):
        padded = pad_to_quadratic(xorfold_family(), 2)
        assert padded.family.eval(2, "1100") == "0" + "00"
        assert padded.family.eval(2, "1000") == "1" + "00"

    def test_inversion_advantage_preserved(self):
        # tail-preserving adversary: advantage against f' at i^c equals
        # advantage against f at i, by exact game evaluation
        f = xorfold_family()
        exponent = 2
        padded = pad_to_quadratic(f, exponent)
        i = 2
        r = i ** exponent

        for base_adv in [fixed_adversary("zeros", "0" * i),
                         canonical_inverter(f, i)]:
            def respond(lam, zimg, base_adv=base_adv):
                y, tail = zimg[:1], zimg[1:]
                return base_adv.respond(i, y).map(lambda x: x + tail)

            lifted = Adversary(f"tail[{base_adv.id}]", respond)
            lam_r = r  # padded family's in_len(lam) = lam^c; eval is length-driven
            got = owf_advantage(
                FunctionFamily("padded-at-r", lambda lam: r, padded.family.eval),
                lifted, lam_r)
            assert got == owf_advantage(f, base_adv, i)


class TestLift:
    def test_identity_schedule(self):
        f = xorfold_family()
        g = lift_from_cofinite(f, lambda lam: lam)
        assert g.eval(1, "10101") == f.eval(5, "10101")

    def test_square_schedule_uses_prefix(self):
        f = identity_family()
        g = lift_from_cofinite(f, lambda lam: lam * lam)
        assert g.eval(1, "11010") == "1101"

    def test_no_feasible_lambda(self):
        f = identity_family()
        g = lift_from_cofinite(f, lambda lam: lam + 10)
        with pytest.raises(NoFeasibleLambda):
            g.eval(1, "101")

    def test_advantage_preserved_for_prefix_respecting_adversary(self):
        f = xorfold_family()
        schedule = lambda lam: lam * lam
        g = lift_from_cofinite(f, schedule)
        ell = 5
        lam_ell = 2  # max lam with lam^2 <= 5
        base = canonical_inverter(f, schedule(lam_ell))

        def respond(lam, y):
            return base.respond(schedule(lam_ell), y).map(
                lambda x: x + "0" * (ell - schedule(lam_ell)))

        lifted = Adversary("prefix-respecting", respond)
        got = owf_advantage(
            FunctionFamily("lifted-at-5", lambda lam: ell, g.eval), lifted, ell)
        assert got == owf_advantage(f, base, schedule(lam_ell))
