"""Attack constructions: transcript completion and puzzle solving.

Both attacks share one recipe: a seeded sampler S whose output resembles
some target distribution, a deterministic function of S's seed exposing a
partial view (a transcript prefix, or the puzzle half of a pair), and a
distributional inverter R for that function.  The attacker inverts its
current view to a plausible seed, replays S on it, and reads off the part
it needs.  Every quantity in the audits (the sampler gap, the inverter
gap, the hybrid gaps, the attack success) is an exact rational, and each
asserted bound is a theorem of the desk model, checked live per instance.

Inverters come in three flavors for bound exercises: canonical
(brute-force preimage posterior, gap 0), noisy (canonical mixed with a
uniform guess), and adversarially fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, gcd, log2
from typing import Callable

from .core import (
    Bits,
    DEFAULT_MAX_ENUMERATION,
    ExactDistribution,
    SeededSampler,
    all_bitstrings,
    bits_to_int,
    exact_pmf,
    int_to_bits,
    statistical_distance,
    uniform_over,
)
from .errors import EmptyPreimage, InverterRangeError
from .games import Adversary, FunctionFamily, distowf_distance
from .reports import GameReport
from .protocols import (
    Party,
    decode_messages,
    encode_messages,
    execute,
    transcript_distribution,
)

F = Fraction


# ---------------------------------------------------------------------------
# the seed-exposing function families


def round_index_width(n_rounds: int) -> int:
    return ceil(log2(n_rounds)) if n_rounds > 1 else 0


def transcript_sampler(challenger: Party, responder: Party,
                       id: str | None = None) -> SeededSampler:
    """Exact clone of a two-party interaction as a seeded sampler.

    The seed is the pair of party seeds; the output is the encoded
    transcript of the challenger-first alternation.
    """
    def ev(lam: int, seed: int) -> Bits:
        sc, sr = divmod(seed, responder.seed_space(lam))
        return execute(challenger, responder, lam, sc, sr).encode()

    def out_len(lam: int) -> int:
        return len(execute(challenger, responder, lam, 0, 0).encode())

    return SeededSampler(
        id=id or f"transcripts[{challenger.id},{responder.id}]",
        seed_space=lambda lam: (challenger.seed_space(lam)
                                * responder.seed_space(lam)),
        out_len=out_len,
        eval=ev,
    )


def dyadic_seed_bits(sampler: SeededSampler, lam: int) -> int:
    space = sampler.seed_space(lam)
    bits = space.bit_length() - 1
    if 1 << bits != space:
        raise ValueError(
            f"{sampler.id} has a non-dyadic seed space {space}; the "
            "seed-exposing families need bit-string seeds")
    return bits


def round_function(sampler: SeededSampler, n_rounds: int,
                   id: str | None = None) -> FunctionFamily:
    """(round index, seed) -> (index, transcript prefix through that round's
    challenge), with out-of-range indices mapped to the fixed value 0.

    The index is carried in ceil(log2(rounds)) bits and decoded as binary
    plus one; the sampler's output must parse as an encoded transcript of
    2*rounds messages.
    """
    w = round_index_width(n_rounds)

    def in_len(lam: int) -> int:
        return w + dyadic_seed_bits(sampler, lam)

    def ev(lam: int, x: Bits) -> Bits:
        k = bits_to_int(x[:w]) + 1
        if k > n_rounds:
            return "0"
        r = x[w:]
        transcript = sampler.eval(lam, bits_to_int(r))
        msgs = decode_messages(transcript)
        prefix = msgs[:2 * (k - 1) + 1]
        return x[:w] + encode_messages(prefix)

    return FunctionFamily(
        id=id or f"roundfn[{sampler.id}]",
        in_len=in_len,
        eval=ev,
        step_cost=lambda n: n * n,
    )


def puzzle_projection(sampler: SeededSampler, puzz_len: Callable[[int], int],
                      id: str | None = None) -> FunctionFamily:
    """Seed -> the puzzle half of the sampled (puzz, ans) pair."""
    def ev(lam: int, r: Bits) -> Bits:
        pair = sampler.eval(lam, bits_to_int(r))
        return pair[:puzz_len(lam)]

    return FunctionFamily(
        id=id or f"puzzproj[{sampler.id}]",
        in_len=lambda lam: dyadic_seed_bits(sampler, lam),
        eval=ev,
        step_cost=lambda n: n * n,
    )


def restricted_round_distance(f: FunctionFamily, inverter: Adversary,
                              lam: int, fixed_k: int, n_rounds: int) -> Fraction:
    """Distributional gap of the round function with the index pinned."""
    w = round_index_width(n_rounds)
    u = f.in_len(lam) - w
    k_bits = int_to_bits(fixed_k - 1, w)

    def ideal(r: Bits):
        x = k_bits + r
        return (x, f.eval(lam, x))

    def attacked(r: Bits):
        x = k_bits + r
        y = f.eval(lam, x)
        return inverter.respond(lam, y).map(lambda xp: (xp, y))

    seeds = uniform_over(all_bitstrings(u))
    return statistical_distance(seeds.map(ideal), seeds.compose(attacked))


def fallback_inverter(inverter: Adversary, answer_len: int) -> Adversary:
    """Totalize an inverter: non-images get a fixed all-zero answer.

    Distributional-inversion games only query images, so the measured gap
    is unchanged; the attack constructions need totality because imperfect
    samplers can face views outside their own range.
    """
    def respond(lam: int, y: Bits) -> ExactDistribution:
        try:
            return inverter.respond(lam, y)
        except EmptyPreimage:
            from .core import point_mass

            return point_mass("0" * answer_len)

    return Adversary(f"total[{inverter.id}]", respond)


# ---------------------------------------------------------------------------
# quantizing adversary responses into seed slices


def quantized_responder(adversary: Adversary, lam: int, challenges,
                        answer_len: int):
    """Realize an exact-distribution adversary as a seeded deterministic map.

    Returns (denominator, table) where the table maps each challenge to the
    list of answers laid out so that a uniform seed below the denominator
    reproduces the response distribution exactly.  Responses must be bit
    strings of the declared length, else InverterRangeError.
    """
    responses = {}
    denominator = 1
    for challenge in sorted(set(challenges)):
        dist = adversary.respond(lam, challenge)
        for item, mass in dist.items():
            if not isinstance(item, str) or len(item) != answer_len:
                raise InverterRangeError(
                    f"{adversary.id} answered {item!r}; expected "
                    f"{answer_len} bits")
            denominator = denominator * mass.denominator // gcd(
                denominator, mass.denominator)
        responses[challenge] = dist
    table = {}
    for challenge, dist in responses.items():
        layout = []
        for item, mass in sorted(dist.items()):
            layout.extend([item] * int(mass * denominator))
        assert len(layout) == denominator
        table[challenge] = layout
    return denominator, table


# ---------------------------------------------------------------------------
# the transcript-completing cheating prover


def _require_canonical_shape(challenger: Party, honest_prover: Party,
                             lam: int) -> int:
    n_rounds = honest_prover.n_messages(lam)
    if challenger.n_messages(lam) != n_rounds:
        raise ValueError(
            "the completion attack needs the canonical challenger-first "
            "shape: one challenge per round (pad odd shapes with dummy "
            "zero-width messages)")
    return n_rounds


def attack_reply_kernel(sampler: SeededSampler, inverter: Adversary,
                        msg_len: Callable[[int, int], int], n_rounds: int,
                        lam: int) -> Callable[[int, tuple], ExactDistribution]:
    """Round-k reply distribution of the completing attacker.

    On partial view (tau_{k-1}, c_k): ask the inverter for (k', r'), replay
    the sampler on r', and reply with that run's answer for round k'.
    Malformed inverter answers (wrong width) raise InverterRangeError;
    out-of-range indices and replies of the wrong width fall back to the
    all-zero message, keeping the kernel total.
    """
    w = round_index_width(n_rounds)
    u = dyadic_seed_bits(sampler, lam)
    total_inverter = fallback_inverter(inverter, w + u)

    def reply(k: int, msgs: tuple) -> ExactDistribution:
        view = int_to_bits(k - 1, w) + encode_messages(msgs)
        fallback = "0" * msg_len(lam, k)

        def to_reply(answer):
            if not isinstance(answer, str) or len(answer) != w + u:
                raise InverterRangeError(
                    f"{inverter.id} answered {answer!r}; expected {w + u} bits")
            k_prime = bits_to_int(answer[:w]) + 1
            if k_prime > n_rounds:
                return fallback
            replay = decode_messages(sampler.eval(lam, bits_to_int(answer[w:])))
            out = replay[2 * (k_prime - 1) + 1]
            return out if len(out) == msg_len(lam, k) else fallback

        return total_inverter.respond(lam, view).map(to_reply)

    return reply


def transcript_attack(sampler: SeededSampler, inverter: Adversary,
                      challenger: Party, honest_prover: Party, lam: int,
                      id: str | None = None) -> Party:
    """The completing attacker as a seeded deterministic party.

    The reply kernel's rational responses are realized by quantizing each
    round's response distribution over a common denominator, one seed slice
    per round; the resulting party's transcript distribution equals the
    kernel-computed one exactly (tested property).
    """
    n_rounds = _require_canonical_shape(challenger, honest_prover, lam)
    reply = attack_reply_kernel(sampler, inverter, honest_prover.msg_len,
                                n_rounds, lam)

    # every view the attacker can face against the honest challenger,
    # closed under any mix of honest and attack replies
    views = _reachable_views(sampler, challenger, honest_prover, reply,
                             n_rounds, lam)

    denominator = 1
    layouts = {}
    for k, msgs in sorted(views):
        dist = reply(k, msgs)
        for mass in dist.mass.values():
            denominator = denominator * mass.denominator // gcd(
                denominator, mass.denominator)
        layouts[(k, msgs)] = dist
    quantized = {}
    for key, dist in layouts.items():
        layout = []
        for item, mass in sorted(dist.items()):
            layout.extend([item] * int(mass * denominator))
        quantized[key] = layout

    def next_message(_lam: int, seed: int, msgs: tuple, sent: int) -> Bits:
        k = sent + 1
        slice_seed = (seed // denominator ** (k - 1)) % denominator
        layout = quantized.get((k, tuple(msgs)))
        if layout is None:
            return "0" * honest_prover.msg_len(lam, k)
        return layout[slice_seed]

    return Party(
        id=id or f"complete[{sampler.id},{inverter.id}]",
        seed_space=lambda _lam: denominator ** n_rounds,
        n_messages=honest_prover.n_messages,
        msg_len=honest_prover.msg_len,
        next_message=next_message,
    )


def _reachable_views(sampler, challenger, honest_prover, reply, n_rounds, lam):
    """All (round, messages) views the attacker can face against the honest
    challenger, under any mix of honest and attack replies."""
    views = set()
    prefixes = {()}
    for k in range(1, n_rounds + 1):
        with_challenge = set()
        for msgs in prefixes:
            for sc in range(challenger.seed_space(lam)):
                if not _challenger_consistent(challenger, lam, sc, msgs):
                    continue
                c = challenger.next_message(lam, sc, msgs, k - 1)
                with_challenge.add(msgs + (c,))
        views |= {(k, msgs) for msgs in with_challenge}
        nxt = set()
        for msgs in with_challenge:
            for answer in reply(k, msgs).support:
                nxt.add(msgs + (answer,))
            for sp in range(honest_prover.seed_space(lam)):
                nxt.add(msgs + (honest_prover.next_message(lam, sp, msgs, k - 1),))
        prefixes = nxt
    return views


def _challenger_consistent(challenger, lam, seed, msgs) -> bool:
    """Whether the challenger with this seed produces the challenges in the
    given alternating message prefix."""
    for i in range(0, len(msgs), 2):
        if challenger.next_message(lam, seed, msgs[:i], i // 2) != msgs[i]:
            return False
    return True


def hybrid_distribution(challenger: Party, honest_prover: Party,
                        reply: Callable[[int, tuple], ExactDistribution],
                        lam: int, switch_round: int) -> ExactDistribution:
    """Exact transcript distribution with honest replies strictly before
    the switch round and kernel replies from it on.

    Computed by forward convolution over rounds on the joint state
    (challenger seed, prover seed, messages); no quantization involved.
    """
    n_rounds = honest_prover.n_messages(lam)
    nc = challenger.seed_space(lam)
    np_ = honest_prover.seed_space(lam)
    state = {(sc, sp, ()): F(1, nc * np_)
             for sc in range(nc) for sp in range(np_)}
    for k in range(1, n_rounds + 1):
        nxt: dict = {}
        for (sc, sp, msgs), prob in state.items():
            c = challenger.next_message(lam, sc, msgs, k - 1)
            view = msgs + (c,)
            if k < switch_round:
                a = honest_prover.next_message(lam, sp, view, k - 1)
                key = (sc, sp, view + (a,))
                nxt[key] = nxt.get(key, F(0)) + prob
            else:
                for a, q in reply(k, view).items():
                    key = (sc, sp, view + (a,))
                    nxt[key] = nxt.get(key, F(0)) + prob * q
        state = nxt
    out: dict = {}
    for (_sc, _sp, msgs), prob in state.items():
        key = encode_messages(msgs)
        out[key] = out.get(key, F(0)) + prob
    return ExactDistribution(out)


def hybrid_audit(honest_prover: Party, challenger: Party,
                 sampler: SeededSampler, inverter: Adversary, lam: int,
                 max_enumeration: int = DEFAULT_MAX_ENUMERATION,
                 seeded_check_cap: int = 1 << 16) -> GameReport:
    """Materialize the round-switching hybrids exactly and check every gap.

    D_k runs the honest prover strictly before round k and the completing
    attacker from round k on, so D_1 is the full attack and D_{rounds+1}
    the honest interaction.  Each step is bounded by twice the sampler gap
    plus the index-conditioned inverter gap, and in particular by
    (2*rounds + 2) * max(sampler gap, inverter gap).
    """
    n_rounds = _require_canonical_shape(challenger, honest_prover, lam)
    report = GameReport(
        property_tag="transcript-attack-hybrids",
        inputs={"sampler": sampler.id, "inverter": inverter.id,
                "challenger": challenger.id, "rounds": n_rounds, "lambda": lam},
    )
    honest_dist = transcript_distribution(challenger, honest_prover, lam,
                                          max_enumeration)
    sampler_dist = exact_pmf(sampler, lam, max_enumeration)
    eps_sampler = statistical_distance(honest_dist, sampler_dist)
    f = round_function(sampler, n_rounds)
    eps_inverter = distowf_distance(f, inverter, lam)
    report.record("eps_sampler", eps_sampler)
    report.record("eps_inverter", eps_inverter)

    w = round_index_width(n_rounds)
    for k in range(1, n_rounds + 1):
        restricted = restricted_round_distance(f, inverter, lam, k, n_rounds)
        report.record(f"restricted_inverter_gap_round_{k}", restricted)
        report.check(
            f"index conditioning inflates the inverter gap at most 2^{w} "
            f"(round {k})", restricted, F(2 ** w) * eps_inverter)

    reply = attack_reply_kernel(sampler, inverter, honest_prover.msg_len,
                                n_rounds, lam)
    hybrids = [hybrid_distribution(challenger, honest_prover, reply, lam, k)
               for k in range(1, n_rounds + 2)]
    attack_dist = hybrids[0]
    report.check("last hybrid is the honest interaction, exactly",
                 hybrids[-1], honest_dist, "==")
    attacker = transcript_attack(sampler, inverter, challenger, honest_prover,
                                 lam)
    if attacker.seed_space(lam) * challenger.seed_space(lam) <= seeded_check_cap:
        seeded = transcript_distribution(challenger, attacker, lam,
                                         max_enumeration)
        report.check("first hybrid equals the seeded attack party, exactly",
                     attack_dist, seeded, "==")
    else:
        report.note("seeded attack party left unenumerated (seed space above "
                    "the check cap); kernel distributions audited instead")

    per_step_cap = 2 * eps_sampler + F(2 ** w) * eps_inverter
    spec_cap = (2 * n_rounds + 2) * max(eps_sampler, eps_inverter)
    total = F(0)
    for k in range(1, n_rounds + 1):
        gap = statistical_distance(hybrids[k - 1], hybrids[k])
        total += gap
        report.record(f"hybrid_gap_{k}", gap)
        report.check(f"hybrid step {k} within the per-step cap",
                     gap, per_step_cap)
        report.check(f"hybrid step {k} within the scaled max-gap cap",
                     gap, spec_cap)
    final = statistical_distance(attack_dist, honest_dist)
    report.record("final_attack_distance", final)
    report.check("telescoped distance bounds the final one", final, total)
    report.check("final distance within rounds times the scaled cap",
                 final, n_rounds * spec_cap)
    if eps_sampler == 0 and eps_inverter == 0:
        report.check("perfect oracles reproduce the honest distribution",
                     final, F(0), "==")
    return report


# ---------------------------------------------------------------------------
# the puzzle-solving adversary


def puzzle_attack(sampler: SeededSampler, inverter: Adversary,
                  puzz_len: Callable[[int], int],
                  id: str | None = None) -> Adversary:
    """Invert the puzzle projection, replay the sampler, answer with its
    answer half.  Puzzles the sampler can never produce fall back to the
    zero seed, keeping the adversary total."""
    def respond(lam: int, puzz: Bits) -> ExactDistribution:
        def replay(r):
            if not isinstance(r, str):
                raise InverterRangeError(f"inverter answered {r!r}")
            pair = sampler.eval(lam, bits_to_int(r))
            return pair[puzz_len(lam):]

        total = fallback_inverter(inverter, dyadic_seed_bits(sampler, lam))
        return total.respond(lam, puzz).map(replay)

    return Adversary(id or f"solve[{sampler.id},{inverter.id}]", respond)


def puzzle_attack_audit(puzzle, sampler: SeededSampler, inverter: Adversary,
                        lam: int,
                        max_enumeration: int = DEFAULT_MAX_ENUMERATION
                        ) -> GameReport:
    """Exact success of the replay attack against the measured gaps.

    success >= correctness - 2 * (sampler gap) - (inverter gap), with
    equality at gap zero.
    """
    from .games import puzzle_success

    report = GameReport(
        property_tag="puzzle-attack-bound",
        inputs={"puzzle": puzzle.id, "sampler": sampler.id,
                "inverter": inverter.id, "lambda": lam},
    )
    pair_dist = puzzle.pair_distribution(lam, max_enumeration)
    sampler_dist = exact_pmf(sampler, lam, max_enumeration)
    eps_sampler = statistical_distance(pair_dist, sampler_dist)
    projection = puzzle_projection(sampler, puzzle.puzz_len)
    eps_inverter = distowf_distance(projection, inverter, lam)
    correctness = puzzle.correctness(lam, max_enumeration)
    attacker = puzzle_attack(sampler, inverter, puzzle.puzz_len)
    success = puzzle_success(puzzle, attacker, lam, max_enumeration)

    report.record("correctness", correctness)
    report.record("eps_sampler", eps_sampler)
    report.record("eps_inverter", eps_inverter)
    report.record("attack_success", success)
    report.check("attack success at least correctness minus the gaps",
                 correctness - 2 * eps_sampler - eps_inverter, success)
    if eps_sampler == 0 and eps_inverter == 0:
        report.check("perfect oracles recover correctness exactly",
                     success, correctness, "==")
    return report
