"""Interactive protocols between seeded parties over a classical channel.

A party is a deterministic next-message function of (security parameter,
own seed, messages so far, own messages sent).  Protocol execution is
therefore a pure function of the two seeds, and the exact transcript
distribution is the pushforward of the uniform joint seed measure.

Transcripts are encoded canonically as length-prefixed messages (an 8-bit
big-endian length, then the message bits) concatenated in order, so they
can serve as keys of exact distributions and as inputs to the function
families built from them.  Messages follow a declared per-round width
schedule; the verifier/challenger side always sends first, and a
non-interactive scheme is one whose verifier sends zero messages while the
prover sends exactly one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .core import (
    Bits,
    DEFAULT_MAX_ENUMERATION,
    ExactDistribution,
    SeededSampler,
    int_to_bits,
    statistical_distance,
    uniform_over,
)
from .errors import BudgetExceeded, NotNonInteractive, WidthViolation
from .games import ALL_LAMBDAS, Adversary, OneWayPuzzle, SigmaSet, puzzle_success
from .reports import GameReport

F = Fraction


@dataclass(frozen=True)
class Transcript:
    """Ordered (sender-tag, message) pairs from one protocol run."""

    lam: int
    entries: tuple

    def messages(self) -> tuple:
        return tuple(m for _tag, m in self.entries)

    def encode(self) -> Bits:
        return encode_messages(self.messages())

    def __len__(self):
        return len(self.entries)


def encode_messages(messages) -> Bits:
    out = []
    for m in messages:
        if len(m) > 255:
            raise ValueError("message too long for the 8-bit length prefix")
        out.append(int_to_bits(len(m), 8) + m)
    return "".join(out)


def decode_messages(bits: Bits) -> tuple:
    msgs = []
    pos = 0
    while pos < len(bits):
        if pos + 8 > len(bits):
            raise ValueError("truncated length prefix")
        n = int(bits[pos:pos + 8], 2)
        pos += 8
        if pos + n > len(bits):
            raise ValueError("truncated message body")
        msgs.append(bits[pos:pos + n])
        pos += n
    return tuple(msgs)


@dataclass(frozen=True)
class Party:
    """Deterministic interactive party with a finite seed space.

    `next_message(lam, seed, messages, own_sent)` sees all messages
    exchanged so far in order plus how many of them it sent itself, and
    must emit a message of the declared width for its next turn.
    """

    id: str
    seed_space: Callable[[int], int]
    n_messages: Callable[[int], int]
    msg_len: Callable[[int, int], int]
    next_message: Callable[[int, int, tuple, int], Bits]


def constant_party(id: str, messages_by_lam: Callable[[int], tuple]) -> Party:
    return Party(
        id=id,
        seed_space=lambda lam: 1,
        n_messages=lambda lam: len(messages_by_lam(lam)),
        msg_len=lambda lam, i: len(messages_by_lam(lam)[i - 1]),
        next_message=lambda lam, seed, msgs, sent: messages_by_lam(lam)[sent],
    )


def coin_party(id: str, widths: Callable[[int], tuple]) -> Party:
    """Public-coin party: each message is a fresh slice of the seed."""
    def total(lam: int) -> int:
        return sum(widths(lam))

    def next_message(lam: int, seed: int, msgs: tuple, sent: int) -> Bits:
        ws = widths(lam)
        bits = int_to_bits(seed, total(lam))
        start = sum(ws[:sent])
        return bits[start:start + ws[sent]]

    return Party(
        id=id,
        seed_space=lambda lam: 1 << total(lam),
        n_messages=lambda lam: len(widths(lam)),
        msg_len=lambda lam, i: widths(lam)[i - 1],
        next_message=next_message,
    )


def silent_party(id: str) -> Party:
    return Party(
        id=id,
        seed_space=lambda lam: 1,
        n_messages=lambda lam: 0,
        msg_len=lambda lam, i: 0,
        next_message=lambda lam, seed, msgs, sent: "",
    )


def sampler_party(sampler: SeededSampler, id: str | None = None) -> Party:
    """Non-interactive prover wrapping a sampler: one message, its output."""
    return Party(
        id=id or sampler.id,
        seed_space=sampler.seed_space,
        n_messages=lambda lam: 1,
        msg_len=lambda lam, i: sampler.out_len(lam),
        next_message=lambda lam, seed, msgs, sent: sampler.eval(lam, seed),
    )


def alternating_schedule(first_msgs: int, second_msgs: int) -> tuple:
    """Sender order for plain alternation, first party opening.

    A party with no messages left just stops taking turns, which covers the
    non-interactive shape (zero messages from the opener, one from the
    responder).
    """
    order = []
    sent = [0, 0]
    turn = 0
    while sent[0] < first_msgs or sent[1] < second_msgs:
        if sent[turn] >= (first_msgs, second_msgs)[turn]:
            turn = 1 - turn
            continue
        order.append(turn)
        sent[turn] += 1
        turn = 1 - turn
    return tuple(order)


def execute_schedule(first: Party, second: Party, lam: int,
                     seed_first: int, seed_second: int,
                     schedule: tuple) -> Transcript:
    """Deterministic transcript with an explicit sender order.

    `schedule` lists, per message, which party sends (0 = first, 1 =
    second); sequential compositions concatenate their phases' schedules.
    """
    entries: list = []
    msgs: list = []
    sent = [0, 0]
    parties = (first, second)
    seeds = (seed_first, seed_second)
    for turn in schedule:
        party = parties[turn]
        msg = party.next_message(lam, seeds[turn], tuple(msgs), sent[turn])
        expected = party.msg_len(lam, sent[turn] + 1)
        if len(msg) != expected:
            raise WidthViolation(
                f"{party.id} message {sent[turn] + 1} has {len(msg)} bits, "
                f"declared {expected}")
        entries.append((party.id, msg))
        msgs.append(msg)
        sent[turn] += 1
    return Transcript(lam=lam, entries=tuple(entries))


def execute(first: Party, second: Party, lam: int,
            seed_first: int, seed_second: int) -> Transcript:
    """Deterministic transcript of one run; `first` opens each round."""
    schedule = alternating_schedule(first.n_messages(lam),
                                    second.n_messages(lam))
    return execute_schedule(first, second, lam, seed_first, seed_second,
                            schedule)


def transcript_distribution(first: Party, second: Party, lam: int,
                            max_enumeration: int = DEFAULT_MAX_ENUMERATION
                            ) -> ExactDistribution:
    """Exact distribution of encoded transcripts over both seed spaces."""
    space = first.seed_space(lam) * second.seed_space(lam)
    if space > max_enumeration:
        raise BudgetExceeded(f"joint seed space {space} exceeds cap")
    joint = uniform_over(range(space))
    na = first.seed_space(lam)
    return joint.map(
        lambda s: execute(first, second, lam, s % na, s // na).encode())


# ---------------------------------------------------------------------------
# IV-PoQ schemes


@dataclass(frozen=True)
class IVPoQ:
    """Prover / efficient-verifier / unbounded-decision triple.

    completeness and soundness are the declared c(lam) and s(lam) curves of
    the scheme; exact game values are recomputed by the audits rather than
    trusted.  public_coin asserts that verifier1's messages are fresh
    uniform seed slices.
    """

    id: str
    prover: Party
    verifier1: Party
    verifier2: Callable[[int, Transcript], bool]
    completeness: Callable[[int], Fraction]
    soundness: Callable[[int], Fraction]
    sigma: SigmaSet = ALL_LAMBDAS
    public_coin: bool = False
    schedule: Callable[[int], tuple] | None = None

    def message_schedule(self, lam: int) -> tuple:
        """Sender order (0 = verifier1, 1 = prover); defaults to
        verifier-first alternation."""
        if self.schedule is not None:
            return self.schedule(lam)
        return alternating_schedule(self.verifier1.n_messages(lam),
                                    self.prover.n_messages(lam))

    def rounds(self, lam: int) -> int:
        return self.verifier1.n_messages(lam)

    def is_noninteractive(self, lam: int) -> bool:
        return self.rounds(lam) == 0 and self.prover.n_messages(lam) == 1


def scheme_transcript_distribution(scheme: IVPoQ, prover: Party, lam: int,
                                   max_enumeration: int = DEFAULT_MAX_ENUMERATION
                                   ) -> ExactDistribution:
    """Exact transcript distribution of the scheme's first phase with the
    given prover in the prover role."""
    space = prover.seed_space(lam) * scheme.verifier1.seed_space(lam)
    if space > max_enumeration:
        raise BudgetExceeded(f"joint seed space {space} exceeds cap")
    np = prover.seed_space(lam)
    sched = scheme.message_schedule(lam)
    joint = uniform_over(range(space))
    return joint.map(lambda s: execute_schedule(
        scheme.verifier1, prover, lam, s // np, s % np, sched).encode())


def ivpoq_accept_prob(scheme: IVPoQ, prover: Party, lam: int,
                      max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> Fraction:
    """Exact acceptance probability of verifier2 against a given prover."""
    space = prover.seed_space(lam) * scheme.verifier1.seed_space(lam)
    if space > max_enumeration:
        raise BudgetExceeded(f"joint seed space {space} exceeds cap")
    np = prover.seed_space(lam)
    sched = scheme.message_schedule(lam)
    total = F(0)
    for s in range(space):
        tau = execute_schedule(scheme.verifier1, prover, lam, s // np, s % np,
                               sched)
        if scheme.verifier2(lam, tau):
            total += 1
    return total / space


def honest_transcript_distribution(scheme: IVPoQ, lam: int,
                                   max_enumeration: int = DEFAULT_MAX_ENUMERATION
                                   ) -> ExactDistribution:
    return scheme_transcript_distribution(scheme, scheme.prover, lam,
                                          max_enumeration)


# --- AND composition --------------------------------------------------------


def _product_party(id: str, a: Party, b: Party,
                   a_phase_messages: Callable[[int], int]) -> Party:
    """Run party a for its messages, then party b, with independent seeds.

    The composite seed is a.seed * b.space + b.seed; during the second
    phase the first a_phase_messages(lam) exchanged messages are stripped
    so b sees exactly its own sub-protocol.
    """
    def seed_space(lam: int) -> int:
        return a.seed_space(lam) * b.seed_space(lam)

    def n_messages(lam: int) -> int:
        return a.n_messages(lam) + b.n_messages(lam)

    def msg_len(lam: int, i: int) -> int:
        na = a.n_messages(lam)
        return a.msg_len(lam, i) if i <= na else b.msg_len(lam, i - na)

    def next_message(lam: int, seed: int, msgs: tuple, sent: int) -> Bits:
        nb = b.seed_space(lam)
        seed_a, seed_b = divmod(seed, nb)
        na = a.n_messages(lam)
        if sent < na:
            return a.next_message(lam, seed_a, msgs, sent)
        cut = a_phase_messages(lam)
        return b.next_message(lam, seed_b, msgs[cut:], sent - na)

    return Party(id=id, seed_space=seed_space, n_messages=n_messages,
                 msg_len=msg_len, next_message=next_message)


def and_compose_ivpoq(a: IVPoQ, b: IVPoQ) -> IVPoQ:
    """Sequential run of both schemes; accept iff both deciders accept.

    Sub-seeds are independent, so completeness is the exact product.  The
    declared soundness is min(s_a, s_b): a composite cheater accepted with
    probability p induces cheaters with acceptance >= p against each
    component (the splitting audit below checks this exactly on mocks).
    """
    def a_phase_messages(lam: int) -> int:
        return a.verifier1.n_messages(lam) + a.prover.n_messages(lam)

    prover = _product_party(f"P[{a.id}&{b.id}]", a.prover, b.prover,
                            a_phase_messages)
    verifier1 = _product_party(f"V1[{a.id}&{b.id}]", a.verifier1, b.verifier1,
                               a_phase_messages)

    def verifier2(lam: int, tau: Transcript) -> bool:
        cut = a_phase_messages(lam)
        tau_a = Transcript(lam, tau.entries[:cut])
        tau_b = Transcript(lam, tau.entries[cut:])
        return a.verifier2(lam, tau_a) and b.verifier2(lam, tau_b)

    return IVPoQ(
        id=f"and[{a.id},{b.id}]",
        prover=prover,
        verifier1=verifier1,
        verifier2=verifier2,
        completeness=lambda lam: a.completeness(lam) * b.completeness(lam),
        soundness=lambda lam: min(a.soundness(lam), b.soundness(lam)),
        sigma=SigmaSet(f"{a.sigma.description}|{b.sigma.description}",
                       lambda lam: lam in a.sigma or lam in b.sigma),
        public_coin=a.public_coin and b.public_coin,
        schedule=lambda lam: a.message_schedule(lam) + b.message_schedule(lam),
    )


def split_composite_prover(a: IVPoQ, b: IVPoQ, cheater: Party) -> tuple[Party, Party]:
    """Induced cheaters against the components of an AND composition.

    The first plays the cheater's opening phase verbatim.  The second
    simulates the a-phase internally (with a seed slice standing in for
    a's verifier) and then relays the cheater's b-phase.
    """
    first = Party(
        id=f"{cheater.id}|first",
        seed_space=cheater.seed_space,
        n_messages=a.prover.n_messages,
        msg_len=cheater.msg_len,
        next_message=cheater.next_message,
    )

    def second_seed_space(lam: int) -> int:
        return cheater.seed_space(lam) * a.verifier1.seed_space(lam)

    def second_next(lam: int, seed: int, msgs: tuple, sent: int) -> Bits:
        seed_c, seed_v = divmod(seed, a.verifier1.seed_space(lam))
        cheater_first = Party(
            id=cheater.id,
            seed_space=cheater.seed_space,
            n_messages=a.prover.n_messages,
            msg_len=cheater.msg_len,
            next_message=lambda l, _s, m, k: cheater.next_message(l, seed_c, m, k),
        )
        simulated = execute_schedule(a.verifier1, cheater_first, lam, seed_v, 0,
                                     a.message_schedule(lam)).messages()
        return cheater.next_message(lam, seed_c, simulated + msgs,
                                    a.prover.n_messages(lam) + sent)

    def second_msg_len(lam: int, i: int) -> int:
        return cheater.msg_len(lam, a.prover.n_messages(lam) + i)

    second = Party(
        id=f"{cheater.id}|second",
        seed_space=second_seed_space,
        n_messages=b.prover.n_messages,
        msg_len=second_msg_len,
        next_message=second_next,
    )
    return first, second


def composition_audit(a: IVPoQ, b: IVPoQ, cheater: Party, lam: int,
                      max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> GameReport:
    """Exact completeness product and cheater-splitting inequalities."""
    composite = and_compose_ivpoq(a, b)
    report = GameReport(
        property_tag="ivpoq-and-composition",
        inputs={"a": a.id, "b": b.id, "cheater": cheater.id, "lambda": lam},
    )
    comp = ivpoq_accept_prob(composite, composite.prover, lam, max_enumeration)
    ca = ivpoq_accept_prob(a, a.prover, lam, max_enumeration)
    cb = ivpoq_accept_prob(b, b.prover, lam, max_enumeration)
    report.record("composite_completeness", comp)
    report.record("component_completeness_product", ca * cb)
    report.check("composite completeness equals the exact product",
                 comp, ca * cb, "==")

    p = ivpoq_accept_prob(composite, cheater, lam, max_enumeration)
    first, second = split_composite_prover(a, b, cheater)
    pa = ivpoq_accept_prob(a, first, lam, max_enumeration)
    pb = ivpoq_accept_prob(b, second, lam, max_enumeration)
    report.record("composite_cheater_acceptance", p)
    report.record("induced_first_acceptance", pa)
    report.record("induced_second_acceptance", pb)
    report.check("first-component cheater at least as strong", pa, p, ">=")
    report.check("second-component cheater at least as strong", pb, p, ">=")
    if composite.public_coin:
        report.note("composite is public-coin")
    return report


def and_compose_owpuzz(a: OneWayPuzzle, b: OneWayPuzzle) -> OneWayPuzzle:
    """Concatenate independent samples; verification is the conjunction."""
    def seed_space(lam: int) -> int:
        return a.samp.seed_space(lam) * b.samp.seed_space(lam)

    def ev(lam: int, seed: int) -> Bits:
        sa, sb = divmod(seed, b.samp.seed_space(lam))
        pa, aa = a.split(lam, a.samp.eval(lam, sa))
        pb, ab = b.split(lam, b.samp.eval(lam, sb))
        return pa + pb + aa + ab

    samp = SeededSampler(
        id=f"samp[{a.id}&{b.id}]",
        seed_space=seed_space,
        out_len=lambda lam: (a.puzz_len(lam) + b.puzz_len(lam)
                             + a.ans_len(lam) + b.ans_len(lam)),
        eval=ev,
    )

    def ver(lam: int, puzz: Bits, ans: Bits) -> bool:
        wa = a.puzz_len(lam)
        va = a.ans_len(lam)
        return (a.ver(lam, puzz[:wa], ans[:va])
                and b.ver(lam, puzz[wa:], ans[va:]))

    return OneWayPuzzle(
        id=f"and[{a.id},{b.id}]",
        samp=samp,
        puzz_len=lambda lam: a.puzz_len(lam) + b.puzz_len(lam),
        ans_len=lambda lam: a.ans_len(lam) + b.ans_len(lam),
        ver=ver,
    )


def split_puzzle_adversary(a: OneWayPuzzle, b: OneWayPuzzle,
                           adversary: Adversary, lam: int,
                           max_enumeration: int = DEFAULT_MAX_ENUMERATION
                           ) -> tuple[Adversary, Adversary]:
    """Induced single-puzzle adversaries from a composite-puzzle adversary.

    Each samples the other puzzle fresh, consults the composite adversary,
    and keeps its own half of the answer.
    """
    from .core import exact_pmf

    dist_b = exact_pmf(b.samp, lam, max_enumeration)
    dist_a = exact_pmf(a.samp, lam, max_enumeration)

    def respond_first(_lam: int, puzz: Bits):
        def with_other(pair_b):
            pb, _ab = b.split(lam, pair_b)
            return adversary.respond(lam, puzz + pb).map(
                lambda ans: ans[:a.ans_len(lam)] if isinstance(ans, str) else "")
        return dist_b.compose(with_other)

    def respond_second(_lam: int, puzz: Bits):
        def with_other(pair_a):
            pa, _aa = a.split(lam, pair_a)
            return adversary.respond(lam, pa + puzz).map(
                lambda ans: ans[a.ans_len(lam):] if isinstance(ans, str) else "")
        return dist_a.compose(with_other)

    return (Adversary(f"{adversary.id}|first", respond_first),
            Adversary(f"{adversary.id}|second", respond_second))


def owpuzz_composition_audit(a: OneWayPuzzle, b: OneWayPuzzle,
                             adversary: Adversary, lam: int,
                             max_enumeration: int = DEFAULT_MAX_ENUMERATION
                             ) -> GameReport:
    composite = and_compose_owpuzz(a, b)
    report = GameReport(
        property_tag="owpuzz-and-composition",
        inputs={"a": a.id, "b": b.id, "adversary": adversary.id, "lambda": lam},
    )
    corr = composite.correctness(lam, max_enumeration)
    prod = a.correctness(lam, max_enumeration) * b.correctness(lam, max_enumeration)
    report.record("composite_correctness", corr)
    report.record("component_correctness_product", prod)
    report.check("composite correctness equals the exact product", corr, prod, "==")

    p = puzzle_success(composite, adversary, lam, max_enumeration)
    adv_a, adv_b = split_puzzle_adversary(a, b, adversary, lam, max_enumeration)
    sa = puzzle_success(a, adv_a, lam, max_enumeration)
    sb = puzzle_success(b, adv_b, lam, max_enumeration)
    report.record("composite_success", p)
    report.record("induced_first_success", sa)
    report.record("induced_second_success", sb)
    report.check("first induced adversary at least as strong", sa, p, ">=")
    report.check("second induced adversary at least as strong", sb, p, ">=")
    return report


# --- non-interactive schemes as puzzles, and the first-phase pair -----------


def owpuzz_from_noninteractive_ivpoq(scheme: IVPoQ) -> OneWayPuzzle:
    """puzz = 1^lam, ans = the encoded transcript; Ver is verifier2."""
    def require_noninteractive(lam: int) -> None:
        if not scheme.is_noninteractive(lam):
            raise NotNonInteractive(
                f"{scheme.id} has {scheme.rounds(lam)} verifier rounds at {lam}")

    def ans_len(lam: int) -> int:
        require_noninteractive(lam)
        return 8 + scheme.prover.msg_len(lam, 1)

    def ev(lam: int, seed: int) -> Bits:
        require_noninteractive(lam)
        tau = execute(scheme.verifier1, scheme.prover, lam, 0, seed)
        return "1" * lam + tau.encode()

    samp = SeededSampler(
        id=f"samp[{scheme.id}]",
        seed_space=scheme.prover.seed_space,
        out_len=lambda lam: lam + ans_len(lam),
        eval=ev,
    )

    def ver(lam: int, puzz: Bits, ans: Bits) -> bool:
        if puzz != "1" * lam:
            return False
        try:
            msgs = decode_messages(ans)
        except ValueError:
            return False
        if len(msgs) != 1:
            return False
        tau = Transcript(lam, ((scheme.prover.id, msgs[0]),))
        return scheme.verifier2(lam, tau)

    return OneWayPuzzle(
        id=f"owpuzz[{scheme.id}]",
        samp=samp,
        puzz_len=lambda lam: lam,
        ans_len=ans_len,
        ver=ver,
        sigma=scheme.sigma,
    )


def intqas_pair(scheme: IVPoQ) -> tuple[Party, Party]:
    """The first-phase pair: the object whose transcript distribution no
    efficient mimic should approximate."""
    return scheme.prover, scheme.verifier1


def acceptance_shift_report(scheme: IVPoQ, mimic: Party, lam: int,
                            max_enumeration: int = DEFAULT_MAX_ENUMERATION
                            ) -> GameReport:
    """Exact check that a mimic close in SD is accepted nearly as often."""
    report = GameReport(
        property_tag="intqas-acceptance-shift",
        inputs={"scheme": scheme.id, "mimic": mimic.id, "lambda": lam},
    )
    honest = honest_transcript_distribution(scheme, lam, max_enumeration)
    mimicked = scheme_transcript_distribution(scheme, mimic, lam,
                                              max_enumeration)
    gap = statistical_distance(honest, mimicked)
    acc_honest = ivpoq_accept_prob(scheme, scheme.prover, lam, max_enumeration)
    acc_mimic = ivpoq_accept_prob(scheme, mimic, lam, max_enumeration)
    report.record("transcript_sd", gap)
    report.record("honest_acceptance", acc_honest)
    report.record("mimic_acceptance", acc_mimic)
    report.check("mimic acceptance within SD of honest acceptance",
                 acc_honest - gap, acc_mimic, "<=")
    report.check("honest acceptance within SD of mimic acceptance",
                 acc_mimic - gap, acc_honest, "<=")
    return report
