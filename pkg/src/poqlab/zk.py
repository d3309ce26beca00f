"""Toy extractable commitments and the commit-and-open compiler.

The commitment scheme here is deliberately small: com = f(message || salt)
for a registered function family.  Binding and hiding are *measured*, not
assumed: the audit enumerates the whole commitment space and reports exact
binding-failure witnesses and the exact worst pairwise hiding distance.
The extractor is the unbounded brute force the desk-scale model permits
(the reductions only need it to exist), so extractor/value agreement is
exact unless a test deliberately installs a faulty extractor.

The compiler wraps a public-coin scheme: each round the verifier sends
fresh coins, the prover computes the underlying prover's reply and commits
to it; the unbounded decision phase recovers every committed reply by
brute force (rejecting any commitment without a unique opening) and runs
the underlying decision.  Completeness accounting is exact: the compiled
acceptance equals the base acceptance minus the mass of accepting runs
that hit a binding failure.  The honest-verifier simulator commits to
zeros; its view distance is bounded by rounds times the measured hiding
distance.
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
    all_bitstrings,
    int_to_bits,
    statistical_distance,
    uniform_over,
)
from .errors import BudgetExceeded, NotPublicCoin
from .games import FunctionFamily
from .protocols import (
    IVPoQ,
    Party,
    Transcript,
    coin_party,
    encode_messages,
    execute_schedule,
    honest_transcript_distribution,
    ivpoq_accept_prob,
)
from .reports import GameReport

F = Fraction


@dataclass(frozen=True)
class CommitScheme:
    """Non-interactive commitment with brute-force value and extractor.

    `commit(lam, message, salt)` is deterministic in the integer salt;
    `openings(lam, com)` enumerates the messages that open a commitment;
    `extract` recovers the committed message from the commitment alone
    (None plays the bottom value).  The toy constructor sets extract to the
    brute-force unique-opening map, making extractor/value agreement exact;
    audits treat extract as part of the scheme so a faulty one is measured,
    not trusted.
    """

    id: str
    msg_len: Callable[[int], int]
    salt_space: Callable[[int], int]
    com_len: Callable[[int], int]
    commit: Callable[[int, Bits, int], Bits]
    extract: Callable[[int, Bits], Bits | None]

    def open_check(self, lam: int, com: Bits, message: Bits, salt: int) -> bool:
        return self.commit(lam, message, salt) == com

    def commitment_distribution(self, lam: int, message: Bits) -> ExactDistribution:
        return uniform_over(range(self.salt_space(lam))).map(
            lambda salt: self.commit(lam, message, salt))

    def openings(self, lam: int, com: Bits) -> frozenset:
        found = set()
        for m in all_bitstrings(self.msg_len(lam)):
            for salt in range(self.salt_space(lam)):
                if self.commit(lam, m, salt) == com:
                    found.add(m)
                    break
        return frozenset(found)

    def value(self, lam: int, com: Bits) -> Bits | None:
        """The unique openable message, or None when absent or ambiguous."""
        found = self.openings(lam, com)
        return next(iter(found)) if len(found) == 1 else None


def toy_extractable_commitment(f: FunctionFamily, msg_len: Callable[[int], int],
                               salt_len: Callable[[int], int]) -> CommitScheme:
    """com = f(message || salt); extractor = brute-force unique opening."""
    def com_len(lam: int) -> int:
        return len(f.eval(lam, "0" * (msg_len(lam) + salt_len(lam))))

    holder: dict = {}
    scheme = CommitScheme(
        id=f"com[{f.id}]",
        msg_len=msg_len,
        salt_space=lambda lam: 1 << salt_len(lam),
        com_len=com_len,
        commit=lambda lam, m, salt: f.eval(
            lam, m + int_to_bits(salt, salt_len(lam))),
        extract=lambda lam, com: holder["self"].value(lam, com),
    )
    holder["self"] = scheme
    return scheme


def commitment_audit(scheme: CommitScheme, lam: int,
                     max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> GameReport:
    """Exact correctness, binding, hiding, and extractor agreement."""
    report = GameReport(
        property_tag="extractable-commitment-audit",
        inputs={"scheme": scheme.id, "lambda": lam},
    )
    n = scheme.msg_len(lam)
    space = (1 << n) * scheme.salt_space(lam)
    if space > max_enumeration:
        raise BudgetExceeded(f"commitment space {space} exceeds cap")

    by_com: dict = {}
    for m in all_bitstrings(n):
        for salt in range(scheme.salt_space(lam)):
            by_com.setdefault(scheme.commit(lam, m, salt), set()).add(m)

    correct = all(
        scheme.open_check(lam, scheme.commit(lam, m, salt), m, salt)
        for m in all_bitstrings(n) for salt in range(scheme.salt_space(lam)))
    report.check("honest commit-then-open always accepts",
                 1 if correct else 0, 1, "==")

    collisions = [(com, tuple(sorted(ms))) for com, ms in sorted(by_com.items())
                  if len(ms) > 1]
    report.record("binding_failures", len(collisions))
    if collisions:
        com, ms = collisions[0]
        report.note(f"binding failure witness: messages {ms[0]} and {ms[1]} "
                    f"both open {com}")

    hiding = F(0)
    messages = sorted(all_bitstrings(n))
    for i, m0 in enumerate(messages):
        d0 = scheme.commitment_distribution(lam, m0)
        for m1 in messages[i + 1:]:
            hiding = max(hiding, statistical_distance(
                d0, scheme.commitment_distribution(lam, m1)))
    report.record("hiding_distance", hiding)

    disagreements = 0
    for com, ms in by_com.items():
        val = scheme.value(lam, com)
        got = scheme.extract(lam, com)
        if val is not None and got != val:
            disagreements += 1
    report.record("extractor_value_disagreements", disagreements)
    report.check("extractor agrees with the unique opening wherever defined",
                 disagreements, 0, "==")
    return report


# ---------------------------------------------------------------------------
# the compiler


@dataclass(frozen=True)
class ZkIVPoQ:
    """A compiled scheme: commitments in phase one, brute force in phase two."""

    base: IVPoQ
    commit: CommitScheme
    compiled: IVPoQ

    def rounds(self, lam: int) -> int:
        return self.base.rounds(lam)


def _base_prover_replies(base: IVPoQ, lam: int, prover_seed: int,
                         coins: tuple) -> tuple:
    """Replies of the underlying prover against the given coin sequence."""
    replies = []
    msgs: list = []
    for i, v in enumerate(coins):
        msgs.append(v)
        p = base.prover.next_message(lam, prover_seed, tuple(msgs), i)
        replies.append(p)
        msgs.append(p)
    return tuple(replies)


def compile_zk(base: IVPoQ, commit: CommitScheme) -> ZkIVPoQ:
    """Commit-and-open compilation of a public-coin scheme.

    Requires every underlying prover message to have the commitment
    scheme's message width.  The compiled verifier tosses the same coins
    as the base verifier; the compiled prover recomputes the base prover's
    replies round by round and sends commitments instead.
    """
    if not base.public_coin:
        raise NotPublicCoin(f"{base.id} is not declared public-coin")

    def check_widths(lam: int) -> None:
        widths = {base.prover.msg_len(lam, i + 1)
                  for i in range(base.prover.n_messages(lam))}
        if widths - {commit.msg_len(lam)}:
            raise ValueError(
                f"prover widths {sorted(widths)} do not match the "
                f"commitment message length {commit.msg_len(lam)}")

    def prover_seed_space(lam: int) -> int:
        return base.prover.seed_space(lam) * \
            commit.salt_space(lam) ** base.prover.n_messages(lam)

    def prover_next(lam: int, seed: int, msgs: tuple, sent: int) -> Bits:
        check_widths(lam)
        salts_space = commit.salt_space(lam) ** base.prover.n_messages(lam)
        base_seed, salt_pack = divmod(seed, salts_space)
        coins = msgs[0::2][:sent + 1]
        replies = _base_prover_replies(base, lam, base_seed, coins)
        salt = (salt_pack // commit.salt_space(lam) ** sent) % \
            commit.salt_space(lam)
        return commit.commit(lam, replies[sent], salt)

    prover = Party(
        id=f"P~[{base.id}]",
        seed_space=prover_seed_space,
        n_messages=base.prover.n_messages,
        msg_len=lambda lam, i: commit.com_len(lam),
        next_message=prover_next,
    )

    verifier1 = coin_party(
        f"V1~[{base.id}]",
        lambda lam: tuple(base.verifier1.msg_len(lam, i + 1)
                          for i in range(base.verifier1.n_messages(lam))))

    def verifier2(lam: int, tau: Transcript) -> bool:
        msgs = tau.messages()
        coins = msgs[0::2]
        commitments = msgs[1::2]
        opened = []
        for com in commitments:
            value = commit.value(lam, com)
            if value is None:
                return False
            opened.append(value)
        base_entries = []
        for v, p in zip(coins, opened):
            base_entries.append(("V1", v))
            base_entries.append(("P", p))
        return base.verifier2(lam, Transcript(lam, tuple(base_entries)))

    compiled = IVPoQ(
        id=f"zk[{base.id},{commit.id}]",
        prover=prover,
        verifier1=verifier1,
        verifier2=verifier2,
        completeness=base.completeness,
        soundness=base.soundness,
        sigma=base.sigma,
        public_coin=True,
    )
    return ZkIVPoQ(base=base, commit=commit, compiled=compiled)


def compiler_completeness_report(zk: ZkIVPoQ, lam: int,
                                 max_enumeration: int = DEFAULT_MAX_ENUMERATION
                                 ) -> GameReport:
    """compiled acceptance == base acceptance - binding-failure mass, exactly."""
    base, commit = zk.base, zk.commit
    report = GameReport(
        property_tag="zk-compiler-completeness",
        inputs={"base": base.id, "commit": commit.id, "lambda": lam},
    )
    base_acc = ivpoq_accept_prob(base, base.prover, lam, max_enumeration)
    compiled_acc = ivpoq_accept_prob(zk.compiled, zk.compiled.prover, lam,
                                     max_enumeration)

    # exact mass of honest runs where the base decision would accept but
    # some commitment lost its unique opening
    rounds = base.prover.n_messages(lam)
    coin_space = base.verifier1.seed_space(lam)
    prover_space = base.prover.seed_space(lam)
    salt_space = commit.salt_space(lam) ** rounds
    total = coin_space * prover_space * salt_space
    if total > max_enumeration:
        raise BudgetExceeded(f"joint space {total} exceeds cap")
    failure_mass = F(0)
    for sc in range(coin_space):
        coins = tuple(zk.compiled.verifier1.next_message(lam, sc, (), i)
                      for i in range(rounds))
        for sp in range(prover_space):
            replies = _base_prover_replies(base, lam, sp, coins)
            entries = []
            for v, p in zip(coins, replies):
                entries.append(("V1", v))
                entries.append(("P", p))
            if not base.verifier2(lam, Transcript(lam, tuple(entries))):
                continue
            for pack in range(salt_space):
                salts = []
                rest = pack
                for _ in range(rounds):
                    rest, s = rest // commit.salt_space(lam), rest % commit.salt_space(lam)
                    salts.append(s)
                broken = any(
                    commit.value(lam, commit.commit(lam, p, s)) is None
                    for p, s in zip(replies, salts))
                if broken:
                    failure_mass += F(1, total)
    report.record("base_acceptance", base_acc)
    report.record("compiled_acceptance", compiled_acc)
    report.record("binding_failure_acceptance_mass", failure_mass)
    report.check("compiled acceptance is base acceptance minus the failure mass",
                 compiled_acc, base_acc - failure_mass, "==")
    report.check("compiled completeness within the failure mass of base",
                 base_acc - failure_mass, compiled_acc, "<=")
    return report


def hv_simulator(zk: ZkIVPoQ) -> SeededSampler:
    """Honest-verifier view simulator: fresh coins, commitments to zeros."""
    base, commit = zk.base, zk.commit

    def seed_space(lam: int) -> int:
        rounds = base.prover.n_messages(lam)
        return base.verifier1.seed_space(lam) * commit.salt_space(lam) ** rounds

    def ev(lam: int, seed: int) -> Bits:
        rounds = base.prover.n_messages(lam)
        coins_seed, pack = divmod(seed, commit.salt_space(lam) ** rounds)
        msgs = []
        zeros = "0" * commit.msg_len(lam)
        rest = pack
        for i in range(rounds):
            msgs.append(zk.compiled.verifier1.next_message(
                lam, coins_seed, tuple(msgs), i))
            rest, s = divmod(rest, commit.salt_space(lam))
            msgs.append(commit.commit(lam, zeros, s))
        return encode_messages(tuple(msgs))

    def out_len(lam: int) -> int:
        return len(ev(lam, 0))

    return SeededSampler(
        id=f"hvsim[{zk.compiled.id}]",
        seed_space=seed_space,
        out_len=out_len,
        eval=ev,
    )


def simulator_report(zk: ZkIVPoQ, lam: int,
                     max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> GameReport:
    """SD(honest compiled view, zero-committing simulation) <= rounds * hiding."""
    from .core import exact_pmf

    report = GameReport(
        property_tag="zk-simulator-distance",
        inputs={"scheme": zk.compiled.id, "lambda": lam},
    )
    honest = honest_transcript_distribution(zk.compiled, lam, max_enumeration)
    simulated = exact_pmf(hv_simulator(zk), lam, max_enumeration)
    gap = statistical_distance(honest, simulated)
    hiding = commitment_audit(zk.commit, lam,
                              max_enumeration).quantities["hiding_distance"]
    rounds = zk.base.prover.n_messages(lam)
    report.record("view_distance", gap)
    report.record("hiding_distance", hiding)
    report.check("simulated view within rounds times the hiding distance",
                 gap, rounds * hiding)
    return report


def hybrid_provers_audit(zk: ZkIVPoQ, cheater: Party, lam: int,
                         max_enumeration: int = DEFAULT_MAX_ENUMERATION
                         ) -> GameReport:
    """Extractor-by-round hybrids of a cheating compiled prover.

    Hybrid j plays the base game, deriving the first j committed replies
    with the extractor and the rest with the brute-force value map (a
    bottom value aborts).  Hybrid 0's acceptance equals the cheater's
    acceptance against the compiled scheme exactly; each step moves by at
    most the exact extractor/value discrepancy mass of its round.  The
    expected-time truncation of the generic argument is a no-op here: the
    brute-force extractor is deterministic.
    """
    base, commit = zk.base, zk.commit
    compiled = zk.compiled
    rounds = base.prover.n_messages(lam)
    report = GameReport(
        property_tag="zk-hybrid-provers",
        inputs={"base": base.id, "commit": commit.id, "cheater": cheater.id,
                "lambda": lam},
    )
    coin_space = compiled.verifier1.seed_space(lam)
    cheat_space = cheater.seed_space(lam)
    total = coin_space * cheat_space
    if total > max_enumeration:
        raise BudgetExceeded(f"joint space {total} exceeds cap")

    acc = [F(0)] * (rounds + 1)
    disc = [F(0)] * (rounds + 1)
    sched = compiled.message_schedule(lam)
    for sc in range(coin_space):
        for sp in range(cheat_space):
            tau = execute_schedule(compiled.verifier1, cheater, lam, sc, sp,
                                   sched)
            msgs = tau.messages()
            coins = msgs[0::2]
            commitments = msgs[1::2]
            values = [commit.value(lam, com) for com in commitments]
            extracts = [commit.extract(lam, com) for com in commitments]
            for j in range(rounds + 1):
                replies = list(extracts[:j]) + list(values[j:])
                if any(r is None for r in replies):
                    continue
                entries = []
                for v, p in zip(coins, replies):
                    entries.append(("V1", v))
                    entries.append(("P", p))
                if base.verifier2(lam, Transcript(lam, tuple(entries))):
                    acc[j] += F(1, total)
            for j in range(1, rounds + 1):
                if values[j - 1] is not None and \
                        extracts[j - 1] != values[j - 1]:
                    disc[j] += F(1, total)

    compiled_acc = ivpoq_accept_prob(compiled, cheater, lam, max_enumeration)
    report.record("compiled_acceptance", compiled_acc)
    for j in range(rounds + 1):
        report.record(f"hybrid_{j}_acceptance", acc[j])
    report.check("hybrid 0 equals the compiled acceptance, exactly",
                 acc[0], compiled_acc, "==")
    for j in range(1, rounds + 1):
        report.record(f"extract_value_discrepancy_{j}", disc[j])
        report.check(
            f"hybrid {j} within the round-{j} discrepancy of hybrid {j - 1}",
            acc[j - 1] - disc[j], acc[j], "<=")
    report.note("expected-time truncation is a no-op: the brute-force "
                "extractor runs in deterministic time")
    return report


def hvszk_transcript_premise_check(scheme: IVPoQ, simulator: SeededSampler,
                                   lam: int,
                                   max_enumeration: int = DEFAULT_MAX_ENUMERATION
                                   ) -> GameReport:
    """Exact SD between the first-phase transcripts and a simulator.

    A simulator at negligible distance is the premise that feeds the
    transcript-completion machinery (the simulator doubles as the sampler
    whose round function the completion attack inverts).
    """
    from .core import exact_pmf

    report = GameReport(
        property_tag="hvszk-transcript-premise",
        inputs={"scheme": scheme.id, "simulator": simulator.id, "lambda": lam},
    )
    honest = honest_transcript_distribution(scheme, lam, max_enumeration)
    simulated = exact_pmf(simulator, lam, max_enumeration)
    gap = statistical_distance(honest, simulated)
    report.record("transcript_sd", gap)
    report.note(f"a simulator this close feeds the completion attack via "
                f"the round function roundfn[{simulator.id}]")
    return report
