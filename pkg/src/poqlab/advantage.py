"""The Kolmogorov-threshold advantage protocol and its audit machinery.

Construction (desk scale).  Fix a base sampler A with exact per-output
probabilities p_y at each security parameter.  The prover runs A N times
and sends the tuple Y = (y_1 ... y_N).  The unbounded verifier recomputes
the p_y by full seed enumeration and accepts iff

    K^t(Y)  >=  log2(1 / (p_{y_1} ... p_{y_N}))  -  k,

where K^t is the exact time-bounded prefix complexity on the package's
universal machine with the decoding machine for A's N-fold product
registered, and k is an explicit slack parameter (the asymptotic schedule
for k is vacuous at desk scale, so the bound is parameterized directly).

Completeness >= 1 - 2^-k holds for *any* registry: the minimal witnesses
are prefix-free, their Kraft sum is at most 1, and Markov's inequality
does the rest.  Soundness is audited per cheating sampler: the audit
extends the verifier's registry with the decoding machine for the
cheater's own output distribution (the desk-scale stand-in for true
universality: for every fixed cheater the machine that codes its
distribution exists on the universal machine), then walks the whole
inequality chain from the acceptance rate down to an explicit bound on
the statistical distance between A and the solver-induced sampler:

    averaged cheater marginal  B,  accepted-conditioned version  B'
    SD(B, B')    <=  1 - acceptance                     (projection step)
    SD(A, B')    <=  sqrt(ln2/(2N) * sum_i KL(C'_i || A))      (Pinsker)
    sum_i KL     <=  KL(C' || A^N)                    (marginal bound)
    KL(C'||A^N)  <=  (max_Y log(q_Y/p_Y) + log(1/(1-d))) / (1-d)
    log(q_Y/p_Y) <=  k + header(cheater code)       (the K^t sandwich)

Every step is checked exactly (rationals) or one-sidedly in high
precision (the logarithmic legs), on the audited instance itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath

from .core import (
    DEFAULT_MAX_ENUMERATION,
    ExactDistribution,
    INF,
    MP_PREC,
    SeededSampler,
    averaged_marginal,
    exact_pmf,
    kl_divergence,
    marginal,
    mpf_of,
    power,
    split_blocks,
    statistical_distance,
)
from .errors import EmptyAcceptingSet, MalformedTuple
from .kolmogorov import (
    DEFAULT_BUDGET,
    UniversalMachine,
    coding_header_cost,
    coding_machine,
    default_universal_machine,
    minimal_witnesses,
)
from .protocols import IVPoQ, Transcript, sampler_party, silent_party
from .reports import GameReport

F = Fraction


def repeat_sampler(base: SeededSampler, n_runs: int) -> SeededSampler:
    """N independent runs of the base sampler, outputs concatenated."""
    def ev(lam: int, seed: int) -> str:
        space = base.seed_space(lam)
        parts = []
        for _ in range(n_runs):
            seed, s = divmod(seed, space)
            parts.append(base.eval(lam, s))
        return "".join(parts)

    return SeededSampler(
        id=f"{base.id}^{n_runs}",
        seed_space=lambda lam: base.seed_space(lam) ** n_runs,
        out_len=lambda lam: base.out_len(lam) * n_runs,
        eval=ev,
    )


def paper_repetition_count(q_value: int, lam: int) -> int:
    """N = q^4 when that reaches lam, otherwise lam."""
    return q_value ** 4 if q_value ** 4 >= lam else lam


@dataclass
class AdvantageProtocol:
    """Non-interactive scheme: N sampler runs against a K^t threshold."""

    base_sampler: SeededSampler
    n_runs: int
    k_threshold: int
    verifier_budget: int = DEFAULT_BUDGET
    max_enumeration: int = DEFAULT_MAX_ENUMERATION
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.k_threshold < 0:
            raise ValueError("k_threshold must be a nonnegative integer")
        self.tuple_sampler = repeat_sampler(self.base_sampler, self.n_runs)
        self.universal = default_universal_machine().extended(
            coding_machine(self.tuple_sampler, self.max_enumeration))

    def base_pmf(self, lam: int) -> ExactDistribution:
        key = ("base", lam)
        if key not in self._cache:
            self._cache[key] = exact_pmf(self.base_sampler, lam,
                                         self.max_enumeration)
        return self._cache[key]

    def tuple_log_inverse_mass(self, lam: int, tuple_bits: str) -> Fraction | None:
        """p_Y as a rational, or None when some block has zero base mass."""
        base = self.base_pmf(lam)
        p = F(1)
        for block in split_blocks(tuple_bits, self.n_runs):
            mass = base.prob(block)
            if mass == 0:
                return None
            p *= mass
        return p

    def kt_values(self, lam: int, tuples, universal: UniversalMachine | None = None) -> dict:
        """Exact K^t for the given tuples on the verifier's machine.

        The search itself does not depend on the security parameter (the
        decoding machines read their own parameter headers), so results
        are cached per machine and tuple set.
        """
        u = universal or self.universal
        key = ("kt", tuple(sorted(set(tuples))), id(u))
        if key not in self._cache:
            self._cache[key] = minimal_witnesses(
                u, sorted(set(tuples)), self.verifier_budget)
        return self._cache[key]

    def accepts_table(self, lam: int, tuples,
                      universal: UniversalMachine | None = None) -> dict:
        """Tuple -> accept/reject under the K^t threshold rule.

        Tuples containing a zero-mass block are rejected outright (the
        zero-mass-witness case; no finite complexity can meet an infinite
        threshold).
        """
        values = self.kt_values(lam, tuples, universal)
        out = {}
        for y in tuples:
            p_y = self.tuple_log_inverse_mass(lam, y)
            if p_y is None:
                out[y] = False
                continue
            res = values.get(y)
            if res is None or res.value is INF:
                out[y] = True  # K^t = infinity beats every finite threshold
                continue
            # K^t(Y) >= log2(1/p_Y) - k  <=>  p_Y * 2^(K+k) >= 1, exactly
            out[y] = p_y * F(2) ** (res.value + self.k_threshold) >= 1
        return out

    def as_ivpoq(self) -> IVPoQ:
        prover = sampler_party(self.tuple_sampler, id="P")
        verifier1 = silent_party("V1")

        def verifier2(lam: int, tau: Transcript) -> bool:
            y = tau.messages()[0]
            return self.accepts_table(lam, [y])[y]

        return IVPoQ(
            id=f"advantage[{self.base_sampler.id},N={self.n_runs},k={self.k_threshold}]",
            prover=prover,
            verifier1=verifier1,
            verifier2=verifier2,
            completeness=lambda lam: 1 - F(1, 2 ** self.k_threshold),
            soundness=lambda lam: 1 - F(1, 2 ** self.k_threshold),
            public_coin=True,
        )


def build_advantage_protocol(base: SeededSampler, q_value: int, lam_floor: int,
                             k_threshold: int,
                             verifier_budget: int = DEFAULT_BUDGET,
                             max_enumeration: int = DEFAULT_MAX_ENUMERATION
                             ) -> AdvantageProtocol:
    """Protocol with the repetition count N = max(q^4, lam_floor).

    Because N is at least lam_floor and samplers emit at least one bit,
    the output-length precondition of the incompressibility bound
    (m(lam) * N >= lam) holds by construction.
    """
    n_runs = paper_repetition_count(q_value, lam_floor)
    return AdvantageProtocol(base, n_runs, k_threshold,
                             verifier_budget, max_enumeration)


def completeness_report(protocol: AdvantageProtocol, lam: int) -> GameReport:
    """Exact honest acceptance versus the 1 - 2^-k floor."""
    report = GameReport(
        property_tag="advantage-completeness",
        inputs={"sampler": protocol.base_sampler.id, "N": protocol.n_runs,
                "k": protocol.k_threshold, "lambda": lam},
    )
    honest = exact_pmf(protocol.tuple_sampler, lam, protocol.max_enumeration)
    table = protocol.accepts_table(lam, sorted(honest.support))
    acceptance = honest.expect(table.__getitem__)
    floor = 1 - F(1, 2 ** protocol.k_threshold)
    report.record("honest_acceptance", acceptance)
    report.record("floor", floor)
    report.check("honest acceptance at least 1 - 2^-k", floor, acceptance, "<=")
    return report


def solver_to_sampler(solver: SeededSampler, n_runs: int) -> SeededSampler:
    """Run the tuple solver once and output a uniformly chosen coordinate.

    The seed space is the product of the coordinate choice and the
    solver's own space, so the output pmf is exactly the coordinate-
    averaged marginal of the solver's distribution for any N.
    """
    def ev(lam: int, seed: int) -> str:
        i, s = divmod(seed, solver.seed_space(lam))
        y = solver.eval(lam, s)
        blocks = split_blocks(y, n_runs)
        return blocks[i]

    def out_len(lam: int) -> int:
        total = solver.out_len(lam)
        if total % n_runs:
            raise MalformedTuple(
                f"{solver.id} output of {total} bits is not {n_runs} blocks")
        return total // n_runs

    return SeededSampler(
        id=f"coordinate[{solver.id}]",
        seed_space=lambda lam: n_runs * solver.seed_space(lam),
        out_len=out_len,
        eval=ev,
    )


def _log2_fraction(x: Fraction) -> mpmath.mpf:
    with mpmath.workprec(MP_PREC):
        return mpmath.log(mpf_of(x), 2)


def soundness_bound_audit(protocol: AdvantageProtocol, solver: SeededSampler,
                          lam: int) -> GameReport:
    """Walk the soundness chain for one cheating sampler, all checks live.

    The verifier's machine is extended with the decoding machine for the
    cheater's own distribution before K^t is evaluated, and the concrete
    header cost of that machine replaces the hidden logarithmic constant.
    Raises EmptyAcceptingSet when the cheater is never accepted.
    """
    n = protocol.n_runs
    report = GameReport(
        property_tag="advantage-soundness-chain",
        inputs={"sampler": protocol.base_sampler.id, "cheater": solver.id,
                "N": n, "k": protocol.k_threshold, "lambda": lam},
    )
    base = protocol.base_pmf(lam)
    q_tuple = exact_pmf(solver, lam, protocol.max_enumeration)
    if solver.out_len(lam) != protocol.tuple_sampler.out_len(lam):
        raise MalformedTuple("cheater emits tuples of the wrong width")

    cheat_view = replace(solver, id=f"cheat[{solver.id}]")
    audit_universal = protocol.universal.extended(
        coding_machine(cheat_view, protocol.max_enumeration))
    header = coding_header_cost(
        audit_universal.index_of(f"code[{cheat_view.id}]"), lam)
    report.record("cheater_code_header_bits", header)

    table = protocol.accepts_table(lam, sorted(q_tuple.support),
                                   universal=audit_universal)
    acceptance = q_tuple.expect(table.__getitem__)
    delta = 1 - acceptance
    report.record("acceptance", acceptance)
    report.record("delta", delta)
    zero_mass = q_tuple.expect(
        lambda y: protocol.tuple_log_inverse_mass(lam, y) is None)
    if zero_mass > 0:
        report.record("zero_mass_witness_rate", zero_mass)
        report.note("cheater emits tuples outside the base support; those "
                    "are rejected as zero-mass witnesses")
    if acceptance == 0:
        report.note("cheater never accepted: bound chain degenerate")
        raise EmptyAcceptingSet(f"{solver.id} never accepted at lambda={lam}")

    conditioned = q_tuple.condition(table.__getitem__)
    mixed = averaged_marginal(q_tuple, n)
    mixed_conditioned = averaged_marginal(conditioned, n)

    # solver-to-sampler marginal identity
    b_sampler = solver_to_sampler(solver, n)
    report.check("coordinate sampler pmf equals the averaged marginal",
                 exact_pmf(b_sampler, lam, protocol.max_enumeration), mixed,
                 "==")

    # projection step: SD(B, B') <= delta
    sd_b = statistical_distance(mixed, mixed_conditioned)
    report.record("sd_mixed_vs_conditioned", sd_b)
    report.check("conditioning moves the averaged marginal at most delta",
                 sd_b, delta)

    # triangle assembly
    sd_ab = statistical_distance(base, mixed)
    sd_ab_conditioned = statistical_distance(base, mixed_conditioned)
    report.record("sd_base_vs_mixed", sd_ab)
    report.record("sd_base_vs_conditioned_mixed", sd_ab_conditioned)
    report.check("triangle inequality of the assembly",
                 sd_ab, sd_b + sd_ab_conditioned)

    # per-tuple renormalization bound: q'_Y <= q_Y / (1 - delta)
    if delta < 1:
        ok = all(conditioned.prob(y) * acceptance <= q_tuple.prob(y)
                 for y in conditioned.support)
        report.check("conditioned masses bounded by q_Y/(1-delta)",
                     0, 0 if ok else 1, "==")

    # Pinsker leg per coordinate, then Jensen
    sum_sq = F(0)
    sum_kl = mpmath.mpf(0)
    kl_finite = True
    for i in range(1, n + 1):
        ci = marginal(conditioned, i, n)
        sd_i = statistical_distance(base, ci)
        sum_sq += sd_i * sd_i
        kl_i = kl_divergence(ci, base)
        if kl_i is INF:
            kl_finite = False
            continue
        with mpmath.workprec(MP_PREC):
            sum_kl += kl_i
        report.check(f"Pinsker for coordinate {i}", sd_i,
                     mpmath.sqrt(mpmath.log(2) / 2 * max(kl_i, mpmath.mpf(0))))
    with mpmath.workprec(MP_PREC):
        rms = mpmath.sqrt(mpf_of(sum_sq) / n)
    report.check("averaged marginal distance at most the coordinate RMS",
                 sd_ab_conditioned, rms)

    kl_joint = kl_divergence(conditioned, power(base, n))
    if kl_finite and kl_joint is not INF:
        report.check("coordinate KLs sum below the joint KL", sum_kl, kl_joint)

    # the K^t sandwich, exact per accepted tuple
    two = F(2)
    slack = two ** (protocol.k_threshold + header)
    max_ratio = F(0)
    kt = protocol.kt_values(lam, sorted(q_tuple.support), audit_universal)
    for y in sorted(conditioned.support):
        q_y = q_tuple.prob(y)
        p_y = protocol.tuple_log_inverse_mass(lam, y)
        assert p_y is not None  # accepted tuples passed the zero-mass gate
        value = kt[y].value
        if value is INF:
            report.check(f"K^t finite on accepted tuple {y}", 1, 0, "==")
        else:
            report.check(
                f"cheater-code length bound on K^t({y})",
                q_y * two ** value, two ** header)
        report.check(
            f"likelihood ratio bounded for accepted tuple {y}",
            q_y, slack * p_y)
        max_ratio = max(max_ratio, q_y / p_y)
    report.record("max_accepted_likelihood_ratio", max_ratio)

    # assemble the KL cap and the final bound
    if kl_joint is not INF and delta < 1:
        with mpmath.workprec(MP_PREC):
            log_renorm = -mpmath.log(mpf_of(acceptance), 2)
            kl_cap = (mpf_of(F(protocol.k_threshold + header)) + log_renorm) \
                / mpf_of(acceptance)
            kl_cap = max(kl_cap, mpmath.mpf(0))
            report.check("joint KL within the threshold-driven cap",
                         kl_joint, kl_cap)
            pinsker_cap = mpmath.sqrt(mpmath.log(2) / (2 * n) * kl_cap)
            assembled = mpf_of(delta) + pinsker_cap
            k_effective = mpmath.log(2) * kl_cap / 4
        report.record("assembled_bound", assembled)
        report.record("k_threshold_effective", k_effective)
        report.note("assembled bound is delta + sqrt(2*k_threshold_effective/N); "
                    "the effective slack folds the cheater-code header, the "
                    "renormalization term, and the Pinsker constant")
        report.check("final distance within the assembled bound",
                     sd_ab, assembled)
    return report


# ---------------------------------------------------------------------------
# the multiplicative-approximation set


def good_set_dist(q_dist: ExactDistribution, s_dist: ExactDistribution,
                  p_value: Fraction) -> tuple[frozenset, Fraction]:
    """Points where the simulator mass multiplicatively tracks the target.

    Good = {x : |q(x) - s(x)| <= q(x)/(3p)}; returns the set and the exact
    q-mass outside it.
    """
    p_value = F(p_value)
    threshold = 1 / (3 * p_value)
    good = frozenset(
        x for x in q_dist.support | s_dist.support
        if abs(q_dist.prob(x) - s_dist.prob(x)) <= q_dist.prob(x) * threshold)
    miss = q_dist.expect(lambda x: x not in good)
    return good, miss


def good_set(q_sampler: SeededSampler, s_sampler: SeededSampler, lam: int,
             p_value: Fraction,
             max_enumeration: int = DEFAULT_MAX_ENUMERATION
             ) -> tuple[frozenset, Fraction]:
    return good_set_dist(exact_pmf(q_sampler, lam, max_enumeration),
                         exact_pmf(s_sampler, lam, max_enumeration),
                         p_value)


def good_set_report(q_dist: ExactDistribution, s_dist: ExactDistribution,
                    p_value: Fraction, label: str = "") -> GameReport:
    """Exact Markov bound: the missed q-mass is at most 6p * SD(q, s)."""
    report = GameReport(
        property_tag="good-set-markov-bound",
        inputs={"pair": label, "p": F(p_value)},
    )
    good, miss = good_set_dist(q_dist, s_dist, p_value)
    bound = 6 * F(p_value) * statistical_distance(q_dist, s_dist)
    report.record("good_set_size", len(good))
    report.record("miss_mass", miss)
    report.record("markov_bound", bound)
    report.check("mass outside the good set at most 6p*SD", miss, bound)
    return report
