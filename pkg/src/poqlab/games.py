"""Security games for one-way functions, distributional OWFs, and puzzles.

Adversaries respond to a challenge with an exact distribution over answers,
so every game value is an exact rational.  A seeded machine is one way to
produce such responses; the canonical (brute-force) inverter is another:
its response is the uniform distribution over the preimage set, which is
the exact posterior an unbounded party would sample from.

Security-parameter subsets are carried as SigmaSet predicates and used as
per-lambda filters on reports; no asymptotic claim is evaluated here.
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
    point_mass,
    statistical_distance,
    uniform_over,
)
from .errors import BudgetExceeded, EmptyPreimage, NoFeasibleLambda
from .reports import GameReport

F = Fraction


@dataclass(frozen=True)
class FunctionFamily:
    """Deterministic, efficiently evaluable function family.

    `eval(lam, x)` must be total on {0,1}^in_len(lam).  Families used by
    the padding and universal constructions must also accept inputs of any
    length (set `length_generic=True`); the toy families in the registry
    all do.
    """

    id: str
    in_len: Callable[[int], int]
    eval: Callable[[int, Bits], Bits]
    step_cost: Callable[[int], int] = lambda n: n * n
    length_generic: bool = False


@dataclass(frozen=True)
class SigmaSet:
    """Decidable set of security parameters."""

    description: str
    membership: Callable[[int], bool]

    def __contains__(self, lam: int) -> bool:
        return bool(self.membership(lam))


ALL_LAMBDAS = SigmaSet("all", lambda lam: True)


def finite_sigma(*lams: int) -> SigmaSet:
    allowed = frozenset(lams)
    return SigmaSet(f"finite{sorted(allowed)}", lambda lam: lam in allowed)


def cofinite_sigma(*excluded: int) -> SigmaSet:
    banned = frozenset(excluded)
    return SigmaSet(f"cofinite~{sorted(banned)}", lambda lam: lam not in banned)


# ---------------------------------------------------------------------------
# adversaries


@dataclass(frozen=True)
class Adversary:
    """Challenge -> exact answer distribution."""

    id: str
    respond: Callable[[int, Bits], ExactDistribution]


def fixed_adversary(id: str, output: Bits) -> Adversary:
    return Adversary(id, lambda lam, challenge: point_mass(output))


def deterministic_adversary(id: str, fn: Callable[[int, Bits], Bits]) -> Adversary:
    return Adversary(id, lambda lam, challenge: point_mass(fn(lam, challenge)))


def seeded_adversary(id: str, seed_space: Callable[[int], int],
                     eval: Callable[[int, Bits, int], Bits]) -> Adversary:
    def respond(lam: int, challenge: Bits) -> ExactDistribution:
        space = seed_space(lam)
        return uniform_over(range(space)).map(lambda s: eval(lam, challenge, s))
    return Adversary(id, respond)


def preimages(f: FunctionFamily, lam: int,
              max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> dict:
    n = f.in_len(lam)
    if 1 << n > max_enumeration:
        raise BudgetExceeded(f"domain 2^{n} of {f.id} exceeds cap")
    table: dict = {}
    for x in all_bitstrings(n):
        table.setdefault(f.eval(lam, x), []).append(x)
    return table


def canonical_inverter(f: FunctionFamily, lam: int,
                       max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> Adversary:
    """Uniform sampler over f^{-1}(y): the exact preimage posterior.

    Achieves distributional-inversion distance 0 by construction.
    """
    table = preimages(f, lam, max_enumeration)

    def respond(_lam: int, y: Bits) -> ExactDistribution:
        pre = table.get(y)
        if not pre:
            raise EmptyPreimage(f"{f.id} has no preimage for {y!r}")
        return uniform_over(pre)

    return Adversary(f"invert[{f.id}]", respond)


def noisy_inverter(f: FunctionFamily, lam: int, noise: Fraction,
                   max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> Adversary:
    """Canonical inverter mixed with a uniform guess at rate `noise`."""
    table = preimages(f, lam, max_enumeration)
    n = f.in_len(lam)
    noise = F(noise)

    def respond(_lam: int, y: Bits) -> ExactDistribution:
        pre = table.get(y)
        if not pre:
            raise EmptyPreimage(f"{f.id} has no preimage for {y!r}")
        out: dict = {}
        for x in all_bitstrings(n):
            out[x] = noise / (1 << n)
        share = (1 - noise) / len(pre)
        for x in pre:
            out[x] += share
        return ExactDistribution(out)

    return Adversary(f"noisy[{f.id},{noise}]", respond)


# ---------------------------------------------------------------------------
# OWF and distributional-OWF games


def owf_advantage(f: FunctionFamily, adversary: Adversary, lam: int) -> Fraction:
    """Exact Pr[f(x') = f(x)] for x uniform and x' from the adversary.

    Wrong-length adversary outputs never count as successes.
    """
    n = f.in_len(lam)
    total = F(0)
    for x in all_bitstrings(n):
        y = f.eval(lam, x)
        response = adversary.respond(lam, y)
        good = response.expect(
            lambda xp: isinstance(xp, str) and len(xp) == n and f.eval(lam, xp) == y)
        total += good
    return total / (1 << n)


def ideal_pair_distribution(f: FunctionFamily, lam: int) -> ExactDistribution:
    n = f.in_len(lam)
    return uniform_over(all_bitstrings(n)).map(lambda x: (x, f.eval(lam, x)))


def adversary_pair_distribution(f: FunctionFamily, adversary: Adversary,
                                lam: int) -> ExactDistribution:
    n = f.in_len(lam)

    def kernel(x: Bits) -> ExactDistribution:
        y = f.eval(lam, x)
        return adversary.respond(lam, y).map(lambda xp: (xp, y))

    return uniform_over(all_bitstrings(n)).compose(kernel)


def distowf_distance(f: FunctionFamily, adversary: Adversary, lam: int) -> Fraction:
    """Exact SD between {(x, f(x))} and {(A(f(x)), f(x))} over uniform x."""
    return statistical_distance(
        ideal_pair_distribution(f, lam),
        adversary_pair_distribution(f, adversary, lam))


# ---------------------------------------------------------------------------
# one-way puzzles


@dataclass(frozen=True)
class OneWayPuzzle:
    """Sampler for (puzz, ans) pairs plus an unbounded verification map.

    The sampler output is the concatenation puzz || ans with the declared
    widths, so pair distributions stay plain bit-string distributions.
    """

    id: str
    samp: SeededSampler
    puzz_len: Callable[[int], int]
    ans_len: Callable[[int], int]
    ver: Callable[[int, Bits, Bits], bool]
    sigma: SigmaSet = ALL_LAMBDAS

    def split(self, lam: int, pair: Bits) -> tuple[Bits, Bits]:
        w = self.puzz_len(lam)
        return pair[:w], pair[w:]

    def pair_distribution(self, lam: int,
                          max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> ExactDistribution:
        from .core import exact_pmf

        return exact_pmf(self.samp, lam, max_enumeration)

    def correctness(self, lam: int,
                    max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> Fraction:
        dist = self.pair_distribution(lam, max_enumeration)
        return dist.expect(lambda pair: self.ver(lam, *self.split(lam, pair)))


def puzzle_success(puzzle: OneWayPuzzle, adversary: Adversary, lam: int,
                   max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> Fraction:
    """Exact Pr[Ver(puzz, A(puzz)) accepts] over the sampler and adversary."""
    dist = puzzle.pair_distribution(lam, max_enumeration)
    total = F(0)
    for pair, p in dist.items():
        puzz, _ans = puzzle.split(lam, pair)
        total += p * adversary.respond(lam, puzz).expect(
            lambda ansp: isinstance(ansp, str) and puzzle.ver(lam, puzz, ansp))
    return total


def puzzle_game(puzzle: OneWayPuzzle, adversary: Adversary, lam: int,
                max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> GameReport:
    """Correctness and adversary success of a puzzle, exactly."""
    report = GameReport(
        property_tag="owpuzz-game",
        inputs={"puzzle": puzzle.id, "adversary": adversary.id, "lambda": lam,
                "in_sigma": lam in puzzle.sigma},
    )
    report.record("correctness", puzzle.correctness(lam, max_enumeration))
    report.record("success", puzzle_success(puzzle, adversary, lam, max_enumeration))
    return report


def owf_to_owpuzz(f: FunctionFamily) -> OneWayPuzzle:
    """The puzzle whose verification is "does your answer hit the image?".

    Samp draws x uniform, publishes puzz = 1^n || 0 || f(x) and keeps
    ans = x; Ver accepts ans' iff f(ans') equals the image.  Correctness is
    exactly 1, and an adversary's success equals its inversion advantage
    against f.
    """
    def samp_eval(lam: int, seed: int) -> Bits:
        n = f.in_len(lam)
        x = int_to_bits(seed, n)
        return "1" * n + "0" + f.eval(lam, x) + x

    def out_len(lam: int) -> int:
        n = f.in_len(lam)
        return n + 1 + len(f.eval(lam, "0" * n)) + n

    samp = SeededSampler(
        id=f"samp[{f.id}]",
        seed_space=lambda lam: 1 << f.in_len(lam),
        out_len=out_len,
        eval=samp_eval,
        seed_len=f.in_len,
    )

    def ver(lam: int, puzz: Bits, ansp: Bits) -> bool:
        n = f.in_len(lam)
        if puzz[:n + 1] != "1" * n + "0":
            return False
        y = puzz[n + 1:]
        return len(ansp) == n and f.eval(lam, ansp) == y

    return OneWayPuzzle(
        id=f"owpuzz[{f.id}]",
        samp=samp,
        puzz_len=lambda lam: f.in_len(lam) + 1 + len(f.eval(lam, "0" * f.in_len(lam))),
        ans_len=f.in_len,
        ver=ver,
    )


def puzzle_adversary_from_owf_adversary(f: FunctionFamily,
                                        adversary: Adversary) -> Adversary:
    """Strip the unary header off the puzzle and run the inverter."""
    def respond(lam: int, puzz: Bits) -> ExactDistribution:
        n = f.in_len(lam)
        return adversary.respond(lam, puzz[n + 1:])
    return Adversary(f"viaowf[{adversary.id}]", respond)


# ---------------------------------------------------------------------------
# the universal construction


@dataclass(frozen=True)
class CandidateMachine:
    """A machine runnable on a raw input block under a step budget.

    Returns the output string, or None for non-halting / rejection within
    the budget (encoded downstream as the bottom marker).
    """

    name: str
    run: Callable[[Bits, int], Bits | None]


def identity_candidate() -> CandidateMachine:
    return CandidateMachine("identity", lambda block, budget: block)


def never_halting_candidate() -> CandidateMachine:
    return CandidateMachine("diverge", lambda block, budget: None)


def candidate_from_transducer(machine) -> CandidateMachine:
    """Adapt a registered self-delimiting machine: feed the block as the
    whole input tape; halting within the block and budget yields output."""
    def run(block: Bits, budget: int) -> Bits | None:
        state = machine.start()
        steps = 0
        out = state.halts_empty()
        if out is not None:
            return out
        for bit in block:
            if steps + 1 > budget:
                return None
            kind, payload, cost = state.feed(bit)
            steps += 1 + cost
            if steps > budget:
                return None
            if kind == "halt":
                return payload
            if kind == "reject":
                return None
            state = payload
        return None

    return CandidateMachine(f"transducer[{machine.name}]", run)


def candidate_from_family(f: FunctionFamily, lam_cap: int = 64) -> CandidateMachine:
    """Adapt a function family: run f at the lambda whose input length
    matches the block (any lambda for length-generic families)."""
    def run(block: Bits, budget: int) -> Bits | None:
        if f.length_generic:
            return f.eval(1, block)
        for lam in range(1, lam_cap + 1):
            if f.in_len(lam) == len(block):
                if f.step_cost(lam) > budget:
                    return None
                return f.eval(lam, block)
        return None

    return CandidateMachine(f"family[{f.id}]", run)


def encode_block_result(result: Bits | None) -> Bits:
    """Self-delimiting block encoding: '0' is the bottom marker, otherwise
    '1' + 8-bit length + payload.  Unique parsing makes equality of
    concatenations imply blockwise equality."""
    if result is None:
        return "0"
    if len(result) > 255:
        raise ValueError("block output too long for the 8-bit length prefix")
    return "1" + int_to_bits(len(result), 8) + result


def universal_owf(candidates: tuple[CandidateMachine, ...],
                  id: str = "universal") -> FunctionFamily:
    """Concatenate candidate evaluations over square-split input blocks.

    On an l-bit input take N = floor(sqrt(l)), split the N^2-bit prefix
    into N blocks of N bits, run candidate i on block i for N^3 steps, and
    emit the self-delimiting concatenation of the results (bottom marker
    for non-halting or missing candidates).
    """
    def ev(lam: int, y: Bits) -> Bits:
        l = len(y)
        n = 1
        while (n + 1) * (n + 1) <= l:
            n += 1
        if n * n > l:
            raise ValueError("input shorter than one block")
        blocks = [y[i * n:(i + 1) * n] for i in range(n)]
        parts = []
        for i, block in enumerate(blocks):
            if i < len(candidates):
                parts.append(encode_block_result(candidates[i].run(block, n ** 3)))
            else:
                parts.append(encode_block_result(None))
        return "".join(parts)

    return FunctionFamily(
        id=id,
        in_len=lambda lam: lam,
        eval=ev,
        step_cost=lambda n: n * n,
        length_generic=True,
    )


def inheritance_adversary(candidates: tuple[CandidateMachine, ...],
                          f: FunctionFamily, candidate_index: int,
                          g_adversary: Adversary, block_len: int) -> Adversary:
    """The reduction that turns an adversary against the universal family
    into an inverter for candidate `candidate_index` (1-based).

    Plants the challenge image in block j, fills the remaining blocks with
    fresh uniform samples run through their own candidates, and returns the
    j-th block of whatever the adversary suggests.
    """
    j = candidate_index
    n = block_len
    g = universal_owf(candidates)

    def respond(lam: int, y: Bits) -> ExactDistribution:
        others = [i for i in range(n) if i != j - 1]

        def with_fillers(filler_seed: int) -> ExactDistribution:
            parts = []
            s = filler_seed
            blocks = {}
            for i in others:
                blocks[i], s = int_to_bits(s % (1 << n), n), s >> n
            v = []
            for i in range(n):
                if i == j - 1:
                    v.append(encode_block_result(y))
                else:
                    run = (candidates[i].run(blocks[i], n ** 3)
                           if i < len(candidates) else None)
                    v.append(encode_block_result(run))
            image = "".join(v)

            def take_block(w) -> Bits:
                if not isinstance(w, str) or len(w) < n * n:
                    return ""
                return w[(j - 1) * n:j * n]

            return g_adversary.respond(n * n, image).map(take_block)

        filler_space = 1 << (n * len(others))
        return uniform_over(range(filler_space)).compose(with_fillers)

    return Adversary(f"inherit[{f.id}@{j}]", respond)


# ---------------------------------------------------------------------------
# padding and cofinite lifting


@dataclass(frozen=True)
class PaddedFamily:
    family: FunctionFamily
    base: FunctionFamily
    exponent: int

    def prefix_len(self, total_len: int) -> int:
        return _max_prefix_len(total_len, self.exponent)

    def embed(self, x: Bits, tail: Bits) -> Bits:
        """Input embedding x || tail used by security-preservation checks."""
        return x + tail


def _max_prefix_len(total_len: int, exponent: int) -> int:
    i = 0
    while (i + 1) ** exponent <= total_len:
        i += 1
    return i


def pad_to_quadratic(f: FunctionFamily, exponent: int) -> PaddedFamily:
    """Apply f to the longest prefix whose cost bound fits, pass the tail.

    For a family with declared cost O(n^exponent), the padded family
    evaluates f on the maximum prefix length i with i^exponent <= |z| and
    copies the remainder, so its own cost is quadratic in |z|.
    """
    if not f.length_generic:
        raise ValueError("padding needs a length-generic family")

    def ev(lam: int, z: Bits) -> Bits:
        i = _max_prefix_len(len(z), exponent)
        if i == 0:
            raise ValueError("input too short to embed any prefix")
        return f.eval(lam, z[:i]) + z[i:]

    family = FunctionFamily(
        id=f"padded[{f.id},{exponent}]",
        in_len=lambda lam: lam ** exponent,
        eval=ev,
        step_cost=lambda n: n * n,
        length_generic=True,
    )
    return PaddedFamily(family=family, base=f, exponent=exponent)


def lift_from_cofinite(f: FunctionFamily, schedule: Callable[[int], int],
                       id: str | None = None, lam_cap: int = 4096) -> FunctionFamily:
    """Evaluate f at the largest feasible security parameter.

    g on an l-bit input finds the maximum lam with schedule(lam) <= l and
    applies f at that lam to the schedule(lam)-bit prefix.  The schedule
    must be monotone.
    """
    def feasible_lambda(l: int) -> int:
        best = 0
        for lam in range(1, lam_cap + 1):
            if schedule(lam) <= l:
                best = lam
            else:
                break
        if best == 0:
            raise NoFeasibleLambda(f"no lambda with schedule(lambda) <= {l}")
        return best

    def ev(_lam: int, x: Bits) -> Bits:
        lam = feasible_lambda(len(x))
        return f.eval(lam, x[:schedule(lam)])

    return FunctionFamily(
        id=id or f"lifted[{f.id}]",
        in_len=lambda lam: lam,
        eval=ev,
        step_cost=f.step_cost,
        length_generic=True,
    )
