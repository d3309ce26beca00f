"""A concrete universal self-delimiting machine and exact K^t by search.

Machine model
-------------
A registered machine is a deterministic transducer with a one-way read head
over the program bits.  It is driven bit by bit and reports, after each bit,
whether it needs more input, halts with an output, or rejects (meaning no
extension of the bits read so far can ever make it halt).  A program p is
*valid* if the machine halts with its head exactly on the last bit of p:
it consumed all of p and never asked for a bit beyond it.  Valid programs
of such a machine form a prefix-free set, because the run on a prefix of a
longer program is identical up to the point where the shorter one halts.

Step accounting: one step per bit read, one step per output bit emitted,
plus any extra cost a machine charges for internal work (the table-building
machines charge their enumeration work explicitly).  The step budget of a
run caps the total.

The universal machine U interprets a program ``1^n || 0 || p`` by running
the n-th registry entry on p.  Its registry is explicit: a literal machine
(copy-through encoding, guaranteeing a finite complexity for every string),
a run-length machine, and dynamically added decoding machines for the
Shannon-Fano codes of registered sampler distributions.  The registry is
the desk-scale stand-in for true universality: K^t is exactly computable
and every constant (headers, code lengths) is concrete and reported.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .core import (
    INF,
    Bits,
    ExactDistribution,
    SeededSampler,
    all_bitstrings,
    binary_digits,
    bits_to_int,
    exact_pmf,
    floor_log2,
)
from .errors import BudgetExceeded

# ---------------------------------------------------------------------------
# transducer protocol


class NonHalting:
    """Run outcome: step budget exhausted."""

    def __repr__(self):
        return "NonHalting"


class InvalidProgram:
    """Run outcome: head over- or under-consumed the program."""

    def __repr__(self):
        return "InvalidProgram"


NON_HALTING = NonHalting()
INVALID_PROGRAM = InvalidProgram()

# Machine step results
_MORE = "more"
_HALT = "halt"
_REJECT = "reject"


class MachineState:
    """One configuration of a transducer.

    Subclasses implement `feed(bit) -> (kind, payload, cost)` where kind is
    one of "more" (payload: next state), "halt" (payload: output emitted
    *after* consuming this bit), or "reject" (payload: None; the machine
    would keep reading forever).  `cost` is the number of steps charged for
    this transition in addition to the single step for the read itself.
    """

    def feed(self, bit: str):
        raise NotImplementedError

    def halts_empty(self):
        """Output if the machine halts on the empty program, else None."""
        return None


@dataclass(frozen=True)
class RegisteredMachine:
    """Registry entry: a stable name and a fresh-state factory."""

    name: str
    start: Callable[[], MachineState]


# ---------------------------------------------------------------------------
# literal machine: 1^len || 0 || payload, copies payload through


@dataclass(frozen=True)
class _LiteralState(MachineState):
    phase: str = "unary"   # unary | payload
    want: int = 0
    got: tuple = ()

    def feed(self, bit):
        if self.phase == "unary":
            if bit == "1":
                return _MORE, replace(self, want=self.want + 1), 0
            if self.want == 0:
                return _HALT, "", 0
            return _MORE, replace(self, phase="payload"), 0
        got = self.got + (bit,)
        if len(got) == self.want:
            out = "".join(got)
            return _HALT, out, len(out)
        return _MORE, replace(self, got=got), 0


LITERAL_MACHINE = RegisteredMachine("literal", _LiteralState)


# ---------------------------------------------------------------------------
# run-length machine: chunks 1^m || 0 || b append m copies of b; a bare 0 halts


@dataclass(frozen=True)
class _RunLengthState(MachineState):
    phase: str = "count"   # count | bit
    count: int = 0
    out: str = ""

    def feed(self, bit):
        if self.phase == "count":
            if bit == "1":
                return _MORE, replace(self, count=self.count + 1), 0
            if self.count == 0:
                return _HALT, self.out, len(self.out)
            return _MORE, replace(self, phase="bit"), 0
        run = bit * self.count
        return _MORE, _RunLengthState("count", 0, self.out + run), self.count


RUN_LENGTH_MACHINE = RegisteredMachine("run-length", _RunLengthState)


# ---------------------------------------------------------------------------
# Shannon-Fano coding and the decoding machine for a sampler's distribution


def codeword_length(p: Fraction) -> int:
    """floor(log2(1/p)) + 1; the strict-bound code length."""
    return floor_log2(1 / p) + 1


@dataclass(frozen=True)
class PrefixCode:
    """Shannon-Fano code: codewords from truncated cumulative expansions."""

    codeword: dict
    source: ExactDistribution

    def decode_map(self) -> dict:
        return {c: x for x, c in self.codeword.items()}


def shannon_fano(dist: ExactDistribution) -> PrefixCode:
    """Codewords by descending-probability cumulative truncation.

    Sort the masses in descending order (ties broken lexicographically on
    the source string), accumulate the probabilities that sort strictly
    before each point, and truncate the binary expansion of the cumulative
    value to floor(log2(1/p)) + 1 bits.  The resulting codeword set is
    prefix-free and every length sits in (log2(1/p), log2(1/p) + 1].
    """
    order = sorted(dist.items(), key=lambda kv: (-kv[1], kv[0]))
    codeword = {}
    cumulative = Fraction(0)
    for x, p in order:
        codeword[x] = binary_digits(cumulative, codeword_length(p))
        cumulative += p
    return PrefixCode(codeword=codeword, source=dist)


def _binary_rep(n: int) -> Bits:
    return format(n, "b")


@dataclass(frozen=True)
class _CodingState(MachineState):
    """Reads 1^len || 0 || lam-binary || codeword, outputs the decoded string.

    The machine embeds a sampler; after decoding the security parameter it
    charges the full seed-enumeration cost of building the distribution
    table and its code, then walks the code tree bit by bit.  Inputs whose
    read prefix cannot extend to a codeword reject (the machine would scan
    forever), so the machine contributes no valid program for strings
    outside the support.
    """

    sampler: SeededSampler
    max_enumeration: int
    phase: str = "unary"   # unary | lam | code
    want: int = 0
    lam_bits: str = ""
    prefix: str = ""
    decode: tuple = ()     # (decode_map dict,) once built

    def _enter_code(self, lam_bits):
        lam = bits_to_int(lam_bits)
        if lam <= 0 or _binary_rep(lam) != lam_bits:
            return _REJECT, None, 0
        space = self.sampler.seed_space(lam)
        if space > self.max_enumeration:
            return _REJECT, None, 0
        dist = exact_pmf(self.sampler, lam, self.max_enumeration)
        table = shannon_fano(dist).decode_map()
        # brute-force table build: one pass over the seed space plus the sort
        cost = space * (self.sampler.out_len(lam) + 1) + len(table)
        state = replace(self, phase="code", lam_bits=lam_bits, decode=(table,))
        return _MORE, state, cost

    def feed(self, bit):
        if self.phase == "unary":
            if bit == "1":
                return _MORE, replace(self, want=self.want + 1), 0
            if self.want == 0:
                return _REJECT, None, 0
            return _MORE, replace(self, phase="lam"), 0
        if self.phase == "lam":
            lam_bits = self.lam_bits + bit
            if len(lam_bits) < self.want:
                return _MORE, replace(self, lam_bits=lam_bits), 0
            return self._enter_code(lam_bits)
        table = self.decode[0]
        prefix = self.prefix + bit
        hit = table.get(prefix)
        if hit is not None:
            return _HALT, hit, len(hit)
        if any(c.startswith(prefix) for c in table):
            return _MORE, replace(self, prefix=prefix), 0
        return _REJECT, None, 0


def coding_machine(sampler: SeededSampler,
                   max_enumeration: int = 1 << 20) -> RegisteredMachine:
    """Decoding machine for the Shannon-Fano code of a sampler's pmf.

    Registering it in the universal machine makes
    K^t(x) <= floor(log2(1/p_x)) + 1 + header bits for every x in the
    support at the addressed security parameter.
    """
    return RegisteredMachine(
        name=f"code[{sampler.id}]",
        start=lambda: _CodingState(sampler=sampler, max_enumeration=max_enumeration),
    )


def coding_program(machine_index: int, lam: int, codeword: Bits) -> Bits:
    """The program 1^n||0 || 1^|lam|||0||lam || codeword for a coding machine."""
    lam_bits = _binary_rep(lam)
    return "1" * machine_index + "0" + "1" * len(lam_bits) + "0" + lam_bits + codeword


def coding_header_cost(machine_index: int, lam: int) -> int:
    """Program bits spent before the codeword, plus the Shannon-Fano +1.

    K^t(x) <= log2(1/p_x) + coding_header_cost(...) for supported x; this is
    the concrete constant the asymptotic statement hides.
    """
    lam_bits = _binary_rep(lam)
    return (machine_index + 1) + (2 * len(lam_bits) + 1) + 1


# ---------------------------------------------------------------------------
# the universal machine


@dataclass(frozen=True)
class UniversalMachine:
    """Interprets 1^n || 0 || p by running registry entry n on p."""

    registry: tuple[RegisteredMachine, ...]

    def extended(self, *machines: RegisteredMachine) -> "UniversalMachine":
        return UniversalMachine(self.registry + tuple(machines))

    def index_of(self, name: str) -> int:
        for i, m in enumerate(self.registry, start=1):
            if m.name == name:
                return i
        raise KeyError(name)


def default_universal_machine() -> UniversalMachine:
    return UniversalMachine((LITERAL_MACHINE, RUN_LENGTH_MACHINE))


@dataclass(frozen=True)
class _UniversalState(MachineState):
    registry: tuple
    count: int = 0
    inner: MachineState | None = None

    def feed(self, bit):
        if self.inner is None:
            if bit == "1":
                if self.count + 1 > len(self.registry):
                    return _REJECT, None, 0
                return _MORE, replace(self, count=self.count + 1), 0
            if self.count == 0:
                return _REJECT, None, 0
            machine = self.registry[self.count - 1]
            inner = machine.start()
            out = inner.halts_empty()
            if out is not None:
                return _HALT, out, len(out)
            return _MORE, replace(self, inner=inner), 0
        kind, payload, cost = self.inner.feed(bit)
        if kind == _MORE:
            return _MORE, replace(self, inner=payload), cost
        return kind, payload, cost


def universal_start(u: UniversalMachine) -> MachineState:
    return _UniversalState(registry=u.registry)


# ---------------------------------------------------------------------------
# running programs and enumerating valid ones


def run_program(u: UniversalMachine, program: Bits, budget: int):
    """Run a program on U under a step budget.

    Returns the output bit string when the program is valid within budget
    (machine halts with every program bit consumed, none beyond), the
    NON_HALTING marker when the budget runs out first, and INVALID_PROGRAM
    when the head over- or under-consumes.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    state = universal_start(u)
    steps = 0
    pos = 0
    n = len(program)
    while True:
        # machine requests the next bit
        if pos == n:
            # a further read over-consumes; rejecting machines read forever
            return INVALID_PROGRAM if steps < budget else NON_HALTING
        if steps + 1 > budget:
            return NON_HALTING
        bit = program[pos]
        pos += 1
        steps += 1
        kind, payload, cost = state.feed(bit)
        steps += cost
        if steps > budget:
            return NON_HALTING
        if kind == _HALT:
            return payload if pos == n else INVALID_PROGRAM
        if kind == _REJECT:
            # reads the rest of the program, then one bit too many
            remaining = n - pos
            return INVALID_PROGRAM if steps + remaining < budget else NON_HALTING
        state = payload


def enumerate_valid_programs(u: UniversalMachine, max_len: int, budget: int,
                             max_programs: int = 1 << 24) -> Iterator[tuple[Bits, Bits]]:
    """Yield (program, output) for every valid program of length <= max_len.

    Depth-first over program prefixes; a prefix is abandoned as soon as the
    machine rejects or the budget dies, so the walk touches only viable
    prefixes instead of all 2^(max_len+1) strings.  Results agree exactly
    with filtering `run_program` over all strings (tested property).
    """
    if 1 << (max_len + 1) > max_programs:
        raise BudgetExceeded(
            f"program space 2^{max_len + 1} exceeds cap {max_programs}")
    # stack entries: (prefix, state, steps)
    stack = [("", universal_start(u), 0)]
    while stack:
        prefix, state, steps = stack.pop()
        if len(prefix) == max_len or steps + 1 > budget:
            continue
        for bit in ("1", "0"):
            kind, payload, cost = state.feed(bit)
            nsteps = steps + 1 + cost
            if nsteps > budget:
                continue
            if kind == _HALT:
                yield prefix + bit, payload
            elif kind == _MORE:
                stack.append((prefix + bit, payload, nsteps))


# ---------------------------------------------------------------------------
# K^t and Kraft sums


@dataclass(frozen=True)
class KtResult:
    """Shortest-program search result: value, witness, and the budget used."""

    value: int | object       # int or INF marker
    witness: Bits | None
    budget: int


def default_search_cap(x: Bits, u: UniversalMachine) -> int:
    """2|x| + literal header + 2: always covers the literal encoding.

    Without a literal machine in the registry, falls back to the same
    formula with the deepest possible registry header.
    """
    try:
        header = u.index_of("literal") + 1
    except KeyError:
        header = len(u.registry) + 1
    return 2 * len(x) + header + 2


DEFAULT_BUDGET = 10 ** 6


def kt_complexity(u: UniversalMachine, x: Bits, budget: int = DEFAULT_BUDGET,
                  max_len: int | None = None,
                  max_programs: int = 1 << 24) -> KtResult:
    """Length of the shortest valid program producing x within the budget.

    The search is exhaustive over programs in length-then-lexicographic
    order up to max_len; the witness is the first hit in that order.  With
    the literal machine registered and max_len at its default, the value is
    always finite.
    """
    if max_len is None:
        max_len = default_search_cap(x, u)
    best: tuple[int, Bits] | None = None
    for program, out in enumerate_valid_programs(u, max_len, budget, max_programs):
        if out != x:
            continue
        key = (len(program), program)
        if best is None or key < best:
            best = key
    if best is None:
        return KtResult(value=INF, witness=None, budget=budget)
    return KtResult(value=best[0], witness=best[1], budget=budget)


def minimal_witnesses(u: UniversalMachine, xs: Iterable[Bits],
                      budget: int = DEFAULT_BUDGET,
                      max_len: int | None = None,
                      max_programs: int = 1 << 24) -> dict:
    """Shortest witness per target string, from one shared enumeration."""
    xs = list(xs)
    if max_len is None:
        max_len = max(default_search_cap(x, u) for x in xs)
    wanted = set(xs)
    best: dict = {}
    for program, out in enumerate_valid_programs(u, max_len, budget, max_programs):
        if out not in wanted:
            continue
        key = (len(program), program)
        if out not in best or key < best[out]:
            best[out] = key
    return {x: KtResult(value=best[x][0], witness=best[x][1], budget=budget)
            for x in xs if x in best}


def kt_table(u: UniversalMachine, width: int, budget: int = DEFAULT_BUDGET,
             **kw) -> dict:
    """K^t results for every string of exactly `width` bits."""
    return minimal_witnesses(u, all_bitstrings(width), budget, **kw)


def kraft_sum(programs: Iterable[Bits]) -> Fraction:
    """Sum of 2^-|p| over the given programs, exact.

    At most 1 on any prefix-free set; values above 1 witness that the set
    is not prefix-free.
    """
    return sum((Fraction(1, 2 ** len(p)) for p in programs), Fraction(0))


def is_prefix_free(strings: Iterable[Bits]) -> bool:
    ordered = sorted(set(strings))
    return not any(b.startswith(a)
                   for a, b in zip(ordered, ordered[1:]))
