"""Bit strings, exact distributions, seeded samplers, and distance calculus.

All probabilities in this package are exact rationals (`fractions.Fraction`).
Distributions are explicit finite probability mass functions.  "Unbounded"
parties are realized by exhaustive enumeration of a declared, finite seed
space, so every game value downstream is an exact rational, never a Monte
Carlo estimate.

Bit strings are plain Python ``str`` objects over the alphabet ``{'0','1'}``
(the empty string is the identity for concatenation).  Distribution support
elements may also be tuples of bit strings; a tuple plays the role of a
fixed-width concatenation with the widths carried by the components.

Logarithmic quantities (KL divergence, Pinsker bounds) are irrational, so
they are computed with mpmath at high precision and compared one-sidedly
with a documented slack of 2**-40 (`CMP_SLACK`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import mpmath

from .errors import BudgetExceeded, MalformedTuple

Bits = str

#: working precision (bits) for irrational quantities
MP_PREC = 200
#: one-sided comparison slack for irrational quantities, per the design
#: decision that log-valued checks carry a documented 2^-40 tolerance
CMP_SLACK = mpmath.mpf(2) ** -40

#: default cap on any single enumeration (seed spaces, joint seed products)
DEFAULT_MAX_ENUMERATION = 1 << 22

ZERO = Fraction(0)
ONE = Fraction(1)


def check_bits(s: Bits) -> Bits:
    if any(c not in "01" for c in s):
        raise ValueError(f"not a bit string: {s!r}")
    return s


def int_to_bits(value: int, width: int) -> Bits:
    """Big-endian fixed-width encoding; width 0 gives the empty string."""
    if value < 0 or value >= (1 << width):
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def bits_to_int(bits: Bits) -> int:
    return int(bits, 2) if bits else 0


def all_bitstrings(width: int) -> Iterable[Bits]:
    for v in range(1 << width):
        yield format(v, f"0{width}b") if width else ""


def binary_digits(x: Fraction, count: int) -> Bits:
    """First `count` digits of the binary expansion of x in [0, 1)."""
    if not 0 <= x < 1:
        raise ValueError("expansion defined for [0, 1)")
    out = []
    for _ in range(count):
        x *= 2
        d = int(x)  # floor; x < 2
        out.append("01"[d])
        x -= d
    return "".join(out)


def floor_log2(x: Fraction) -> int:
    """Largest k with 2**k <= x, for x > 0.  Exact."""
    if x <= 0:
        raise ValueError("floor_log2 needs x > 0")
    k = x.numerator.bit_length() - x.denominator.bit_length()
    # 2**k is within a factor of 2 of x; fix up exactly
    if Fraction(2) ** k > x:
        k -= 1
    if Fraction(2) ** (k + 1) <= x:
        k += 1
    return k


def mpf_of(x: Fraction) -> mpmath.mpf:
    with mpmath.workprec(MP_PREC):
        return mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)


def leq_with_slack(left, right) -> bool:
    """One-sided `left <= right` with the documented 2^-40 slack.

    Exact rationals may be passed on either side; only genuinely irrational
    quantities should rely on the slack.
    """
    with mpmath.workprec(MP_PREC):
        lo = mpf_of(left) if isinstance(left, Fraction) else mpmath.mpf(left)
        hi = mpf_of(right) if isinstance(right, Fraction) else mpmath.mpf(right)
        return bool(lo <= hi + CMP_SLACK)


class Infinite:
    """Singleton marker for an infinite divergence / complexity value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Infinite"


INF = Infinite()


@dataclass(frozen=True)
class ExactDistribution:
    """Finite pmf with exact rational masses summing to exactly 1.

    The support contains exactly the points of positive mass; zero-mass
    entries are dropped at construction.
    """

    mass: Mapping[object, Fraction]

    def __post_init__(self):
        cleaned = {}
        total = ZERO
        for x, p in self.mass.items():
            p = Fraction(p)
            if p < 0:
                raise ValueError(f"negative mass at {x!r}")
            if p > 0:
                cleaned[x] = p
                total += p
        if total != 1:
            raise ValueError(f"masses sum to {total}, not 1")
        object.__setattr__(self, "mass", cleaned)

    @property
    def support(self) -> frozenset:
        return frozenset(self.mass)

    def prob(self, x) -> Fraction:
        return self.mass.get(x, ZERO)

    def items(self):
        return self.mass.items()

    def expect(self, predicate: Callable[[object], bool]) -> Fraction:
        """Exact probability of the event defined by `predicate`."""
        return sum((p for x, p in self.mass.items() if predicate(x)), ZERO)

    def map(self, f: Callable[[object], object]) -> "ExactDistribution":
        """Pushforward under a deterministic map."""
        out: dict = {}
        for x, p in self.mass.items():
            y = f(x)
            out[y] = out.get(y, ZERO) + p
        return ExactDistribution(out)

    def compose(self, kernel: Callable[[object], "ExactDistribution"]) -> "ExactDistribution":
        """Pushforward under a stochastic kernel (exact convolution)."""
        out: dict = {}
        for x, p in self.mass.items():
            for y, q in kernel(x).items():
                out[y] = out.get(y, ZERO) + p * q
        return ExactDistribution(out)

    def condition(self, predicate: Callable[[object], bool]) -> "ExactDistribution":
        """Renormalize onto the event; raises ZeroDivisionError on mass 0."""
        total = self.expect(predicate)
        return ExactDistribution(
            {x: p / total for x, p in self.mass.items() if predicate(x)}
        )

    def __eq__(self, other):
        return isinstance(other, ExactDistribution) and dict(self.mass) == dict(other.mass)

    def __hash__(self):
        return hash(frozenset(self.mass.items()))


def point_mass(x) -> ExactDistribution:
    return ExactDistribution({x: ONE})


def uniform_over(xs: Iterable[object]) -> ExactDistribution:
    xs = list(xs)
    if not xs:
        raise ValueError("uniform over empty set")
    p = Fraction(1, len(xs))
    out: dict = {}
    for x in xs:
        out[x] = out.get(x, ZERO) + p
    return ExactDistribution(out)


def uniform_bits(width: int) -> ExactDistribution:
    return uniform_over(all_bitstrings(width))


def mix(parts: Iterable[tuple[Fraction, ExactDistribution]]) -> ExactDistribution:
    """Exact convex mixture; weights must sum to 1."""
    out: dict = {}
    for w, d in parts:
        for x, p in d.items():
            out[x] = out.get(x, ZERO) + Fraction(w) * p
    return ExactDistribution(out)


def product(*dists: ExactDistribution, joiner=None) -> ExactDistribution:
    """Independent product.  Components are joined by string concatenation
    by default; pass `joiner` to build tuples or custom encodings."""
    if joiner is None:
        joiner = "".join
    acc: list[tuple[tuple, Fraction]] = [((), ONE)]
    for d in dists:
        acc = [(parts + (x,), p * q) for parts, p in acc for x, q in d.items()]
    out: dict = {}
    for parts, p in acc:
        key = joiner(parts)
        out[key] = out.get(key, ZERO) + p
    return ExactDistribution(out)


def power(d: ExactDistribution, n: int) -> ExactDistribution:
    """n-fold independent product over bit strings, concatenated."""
    return product(*([d] * n))


@dataclass(frozen=True)
class SeededSampler:
    """Deterministic map (security parameter, seed) -> bit string.

    The seed ranges over ``range(seed_space(lam))`` with the uniform
    measure, so the output distribution is obtained exactly by seed
    enumeration.  Purely dyadic samplers (seed space a power of two) carry
    ``seed_len`` and may be driven from a raw bit-string seed; the integer
    generalization lets uniform choices over non-dyadic sets (preimage
    sampling, coordinate choice among N alternatives) stay exact.
    """

    id: str
    seed_space: Callable[[int], int]
    out_len: Callable[[int], int]
    eval: Callable[[int, int], Bits]
    seed_len: Callable[[int], int] | None = None

    def eval_bits(self, lam: int, seed_bits: Bits) -> Bits:
        if self.seed_len is None:
            raise ValueError(f"sampler {self.id} has no bit-seed form")
        want = self.seed_len(lam)
        if len(seed_bits) != want:
            raise ValueError(f"seed must have {want} bits")
        return self.eval(lam, bits_to_int(seed_bits))


def bit_sampler(id: str, seed_len: Callable[[int], int],
                out_len: Callable[[int], int],
                eval_bits: Callable[[int, Bits], Bits]) -> SeededSampler:
    """Sampler declared over bit-string seeds of length seed_len(lam)."""
    def ev(lam: int, seed: int) -> Bits:
        return eval_bits(lam, int_to_bits(seed, seed_len(lam)))
    return SeededSampler(
        id=id,
        seed_space=lambda lam: 1 << seed_len(lam),
        out_len=out_len,
        eval=ev,
        seed_len=seed_len,
    )


def exact_pmf(sampler: SeededSampler, lam: int,
              max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> ExactDistribution:
    """Exact output pmf by full seed enumeration.

    mass(y) = |{seeds s : eval(lam, s) = y}| / seed_space(lam).
    """
    space = sampler.seed_space(lam)
    if space > max_enumeration:
        raise BudgetExceeded(
            f"seed space {space} of {sampler.id} exceeds cap {max_enumeration}")
    want = sampler.out_len(lam)
    counts: dict = {}
    for s in range(space):
        y = sampler.eval(lam, s)
        if len(y) != want:
            raise ValueError(
                f"sampler {sampler.id} emitted {len(y)} bits, declared {want}")
        counts[y] = counts.get(y, 0) + 1
    return ExactDistribution({y: Fraction(c, space) for y, c in counts.items()})


def statistical_distance(p: ExactDistribution, q: ExactDistribution) -> Fraction:
    """Total variation distance (1/2) * sum |p - q|, exact."""
    total = ZERO
    for x in p.support | q.support:
        total += abs(p.prob(x) - q.prob(x))
    return total / 2


def kl_divergence(p: ExactDistribution, q: ExactDistribution):
    """KL divergence in bits, or INF when supp(p) is not within supp(q).

    Returned as a high-precision mpf; terms with p(x) = 0 contribute 0.
    """
    if not p.support <= q.support:
        return INF
    with mpmath.workprec(MP_PREC):
        total = mpmath.mpf(0)
        for x, px in p.items():
            total += mpf_of(px) * mpmath.log(mpf_of(px / q.prob(x)), 2)
        return total


def pinsker_bound(p: ExactDistribution, q: ExactDistribution):
    """sqrt((ln 2 / 2) * KL(p || q)), the Pinsker upper bound on SD."""
    kl = kl_divergence(p, q)
    if kl is INF:
        return INF
    with mpmath.workprec(MP_PREC):
        return mpmath.sqrt(mpmath.log(2) / 2 * max(kl, mpmath.mpf(0)))


def split_blocks(x, n_blocks: int) -> tuple:
    """Split a support element into n equal blocks.

    Tuples must already have n components; bit strings are cut into n
    equal-width slices.
    """
    if isinstance(x, tuple):
        if len(x) != n_blocks:
            raise MalformedTuple(f"tuple {x!r} does not have {n_blocks} blocks")
        return x
    if len(x) % n_blocks:
        raise MalformedTuple(
            f"length {len(x)} not divisible into {n_blocks} equal blocks")
    w = len(x) // n_blocks
    return tuple(x[i * w:(i + 1) * w] for i in range(n_blocks))


def marginal(p: ExactDistribution, i: int, n_blocks: int) -> ExactDistribution:
    """Exact i-th coordinate marginal (1-based) of a tuple distribution."""
    if not 1 <= i <= n_blocks:
        raise ValueError(f"coordinate {i} out of range 1..{n_blocks}")
    return p.map(lambda x: split_blocks(x, n_blocks)[i - 1])


def averaged_marginal(p: ExactDistribution, n_blocks: int) -> ExactDistribution:
    """Uniform mixture of the coordinate marginals (exact)."""
    w = Fraction(1, n_blocks)
    return mix((w, marginal(p, i, n_blocks)) for i in range(1, n_blocks + 1))
