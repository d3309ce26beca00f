"""The default corpus: named samplers, functions, schemes, and puzzles.

Everything here is desk-scale by construction: seed spaces of a few bits,
outputs of one or two bits, so joint enumerations stay in the thousands.
The ids are the handles used by the command line and the suite runner.
"""

from __future__ import annotations

from fractions import Fraction

from .core import SeededSampler, bit_sampler
from .games import (
    Adversary,
    FunctionFamily,
    OneWayPuzzle,
    canonical_inverter,
    fixed_adversary,
    noisy_inverter,
    owf_to_owpuzz,
)
from .protocols import IVPoQ, Party, coin_party, sampler_party, silent_party
from .zk import CommitScheme, toy_extractable_commitment

F = Fraction


def _uniform1() -> SeededSampler:
    return bit_sampler("uniform1", lambda lam: 1, lambda lam: 1,
                       lambda lam, seed: seed)


def _uniform2() -> SeededSampler:
    return bit_sampler("uniform2", lambda lam: 2, lambda lam: 2,
                       lambda lam, seed: seed)


def _const0() -> SeededSampler:
    return bit_sampler("const0", lambda lam: 0, lambda lam: 1,
                       lambda lam, seed: "0")


def _majority3() -> SeededSampler:
    return bit_sampler("majority3", lambda lam: 3, lambda lam: 1,
                       lambda lam, seed: "1" if seed.count("1") >= 2 else "0")


def _biased14() -> SeededSampler:
    return bit_sampler("biased14", lambda lam: 2, lambda lam: 1,
                       lambda lam, seed: "1" if seed == "11" else "0")


def _twopoint2() -> SeededSampler:
    # two-point distribution over 2-bit strings, masses 3/4 and 1/4
    return bit_sampler("twopoint2", lambda lam: 2, lambda lam: 2,
                       lambda lam, seed: "11" if seed == "11" else "00")


def _geometric2() -> SeededSampler:
    # geometric-like over 2-bit strings: 1/2, 1/4, 1/8, 1/8
    table = {"000": "00", "001": "00", "010": "00", "011": "00",
             "100": "01", "101": "01", "110": "10", "111": "11"}
    return bit_sampler("geometric2", lambda lam: 3, lambda lam: 2,
                       lambda lam, seed: table[seed])


SAMPLERS = {
    s().id: s
    for s in (_uniform1, _uniform2, _const0, _majority3, _biased14,
              _twopoint2, _geometric2)
}


def sampler_by_id(id: str) -> SeededSampler:
    return SAMPLERS[id]()


def _identity() -> FunctionFamily:
    return FunctionFamily("identity", lambda lam: lam, lambda lam, x: x,
                          length_generic=True)


def _const0_fn() -> FunctionFamily:
    return FunctionFamily("const0", lambda lam: lam,
                          lambda lam, x: "0" * len(x), length_generic=True)


def _xorfold() -> FunctionFamily:
    return FunctionFamily("xorfold", lambda lam: lam,
                          lambda lam, x: str(x.count("1") % 2),
                          length_generic=True)


def _droplast() -> FunctionFamily:
    return FunctionFamily("droplast", lambda lam: lam,
                          lambda lam, x: x[:-1] if x else "",
                          length_generic=True)


def _rotate() -> FunctionFamily:
    return FunctionFamily("rotate", lambda lam: lam,
                          lambda lam, x: x[1:] + x[:1] if x else "",
                          length_generic=True)


FUNCTIONS = {
    f().id: f
    for f in (_identity, _const0_fn, _xorfold, _droplast, _rotate)
}


def function_by_id(id: str) -> FunctionFamily:
    return FUNCTIONS[id]()


def inverter_by_kind(kind: str, f: FunctionFamily, lam: int) -> Adversary:
    """The three inverter flavors used across the reduction audits."""
    if kind == "canonical":
        return canonical_inverter(f, lam)
    if kind.startswith("noisy"):
        rate = F(kind.split(":", 1)[1]) if ":" in kind else F(1, 4)
        return noisy_inverter(f, lam, rate)
    if kind == "fixed":
        return fixed_adversary("fixed", "0" * f.in_len(lam))
    raise KeyError(f"unknown inverter kind {kind!r}")


def first_bit_zero_scheme() -> IVPoQ:
    prover = sampler_party(_uniform1(), id="P")

    def verifier2(lam, tau):
        return tau.messages()[0][0] == "0"

    return IVPoQ("first-bit-zero", prover, silent_party("V1"), verifier2,
                 lambda lam: F(1, 2), lambda lam: F(1, 2), public_coin=True)


def echo_scheme(rounds: int = 1) -> IVPoQ:
    """Public-coin mock: accept iff every reply equals its coin."""
    verifier1 = coin_party("V1", lambda lam: (1,) * rounds)
    prover = Party("P", lambda lam: 1, lambda lam: rounds,
                   lambda lam, i: 1, lambda lam, seed, msgs, sent: msgs[-1])

    def verifier2(lam, tau):
        msgs = tau.messages()
        return all(msgs[2 * i + 1] == msgs[2 * i] for i in range(rounds))

    return IVPoQ(f"echo-{rounds}r", prover, verifier1, verifier2,
                 lambda lam: F(1), lambda lam: F(1, 2), public_coin=True)


def coin_pair_parties(rounds: int):
    """Uniform coin challenger and prover, the all-random toy protocol."""
    return (coin_party("C", lambda lam: (1,) * rounds),
            coin_party("A", lambda lam: (1,) * rounds))


def echo_pair_parties(rounds: int):
    """Coin challenger with the deterministic echoing prover."""
    challenger = coin_party("C", lambda lam: (1,) * rounds)
    echo = Party("A", lambda lam: 1, lambda lam: rounds, lambda lam, i: 1,
                 lambda lam, seed, msgs, sent: msgs[-1])
    return challenger, echo


SCHEMES = {
    "first-bit-zero": first_bit_zero_scheme,
    "echo-1r": lambda: echo_scheme(1),
    "echo-2r": lambda: echo_scheme(2),
}


def scheme_by_id(id: str) -> IVPoQ:
    return SCHEMES[id]()


PUZZLES = {
    "owpuzz[identity]": lambda: owf_to_owpuzz(_identity()),
    "owpuzz[xorfold]": lambda: owf_to_owpuzz(_xorfold()),
    "owpuzz[droplast]": lambda: owf_to_owpuzz(_droplast()),
}


def puzzle_by_id(id: str) -> OneWayPuzzle:
    return PUZZLES[id]()


COMMITS = {
    "com[identity]": lambda: toy_extractable_commitment(
        _identity(), lambda lam: 1, lambda lam: 1),
    "com[rotate]": lambda: toy_extractable_commitment(
        _rotate(), lambda lam: 1, lambda lam: 2),
    "com[drop-msg]": lambda: toy_extractable_commitment(
        FunctionFamily("drop-msg", lambda lam: lam,
                       lambda lam, x: x[1:], length_generic=True),
        lambda lam: 1, lambda lam: 1),
}


def commit_by_id(id: str) -> CommitScheme:
    return COMMITS[id]()
