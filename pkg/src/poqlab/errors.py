"""Shared exception types.

Everything in this package is exact; errors signal contract violations or
enumeration spaces that exceed the configured desk-scale budgets, never
numerical trouble.
"""


class PoqlabError(Exception):
    """Base class for package errors."""


class BudgetExceeded(PoqlabError):
    """An enumeration (seed space, program space, VM steps) exceeds its cap."""


class MalformedTuple(PoqlabError):
    """A support element does not split into the expected blocks."""


class WidthViolation(PoqlabError):
    """A party emitted a message of the wrong declared width."""


class NotNonInteractive(PoqlabError):
    """Operation requires a scheme with zero interaction rounds."""


class NotPublicCoin(PoqlabError):
    """Operation requires a public-coin scheme."""


class EmptyPreimage(PoqlabError):
    """An inverter was asked for a preimage of a non-image point."""


class EmptyAcceptingSet(PoqlabError):
    """A soundness audit found a prover that is never accepted."""


class InverterRangeError(PoqlabError):
    """An inverter emitted a structurally malformed (index, seed) pair."""


class NoFeasibleLambda(PoqlabError):
    """No security parameter fits the requested input length."""


class ConfigError(PoqlabError):
    """An experiment configuration failed validation."""


class IoError(PoqlabError):
    """Report emission failed."""
