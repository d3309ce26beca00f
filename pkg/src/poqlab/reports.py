"""Report records for game evaluations and inequality audits.

Every audit in the package returns a GameReport: a property tag naming the
mathematical statement being exercised, the exact quantities that were
computed, and a list of checks whose pass flags are recomputable from the
recorded values.

Rendering is canonical so identical runs serialize byte-identically:
rationals as "num/den" strings, high-precision reals as [lo, hi] decimal
intervals widened by the package-wide comparison slack, integers bare.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .core import CMP_SLACK, MP_PREC, Infinite, mpf_of

_REAL_DIGITS = 30


def render_value(value) -> object:
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, Infinite):
        return "inf"
    if isinstance(value, mpmath.mpf):
        with mpmath.workprec(MP_PREC):
            lo = mpmath.nstr(value - CMP_SLACK, _REAL_DIGITS)
            hi = mpmath.nstr(value + CMP_SLACK, _REAL_DIGITS)
        return [lo, hi]
    if isinstance(value, str):
        return value
    raise TypeError(f"no canonical rendering for {type(value)}")


def parse_value(rendered):
    """Inverse of render_value, up to interval widening."""
    if isinstance(rendered, (bool, int)):
        return rendered
    if isinstance(rendered, list):
        with mpmath.workprec(MP_PREC):
            return (mpmath.mpf(rendered[0]), mpmath.mpf(rendered[1]))
    if rendered == "inf":
        return Infinite()
    if isinstance(rendered, str) and "/" in rendered:
        num, den = rendered.split("/")
        return Fraction(int(num), int(den))
    return rendered


def _as_interval(value):
    if isinstance(value, Infinite):
        return None
    if isinstance(value, Fraction):
        m = mpf_of(value)
        return (m, m)
    if isinstance(value, int):
        return (mpmath.mpf(value), mpmath.mpf(value))
    if isinstance(value, mpmath.mpf):
        return (value - CMP_SLACK, value + CMP_SLACK)
    if isinstance(value, tuple):
        return value
    raise TypeError(f"not comparable: {type(value)}")


def holds(left, right, relation: str) -> bool:
    """Evaluate a recorded comparison.

    Exact values compare exactly; intervals compare one-sidedly, so "<="
    means lower-end(left) <= upper-end(right).  An infinite left never
    satisfies "<="; an infinite right always does.
    """
    if relation == "==":
        return left == right
    if relation == ">=":
        return holds(right, left, "<=")
    if relation != "<=":
        raise ValueError(relation)
    if isinstance(right, Infinite):
        return True
    if isinstance(left, Infinite):
        return False
    if isinstance(left, (int, Fraction)) and isinstance(right, (int, Fraction)):
        return left <= right
    with mpmath.workprec(MP_PREC):
        lo = _as_interval(left)[0]
        hi = _as_interval(right)[1]
        return bool(lo <= hi)


@dataclass(frozen=True)
class Check:
    description: str
    relation: str
    left: object
    right: object
    passed: bool

    def as_record(self) -> dict:
        return {
            "description": self.description,
            "relation": self.relation,
            "left": render_value(self.left),
            "right": render_value(self.right),
            "pass": self.passed,
        }


@dataclass
class GameReport:
    """Result record of one game or inequality audit."""

    property_tag: str
    inputs: dict = field(default_factory=dict)
    quantities: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def record(self, name: str, value) -> None:
        self.quantities[name] = value

    def check(self, description: str, left, right, relation: str = "<=") -> bool:
        ok = holds(left, right, relation)
        self.checks.append(Check(description, relation, left, right, ok))
        return ok

    def note(self, text: str) -> None:
        self.notes.append(text)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_record(self) -> dict:
        return {
            "property_tag": self.property_tag,
            "inputs": {k: render_value(v) if isinstance(v, (Fraction, mpmath.mpf, Infinite))
                       else v for k, v in sorted(self.inputs.items())},
            "quantities": {k: render_value(v) for k, v in sorted(self.quantities.items())},
            "checks": [c.as_record() for c in self.checks],
            "notes": list(self.notes),
            "pass": self.all_passed,
        }
