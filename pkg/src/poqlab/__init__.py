"""poqlab: an exact, desk-scale laboratory for proof-of-quantumness
protocols, one-way puzzles, security games, and time-bounded prefix
Kolmogorov complexity.

Every probability is an exact rational obtained by exhaustive enumeration
of declared seed spaces; every inequality that the theory promises is
checked as an exact (or high-precision, one-sided) comparison on small,
fully enumerable instances.
"""

__version__ = "0.1.0"
