"""Exact-rational toolkit for probabilistic finite automata.

Reduction compilers from word-matching and machine-halting problems to
probabilistic finite automata, plus exact acceptance-probability analysis
and bounded cutpoint search.  All arithmetic is done with ``fractions.Fraction``;
no floating point is used anywhere in the computational core.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .linalg import Mat, Vec, chain, rat, rat_str

__all__ = [
    "__version__",
    "Mat",
    "Vec",
    "chain",
    "rat",
    "rat_str",
]
