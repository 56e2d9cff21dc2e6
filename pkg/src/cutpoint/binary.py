"""Binary automata: 2x2 stochastic matrices that read off binary fractions.

A bit string ``u`` has an integer value ``(u)_2`` and a fractional value
``0.u = (u)_2 / 2**len(u)``.  The matrix ``B(u)`` attached to ``u`` is a
2x2 row-stochastic matrix whose top-right entry is ``0.u`` and whose rows
differ by exactly ``1 / 2**len(u)``.  Its key feature is the reversed
multiplication law::

    B(u) @ B(v) == B(v + u)

so a chain of matrices read left to right accumulates the concatenation of
their strings right to left.  ``fijalkow_automaton`` is a 3-state variant
that funnels mass ``0.u`` into an absorbing accept state in a single step.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import Mat

__all__ = [
    "B",
    "bin_value",
    "bin_fraction",
    "binary_matrix",
    "fijalkow_automaton",
]


def _check_bits(u: str) -> str:
    if not isinstance(u, str):
        raise TypeError(f"expected a bit string, got {type(u).__name__}")
    bad = set(u) - {"0", "1"}
    if bad:
        raise ValueError(f"bit string may contain only '0' and '1', got {sorted(bad)}")
    return u


def bin_value(u: str) -> int:
    """Value of ``u`` read as a binary numeral; the empty string has value 0."""
    _check_bits(u)
    return int(u, 2) if u else 0


def bin_fraction(u: str) -> Fraction:
    """The binary fraction ``0.u``, i.e. ``bin_value(u) / 2**len(u)``."""
    _check_bits(u)
    if not u:
        return Fraction(0)
    return Fraction(int(u, 2), 2 ** len(u))


def binary_matrix(u: str) -> Mat:
    """The 2x2 row-stochastic matrix attached to the bit string ``u``.

    ``[[1 - 0.u, 0.u], [1 - 0.u - h, 0.u + h]]`` with ``h = 1 / 2**len(u)``.
    The empty string maps to the identity so that the multiplication law
    holds with empty factors.
    """
    _check_bits(u)
    if not u:
        return Mat.identity(2)
    n = int(u, 2)
    d = 2 ** len(u)
    return Mat(
        [
            [Fraction(d - n, d), Fraction(n, d)],
            [Fraction(d - n - 1, d), Fraction(n + 1, d)],
        ]
    )


B = binary_matrix


def fijalkow_automaton(u: str) -> Mat:
    """3-state one-shot acceptor for the probability ``0.u``.

    State order is (start, accept, reject).  From the start state the
    automaton stays put with probability ``1 / 2**len(u)``, moves to the
    absorbing accept state with probability ``0.u``, and to the absorbing
    reject state with the rest.  Reading the same symbol k times therefore
    accumulates accept mass ``0.u * (1 + h + ... + h**(k-1))``, which equals
    the binary fraction of ``u`` repeated k times.
    """
    _check_bits(u)
    if not u:
        raise ValueError("fijalkow_automaton needs a nonempty bit string")
    stay = Fraction(1, 2 ** len(u))
    accept = bin_fraction(u)
    reject = 1 - accept - stay
    # (u)_2 <= 2**len(u) - 1, so accept + stay <= 1 always.
    assert reject >= 0
    one = Fraction(1)
    zero = Fraction(0)
    return Mat(
        [
            [stay, accept, reject],
            [zero, one, zero],
            [zero, zero, one],
        ]
    )
