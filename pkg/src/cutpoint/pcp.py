"""Post correspondence problems: variants, checking, solving, preprocessing.

An instance is a list of word pairs (v_i, w_i), numbered from 1.  Words are
tuples of symbols; a plain string is treated as a sequence of one-character
symbols, so binary words can be written "0110" while pre-encoding alphabets
(tape symbols, machine states, markers) use explicit symbol tuples.

Variants:

* ``plain``   — a solution is any nonempty index sequence with equal
  forward concatenations.
* ``mpcp``    — the solution must start with index 1, which may not recur.
* ``rmpcp``   — same index constraint, but the words are concatenated in
  reversed order (last-read pair leftmost), so pair 1 ends up rightmost.
  The first pair's words must end with 1 (binary instances), which kills
  the trailing-zeros ambiguity of binary fractions.
* ``twompcp`` — the solution starts with index 1, ends with index 2, and
  uses neither in between; forward concatenation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

Word = tuple[str, ...]
WordLike = Union[str, Sequence[str]]

VARIANTS = ("plain", "mpcp", "rmpcp", "twompcp")


def as_word(x: WordLike) -> Word:
    """Normalize to a tuple of symbols; a string becomes its characters."""
    if isinstance(x, str):
        return tuple(x)
    return tuple(x)


def word_str(w: Word) -> str:
    return "".join(w)


@dataclass(frozen=True)
class PcpInstance:
    pairs: tuple[tuple[Word, Word], ...]
    variant: str = "plain"

    def __post_init__(self):
        object.__setattr__(
            self,
            "pairs",
            tuple((as_word(v), as_word(w)) for v, w in self.pairs),
        )
        if not self.pairs:
            raise ValueError("instance needs at least one pair")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.variant in ("mpcp", "rmpcp", "twompcp") and self.k < 1:
            raise ValueError("mpcp variants need pair 1")
        if self.variant == "twompcp" and self.k < 2:
            raise ValueError("twompcp needs pairs 1 and 2")
        # Binary instances of the reversed variants must have their special
        # pair(s) end in 1: the final bit of the concatenation decides whether
        # binary-fraction equality implies string equality.
        if self.is_binary():
            if self.variant == "rmpcp":
                self._require_final_one(1)
            if self.variant == "twompcp":
                self._require_final_one(2)

    def _require_final_one(self, number: int) -> None:
        v, w = self.pair(number)
        if not v or not w or v[-1] != "1" or w[-1] != "1":
            raise ValueError(
                f"{self.variant} requires pair {number}'s words to end with 1"
            )

    @property
    def k(self) -> int:
        return len(self.pairs)

    def pair(self, number: int) -> tuple[Word, Word]:
        """Pair by 1-based number, matching solution indices."""
        if not 1 <= number <= self.k:
            raise ValueError(f"pair number {number} out of range 1..{self.k}")
        return self.pairs[number - 1]

    def alphabet(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for v, w in self.pairs:
            for s in itertools.chain(v, w):
                seen.setdefault(s)
        return tuple(sorted(seen))

    def is_binary(self) -> bool:
        return all(s in ("0", "1") for s in self.alphabet())

    def max_word_len(self) -> int:
        return max(max(len(v), len(w)) for v, w in self.pairs)


def _check_indices(inst: PcpInstance, sol: Sequence[int]) -> None:
    for a in sol:
        if not isinstance(a, int) or not 1 <= a <= inst.k:
            raise ValueError(f"index {a!r} out of range 1..{inst.k}")


def _variant_ok(inst: PcpInstance, sol: Sequence[int]) -> bool:
    if inst.variant == "plain":
        return len(sol) >= 1
    if inst.variant in ("mpcp", "rmpcp"):
        return len(sol) >= 1 and sol[0] == 1 and 1 not in sol[1:]
    # twompcp
    return (
        len(sol) >= 2
        and sol[0] == 1
        and sol[-1] == 2
        and all(a not in (1, 2) for a in sol[1:-1])
    )


def concatenations(inst: PcpInstance, sol: Sequence[int]) -> tuple[Word, Word]:
    """The two concatenated strings for an index sequence.

    For rmpcp the pairs are concatenated in reversed order, so the first
    index read (pair 1) contributes the rightmost factor.
    """
    _check_indices(inst, sol)
    order = tuple(reversed(sol)) if inst.variant == "rmpcp" else tuple(sol)
    v_cat: list[str] = []
    w_cat: list[str] = []
    for a in order:
        v, w = inst.pair(a)
        v_cat.extend(v)
        w_cat.extend(w)
    return tuple(v_cat), tuple(w_cat)


def check_solution(inst: PcpInstance, sol: Sequence[int]) -> bool:
    """True iff ``sol`` satisfies the variant constraints and the two
    concatenations agree.  Out-of-range indices raise; an empty sequence is
    simply not a solution for plain instances."""
    _check_indices(inst, sol)
    if not _variant_ok(inst, sol):
        if len(sol) == 0:
            return False
        raise ValueError(
            f"index sequence {list(sol)} violates the {inst.variant} constraints"
        )
    v_cat, w_cat = concatenations(inst, sol)
    return v_cat == w_cat


def _search_instance(inst: PcpInstance) -> PcpInstance:
    """rmpcp search reduces to mpcp search on reversed words: reversing every
    factor turns the reversed concatenation into a forward one."""
    if inst.variant != "rmpcp":
        return inst
    return PcpInstance(
        tuple((tuple(reversed(v)), tuple(reversed(w))) for v, w in inst.pairs),
        variant="mpcp",
    )


def brute_solve(inst: PcpInstance, max_len: int) -> Optional[tuple[int, ...]]:
    """Shortest solution with at most ``max_len`` indices, or None.

    Breadth-first over partial index sequences, expanding indices in
    increasing order, so the result is the lexicographically first among the
    shortest solutions.  A branch survives only while one partial
    concatenation is a prefix of the other.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    work = _search_instance(inst)
    variant = work.variant

    def surplus_after(
        surplus: tuple[int, Word], number: int
    ) -> Optional[tuple[int, Word]]:
        """Extend the (side, rest) surplus by pair ``number``; None = dead."""
        side, rest = surplus
        v, w = work.pair(number)
        # Current strings: v-side is ahead by `rest` if side>0, w-side if side<0.
        if side >= 0:
            long, short = rest + v, w
        else:
            long, short = rest + w, v
        # One must be a prefix of the other.
        n = min(len(long), len(short))
        if long[:n] != short[:n]:
            return None
        if len(long) >= len(short):
            new_side = side if side != 0 else 1
            return (0, ()) if len(long) == len(short) else (new_side, long[len(short):])
        flipped = -1 if side >= 0 else 1
        return (flipped, short[len(long):])

    if variant == "plain":
        first_choices = range(1, work.k + 1)
        next_choices = range(1, work.k + 1)
    elif variant == "mpcp":
        first_choices = range(1, 2)
        next_choices = range(2, work.k + 1)
    else:  # twompcp
        first_choices = range(1, 2)
        next_choices = range(3, work.k + 1)

    # Seed the queue.
    queue: list[tuple[tuple[int, ...], tuple[int, Word]]] = []
    for a in first_choices:
        s = surplus_after((0, ()), a)
        if s is None:
            continue
        sol = (a,)
        if variant != "twompcp" and s == (0, ()):
            return sol
        queue.append((sol, s))

    for _ in range(max_len - 1):
        next_queue: list[tuple[tuple[int, ...], tuple[int, Word]]] = []
        for sol, surplus in queue:
            if variant == "twompcp":
                closing = surplus_after(surplus, 2)
                if closing == (0, ()):
                    return sol + (2,)
            for a in next_choices:
                s = surplus_after(surplus, a)
                if s is None:
                    continue
                new_sol = sol + (a,)
                if variant != "twompcp" and s == (0, ()):
                    return new_sol
                next_queue.append((new_sol, s))
        queue = next_queue
        if not queue:
            return None
    return None


# --- preprocessing transforms ----------------------------------------------


def antizero(inst: PcpInstance) -> PcpInstance:
    """Interleave a 1 after every symbol of every word.

    On binary instances this makes every nonempty concatenation end with 1
    and doubles all lengths, so two concatenations share a binary fraction
    only if they are equal as strings.  Index solutions are unchanged.
    """
    if not inst.is_binary():
        raise ValueError("antizero expects a binary instance")

    def weave(word: Word) -> Word:
        return tuple(itertools.chain.from_iterable((c, "1") for c in word))

    return PcpInstance(
        tuple((weave(v), weave(w)) for v, w in inst.pairs), variant=inst.variant
    )


def is_uniquely_decodable(code: Mapping[str, str]) -> bool:
    """Sardinas–Patterson test on the codeword set."""
    words = list(code.values())
    if len(set(words)) != len(words) or any(not w for w in words):
        return False
    codeset = set(words)

    def dangling(a: Iterable[str], b: Iterable[str]) -> set[str]:
        out = set()
        for x in a:
            for y in b:
                if x != y and y.startswith(x):
                    out.add(y[len(x):])
        return out

    seen: set[frozenset] = set()
    current = dangling(codeset, codeset)
    while current:
        if current & codeset:
            return False
        key = frozenset(current)
        if key in seen:
            return True
        seen.add(key)
        current = dangling(current, codeset) | dangling(codeset, current)
    return True


def binarize(inst: PcpInstance, code: Mapping[str, str]) -> PcpInstance:
    """Replace every symbol by its binary codeword.

    The code must cover the instance's alphabet, be injective, and pass the
    unique-decodability test; then index solutions carry over unchanged in
    both directions.
    """
    missing = [s for s in inst.alphabet() if s not in code]
    if missing:
        raise ValueError(f"code is missing symbols {missing}")
    bad = {s: c for s, c in code.items() if set(c) - {"0", "1"}}
    if bad:
        raise ValueError(f"codewords must be binary, got {bad}")
    if not is_uniquely_decodable(code):
        raise ValueError("code is not uniquely decodable")

    def encode(word: Word) -> Word:
        return tuple(itertools.chain.from_iterable(code[s] for s in word))

    return PcpInstance(
        tuple((encode(v), encode(w)) for v, w in inst.pairs), variant=inst.variant
    )


def reverse_instance(inst: PcpInstance) -> PcpInstance:
    """Reverse every word, exchanging the mpcp and rmpcp readings.

    A sequence solves the mpcp instance (forward concatenation) iff it
    solves the reversed rmpcp instance (reversed concatenation), and vice
    versa; plain instances keep their variant.
    """
    flip = {"plain": "plain", "mpcp": "rmpcp", "rmpcp": "mpcp"}
    if inst.variant not in flip:
        raise ValueError(f"cannot reverse a {inst.variant} instance")
    return PcpInstance(
        tuple((tuple(reversed(v)), tuple(reversed(w))) for v, w in inst.pairs),
        variant=flip[inst.variant],
    )


def ensure_initial_one(inst: PcpInstance) -> PcpInstance:
    """Prepend a 1 to both words of pair 1 unless both already start with 1.

    Only valid for mpcp instances: pair 1 is the mandatory first factor, so
    the prepended symbol lands at the very front of both concatenations and
    the solution set is untouched.  After ``reverse_instance`` the words of
    pair 1 then end with 1, as the reversed variant requires.
    """
    if inst.variant != "mpcp":
        raise ValueError("ensure_initial_one applies to mpcp instances only")
    if not inst.is_binary():
        raise ValueError("ensure_initial_one expects a binary instance")
    v, w = inst.pair(1)
    if v and w and v[0] == "1" and w[0] == "1":
        return inst
    pairs = list(inst.pairs)
    pairs[0] = (("1",) + v, ("1",) + w)
    return PcpInstance(tuple(pairs), variant=inst.variant)


def classic_instance() -> PcpInstance:
    """The bundled solvable 3-pair example: (0,100), (01,00), (110,11).

    Its shortest solution is [3,2,3,1]; both sides concatenate to 110011100.
    """
    return PcpInstance((("0", "100"), ("01", "00"), ("110", "11")))


# --- JSON -------------------------------------------------------------------


def _word_to_json(w: Word):
    if all(len(s) == 1 for s in w):
        return word_str(w)
    return list(w)


def pcp_to_json(inst: PcpInstance) -> dict:
    return {
        "variant": inst.variant,
        "pairs": [[_word_to_json(v), _word_to_json(w)] for v, w in inst.pairs],
    }


def pcp_from_json(data: dict) -> PcpInstance:
    return PcpInstance(
        tuple((as_word(v), as_word(w)) for v, w in data["pairs"]),
        variant=data.get("variant", "plain"),
    )
