"""Turing machines and their compilation into word-matching instances.

A deterministic single-tape machine halts on some input iff the derived
modified correspondence problem (first pair fixed) has a solution: the
common string of a solution spells out the run's configurations between
``#`` markers, followed by the halting symbol ``H`` eating the final tape.
With a fixed binary code for the symbols, the word pairs become transition
matrices, and the whole machine turns into one of four fixed matrix
families where only the starting distribution or the output vector still
depends on the machine's input tape.
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .linalg import Mat, Vec, rat
from .pcp import (
    PcpInstance,
    Word,
    binarize,
    concatenations,
    reverse_instance,
)
from .pfa import Pfa
from .pcp_to_pfa import (
    corner_matrix,
    eliminate_output_vector,
    nine_state_output,
    pair_matrix_9,
    pair_matrix_12,
    starting_distribution,
    twelve_state_output,
)

__all__ = [
    "MARKER",
    "HALT",
    "Rule",
    "TuringMachine",
    "Config",
    "SimRun",
    "simulate",
    "flip_tape",
    "tm_to_mpcp",
    "decode_configurations",
    "efficient_code",
    "FixedMatrixPipeline",
    "fixed_matrix_pipeline",
    "halting_machine",
    "looping_machine",
    "busy_machine",
    "tm_to_json",
    "tm_from_json",
]

#: Configuration separator in the compiled word pairs.
MARKER = "#"
#: Symbol that replaces the state once the machine has halted.
HALT = "H"

MOVES = ("L", "R")
HEADS = ("left", "right")
TARGETS = ("P12", "T9", "T11", "T18")


@dataclasses.dataclass(frozen=True)
class Rule:
    """One table entry: in ``state`` reading ``read``, write, move, continue.

    A halting entry leaves ``write``, ``move`` and ``next_state`` all None.
    """

    state: str
    read: str
    write: Optional[str] = None
    move: Optional[str] = None
    next_state: Optional[str] = None

    def __post_init__(self):
        missing = [
            x is None for x in (self.write, self.move, self.next_state)
        ]
        if any(missing) and not all(missing):
            raise ValueError(
                "rule must set write/move/next_state together or not at all"
            )
        if self.move is not None and self.move not in MOVES:
            raise ValueError(f"move must be one of {MOVES}")

    @property
    def halting(self) -> bool:
        return self.next_state is None


@dataclasses.dataclass(frozen=True)
class TuringMachine:
    """Deterministic single-tape machine over a finite tape alphabet.

    The tape is unbounded on both sides; cells outside the written part
    read as ``blank``.  ``head`` records which end of the input the head
    starts on; machines written for a right-starting head are mirrored by
    :func:`flip_tape` before compiling.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    blank: str
    start: str
    rules: tuple[Rule, ...]
    head: str = "left"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.states or not self.alphabet:
            raise ValueError("machine needs at least one state and one symbol")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate alphabet symbols")
        if set(self.states) & set(self.alphabet):
            raise ValueError("states and tape symbols must not share names")
        if self.blank not in self.alphabet:
            raise ValueError("blank must be part of the tape alphabet")
        if self.start not in self.states:
            raise ValueError("start state is not a state")
        if self.head not in HEADS:
            raise ValueError(f"head must be one of {HEADS}")
        seen: set[tuple[str, str]] = set()
        for r in self.rules:
            if r.state not in self.states or r.read not in self.alphabet:
                raise ValueError(f"rule {r} mentions unknown state or symbol")
            if not r.halting:
                if r.write not in self.alphabet:
                    raise ValueError(f"rule {r} writes an unknown symbol")
                if r.next_state not in self.states:
                    raise ValueError(f"rule {r} continues to an unknown state")
            key = (r.state, r.read)
            if key in seen:
                raise ValueError(
                    f"nondeterministic: two rules for state {r.state!r} "
                    f"reading {r.read!r}"
                )
            seen.add(key)

    def rule_for(self, state: str, read: str) -> Optional[Rule]:
        for r in self.rules:
            if r.state == state and r.read == read:
                return r
        return None

    def left_rules(self) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.move == "L")


@dataclasses.dataclass(frozen=True)
class Config:
    """Tape snapshot: symbols left of the head, state, head cell onward."""

    left: Word
    state: str
    right: Word

    def word(self) -> Word:
        """The configuration as written between markers: left, state, right."""
        return self.left + (self.state,) + self.right


@dataclasses.dataclass(frozen=True)
class SimRun:
    configs: tuple[Config, ...]
    halted: bool

    @property
    def steps(self) -> int:
        return len(self.configs) - 1

    @property
    def last(self) -> Config:
        return self.configs[-1]


def simulate(
    tm: TuringMachine, tape: Sequence[str] = (), max_steps: int = 1_000
) -> SimRun:
    """Run the machine, collecting one configuration per step.

    Stops at a halting rule (``halted`` True) or after ``max_steps`` moves
    (``halted`` False).  The final configuration of a halted run still shows
    the halting state and the scanned symbol.  A configuration with a missing
    table entry raises, since the compiled word problem assumes the machine
    only ever gets stuck by halting explicitly.
    """
    tape = tuple(tape)
    for s in tape:
        if s not in tm.alphabet:
            raise ValueError(f"input symbol {s!r} is not in the tape alphabet")
    if tm.head == "right":
        tm, tape = flip_tape(tm), tuple(reversed(tape))
    left: tuple[str, ...] = ()
    state = tm.start
    right = tape
    configs = [Config(left, state, right)]
    for _ in range(max_steps):
        scanned = right[0] if right else tm.blank
        rule = tm.rule_for(state, scanned)
        if rule is None:
            raise ValueError(
                f"no rule for state {state!r} reading {scanned!r}"
            )
        if rule.halting:
            return SimRun(tuple(configs), True)
        rest = right[1:] if right else ()
        if rule.move == "R":
            left = left + (rule.write,)
            right = rest
        else:
            if left:
                left, right = left[:-1], (left[-1], rule.write) + rest
            else:
                right = (tm.blank, rule.write) + rest
        state = rule.next_state
        configs.append(Config(left, state, right))
    return SimRun(tuple(configs), False)


def flip_tape(tm: TuringMachine) -> TuringMachine:
    """Mirror the tape, swapping every L with R and the head convention."""
    rules = tuple(
        r
        if r.halting
        else dataclasses.replace(r, move="R" if r.move == "L" else "L")
        for r in tm.rules
    )
    head = "right" if tm.head == "left" else "left"
    return dataclasses.replace(tm, rules=rules, head=head)


def _binary_copy_code(tm: TuringMachine) -> dict[str, str]:
    """Two-letter codewords b a^i b; no codeword occurs inside another."""
    symbols = (*tm.alphabet, MARKER, *tm.states, HALT)
    return {
        s: "b" + "a" * (i + 1) + "b" for i, s in enumerate(symbols)
    }


def tm_to_mpcp(
    tm: TuringMachine,
    tape: Sequence[str] = (),
    *,
    binary_copying: bool = False,
    unique: bool = False,
) -> PcpInstance:
    """Compile a run of ``tm`` on ``tape`` into a first-pair-fixed instance.

    The instance has a solution iff the machine halts on the given input;
    the common string of a solution lists the configurations separated by
    ``#``, then shrinking ``H``-configurations while the halt symbol eats
    the tape, closed by the finishing pair.

    With ``binary_copying`` the symbol-for-symbol copying pairs are replaced
    by two one-letter pairs over {a, b} and every other word is spelled in
    two-letter codewords, trading alphabet size for longer words.  With
    ``unique`` the padding pair is dropped in favour of targeted pairs that
    supply a blank only when the head actually reaches an end of the tape,
    making the solution unique when one exists.
    """
    tape = tuple(tape)
    for s in tape:
        if s not in tm.alphabet:
            raise ValueError(f"input symbol {s!r} is not in the tape alphabet")
    if tm.head == "right":
        tm, tape = flip_tape(tm), tuple(reversed(tape))
    reserved = {MARKER, HALT} & (set(tm.states) | set(tm.alphabet))
    if reserved:
        raise ValueError(
            f"machine uses the reserved symbols {sorted(reserved)}"
        )
    blank = tm.blank
    pairs: list[tuple[Word, Word]] = []
    pairs.append(
        ((MARKER,), (MARKER, blank, tm.start) + tape + (blank, MARKER))
    )
    copying = [((s,), (s,)) for s in (*tm.alphabet, MARKER)]
    pairs.extend(copying)
    if not unique:
        pairs.append(((MARKER,), (blank, MARKER, blank)))
    for r in tm.rules:
        if r.halting:
            pairs.append(((r.state, r.read), (HALT,)))
        elif r.move == "R":
            pairs.append(((r.state, r.read), (r.write, r.next_state)))
        else:
            for t in tm.alphabet:
                pairs.append(
                    ((t, r.state, r.read), (r.next_state, t, r.write))
                )
    if unique:
        for q in tm.states:
            pairs.append(((q, MARKER), (q, blank, MARKER)))
        for r in tm.left_rules():
            pairs.append(
                (
                    (MARKER, r.state, r.read),
                    (MARKER, r.next_state, blank, r.write),
                )
            )
    pairs.extend(((HALT, s), (HALT,)) for s in tm.alphabet)
    pairs.extend(((s, HALT), (HALT,)) for s in tm.alphabet)
    pairs.append(((HALT, MARKER, MARKER), (MARKER,)))

    if binary_copying:
        code = _binary_copy_code(tm)

        def encode(word: Word) -> Word:
            return tuple(c for s in word for c in code[s])

        pairs = [
            (encode(v), encode(w)) for v, w in pairs if (v, w) not in copying
        ]
        pairs[1:1] = [(("a",), ("a",)), (("b",), ("b",))]
    return PcpInstance(tuple(pairs), variant="mpcp")


def decode_configurations(
    inst: PcpInstance, sol: Sequence[int]
) -> tuple[Word, ...]:
    """Nonempty segments between markers of a solution's common string.

    For an instance built by :func:`tm_to_mpcp` these are the run's
    configurations (with padding blanks) followed by the shrinking tail of
    halt-symbol words.
    """
    common, other = concatenations(inst, sol)
    if common != other:
        raise ValueError("index sequence is not a solution")
    segments: list[Word] = []
    current: list[str] = []
    for s in common:
        if s == MARKER:
            if current:
                segments.append(tuple(current))
                current = []
        else:
            current.append(s)
    if current:
        segments.append(tuple(current))
    return tuple(segments)


def strip_blanks(word: Word, blank: str) -> Word:
    """Drop padding blanks from both ends of a configuration word."""
    lo, hi = 0, len(word)
    while lo < hi and word[lo] == blank:
        lo += 1
    while hi > lo and word[hi - 1] == blank:
        hi -= 1
    return word[lo:hi]


def efficient_code(
    tm: TuringMachine, *, positive: bool = False
) -> dict[str, str]:
    """Fixed-width binary code: 3 bits ``1**`` for tape symbols and the
    marker, 5 bits ``0****`` for states and the halt symbol.

    The marker ends in 1, as the reversed constructions require.  With
    ``positive`` the all-ones and all-zeros codewords are avoided wherever a
    word could consist of that codeword alone, so that every compiled word
    contains both bits and the resulting transition matrices are strictly
    positive.  The halt symbol stands alone in the erasing pairs, so it
    takes the all-zeros codeword only in the default mode; one ordinary
    state, which never appears without an adjacent tape symbol, takes it in
    positive mode.
    """
    code = {MARKER: "101", tm.blank: "100"}
    spare = ["110"] if positive else ["110", "111"]
    others = [s for s in tm.alphabet if s != tm.blank]
    if len(others) > len(spare):
        raise ValueError(
            "code too short for alphabet: "
            f"{len(others)} non-blank symbols but {len(spare)} free codewords"
        )
    code.update(zip(others, spare))
    n = len(tm.states)
    if n > 15:
        raise ValueError(
            f"code too short for alphabet: {n} states exceed the 15 "
            "available 5-bit codewords"
        )
    if positive:
        for i, q in enumerate(tm.states[:-1], start=1):
            code[q] = "0" + format(i, "04b")
        code[tm.states[-1]] = "00000"
        code[HALT] = "0" + format(n, "04b")
    else:
        for i, q in enumerate(tm.states, start=1):
            code[q] = "0" + format(i, "04b")
        code[HALT] = "00000"
    return code


def _coded_len(inst: PcpInstance, first: int) -> int:
    return max(
        max(len(v), len(w)) for v, w in inst.pairs[first - 1 :]
    )


def _split_with(vec: Vec, f: Vec) -> Vec:
    """Move a fractional acceptance decision into a doubled state space."""
    accept = tuple(vec[j] * f[j] for j in range(vec.dim))
    reject = tuple(vec[j] * (1 - f[j]) for j in range(vec.dim))
    return Vec(accept + reject)


@dataclasses.dataclass(frozen=True)
class FixedMatrixPipeline:
    """A fixed matrix family for one machine; only π or the output vector
    still depends on the input tape.

    ======  ======  ===========================  =========================
    target  states  fixed part                   input-dependent part
    ======  ======  ===========================  =========================
    P12     12      matrices, 0-1 output         starting distribution
    T9      9       matrices, π                  output values in [1/4,5/8]
    T11     11      matrices, π                  output values in [0,1]
    T18     18      matrices, 0-1 output         starting distribution
    ======  ======  ===========================  =========================

    P12 and T18 run on the reversed word pairs and read the solution's pair
    numbers in order, the first pair being folded into π.  T9 and T11 run on
    the forward pairs, fold the finishing pair into π and the first pair
    into the output vector, and read the middle pair numbers in reverse.
    """

    target: str
    machine: TuringMachine
    code: Mapping[str, str]
    alphabet: tuple[str, ...]
    matrices: tuple[Mat, ...]
    pi: Optional[Vec]
    out: Optional[Vec]
    cutpoint: Fraction
    mode: str
    gamma: Optional[Fraction]

    @property
    def dim(self) -> int:
        return self.matrices[0].nrows

    def mpcp_for_input(self, tape: Sequence[str] = ()) -> PcpInstance:
        return tm_to_mpcp(self.machine, tape)

    def coded_instance(self, tape: Sequence[str] = ()) -> PcpInstance:
        """The binary instance the matrices are built from (first pair
        included, although it is folded into π or the output vector)."""
        inst = self.mpcp_for_input(tape)
        if self.target in ("P12", "T18"):
            inst = reverse_instance(inst)
        return binarize(inst, self.code)

    def _start_pair(self, tape: Sequence[str]) -> tuple[Word, Word]:
        return self.coded_instance(tape).pair(1)

    def pfa_for_input(self, tape: Sequence[str] = ()) -> Pfa:
        v1, w1 = self._start_pair(tape)
        if self.target == "P12":
            gamma1 = Fraction(1, 4 ** max(len(v1), len(w1)))
            pi = starting_distribution(v1, w1, gamma1)
            out = self.out
        elif self.target == "T9":
            pi = self.pi
            out = pair_matrix_9(v1, w1) @ nine_state_output()
        elif self.target == "T11":
            gamma1 = Fraction(1, 16 ** max(len(v1), len(w1)))
            first = Mat.block_diag(
                pair_matrix_9(v1, w1), corner_matrix(gamma1)
            )
            pi = self.pi
            out = first @ Vec.concat(
                nine_state_output(), Vec((Fraction(1, 8), rat(0)))
            )
        else:  # T18
            pi9 = pair_matrix_9(v1, w1).row(0)
            pi = _split_with(pi9, nine_state_output())
            out = self.out
        return Pfa(
            alphabet=self.alphabet,
            matrices=self.matrices,
            pi=pi,
            out=out,
            cutpoint=self.cutpoint,
            mode=self.mode,
        )

    def word_for_solution(self, sol: Sequence[int]) -> tuple[str, ...]:
        """The input word of the compiled PFA for an index solution."""
        if not sol or sol[0] != 1:
            raise ValueError("solutions start with pair 1")
        if self.target in ("P12", "T18"):
            tail = sol[1:]
        else:
            if sol[-1] != len(self.alphabet) + 2:
                raise ValueError("solutions end with the finishing pair")
            tail = tuple(reversed(sol[1:-1]))
        word = tuple(str(a) for a in tail)
        bad = set(word) - set(self.alphabet)
        if bad:
            raise ValueError(f"pair numbers {sorted(bad)} have no matrix")
        return word

    def solution_for_word(self, word: Sequence[str]) -> tuple[int, ...]:
        """Inverse of :meth:`word_for_solution`."""
        numbers = tuple(int(s) for s in word)
        if self.target in ("P12", "T18"):
            return (1,) + numbers
        return (1,) + tuple(reversed(numbers)) + (len(self.alphabet) + 2,)


def fixed_matrix_pipeline(
    tm: TuringMachine,
    code: Optional[Mapping[str, str]] = None,
    target: str = "P12",
) -> FixedMatrixPipeline:
    """Build the input-independent part of the chosen construction.

    The matrices depend only on the machine's rule table and the code; the
    returned pipeline then maps any input tape to a starting distribution
    and/or output vector.  ``code`` defaults to :func:`efficient_code`.
    """
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}")
    if code is None:
        code = efficient_code(tm)
    base = tm_to_mpcp(tm, ())
    k = base.k
    if target in ("P12", "T18"):
        coded = binarize(reverse_instance(base), code)
        symbols = tuple(str(i) for i in range(2, k + 1))
        if target == "P12":
            gamma = Fraction(1, 4 ** _coded_len(coded, 2))
            matrices = tuple(
                pair_matrix_12(v, w, gamma) for v, w in coded.pairs[1:]
            )
            pi, out = None, twelve_state_output()
            cutpoint, mode = Fraction(1, 4), "strict"
        else:
            gamma = None
            nine = Pfa(
                alphabet=symbols,
                matrices=tuple(
                    pair_matrix_9(v, w) for v, w in coded.pairs[1:]
                ),
                pi=Vec.unit(9, 0),
                out=nine_state_output(),
                cutpoint=Fraction(1, 2),
                mode="weak",
            )
            split = eliminate_output_vector(nine)
            matrices, pi, out = split.matrices, None, split.out
            cutpoint, mode = split.cutpoint, split.mode
    else:
        coded = binarize(base, code)
        symbols = tuple(str(i) for i in range(2, k))
        fin = coded.pair(k)
        if target == "T9":
            gamma = None
            matrices = tuple(
                pair_matrix_9(v, w) for v, w in coded.pairs[1:-1]
            )
            pi = pair_matrix_9(*fin).row(0)
            cutpoint, mode = Fraction(1, 2), "weak"
        else:
            gamma = Fraction(1, 16 ** _coded_len(coded, 2))
            matrices = tuple(
                Mat.block_diag(pair_matrix_9(v, w), corner_matrix(gamma))
                for v, w in coded.pairs[1:-1]
            )
            half = Fraction(1, 2)
            pi0 = Vec([half] + [rat(0)] * 8 + [half, rat(0)])
            pi = pi0 @ Mat.block_diag(
                pair_matrix_9(*fin), corner_matrix(gamma)
            )
            cutpoint, mode = Fraction(1, 4), "strict"
        out = None
    return FixedMatrixPipeline(
        target=target,
        machine=tm,
        code=dict(code),
        alphabet=symbols,
        matrices=matrices,
        pi=pi,
        out=out,
        cutpoint=cutpoint,
        mode=mode,
        gamma=gamma,
    )


# --- Bundled toy machines ---------------------------------------------------


def halting_machine() -> TuringMachine:
    """One state, one symbol: halts immediately on an empty tape."""
    return TuringMachine(
        states=("q0",),
        alphabet=("_",),
        blank="_",
        start="q0",
        rules=(Rule("q0", "_"),),
    )


def looping_machine() -> TuringMachine:
    """Runs right forever over blanks; never halts."""
    return TuringMachine(
        states=("q0",),
        alphabet=("_",),
        blank="_",
        start="q0",
        rules=(Rule("q0", "_", "_", "R", "q0"),),
    )


def busy_machine() -> TuringMachine:
    """Writes b, steps left over it, then halts: a three-configuration run
    exercising a left move and a nonempty final tape."""
    return TuringMachine(
        states=("q0", "q1"),
        alphabet=("_", "b"),
        blank="_",
        start="q0",
        rules=(
            Rule("q0", "_", "b", "L", "q1"),
            Rule("q1", "_"),
        ),
    )


# --- JSON -------------------------------------------------------------------


def tm_to_json(tm: TuringMachine) -> dict:
    rules = []
    for r in tm.rules:
        if r.halting:
            rules.append({"q": r.state, "s": r.read, "halt": True})
        else:
            rules.append(
                {
                    "q": r.state,
                    "s": r.read,
                    "write": r.write,
                    "move": r.move,
                    "next": r.next_state,
                }
            )
    return {
        "states": list(tm.states),
        "alphabet": list(tm.alphabet),
        "blank": tm.blank,
        "start": tm.start,
        "rules": rules,
        "head": tm.head,
    }


def tm_from_json(data: dict) -> TuringMachine:
    rules = []
    for r in data["rules"]:
        if r.get("halt"):
            rules.append(Rule(r["q"], r["s"]))
        else:
            rules.append(Rule(r["q"], r["s"], r["write"], r["move"], r["next"]))
    return TuringMachine(
        states=tuple(data["states"]),
        alphabet=tuple(data["alphabet"]),
        blank=data["blank"],
        start=data["start"],
        rules=tuple(rules),
        head=data.get("head", "left"),
    )
