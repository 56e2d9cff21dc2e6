"""Two-counter machines and the coin-game equality checker.

A halting computation of a two-counter machine is spelled out as a word
``0^l0 1^r0 q0 0^l1 1^r1 q1 ... #``.  A finite automaton can verify the
formal structure of such a word but not the counter updates; those are
checked probabilistically, by a coin game comparing consecutive block
lengths.  This module builds the game as an explicit PFA, computes its
outcome distribution exactly, and aggregates per-round results into the
accept/reject dichotomy.
"""

import dataclasses
import itertools
from collections import defaultdict
from fractions import Fraction
from math import comb
from typing import Mapping, Optional, Sequence

from .linalg import Mat, Vec, rat
from .pfa import Pfa

__all__ = [
    "CounterRule",
    "TwoCounterMachine",
    "CounterTrace",
    "counter_run",
    "encode_computation",
    "parse_computation",
    "formal_checks",
    "CheckerParams",
    "EqualityChecker",
    "equality_checker_pfa",
    "one_coin_per_symbol",
    "pad_word",
    "luck_outcome_probs",
    "CorrectnessProbs",
    "correctness_test_probs",
    "aggregate_accept_prob",
    "majority_vote",
    "bump_machine",
    "drain_machine",
    "cm_to_json",
    "cm_from_json",
]

END = "#"
RESERVED = ("0", "1", END)
DELTAS = (-1, 0, 1)
OUTCOMES = ("same", "different", "undecided", "rejected")


@dataclasses.dataclass(frozen=True)
class CounterRule:
    """Action for (state, l == 0?, r == 0?): counter deltas and next state."""

    state: str
    l_zero: bool
    r_zero: bool
    dl: int
    dr: int
    next_state: str

    def __post_init__(self):
        if self.dl not in DELTAS or self.dr not in DELTAS:
            raise ValueError("counter deltas must be -1, 0 or +1")
        if (self.l_zero and self.dl < 0) or (self.r_zero and self.dr < 0):
            raise ValueError("cannot decrement a counter tested to be zero")


@dataclasses.dataclass(frozen=True)
class TwoCounterMachine:
    states: tuple[str, ...]
    start: str
    halt: str
    rules: tuple[CounterRule, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.states:
            raise ValueError("machine needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        for s in self.states:
            if s in RESERVED:
                raise ValueError(f"state name {s!r} collides with a tape symbol")
        for s in (self.start, self.halt):
            if s not in self.states:
                raise ValueError(f"{s!r} is not a state")
        seen = set()
        for rule in self.rules:
            if rule.state not in self.states or rule.next_state not in self.states:
                raise ValueError(f"rule {rule} mentions an unknown state")
            if rule.state == self.halt:
                raise ValueError("the halting state has no outgoing rules")
            key = (rule.state, rule.l_zero, rule.r_zero)
            if key in seen:
                raise ValueError(f"nondeterministic: two rules for {key}")
            seen.add(key)

    def rule_for(self, state: str, l_zero: bool, r_zero: bool) -> Optional[CounterRule]:
        for rule in self.rules:
            if (rule.state, rule.l_zero, rule.r_zero) == (state, l_zero, r_zero):
                return rule
        return None


@dataclasses.dataclass(frozen=True)
class CounterTrace:
    configs: tuple[tuple[str, int, int], ...]
    halted: bool

    @property
    def steps(self) -> int:
        return len(self.configs) - 1


def counter_run(m: TwoCounterMachine, max_steps: int = 1_000) -> CounterTrace:
    """Run from (start, 0, 0) until the halting state or the step limit."""
    state, left, right = m.start, 0, 0
    configs = [(state, left, right)]
    for _ in range(max_steps):
        if state == m.halt:
            return CounterTrace(tuple(configs), True)
        rule = m.rule_for(state, left == 0, right == 0)
        if rule is None:
            raise ValueError(f"no rule for {state!r} with counters {left}, {right}")
        state, left, right = rule.next_state, left + rule.dl, right + rule.dr
        configs.append((state, left, right))
    if state == m.halt:
        return CounterTrace(tuple(configs), True)
    return CounterTrace(tuple(configs), False)


def encode_computation(
    m: TwoCounterMachine, steps: Optional[int] = None, max_steps: int = 10_000
) -> tuple[str, ...]:
    """Spell a run as the word 0^l0 1^r0 q0 ... 0^lm 1^rm qm #.

    With ``steps=None`` the machine must halt; otherwise exactly that
    many transitions are encoded (the machine must run that long).
    """
    trace = counter_run(m, max_steps=max_steps)
    if steps is None:
        if not trace.halted:
            raise ValueError(f"machine did not halt within {max_steps} steps")
        configs = trace.configs
    else:
        if steps > trace.steps:
            raise ValueError(f"machine stops after {trace.steps} steps, not {steps}")
        configs = trace.configs[: steps + 1]
    word: list[str] = []
    for state, left, right in configs:
        word += ["0"] * left + ["1"] * right + [state]
    return tuple(word) + (END,)


def parse_computation(
    m: TwoCounterMachine, word: Sequence[str]
) -> tuple[tuple[str, int, int], ...]:
    """Split a word of the computation format into (state, l, r) blocks."""
    word = tuple(word)
    if not word or word[-1] != END:
        raise ValueError("word must end with the end marker")
    if END in word[:-1]:
        raise ValueError("end marker may only appear at the end")
    configs = []
    left = right = 0
    seen_ones = False
    pending = False
    for symbol in word[:-1]:
        if symbol == "0":
            if seen_ones:
                raise ValueError("0 block after 1 block")
            left += 1
            pending = True
        elif symbol == "1":
            right += 1
            seen_ones = True
            pending = True
        elif symbol in m.states:
            configs.append((symbol, left, right))
            left = right = 0
            seen_ones = False
            pending = False
        else:
            raise ValueError(f"unknown symbol {symbol!r}")
    if pending:
        raise ValueError("dangling counter block before the end marker")
    if not configs:
        raise ValueError("no configuration before the end marker")
    return tuple(configs)


def formal_checks(m: TwoCounterMachine, word: Sequence[str]) -> tuple[str, ...]:
    """All format and rule-following complaints; empty means pass.

    These are the checks a deterministic automaton could do: format,
    initial counters zero, start and halting state, and the state
    transitions matching the rule table for the visible zero tests.
    What is *not* checked is whether the counter blocks change by the
    right amount.
    """
    try:
        configs = parse_computation(m, word)
    except ValueError as e:
        return (str(e),)
    problems = []
    state0, l0, r0 = configs[0]
    if (l0, r0) != (0, 0):
        problems.append("initial counters are not zero")
    if state0 != m.start:
        problems.append(f"first state is {state0!r}, not the start state")
    if configs[-1][0] != m.halt:
        problems.append("last state is not the halting state")
    for (state, left, right), (succ, _, _) in zip(configs, configs[1:]):
        rule = m.rule_for(state, left == 0, right == 0)
        if rule is None:
            problems.append(f"no rule applies in state {state!r}")
        elif rule.next_state != succ:
            problems.append(f"state {succ!r} does not follow from {state!r}")
    return tuple(problems)


# ---------------------------------------------------------------------------
# the equality checker


@dataclasses.dataclass(frozen=True)
class CheckerParams:
    """Modulus for the tracked difference, and the INCORRECT budget."""

    modulus: int = 12
    incorrect_limit: int = 10

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be at least 2")
        if self.incorrect_limit < 1:
            raise ValueError("incorrect_limit must be at least 1")


def _classify(mod_value: int, d_lucky: bool, s_lucky: bool) -> str:
    if mod_value != 0:
        return "different"
    if d_lucky and not s_lucky:
        return "different"
    if s_lucky and not d_lucky:
        return "same"
    return "undecided"


def luck_outcome_probs(
    params: CheckerParams, i: int, j: int, delta: int = 0
) -> dict[str, Fraction]:
    """Exact outcome distribution of the coin game, computed directly.

    Compares i + delta against j (delta lets the same game check an
    incremented or decremented counter).  One player keeps a coin per
    block, flipped twice per symbol of that block; the other keeps two
    coins flipped once per symbol of either block.  A coin that was
    never flipped counts as lucky.  This closed-form enumeration over
    the 16 luckiness combinations is independent of the PFA realization.
    """
    eff = i + delta
    if eff < 0 or j < 0:
        raise ValueError("block lengths must be nonnegative")
    probs = {outcome: Fraction(0) for outcome in ("same", "different", "undecided")}
    if (eff - j) % params.modulus != 0:
        probs["different"] = Fraction(1)
        return probs
    lucky = {
        "red": Fraction(1, 4**eff),
        "orange": Fraction(1, 4**j),
        "blue": Fraction(1, 2 ** (eff + j)),
        "green": Fraction(1, 2 ** (eff + j)),
    }
    for combo in itertools.product((True, False), repeat=4):
        p = Fraction(1)
        for flag, coin in zip(combo, lucky):
            p *= lucky[coin] if flag else 1 - lucky[coin]
        red, orange, blue, green = combo
        outcome = _classify(0, red or orange, blue or green)
        probs[outcome] += p
    return probs


@dataclasses.dataclass(frozen=True)
class EqualityChecker:
    """The coin game as a PFA, with every state classified.

    ``classes[s]`` is one of same/different/undecided/rejected; states
    still reading input count as undecided, since no end marker has been
    seen.  The output vector of the PFA marks the Same states.
    """

    params: CheckerParams
    pfa: Pfa
    classes: tuple[str, ...]
    _edges: dict = dataclasses.field(
        init=False, repr=False, compare=False, default=None
    )

    def __post_init__(self):
        edges = {}
        for symbol in self.pfa.alphabet:
            mat = self.pfa.matrix(symbol)
            edges[symbol] = tuple(
                tuple((t, p) for t, p in enumerate(row) if p)
                for row in mat.rows
            )
        object.__setattr__(self, "_edges", edges)

    def outcome_probs(self, word: Sequence[str]) -> dict[str, Fraction]:
        """Mass per class after reading the word (sparse walk of the PFA)."""
        row = {i: rat(p) for i, p in enumerate(self.pfa.pi.entries) if p}
        for symbol in word:
            pushed: dict[int, Fraction] = defaultdict(Fraction)
            edges = self._edges[symbol]
            for source, mass in row.items():
                for target, p in edges[source]:
                    pushed[target] += mass * p
            row = pushed
        result = {outcome: Fraction(0) for outcome in OUTCOMES}
        for state, mass in row.items():
            result[self.classes[state]] += mass
        return result

    def probs_for_counts(self, i: int, j: int) -> dict[str, Fraction]:
        return self.outcome_probs(("a",) * i + ("b",) * j + (END,))


def equality_checker_pfa(params: CheckerParams = CheckerParams()) -> EqualityChecker:
    """Build the coin game as an explicit PFA over {a, b, #}.

    States track the phase (reading a's or b's), the difference of the
    block lengths modulo G, and which coins are still lucky; the second
    player's first coin is only materialized once a b arrives.  This
    gives 24G + 4 states (292 for G = 12); a naive encoding with all
    five flags in both phases would need 32G + 4.
    """
    g = params.modulus
    flags = (True, False)
    states: list = [
        ("A", m, red, blue, green)
        for m in range(g)
        for red in flags
        for blue in flags
        for green in flags
    ]
    states += [
        ("B", m, red, orange, blue, green)
        for m in range(g)
        for red in flags
        for orange in flags
        for blue in flags
        for green in flags
    ]
    states += list(OUTCOMES)
    index = {state: k for k, state in enumerate(states)}
    n = len(states)

    def coin(flag, stay):
        return [(True, stay), (False, 1 - stay)] if flag else [(False, Fraction(1))]

    quarter, half = Fraction(1, 4), Fraction(1, 2)
    grids = {symbol: [[Fraction(0)] * n for _ in range(n)] for symbol in ("a", "b", END)}
    for state in states:
        source = index[state]
        if state in OUTCOMES or state == "rejected":
            for symbol in ("a", "b", END):
                grids[symbol][source][index["rejected"]] = Fraction(1)
            continue
        phase, m = state[0], state[1]
        if phase == "A":
            _, _, red, blue, green = state
            for nr, pr in coin(red, quarter):
                for nb, pb in coin(blue, half):
                    for ng, pg in coin(green, half):
                        target = ("A", (m + 1) % g, nr, nb, ng)
                        grids["a"][source][index[target]] += pr * pb * pg
            for no, po in coin(True, quarter):
                for nb, pb in coin(blue, half):
                    for ng, pg in coin(green, half):
                        target = ("B", (m - 1) % g, red, no, nb, ng)
                        grids["b"][source][index[target]] += po * pb * pg
            outcome = _classify(m, True, blue or green)  # orange never flipped
            grids[END][source][index[outcome]] = Fraction(1)
        else:
            _, _, red, orange, blue, green = state
            grids["a"][source][index["rejected"]] = Fraction(1)
            for no, po in coin(orange, quarter):
                for nb, pb in coin(blue, half):
                    for ng, pg in coin(green, half):
                        target = ("B", (m - 1) % g, red, no, nb, ng)
                        grids["b"][source][index[target]] += po * pb * pg
            outcome = _classify(m, red or orange, blue or green)
            grids[END][source][index[outcome]] = Fraction(1)

    classes = tuple(
        state if isinstance(state, str) else "undecided" for state in states
    )
    pfa = Pfa(
        alphabet=("a", "b", END),
        matrices=tuple(Mat(grids[symbol]) for symbol in ("a", "b", END)),
        pi=Vec.unit(n, index[("A", 0, True, True, True)]),
        out=Vec([rat(1) if c == "same" else rat(0) for c in classes]),
        cutpoint=Fraction(1, 2),
        mode="strict",
    )
    return EqualityChecker(params, pfa, classes)


def pad_word(word: Sequence[str]) -> tuple[str, ...]:
    """Insert three pad symbols after each a or b (none after #)."""
    padded: list[str] = []
    for symbol in word:
        padded.append(symbol)
        if symbol in ("a", "b"):
            padded += ["0", "0", "0"]
    return tuple(padded)


def one_coin_per_symbol(params: CheckerParams = CheckerParams()) -> EqualityChecker:
    """The coin game spread over padded input, one coin flip per symbol.

    Each a or b is followed by three pad symbols ``0`` (see
    :func:`pad_word`); the up-to-four coin flips of a block symbol are
    spent one per input symbol, so every matrix entry is 0, 1/2 or 1.
    Outcome probabilities on padded words match the unpadded checker.
    """
    g = params.modulus
    flags = (True, False)
    subs = (0, 1, 2, 3)
    states: list = [
        ("A", m, red, blue, green, sub)
        for m in range(g)
        for red in flags
        for blue in flags
        for green in flags
        for sub in subs
    ]
    states += [
        ("B", m, red, orange, blue, green, sub)
        for m in range(g)
        for red in flags
        for orange in flags
        for blue in flags
        for green in flags
        for sub in subs
    ]
    states += list(OUTCOMES)
    index = {state: k for k, state in enumerate(states)}
    n = len(states)
    half = Fraction(1, 2)
    alphabet = ("a", "b", END, "0")
    grids = {symbol: [[Fraction(0)] * n for _ in range(n)] for symbol in alphabet}

    def flip(flag):
        """One toss of a still-lucky coin; an unlucky coin stays put."""
        return [(True, half), (False, half)] if flag else [(False, Fraction(1))]

    def reject_all(source):
        for symbol in alphabet:
            if not any(grids[symbol][source]):
                grids[symbol][source][index["rejected"]] = Fraction(1)

    for state in states:
        source = index[state]
        if isinstance(state, str):
            reject_all(source)
            continue
        if state[0] == "A":
            _, m, red, blue, green, sub = state
            if sub == 0:
                for nr, pr in flip(red):
                    target = ("A", (m + 1) % g, nr, blue, green, 1)
                    grids["a"][source][index[target]] += pr
                for no, po in flip(True):
                    target = ("B", (m - 1) % g, red, no, blue, green, 1)
                    grids["b"][source][index[target]] += po
                outcome = _classify(m, True, blue or green)
                grids[END][source][index[outcome]] = Fraction(1)
            elif sub == 1:
                for nr, pr in flip(red):
                    grids["0"][source][index[("A", m, nr, blue, green, 2)]] += pr
            elif sub == 2:
                for nb, pb in flip(blue):
                    grids["0"][source][index[("A", m, red, nb, green, 3)]] += pb
            else:
                for ng, pg in flip(green):
                    grids["0"][source][index[("A", m, red, blue, ng, 0)]] += pg
        else:
            _, m, red, orange, blue, green, sub = state
            if sub == 0:
                for no, po in flip(orange):
                    target = ("B", (m - 1) % g, red, no, blue, green, 1)
                    grids["b"][source][index[target]] += po
                outcome = _classify(m, red or orange, blue or green)
                grids[END][source][index[outcome]] = Fraction(1)
            elif sub == 1:
                for no, po in flip(orange):
                    grids["0"][source][index[("B", m, red, no, blue, green, 2)]] += po
            elif sub == 2:
                for nb, pb in flip(blue):
                    grids["0"][source][index[("B", m, red, orange, nb, green, 3)]] += pb
            else:
                for ng, pg in flip(green):
                    grids["0"][source][index[("B", m, red, orange, blue, ng, 0)]] += pg
        reject_all(source)

    classes = tuple(
        state if isinstance(state, str) else "undecided" for state in states
    )
    pfa = Pfa(
        alphabet=alphabet,
        matrices=tuple(Mat(grids[symbol]) for symbol in alphabet),
        pi=Vec.unit(n, index[("A", 0, True, True, True, 0)]),
        out=Vec([rat(1) if c == "same" else rat(0) for c in classes]),
        cutpoint=Fraction(1, 2),
        mode="strict",
    )
    return EqualityChecker(params, pfa, classes)


# ---------------------------------------------------------------------------
# correctness test and aggregation


@dataclasses.dataclass(frozen=True)
class CorrectnessProbs:
    correct: Fraction
    incorrect: Fraction

    @property
    def null(self) -> Fraction:
        return 1 - self.correct - self.incorrect


def correctness_test_probs(
    m: TwoCounterMachine, word: Sequence[str], params: CheckerParams = CheckerParams()
) -> CorrectnessProbs:
    """Exact CORRECT/INCORRECT probabilities for one copy of a word.

    One equality check per counter per transition, each comparing the
    previous block (shifted by the rule's delta) with the next block.
    CORRECT requires every check to answer Same, INCORRECT every check
    to answer Different; the checks use independent coins, so both are
    plain products.  Words failing the formal checks raise, since the
    automaton rejects them outright.
    """
    problems = formal_checks(m, word)
    if problems:
        raise ValueError("formal checks failed: " + "; ".join(problems))
    configs = parse_computation(m, word)
    p_correct = Fraction(1)
    p_incorrect = Fraction(1)
    for (state, left, right), (_, left2, right2) in zip(configs, configs[1:]):
        rule = m.rule_for(state, left == 0, right == 0)
        for value, nxt, delta in ((left, left2, rule.dl), (right, right2, rule.dr)):
            outcome = luck_outcome_probs(params, value, nxt, delta)
            p_correct *= outcome["same"]
            p_incorrect *= outcome["different"]
    return CorrectnessProbs(p_correct, p_incorrect)


def aggregate_accept_prob(
    probs: CorrectnessProbs, t: int, params: CheckerParams = CheckerParams()
) -> Fraction:
    """Probability of accepting t independent copies of one word.

    The input is accepted at the first CORRECT answer, rejected at the
    K-th INCORRECT answer or when the input runs out.  Conditioned on
    the positions of decisive rounds, their values are independent, so
    the probability is sum over s < K of c (1-c)^s P[Bin(t, q) >= s+1]
    with q the per-round decision probability and c the chance that a
    decision is CORRECT.  The binomial heads are accumulated as integers
    over a common denominator, which keeps huge t (millions of rounds)
    affordable: one big power and one normalization instead of one per
    term.
    """
    if t <= 0:
        return Fraction(0)
    q = probs.correct + probs.incorrect
    if q == 0:
        return Fraction(0)
    c = probs.correct / q
    k = min(params.incorrect_limit, t)
    num, den = q.numerator, q.denominator
    miss = den - num
    # heads[s] * den**-t == P[Bin(t, q) <= s]
    power = miss ** (t - k + 1)
    terms = []
    for u in range(k - 1, -1, -1):
        terms.append(comb(t, u) * num**u * power)
        power *= miss
    terms.reverse()
    heads = list(itertools.accumulate(terms))
    cn, cd = c.numerator, c.denominator
    # sum_s c (1-c)^s (1 - heads[s]/den**t) over denominator cd**K den**t
    geometric = 1 - (1 - c) ** k
    correction = sum(
        cn * (cd - cn) ** s * cd ** (k - 1 - s) * heads[s] for s in range(k)
    )
    return geometric - Fraction(correction, cd**k * den**t)


def majority_vote(p: Fraction, copies: int) -> Fraction:
    """Acceptance probability of a majority over independent copies."""
    if copies < 1 or copies % 2 == 0:
        raise ValueError("copies must be odd and positive")
    p = rat(p)
    return sum(
        Fraction(comb(copies, u)) * p**u * (1 - p) ** (copies - u)
        for u in range(copies // 2 + 1, copies + 1)
    )


# ---------------------------------------------------------------------------
# fixtures and serialization


def bump_machine() -> TwoCounterMachine:
    """Increment both counters, then halt after one idle step.

    Every consecutive block comparison involves at least one coin flip,
    so the correctness test is fair with nonzero decision probability.
    """
    return TwoCounterMachine(
        states=("q0", "q1", "stop"),
        start="q0",
        halt="stop",
        rules=(
            CounterRule("q0", True, True, 1, 1, "q1"),
            CounterRule("q1", False, False, 0, 0, "stop"),
        ),
    )


def drain_machine() -> TwoCounterMachine:
    """Increment the left counter, then decrement it back and halt.

    The final comparison is 0 against 0 with every coin unflipped, so
    the game is forced to Undecided and both decision probabilities
    vanish: a correct computation that the test can never confirm.
    """
    return TwoCounterMachine(
        states=("q0", "q1", "stop"),
        start="q0",
        halt="stop",
        rules=(
            CounterRule("q0", True, True, 1, 0, "q1"),
            CounterRule("q1", False, True, -1, 0, "stop"),
        ),
    )


def cm_to_json(m: TwoCounterMachine) -> dict:
    return {
        "states": list(m.states),
        "start": m.start,
        "halt": m.halt,
        "rules": [
            {
                "state": r.state,
                "lz": r.l_zero,
                "rz": r.r_zero,
                "dl": r.dl,
                "dr": r.dr,
                "next": r.next_state,
            }
            for r in m.rules
        ],
    }


def cm_from_json(data: Mapping) -> TwoCounterMachine:
    rules = tuple(
        CounterRule(r["state"], r["lz"], r["rz"], r["dl"], r["dr"], r["next"])
        for r in data["rules"]
    )
    return TwoCounterMachine(
        tuple(data["states"]), data["start"], data["halt"], rules
    )
