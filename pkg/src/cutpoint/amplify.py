"""Probability amplification around the cutpoint 1/2.

Starting from an automaton whose acceptance probabilities either all
stay at most 1/2 or somewhere exceed 1/2, these transformers produce
automata over an alphabet extended by ``end`` and ``check`` whose
acceptance probabilities in the second case come arbitrarily close to 1
while the first case is preserved.  The input is organized in rounds
``u1 end ... un end check``; a round in which every u was accepted
(rejected) by the base automaton accepts (rejects) once and for all,
and anything else defers to the next round.

Three flavors are built: the coin-per-round transformer (one fresh coin
decides each round's role), its no-coin simplification, and — for the
single-coin variant, whose rounds are not independent — an abstraction
with one probability parameter plus the input-length recipe that hits
its sweet spot.
"""

import dataclasses
from decimal import Decimal, localcontext
from fractions import Fraction
from math import ceil
from typing import Sequence

from .linalg import Mat, RatLike, Vec, rat
from .pfa import Pfa, Word, add_start_state

__all__ = [
    "END",
    "CHECK",
    "SIM",
    "AmplifyInput",
    "sim_rounds",
    "expanding_automaton",
    "single_coin_automaton",
    "amplify_F",
    "amplify_NC",
    "go_reject_probs",
    "go_input_builder",
]

END = "end"
CHECK = "check"
SIM = "sim"

HALF = Fraction(1, 2)


@dataclasses.dataclass(frozen=True)
class AmplifyInput:
    """A repeated-rounds input ((u end)^n check)^t."""

    u: Word
    n: int
    t: int

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(self.u))
        if self.n < 1:
            raise ValueError("need at least one repetition per round")
        if self.t < 1:
            raise ValueError("need at least one round")

    @property
    def word(self) -> Word:
        return ((self.u + (END,)) * self.n + (CHECK,)) * self.t


def sim_rounds(n: int, t: int) -> Word:
    """The same round structure at the abstraction level: (sim^n check)^t."""
    if n < 0 or t < 0:
        raise ValueError("round counts are nonnegative")
    return ((SIM,) * n + (CHECK,)) * t


def expanding_automaton(x: RatLike) -> Pfa:
    """The five-state round skeleton with accept probability x per sim.

    States in order: q0, +, -, T (accepting sink), F (rejecting sink).
    Reading check at q0 flips the coin for the coming round; the next
    check either commits the surviving branch to its sink or, from q0,
    flips again.  A sim keeps the + branch alive with probability x and
    the - branch with probability 1 - x; deserters return to q0.  Hence
    a completed round accepts with probability x^n/2 and rejects with
    probability (1-x)^n/2.
    """
    x = rat(x)
    o, l = Fraction(0), Fraction(1)
    sim = Mat(
        [
            [l, o, o, o, o],
            [1 - x, x, o, o, o],
            [x, o, 1 - x, o, o],
            [o, o, o, l, o],
            [o, o, o, o, l],
        ]
    )
    check = Mat(
        [
            [o, HALF, HALF, o, o],
            [o, o, o, l, o],
            [o, o, o, o, l],
            [o, o, o, l, o],
            [o, o, o, o, l],
        ]
    )
    return Pfa(
        alphabet=(SIM, CHECK),
        matrices=(sim, check),
        pi=Vec.unit(5, 0),
        out=Vec.unit(5, 3),
        cutpoint=HALF,
        mode="strict",
    )


def single_coin_automaton(x: RatLike) -> Pfa:
    """The round skeleton when one initial coin fixes the branch for good.

    States: +alive, +dead, -alive, -dead, T, F; the start distribution
    puts 1/2 on each branch's alive state.  In the + branch a round that
    kept every sim (probability x^n) commits to T at its check, and a
    broken round re-arms; the - branch mirrors this into F with 1 - x.
    There is no second coin, so the + branch defaults to rejection when
    the input ends and the - branch defaults to acceptance: the output
    vector marks T and the two - round states.
    """
    x = rat(x)
    o, l = Fraction(0), Fraction(1)
    sim = Mat(
        [
            [x, 1 - x, o, o, o, o],
            [o, l, o, o, o, o],
            [o, o, 1 - x, x, o, o],
            [o, o, o, l, o, o],
            [o, o, o, o, l, o],
            [o, o, o, o, o, l],
        ]
    )
    check = Mat(
        [
            [o, o, o, o, l, o],
            [l, o, o, o, o, o],
            [o, o, o, o, o, l],
            [o, o, l, o, o, o],
            [o, o, o, o, l, o],
            [o, o, o, o, o, l],
        ]
    )
    return Pfa(
        alphabet=(SIM, CHECK),
        matrices=(sim, check),
        pi=Vec([HALF, o, HALF, o, o, o]),
        out=Vec([o, o, l, l, l, o]),
        cutpoint=HALF,
        mode="strict",
    )


def _with_fresh_start(a: Pfa) -> Pfa:
    """Give the automaton a start state that nothing transitions into.

    Without this, an input like ``check u0 check`` for a u0 leading back
    to the start would count as a completed all-accepted round.
    """
    starts = [i for i, p in enumerate(a.pi.entries) if p]
    if len(starts) == 1 and a.pi.entries[starts[0]] == 1:
        s = starts[0]
        if all(all(row[s] == 0 for row in m.rows) for m in a.matrices):
            return a
    return add_start_state(a)


def _check_extension(a: Pfa):
    for symbol in (END, CHECK):
        if symbol in a.alphabet:
            raise ValueError(f"base alphabet already contains {symbol!r}")


def amplify_F(a: Pfa) -> Pfa:
    """Coin-per-round amplification; 2d+3 states over the patched base.

    Two copies of the base automaton hang off a waiting state q0: the
    first check flips a coin onto one of the copy start states, an end
    inside a copy either returns to that start (output matching the
    copy's role) or drops to q0, and the next check commits a copy
    caught at its start state to the matching sink.  A check arriving
    mid-copy is ill-formed and rejects; inputs that end undecided
    reject by the 0-1 output vector.
    """
    _check_extension(a)
    a = _with_fresh_start(a)
    d = a.dim
    s = next(i for i, p in enumerate(a.pi.entries) if p)
    q0, plus, minus = 0, 1 + s, 1 + d + s
    top, bot = 1 + 2 * d, 2 + 2 * d
    n = 2 * d + 3
    f = a.out.entries

    def blank():
        return [[Fraction(0)] * n for _ in range(n)]

    matrices = []
    for m in a.matrices:
        grid = blank()
        grid[q0][q0] = Fraction(1)
        for i, row in enumerate(m.rows):
            for j, p in enumerate(row):
                grid[1 + i][1 + j] = p
                grid[1 + d + i][1 + d + j] = p
        grid[top][top] = grid[bot][bot] = Fraction(1)
        matrices.append(Mat(grid))

    end = blank()
    end[q0][q0] = Fraction(1)
    for i in range(d):
        end[1 + i][plus] += f[i]
        end[1 + i][q0] += 1 - f[i]
        end[1 + d + i][q0] += f[i]
        end[1 + d + i][minus] += 1 - f[i]
    end[top][top] = end[bot][bot] = Fraction(1)
    matrices.append(Mat(end))

    check = blank()
    check[q0][plus] = check[q0][minus] = HALF
    for i in range(d):
        check[1 + i][top if 1 + i == plus else bot] = Fraction(1)
        check[1 + d + i][bot] = Fraction(1)
    check[top][top] = check[bot][bot] = Fraction(1)
    matrices.append(Mat(check))

    return Pfa(
        alphabet=a.alphabet + (END, CHECK),
        matrices=tuple(matrices),
        pi=Vec.unit(n, q0),
        out=Vec.unit(n, top),
        cutpoint=HALF,
        mode="strict",
    )


def amplify_NC(a: Pfa) -> Pfa:
    """No-coin amplification; 3d+3 states over the patched base.

    The first input of a round runs in a neutral copy and its end
    routes to an all-accepted or an all-rejected hypothesis copy; a
    broken hypothesis waits out the round in a parking state, and check
    commits a hypothesis caught at its start state.  Lacking a coin to
    give an empty round a sensible split, a check arriving at the
    neutral start rejects the input as ill-formed.
    """
    _check_extension(a)
    a = _with_fresh_start(a)
    d = a.dim
    s = next(i for i, p in enumerate(a.pi.entries) if p)
    first, plus, minus = s, d + s, 2 * d + s
    wait, top, bot = 3 * d, 3 * d + 1, 3 * d + 2
    n = 3 * d + 3
    f = a.out.entries

    def blank():
        return [[Fraction(0)] * n for _ in range(n)]

    matrices = []
    for m in a.matrices:
        grid = blank()
        for i, row in enumerate(m.rows):
            for j, p in enumerate(row):
                for offset in (0, d, 2 * d):
                    grid[offset + i][offset + j] = p
        grid[wait][wait] = grid[top][top] = grid[bot][bot] = Fraction(1)
        matrices.append(Mat(grid))

    end = blank()
    for i in range(d):
        end[i][plus] += f[i]
        end[i][minus] += 1 - f[i]
        end[d + i][plus] += f[i]
        end[d + i][wait] += 1 - f[i]
        end[2 * d + i][wait] += f[i]
        end[2 * d + i][minus] += 1 - f[i]
    end[wait][wait] = end[top][top] = end[bot][bot] = Fraction(1)
    matrices.append(Mat(end))

    check = blank()
    for i in range(d):
        check[i][bot] = Fraction(1)  # empty or ill-formed round
        check[d + i][top if d + i == plus else bot] = Fraction(1)
        check[2 * d + i][bot] = Fraction(1)
    check[wait][first] = Fraction(1)
    check[top][top] = check[bot][bot] = Fraction(1)
    matrices.append(Mat(check))

    return Pfa(
        alphabet=a.alphabet + (END, CHECK),
        matrices=tuple(matrices),
        pi=Vec.unit(n, first),
        out=Vec.unit(n, top),
        cutpoint=HALF,
        mode="strict",
    )


# ---------------------------------------------------------------------------
# input sizing for the single-coin variant


def go_reject_probs(x: RatLike, n: int, t: int) -> tuple[Fraction, Fraction]:
    """Exact conditional rejection probabilities of the two branches.

    The + branch rejects iff no round keeps all n sims: (1 - x^n)^t.
    The - branch rejects iff some round loses all n: 1 - (1 - (1-x)^n)^t.
    """
    x = rat(x)
    return (1 - x**n) ** t, 1 - (1 - (1 - x) ** n) ** t


def _log_upper(value: Fraction, grain: int = 1024) -> Fraction:
    """A rational upper bound on ln(value), tight to 1/grain."""
    with localcontext() as ctx:
        ctx.prec = 40
        ln = Decimal(value.numerator).ln() - Decimal(value.denominator).ln()
    return Fraction(ceil(Fraction(ln) * grain), grain)


def _affordable(x: Fraction, n: int, t: int) -> bool:
    """Whether (1 - x^n)^t stays within a few megabits."""
    return t * n * x.denominator.bit_length() <= 2_000_000


def go_input_builder(x: RatLike, eps: RatLike) -> tuple[int, int]:
    """Rounds sizing (n, t) making both conditional rejects at most eps.

    Too few rounds starve the + branch (the input runs out before an
    all-accepted round), too many feed the - branch a fatal all-rejected
    round; the sweet spot takes n with ((1-x)/x)^n <= eps/ln(2/eps) and
    t about ln(2/eps)/x^n, the logarithm replaced by a rational upper
    bound.  Whenever the resulting t is small enough for the exact
    branch probabilities to be computed, the pair is certified by that
    evaluation (bumping n until it passes), which lets n undercut the
    recipe for x near 1.  For x barely above 1/2 the certification
    would need astronomically many rounds, so the recipe's additional
    x^n <= 1/2 clause is enforced instead, under which the analytical
    eps-bounds hold unconditionally.
    """
    x = rat(x)
    eps = rat(eps)
    if not x > HALF:
        raise ValueError("amplification needs acceptance probability above 1/2")
    if not 0 < eps < 1:
        raise ValueError("eps must lie strictly between 0 and 1")
    if x > 1:
        raise ValueError("x is a probability")
    log_bound = _log_upper(2 / eps)
    g = eps / log_bound
    ratio = (1 - x) / x
    n = 1
    while ratio**n > g:
        n += 1
    while True:
        t = max(1, int(log_bound / x**n))
        if not _affordable(x, n, t):
            break
        r_plus, r_minus = go_reject_probs(x, n, t)
        if r_plus <= eps and r_minus <= eps:
            return n, t
        n += 1
    while x**n > HALF:
        n += 1
    return n, max(1, int(log_bound / x**n))
