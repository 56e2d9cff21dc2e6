"""Integer-matrix routes to small probabilistic automata.

Words over the digits {1, 2} are compared through their base-3 values,
which 6x6 integer matrices track multiplicatively.  Standard padding
steps then turn such an integer automaton into a PFA: extra boundary
states isolate the value of interest, two more states force zero row
and column sums, and mixing with the uniform matrix J gives positive
stochastic matrices whose acceptance probability exceeds 1/d exactly
when the integer value is positive.
"""

import dataclasses
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import Mat, Vec, rat
from .pcp import PcpInstance, as_word
from .pcp_to_pfa import pair_symbols
from .pfa import Pfa

__all__ = [
    "ternary_value",
    "claus_A",
    "claus_f1",
    "hirvensalo_A",
    "hirvensalo_pi1",
    "extend_final",
    "extend_start",
    "zero_sum_pad",
    "choose_alpha",
    "turakainen",
    "block_codewords",
    "BlockAutomaton",
    "two_matrix_reduction",
    "claus9_pipeline",
    "hirvensalo20_pipeline",
]


def ternary_value(u) -> int:
    """Base-3 value of a word with digits in {1, 2}.

    Avoiding the digit 0 makes the value function injective; it is in
    fact a bijection between {1,2}* and the nonnegative integers.
    """
    value = 0
    for digit in as_word(u):
        if digit not in ("1", "2"):
            raise ValueError(f"digit {digit!r} is not 1 or 2")
        value = 3 * value + int(digit)
    return value


def claus_A(v, w) -> Mat:
    """6x6 integer matrix tracking the base-3 values of a word pair.

    Satisfies A(v1,w1) A(v2,w2) == A(v1 v2, w1 w2), so a product over a
    pair sequence tracks the two concatenations.  Its first row against
    ``claus_f1()`` yields 1 - ((v)3 - (w)3)^2, positive iff v == w.
    """
    v, w = as_word(v), as_word(w)
    pv, pw = ternary_value(v), ternary_value(w)
    sv, sw = 3 ** len(v), 3 ** len(w)
    return Mat(
        [
            [1, -2 * pv, 2 * pw, pv * pv, pw * pw, -2 * pv * pw],
            [0, sv, 0, -pv * sv, 0, pw * sv],
            [0, 0, sw, 0, pw * sw, -pv * sw],
            [0, 0, 0, sv * sv, 0, 0],
            [0, 0, 0, 0, sw * sw, 0],
            [0, 0, 0, 0, 0, sv * sw],
        ]
    )


def claus_f1(*, weak: bool = False) -> Vec:
    """Check vector for :func:`claus_A` products.

    The default gives 1 - ((v)3-(w)3)^2, which is positive iff the words
    agree.  With ``weak=True`` the leading 1 is dropped, giving
    -((v)3-(w)3)^2, which is >= 0 iff the words agree.
    """
    return Vec((0 if weak else 1, 0, 0, -1, -1, -1))


def hirvensalo_A(v, w) -> Mat:
    """Variant of :func:`claus_A`, reflected at the SW-NE diagonal.

    The multiplicative law reverses: A~(v1,w1) A~(v2,w2) equals
    A~(v2 v1, w2 w1).  Its last row is a unit row, so the last state is
    absorbing -- the property the two-matrix reduction exploits.
    """
    v, w = as_word(v), as_word(w)
    pv, pw = ternary_value(v), ternary_value(w)
    sv, sw = 3 ** len(v), 3 ** len(w)
    return Mat(
        [
            [sv * sw, 0, 0, -pv * sw, pw * sv, -2 * pv * pw],
            [0, sw * sw, 0, pw * sw, 0, pw * pw],
            [0, 0, sv * sv, 0, -pv * sv, pv * pv],
            [0, 0, 0, sw, 0, 2 * pw],
            [0, 0, 0, 0, sv, -2 * pv],
            [0, 0, 0, 0, 0, 1],
        ]
    )


def hirvensalo_pi1() -> Vec:
    """Start vector for :func:`hirvensalo_A` products.

    Against the output vector e6 it gives 1 - 2((v)3-(w)3)^2.  That
    value is odd, hence never 0, so the same construction serves strict
    and weak cutpoint acceptance alike.
    """
    return Vec((-2, -2, -2, 0, 0, 1))


def extend_final(mats: Sequence[Mat], f: Vec) -> tuple[Mat, ...]:
    """Append a final state that holds the chain value against ``f``.

    Each matrix B becomes [[B, B f], [0, 0]].  Products keep this shape,
    so the top-right corner of a product is the old chain value, while
    the empty product (the identity) now evaluates to 0.
    """
    out = []
    for m in mats:
        bf = m @ f
        rows = [list(row) + [bf[i]] for i, row in enumerate(m.rows)]
        rows.append([0] * (m.ncols + 1))
        out.append(Mat(rows))
    return tuple(out)


def extend_start(mats: Sequence[Mat], pi: Vec) -> tuple[Mat, ...]:
    """Prepend a start state that feeds ``pi`` into the chain.

    Each matrix B becomes [[0, pi B], [0, B]]; with the new unit start
    vector e1, nonempty products evaluate as before from ``pi``, and the
    empty product evaluates to 0.
    """
    out = []
    for m in mats:
        top = pi @ m
        rows = [[0] + list(top.entries)]
        rows += [[0] + list(row) for row in m.rows]
        out.append(Mat(rows))
    return tuple(out)


def zero_sum_pad(mats: Sequence[Mat]) -> tuple[Mat, ...]:
    """Add two states making every row and column sum zero.

    The first extra column stays zero and the last extra row stays zero;
    this sandwich keeps products of padded matrices padded, with the
    original product in the upper-left block.
    """
    out = []
    for m in mats:
        n = m.ncols
        if m.nrows != n:
            raise ValueError("zero_sum_pad needs square matrices")
        row_fix = [-sum(row, rat(0)) for row in m.rows]
        col_fix = [-sum(m.col(j).entries, rat(0)) for j in range(n)]
        total = -sum(row_fix, rat(0))
        rows = [list(row) + [0, row_fix[i]] for i, row in enumerate(m.rows)]
        rows.append(col_fix + [0, total])
        rows.append([0] * (n + 2))
        out.append(Mat(rows))
    return tuple(out)


def _uniform(d: int) -> Mat:
    return Mat([[Fraction(1, d)] * d for _ in range(d)])


def _zero_sums(m: Mat) -> bool:
    return all(s == 0 for s in m.row_sums().entries) and all(
        s == 0 for s in m.col_sums().entries
    )


def choose_alpha(mats: Sequence[Mat]) -> Fraction:
    """Largest power of 1/2 keeping every J + alpha*E strictly positive."""
    mats = tuple(mats)
    d = mats[0].ncols
    low = Fraction(1, d)
    alpha = Fraction(1, 2)
    while any(low + alpha * e <= 0 for m in mats for row in m.rows for e in row):
        alpha /= 2
    return alpha


def turakainen(mats: Sequence[Mat], alpha: Optional[Fraction] = None) -> tuple[Mat, ...]:
    """Mix zero-sum integer matrices with the uniform matrix J.

    Because E J = J E = 0 for zero-sum E and J J = J, products satisfy
    e1 F_a1 ... F_am e_out = 1/d + alpha^m * (e1 E_a1 ... E_am e_out)
    for nonempty chains, turning "integer value > 0" into "probability
    above 1/d".
    """
    mats = tuple(mats)
    for m in mats:
        if not _zero_sums(m):
            raise ValueError("row and column sums must be zero; apply zero_sum_pad")
    d = mats[0].ncols
    if alpha is None:
        alpha = choose_alpha(mats)
    uniform = Fraction(1, d)
    out = []
    for m in mats:
        f = Mat([[uniform + alpha * e for e in row] for row in m.rows])
        if not (f.is_positive() and f.is_row_stochastic()):
            raise ValueError("alpha too large: mixed matrix is not positive stochastic")
        out.append(f)
    return tuple(out)


def block_codewords(n: int) -> tuple[str, ...]:
    """Codewords b, ab, aab, ..., with the all-a word last.

    The first n-1 codewords end in b; the n-th is a^(n-1).  A decoder
    only needs to count a's, which is what the block construction does.
    """
    if n < 2:
        raise ValueError("need at least two matrices to encode")
    return tuple("a" * i + "b" for i in range(n - 1)) + ("a" * (n - 1),)


@dataclasses.dataclass(frozen=True)
class BlockAutomaton:
    """Binary-alphabet integer automaton simulating n matrices.

    Requires every original matrix to share an absorbing last state
    (unit last row).  The other d-1 states are replicated once per
    partial-codeword length, the absorbing state is kept un-split, and
    the output vector repeats its core block for every a-count so that
    inputs ending in a dangling partial codeword score as if the
    dangling a's were absent.
    """

    mat_a: Mat
    mat_b: Mat
    pi: Vec
    out: Vec
    codewords: tuple[str, ...]

    @property
    def dim(self) -> int:
        return len(self.pi.entries)

    def encode(self, indices: Sequence[int]) -> str:
        """Concatenate the codewords of 1-based matrix indices."""
        return "".join(self.codewords[i - 1] for i in indices)

    def value(self, word: Sequence[str]) -> Fraction:
        row = self.pi
        for symbol in word:
            if symbol == "a":
                row = row @ self.mat_a
            elif symbol == "b":
                row = row @ self.mat_b
            else:
                raise ValueError(f"symbol {symbol!r} is not a or b")
        return row.dot(self.out)


def two_matrix_reduction(mats: Sequence[Mat], pi: Vec, out: Vec) -> BlockAutomaton:
    """Encode n matrices with a shared absorbing state into two.

    Matrix i is triggered by the codeword ``block_codewords(n)[i-1]``.
    Reading a advances a counter by shifting the live block right;
    reading b (or the (n-1)-th a) applies the decoded matrix back to
    block 0.  The absorbing last state is never split.
    """
    mats = tuple(mats)
    n = len(mats)
    codes = block_codewords(n)
    d = mats[0].ncols
    last = Vec.unit(d, d - 1)
    for m in mats:
        if m.nrows != d or m.ncols != d:
            raise ValueError("matrices must be square and of equal size")
        if m.row(d - 1) != last:
            raise ValueError("last row must be the unit row of an absorbing state")
    if len(pi.entries) != d or len(out.entries) != d:
        raise ValueError("vector dimensions must match the matrices")

    core = d - 1
    dim = core * (n - 1) + 1

    def empty():
        return [[rat(0)] * dim for _ in range(dim)]

    def place(grid, r0, c0, block):
        for i, row in enumerate(block):
            for j, e in enumerate(row):
                grid[r0 + i][c0 + j] = rat(e)

    def hat(m):
        return [row[:core] for row in m.rows[:core]]

    def corner(m):
        return [[row[core]] for row in m.rows[:core]]

    a_grid = empty()
    for j in range(n - 2):
        place(a_grid, j * core, (j + 1) * core, Mat.identity(core).rows)
    place(a_grid, (n - 2) * core, 0, hat(mats[n - 1]))
    place(a_grid, (n - 2) * core, dim - 1, corner(mats[n - 1]))
    a_grid[dim - 1][dim - 1] = rat(1)

    b_grid = empty()
    for j in range(n - 1):
        place(b_grid, j * core, 0, hat(mats[j]))
        place(b_grid, j * core, dim - 1, corner(mats[j]))
    b_grid[dim - 1][dim - 1] = rat(1)

    pi3 = Vec(
        list(pi.entries[:core]) + [rat(0)] * (core * (n - 2)) + [pi.entries[core]]
    )
    f3 = Vec(list(out.entries[:core]) * (n - 1) + [out.entries[core]])
    return BlockAutomaton(Mat(a_grid), Mat(b_grid), pi3, f3, codes)


def claus9_pipeline(inst: PcpInstance) -> Pfa:
    """PFA with k positive matrices and cutpoint 1/9 from a plain PCP.

    A word over the pair numbers has probability above 1/9 exactly when
    it is a solution.  The start is deterministic (unit vector) and a
    single coordinate accepts.
    """
    if inst.variant != "plain":
        raise ValueError("claus9_pipeline expects a plain PCP instance")
    bs = [claus_A(v, w) for v, w in inst.pairs]
    ds = extend_final(bs, claus_f1())
    es = zero_sum_pad(ds)
    fs = turakainen(es)
    d = fs[0].ncols
    return Pfa(
        alphabet=pair_symbols(inst),
        matrices=fs,
        pi=Vec.unit(d, 0),
        out=Vec.unit(d, 6),
        cutpoint=Fraction(1, d),
        mode="strict",
    )


def hirvensalo20_pipeline(inst: PcpInstance, *, reuse_start: bool = False) -> Pfa:
    """Two-matrix PFA with cutpoint 1/dim from a start/finish-pair PCP.

    The start and finish matrices fold into the boundary vectors, the
    remaining matrices reduce to two via :func:`two_matrix_reduction`,
    and boundary-unit plus zero-sum padding yields positive stochastic
    matrices.  With the standard k-2 middle pairs the dimension is
    5(k-2), hence 20 states and cutpoint 1/20 for k = 6.  The input
    encoding a solution ``1 a2 ... a_{m-1} 2`` is the codeword sequence
    of the reversed middle ``a_{m-1} ... a2``.

    ``reuse_start=True`` also keeps the starting pair available as a
    middle matrix (first codeword), for instance families whose starting
    pair reappears inside solutions.
    """
    if inst.variant != "twompcp":
        raise ValueError("hirvensalo20_pipeline expects a twompcp instance")
    mats = {number: hirvensalo_A(*inst.pair(number)) for number in range(1, inst.k + 1)}
    pi2 = hirvensalo_pi1() @ mats[2]
    f2 = mats[1] @ Vec.unit(6, 5)
    middle_numbers = list(range(3, inst.k + 1))
    if reuse_start:
        middle_numbers = [1] + middle_numbers
    block = two_matrix_reduction([mats[i] for i in middle_numbers], pi2, f2)
    with_final = extend_final((block.mat_a, block.mat_b), block.out)
    pi_ext = Vec(list(block.pi.entries) + [rat(0)])
    with_start = extend_start(with_final, pi_ext)
    es = zero_sum_pad(with_start)
    fs = turakainen(es)
    d = fs[0].ncols
    return Pfa(
        alphabet=("a", "b"),
        matrices=fs,
        pi=Vec.unit(d, 0),
        out=Vec.unit(d, d - 3),
        cutpoint=Fraction(1, d),
        mode="strict",
    )
