"""Compile word-matching instances into exact-rational PFAs.

Every construction here is driven by the binary automaton of
:mod:`cutpoint.binary`: reading the index word ``a_1 ... a_m`` multiplies the
matrices ``B(x_{a_1}) ... B(x_{a_m})``, which by the concatenation law equals
``B(x_{a_m} ... x_{a_1})``.  All compilers therefore compare the *reversed*
concatenation of the stored words.  For an instance whose solutions are
defined by forward concatenation (``plain``/``mpcp``), compile
``reverse_instance(inst)`` if you want accepted index words to coincide with
solutions read left to right.

The central identity: with phi = value of the accumulated v-word and
psi = value of the accumulated w-word,

    1/2 * phi*psi + 1/4 * (1 - phi^2) + 1/4 * (1 - psi^2)
        = 1/2 - 1/4 * (phi - psi)^2,

so the mixture reaches 1/2 exactly when the two concatenations agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .binary import bin_fraction, binary_matrix
from .linalg import Mat, Vec, rat
from .pcp import PcpInstance, Word, as_word, word_str
from .pfa import Pfa, add_start_state, complement, mixture, product_pfa

__all__ = [
    "GadgetParams",
    "pair_symbols",
    "phi_psi_automata",
    "merge_squared",
    "corner_matrix",
    "pair_matrix_9",
    "pair_matrix_12",
    "twelve_state_output",
    "equality_pfa_13",
    "equality_pfa_11",
    "strict_gadget",
    "strict_pfa_15",
    "strict_pfa_13",
    "starting_distribution",
    "rmpcp_compile",
    "nine_state_output",
    "nine_state_pfa",
    "eliminate_output_vector",
    "m_infinity_closure",
    "coding_map",
    "encode_word",
    "code_binary",
]

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def _require_binary(inst: PcpInstance) -> None:
    if not inst.is_binary():
        raise ValueError("construction needs words over the alphabet {0,1}")


def pair_symbols(inst: PcpInstance, *, first: int = 1) -> tuple[str, ...]:
    """Input symbols for the compiled PFA: pair numbers as decimal strings."""
    return tuple(str(i) for i in range(first, inst.k + 1))


def _word_matrix(word: Word) -> Mat:
    return binary_matrix(word_str(word))


@dataclass(frozen=True)
class GadgetParams:
    """Denominator bookkeeping for the strict-cutpoint constructions.

    ``gamma`` is the leak probability of the absorbing accept state; it must
    be at most 4**-len for every word the automaton can read so that a failed
    match loses more than the leak can recover.  ``gamma1`` plays the same
    role for the distinguished first pair when that pair is folded into the
    starting distribution.
    """

    gamma: Fraction
    gamma1: Fraction
    cutpoint: Fraction = QUARTER

    def __post_init__(self) -> None:
        for name in ("gamma", "gamma1"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must be in (0, 1]")
        if not 0 < self.cutpoint < HALF:
            raise ValueError("cutpoint must lie strictly between 0 and 1/2")

    @classmethod
    def for_instance(cls, inst: PcpInstance, cutpoint: Fraction = QUARTER) -> "GadgetParams":
        longest = max(max(len(v), len(w)) for v, w in inst.pairs)
        v1, w1 = inst.pair(1)
        first = max(len(v1), len(w1), 1)
        return cls(
            gamma=Fraction(1, 4**max(longest, 1)),
            gamma1=Fraction(1, 4**first),
            cutpoint=Fraction(cutpoint),
        )


def phi_psi_automata(inst: PcpInstance) -> tuple[Pfa, Pfa]:
    """Two-state automata computing the v-side and w-side word values.

    Both share the alphabet ``1..k``.  Reading ``u`` leaves the automaton in
    its second state with probability ``0.x`` where ``x`` is the reversed
    concatenation of the corresponding words; the empty word gives 0.
    """
    _require_binary(inst)
    symbols = pair_symbols(inst)
    phi = Pfa(
        alphabet=symbols,
        matrices=tuple(_word_matrix(v) for v, _ in inst.pairs),
        pi=Vec.unit(2, 0),
        out=Vec.unit(2, 1),
        cutpoint=HALF,
        mode="weak",
    )
    psi = Pfa(
        alphabet=symbols,
        matrices=tuple(_word_matrix(w) for _, w in inst.pairs),
        pi=Vec.unit(2, 0),
        out=Vec.unit(2, 1),
        cutpoint=HALF,
        mode="weak",
    )
    return phi, psi


def merge_squared(m: Mat) -> Mat:
    """Condense the product of two independent copies of a 2-state chain.

    The four joint states collapse to three because (0,1) and (1,0) are
    interchangeable; the middle state carries both.  Rows and columns are
    ordered (both 0), (mixed), (both 1).
    """
    if m.shape != (2, 2):
        raise ValueError("merge_squared expects a 2x2 matrix")
    p00, p01 = m[0, 0], m[0, 1]
    p10, p11 = m[1, 0], m[1, 1]
    return Mat(
        [
            [p00 * p00, 2 * p00 * p01, p01 * p01],
            [p00 * p10, p01 * p10 + p00 * p11, p01 * p11],
            [p10 * p10, 2 * p10 * p11, p11 * p11],
        ]
    )


def corner_matrix(gamma: Fraction) -> Mat:
    """Absorbing accept/reject pair: accept leaks to reject at rate gamma."""
    gamma = Fraction(gamma)
    if not 0 < gamma <= 1:
        raise ValueError("gamma must be in (0, 1]")
    return Mat([[gamma, 1 - gamma], [rat(0), rat(1)]])


def pair_matrix_9(v: Word | str, w: Word | str) -> Mat:
    """Joint condensed-square transition for one word pair (9 x 9).

    Kronecker product of the two merged chains; row index is
    3 * (v-state) + (w-state).
    """
    v_m = binary_matrix(word_str(as_word(v)))
    w_m = binary_matrix(word_str(as_word(w)))
    return merge_squared(v_m).kron(merge_squared(w_m))


def pair_matrix_12(v: Word | str, w: Word | str, gamma: Fraction) -> Mat:
    """Transition matrix of the 12-state strict automaton for one pair.

    Blocks along the diagonal: the 4-state product chain, the two merged
    squares, and the accept/reject corner.
    """
    v_m = binary_matrix(word_str(as_word(v)))
    w_m = binary_matrix(word_str(as_word(w)))
    return Mat.block_diag(
        v_m.kron(w_m),
        merge_squared(v_m),
        merge_squared(w_m),
        corner_matrix(gamma),
    )


def twelve_state_output() -> Vec:
    """Output indicator of the 12-state automaton (6 accepting states)."""
    return Vec(
        (rat(0), rat(0), rat(0), rat(1))  # product box accepts on (1,1)
        + (rat(1), rat(1), rat(0))  # complemented v-square
        + (rat(1), rat(1), rat(0))  # complemented w-square
        + (rat(1), rat(0))
    )


def equality_pfa_13(inst: PcpInstance) -> Pfa:
    """13-state weak automaton: probability 1/2 reached iff the sides match.

    Mixes the product automaton for phi*psi (weight 1/2) with the
    complemented squares 1 - phi^2 and 1 - psi^2 (weight 1/4 each), then
    prepends a start state so the empty word scores 0 instead of 1/2.
    """
    phi, psi = phi_psi_automata(inst)
    mixed = mixture(
        [HALF, QUARTER, QUARTER],
        [
            product_pfa(phi, psi),
            complement(product_pfa(phi, phi)),
            complement(product_pfa(psi, psi)),
        ],
        cutpoint=HALF,
        mode="weak",
    )
    return add_start_state(mixed)


def _merged_box(words: tuple[Word, ...], symbols: tuple[str, ...]) -> Pfa:
    # 3-state stand-in for the complemented square 1 - value^2: the merged
    # chain with output 1 everywhere except the (both 1) corner.
    return Pfa(
        alphabet=symbols,
        matrices=tuple(merge_squared(_word_matrix(x)) for x in words),
        pi=Vec.unit(3, 0),
        out=Vec((rat(1), rat(1), rat(0))),
        cutpoint=HALF,
        mode="weak",
    )


def equality_pfa_11(inst: PcpInstance) -> Pfa:
    """Same language and word values as :func:`equality_pfa_13`, two states fewer.

    The squared boxes do not need to distinguish (0,1) from (1,0), so each
    4-state square collapses to 3 states.
    """
    _require_binary(inst)
    symbols = pair_symbols(inst)
    phi, psi = phi_psi_automata(inst)
    vs = tuple(v for v, _ in inst.pairs)
    ws = tuple(w for _, w in inst.pairs)
    mixed = mixture(
        [HALF, QUARTER, QUARTER],
        [product_pfa(phi, psi), _merged_box(vs, symbols), _merged_box(ws, symbols)],
        cutpoint=HALF,
        mode="weak",
    )
    return add_start_state(mixed)


def strict_gadget(
    p: Pfa,
    gamma: Fraction,
    *,
    cutpoint: Fraction = QUARTER,
) -> Pfa:
    """Turn a weak-1/2 automaton into a strict one by adding a leaking coin.

    Two absorbing states are appended: an accept state that decays into the
    reject state with probability ``gamma`` per symbol, and the reject sink.
    The base automaton keeps 2*cutpoint of the starting mass, the accept
    state receives mu = min(cutpoint/2, 1 - 2*cutpoint), and the remainder
    goes to the sink.  A word of length m then scores

        2*cutpoint * base(word) + mu * gamma**m,

    which exceeds ``cutpoint`` exactly when base(word) = 1/2, provided
    ``gamma`` undercuts the granularity of the base automaton's values.
    The empty word scores mu.
    """
    gamma = Fraction(gamma)
    cutpoint = Fraction(cutpoint)
    if not 0 < gamma <= 1:
        raise ValueError("gamma must be in (0, 1]")
    if not 0 < cutpoint < HALF:
        raise ValueError("cutpoint must lie strictly between 0 and 1/2")
    mu = min(cutpoint / 2, 1 - 2 * cutpoint)
    corner = corner_matrix(gamma)
    matrices = tuple(Mat.block_diag(m, corner) for m in p.matrices)
    pi = Vec.concat(p.pi.scale(2 * cutpoint), Vec((mu, 1 - 2 * cutpoint - mu)))
    out = Vec.concat(p.out, Vec((rat(1), rat(0))))
    return Pfa(
        alphabet=p.alphabet,
        matrices=matrices,
        pi=pi,
        out=out,
        cutpoint=cutpoint,
        mode="strict",
    )


def strict_pfa_15(inst: PcpInstance, params: GadgetParams | None = None) -> Pfa:
    """Strict-cutpoint version of :func:`equality_pfa_13` (13 + 2 states)."""
    params = params or GadgetParams.for_instance(inst)
    return strict_gadget(equality_pfa_13(inst), params.gamma, cutpoint=params.cutpoint)


def strict_pfa_13(inst: PcpInstance, params: GadgetParams | None = None) -> Pfa:
    """Strict-cutpoint version of :func:`equality_pfa_11` (11 + 2 states)."""
    params = params or GadgetParams.for_instance(inst)
    return strict_gadget(equality_pfa_11(inst), params.gamma, cutpoint=params.cutpoint)


def starting_distribution(
    v1: Word | str,
    w1: Word | str,
    gamma1: Fraction | None = None,
) -> Vec:
    """Closed-form starting distribution after folding in the first pair.

    ``v1`` and ``w1`` are the binary words as the automaton reads them (for a
    reversed-matching instance that means the letter-reversed originals).
    The 12 entries cover, in order: the four product states, the three merged
    v-square states, the three merged w-square states, and the accept/reject
    pair.  Entries sum to 1.
    """
    v1 = tuple(v1)
    w1 = tuple(w1)
    if not v1 or not w1:
        raise ValueError("first-pair words must be nonempty")
    for word in (v1, w1):
        if any(c not in "01" for c in word):
            raise ValueError("first-pair words must be binary")
    if gamma1 is None:
        gamma1 = Fraction(1, 4 ** max(len(v1), len(w1)))
    p = bin_fraction(word_str(v1))
    q = bin_fraction(word_str(w1))
    quarter, eighth = QUARTER, Fraction(1, 8)
    entries = (
        quarter * (1 - p) * (1 - q),
        quarter * (1 - p) * q,
        quarter * p * (1 - q),
        quarter * p * q,
        eighth * (1 - p) ** 2,
        quarter * (1 - p) * p,
        eighth * p * p,
        eighth * (1 - q) ** 2,
        quarter * (1 - q) * q,
        eighth * q * q,
        eighth * gamma1,
        HALF - eighth * gamma1,
    )
    vec = Vec(entries)
    assert vec.total() == 1
    return vec


def rmpcp_compile(inst: PcpInstance, params: GadgetParams | None = None) -> Pfa:
    """12-state strict automaton for a reversed-matching instance.

    The non-recurring first pair is folded into the starting distribution, so
    the alphabet is ``2..k`` and accepted words are exactly the index tails
    ``a_2 ... a_m`` (read left to right) of matching sequences.  The leak
    probability for the first transition is ``gamma1`` (sized for the first
    pair, which may be much longer than the rest); every later transition
    uses the uniform ``gamma``.
    """
    _require_binary(inst)
    if inst.variant != "rmpcp":
        raise ValueError("rmpcp_compile expects a reversed-matching instance")
    if inst.k < 2:
        raise ValueError("need at least one pair besides the first")
    cutpoint = params.cutpoint if params else QUARTER
    if cutpoint != QUARTER:
        raise ValueError("the folded starting distribution is specific to cutpoint 1/4")
    longest_tail = max(
        max(len(v), len(w)) for v, w in inst.pairs[1:]
    )
    gamma = params.gamma if params else Fraction(1, 4**longest_tail)
    v1, w1 = inst.pair(1)
    gamma1 = params.gamma1 if params else Fraction(1, 4 ** max(len(v1), len(w1)))

    matrices = [pair_matrix_12(v, w, gamma) for v, w in inst.pairs[1:]]
    pi = starting_distribution(v1, w1, gamma1)
    out = twelve_state_output()
    return Pfa(
        alphabet=pair_symbols(inst, first=2),
        matrices=tuple(matrices),
        pi=pi,
        out=out,
        cutpoint=QUARTER,
        mode="strict",
    )


def nine_state_output() -> Vec:
    """Output values for the 9-state automaton, flattened row-major.

    The value at joint state (i, j) collects the shares of the three mixture
    terms: 1/2 from the product (counting the mixed states half), 1/4 from
    each complemented square.
    """
    levels = (rat(0), HALF, rat(1))
    entries = []
    for i in range(3):
        for j in range(3):
            share = HALF * levels[i] * levels[j]
            if i < 2:
                share += QUARTER
            if j < 2:
                share += QUARTER
            entries.append(share)
    return Vec(entries)


def nine_state_pfa(inst: PcpInstance) -> Pfa:
    """9-state automaton with fractional outputs, weak cutpoint 1/2.

    Tracks both merged squares jointly; the output vector recombines them so
    that every word (including the empty one) scores exactly
    ``1/2 - 1/4*(phi - psi)^2``.  Callers that must exclude the empty word
    fold a first matrix into the starting distribution.
    """
    _require_binary(inst)
    matrices = tuple(pair_matrix_9(v, w) for v, w in inst.pairs)
    return Pfa(
        alphabet=pair_symbols(inst),
        matrices=matrices,
        pi=Vec.unit(9, 0),
        out=nine_state_output(),
        cutpoint=HALF,
        mode="weak",
    )


def eliminate_output_vector(p: Pfa) -> Pfa:
    """Replace fractional outputs by a 0-1 classification, doubling states.

    Each state q splits into an accepting copy and a rejecting copy; the
    random acceptance decision is made on entry instead of at the end.
    Acceptance probabilities agree with ``p`` on every word, the empty word
    included.  Strictly positive matrices stay positive when all outputs lie
    strictly between 0 and 1.
    """
    d = p.dim
    f = p.out

    def split_row(row: Vec) -> list[Fraction]:
        return [row[j] * f[j] for j in range(d)] + [
            row[j] * (1 - f[j]) for j in range(d)
        ]

    matrices = []
    for m in p.matrices:
        rows = [split_row(m.row(i)) for i in range(d)]
        matrices.append(Mat(rows + rows))
    pi = Vec(tuple(split_row(p.pi)))
    out = Vec.concat(Vec.ones(d), Vec.zeros(d))
    return Pfa(
        alphabet=p.alphabet,
        matrices=tuple(matrices),
        pi=pi,
        out=out,
        cutpoint=p.cutpoint,
        mode=p.mode,
    )


def m_infinity_closure(p: Pfa, finish_symbol: str) -> Pfa:
    """Push the output vector into a final transition ending at one state.

    The automaton's last two states must be the absorbing accept/reject
    pair.  A finishing matrix is appended to the matrix of ``finish_symbol``:
    it sends every state q to the accept state with probability ``out[q]``
    and to the reject state otherwise, after which the output vector becomes
    the accept-state indicator.  Words ending in ``finish_symbol`` keep their
    probability; by construction that matrix satisfies
    ``finalizer @ out_new == out_old``.
    """
    if p.dim < 2:
        raise ValueError("need the two absorbing states")
    if finish_symbol not in p.alphabet:
        raise ValueError(f"unknown symbol {finish_symbol!r}")
    d = p.dim
    q_accept, q_reject = d - 2, d - 1
    finalizer_rows = []
    for q in range(d):
        row = [rat(0)] * d
        row[q_accept] = p.out[q]
        row[q_reject] = 1 - p.out[q]
        finalizer_rows.append(row)
    finalizer = Mat(finalizer_rows)
    matrices = list(p.matrices)
    idx = p.alphabet.index(finish_symbol)
    matrices[idx] = matrices[idx] @ finalizer
    return Pfa(
        alphabet=p.alphabet,
        matrices=tuple(matrices),
        pi=p.pi,
        out=Vec.unit(d, q_accept),
        cutpoint=p.cutpoint,
        mode=p.mode,
    )


def coding_map(alphabet: tuple[str, ...], letters: tuple[str, str] = ("a", "b")) -> dict[str, str]:
    """Prefix code over two letters: b, ab, aab, ..., a^(k-2)b, a^(k-1)."""
    k = len(alphabet)
    if k < 2:
        raise ValueError("need at least two symbols to recode")
    a, b = letters
    codes = {symbol: a * j + b for j, symbol in enumerate(alphabet[:-1])}
    codes[alphabet[-1]] = a * (k - 1)
    return codes


def encode_word(
    alphabet: tuple[str, ...],
    word: tuple[str, ...] | str,
    letters: tuple[str, str] = ("a", "b"),
) -> tuple[str, ...]:
    codes = coding_map(alphabet, letters)
    out: list[str] = []
    for symbol in word:
        out.extend(codes[symbol])
    return tuple(out)


def code_binary(p: Pfa, letters: tuple[str, str] = ("a", "b")) -> Pfa:
    """Recode a k-symbol automaton over a two-letter alphabet.

    The new automaton counts leading a's (the decoder state) and applies the
    original matrix once a codeword completes.  States are grouped in k-1
    blocks by counter value; start and output live in the counter-0 block,
    so any word that is not the image of the code is accepted with
    probability exactly 0.
    """
    k = len(p.alphabet)
    if k < 3:
        raise ValueError("recoding needs at least three symbols to be useful")
    d = p.dim
    blocks = k - 1
    zero = Mat.zeros(d, d)
    eye = Mat.identity(d)

    def assemble(grid: list[list[Mat]]) -> Mat:
        return Mat.from_blocks(grid)

    # Reading a: counter c advances to c+1; from the last block the final
    # all-a codeword fires the last symbol's matrix and resets.
    a_grid = []
    for c in range(blocks):
        row = [zero] * blocks
        if c < blocks - 1:
            row[c + 1] = eye
        else:
            row[0] = p.matrices[k - 1]
        a_grid.append(row)
    # Reading b: codeword a^c b completes, firing matrix c+1 and resetting.
    b_grid = []
    for c in range(blocks):
        row = [zero] * blocks
        row[0] = p.matrices[c]
        b_grid.append(row)

    pi = Vec.concat(p.pi, Vec.zeros(d * (blocks - 1)))
    out = Vec.concat(p.out, Vec.zeros(d * (blocks - 1)))
    return Pfa(
        alphabet=letters,
        matrices=(assemble(a_grid), assemble(b_grid)),
        pi=pi,
        out=out,
        cutpoint=p.cutpoint,
        mode=p.mode,
    )
