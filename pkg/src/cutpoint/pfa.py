"""Probabilistic finite automata over exact rationals.

A ``Pfa`` bundles an ordered alphabet, one row-stochastic matrix per symbol,
a start distribution ``pi`` (a row vector), an output vector ``out`` with
entries in [0,1], and a cutpoint with a strict/weak comparison mode.  The
acceptance probability of a word is ``pi @ M_w1 @ ... @ M_wm . out``; a 0-1
output vector recovers the classic accepting-state-set model.

The module also provides the language combinators used by the reduction
compilers (Kronecker product, complement, mixture, start-state folding) and
``bounded_search``, the exhaustive analyzer that backs every emptiness claim
in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .linalg import Mat, RatLike, Vec, rat, rat_str

Word = tuple[str, ...]
WordLike = Union[str, Sequence[str]]

MODES = ("strict", "weak")


def coerce_word(alphabet: Sequence[str], word: WordLike) -> Word:
    """Normalize ``word`` to a tuple of symbols from ``alphabet``.

    A plain string is split into characters, which is convenient for
    single-character alphabets; any other sequence is taken symbol by symbol.
    """
    symbols = tuple(word)
    allowed = set(alphabet)
    for s in symbols:
        if s not in allowed:
            raise ValueError(f"symbol {s!r} not in alphabet {list(alphabet)}")
    return symbols


@dataclass(frozen=True)
class Pfa:
    alphabet: tuple[str, ...]
    matrices: tuple[Mat, ...]
    pi: Vec
    out: Vec
    cutpoint: Fraction
    mode: str = "strict"

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "matrices", tuple(self.matrices))
        object.__setattr__(self, "cutpoint", rat(self.cutpoint))
        if not self.alphabet:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet symbols must be distinct")
        if len(self.matrices) != len(self.alphabet):
            raise ValueError(
                f"{len(self.matrices)} matrices for {len(self.alphabet)} symbols"
            )
        d = self.pi.dim
        for sym, m in zip(self.alphabet, self.matrices):
            if m.shape != (d, d):
                raise ValueError(f"matrix for {sym!r} has shape {m.shape}, want {(d, d)}")
            if not m.is_row_stochastic():
                raise ValueError(f"matrix for {sym!r} is not row-stochastic")
        if not self.pi.is_distribution():
            raise ValueError("pi must be a probability distribution")
        if self.out.dim != d:
            raise ValueError(f"out has dim {self.out.dim}, want {d}")
        if not self.out.in_unit_interval():
            raise ValueError("out entries must lie in [0,1]")
        if not 0 <= self.cutpoint <= 1:
            raise ValueError("cutpoint must lie in [0,1]")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    @property
    def dim(self) -> int:
        """Number of states."""
        return self.pi.dim

    def matrix(self, symbol: str) -> Mat:
        try:
            return self.matrices[self.alphabet.index(symbol)]
        except ValueError:
            raise ValueError(f"symbol {symbol!r} not in alphabet") from None

    def word_matrix(self, word: WordLike) -> Mat:
        """Product M_w1 ... M_wm; the identity for the empty word."""
        w = coerce_word(self.alphabet, word)
        result = Mat.identity(self.dim)
        for s in w:
            result = result @ self.matrix(s)
        return result

    def accept_prob(self, word: WordLike) -> Fraction:
        """Exact acceptance probability pi @ M_w1 ... M_wm . out."""
        w = coerce_word(self.alphabet, word)
        vec = self.pi
        for s in w:
            vec = vec @ self.matrix(s)
        return vec.dot(self.out)

    def accepts(self, word: WordLike) -> bool:
        prob = self.accept_prob(word)
        return prob > self.cutpoint if self.mode == "strict" else prob >= self.cutpoint


# --- combinators ------------------------------------------------------------


def product_pfa(p: Pfa, q: Pfa) -> Pfa:
    """Run ``p`` and ``q`` independently in parallel; accept iff both accept.

    Kronecker everything; the acceptance probability of every word is the
    product of the component probabilities.  The cutpoint multiplies too,
    which is the natural threshold for the conjunction of independent events,
    and the mode is taken from ``p`` (the combinator is used for its values;
    downstream constructions set their own cutpoint anyway).
    """
    if p.alphabet != q.alphabet:
        raise ValueError("product requires the same alphabet")
    return Pfa(
        alphabet=p.alphabet,
        matrices=tuple(a.kron(b) for a, b in zip(p.matrices, q.matrices)),
        pi=p.pi.kron(q.pi),
        out=p.out.kron(q.out),
        cutpoint=p.cutpoint * q.cutpoint,
        mode=p.mode,
    )


def complement(p: Pfa) -> Pfa:
    """Flip the acceptance probability to 1 - x.

    The output vector becomes 1 - out, the cutpoint 1 - cutpoint, and the
    mode swaps strict/weak, so the recognized language is exactly inverted.
    """
    return Pfa(
        alphabet=p.alphabet,
        matrices=p.matrices,
        pi=p.pi,
        out=Vec.ones(p.out.dim) - p.out,
        cutpoint=1 - p.cutpoint,
        mode="weak" if p.mode == "strict" else "strict",
    )


def mixture(
    weights: Sequence[RatLike],
    ps: Sequence[Pfa],
    cutpoint: Optional[RatLike] = None,
    mode: Optional[str] = None,
) -> Pfa:
    """Convex combination of PFAs over a common alphabet.

    The parts run side by side as diagonal blocks and the start distribution
    is the weighted concatenation of the component ones — no extra start
    state is introduced.  Every word's acceptance probability is the convex
    combination of the component probabilities.  The cutpoint defaults to
    the same combination of the component cutpoints; the mode defaults to
    the common component mode and must be passed explicitly if they differ.
    """
    ws = [rat(w) for w in weights]
    if len(ws) != len(ps) or not ps:
        raise ValueError("need one weight per component")
    if any(w < 0 for w in ws):
        raise ValueError("mixture weights must be nonnegative")
    if sum(ws) != 1:
        raise ValueError(f"mixture weights sum to {sum(ws)}, not 1")
    alphabet = ps[0].alphabet
    for p in ps[1:]:
        if p.alphabet != alphabet:
            raise ValueError("mixture requires a common alphabet")
    if mode is None:
        modes = {p.mode for p in ps}
        if len(modes) != 1:
            raise ValueError("components disagree on mode; pass mode= explicitly")
        (mode,) = modes
    if cutpoint is None:
        cutpoint = sum(w * p.cutpoint for w, p in zip(ws, ps))
    return Pfa(
        alphabet=alphabet,
        matrices=tuple(
            Mat.block_diag(*(p.matrices[k] for p in ps)) for k in range(len(alphabet))
        ),
        pi=Vec.concat(*(p.pi.scale(w) for w, p in zip(ws, ps))),
        out=Vec.concat(*(p.out for p in ps)),
        cutpoint=cutpoint,
        mode=mode,
    )


def add_start_state(p: Pfa, empty_out: RatLike = 0) -> Pfa:
    """Fold the start distribution into a fresh start state.

    The new state 0 carries all initial mass and jumps on the first symbol
    exactly as the old distribution would have; no transition re-enters it.
    Nonempty words keep their acceptance probability, while the empty word's
    becomes ``empty_out`` (default 0 — the usual way to kill the empty word).
    """
    d = p.dim
    new_mats = []
    for m in p.matrices:
        first_row = p.pi @ m
        new_mats.append(
            Mat.from_blocks(
                [
                    [Mat.zeros(1, 1), Mat([list(first_row)])],
                    [Mat.zeros(d, 1), m],
                ]
            )
        )
    return Pfa(
        alphabet=p.alphabet,
        matrices=tuple(new_mats),
        pi=Vec.unit(d + 1, 0),
        out=Vec.concat(Vec([empty_out]), p.out),
        cutpoint=p.cutpoint,
        mode=p.mode,
    )


# --- bounded search ---------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    word: Word
    probability: Fraction


@dataclass(frozen=True)
class LengthStats:
    length: int
    count: int
    max_prob: Fraction
    max_word: Word
    min_prob: Fraction


@dataclass(frozen=True)
class SearchReport:
    witness: Optional[Witness]
    max_prob: Fraction
    max_word: Word
    words_checked: int
    by_length: tuple[LengthStats, ...]

    @property
    def found(self) -> bool:
        return self.witness is not None


WANTS = ("above", "at_least", "exactly")


def bounded_search(
    p: Pfa,
    max_len: int,
    want: str = "above",
    value: Optional[RatLike] = None,
) -> SearchReport:
    """Exhaustively evaluate every word of length <= max_len.

    Words are enumerated shortest first and lexicographically by alphabet
    order within each length, reusing the running row vector along the
    prefix tree.  The returned witness is the first word in that order whose
    probability is above / at least / exactly ``value`` (the cutpoint when
    ``value`` is omitted).  Enumeration always runs to completion so the
    report's maxima are exhaustive even when a witness appears early.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    if want not in WANTS:
        raise ValueError(f"want must be one of {WANTS}")
    target = p.cutpoint if value is None else rat(value)

    def hit(x: Fraction) -> bool:
        if want == "above":
            return x > target
        if want == "at_least":
            return x >= target
        return x == target

    witness: Optional[Witness] = None
    max_prob: Optional[Fraction] = None
    max_word: Word = ()
    checked = 0
    stats: list[LengthStats] = []
    level: list[tuple[Word, Vec]] = [((), p.pi)]
    for length in range(max_len + 1):
        lmax: Optional[Fraction] = None
        lmax_word: Word = ()
        lmin: Optional[Fraction] = None
        for word, vec in level:
            prob = vec.dot(p.out)
            checked += 1
            if witness is None and hit(prob):
                witness = Witness(word, prob)
            if lmax is None or prob > lmax:
                lmax, lmax_word = prob, word
            if lmin is None or prob < lmin:
                lmin = prob
        assert lmax is not None and lmin is not None
        stats.append(LengthStats(length, len(level), lmax, lmax_word, lmin))
        if max_prob is None or lmax > max_prob:
            max_prob, max_word = lmax, lmax_word
        if length < max_len:
            level = [
                (word + (sym,), vec @ m)
                for word, vec in level
                for sym, m in zip(p.alphabet, p.matrices)
            ]
    assert max_prob is not None
    return SearchReport(witness, max_prob, max_word, checked, tuple(stats))


# --- JSON -------------------------------------------------------------------


def pfa_to_json(p: Pfa) -> dict:
    """Plain-JSON form: rationals as "num/den" strings, matrices row-major."""
    return {
        "alphabet": list(p.alphabet),
        "matrices": {sym: m.to_strs() for sym, m in zip(p.alphabet, p.matrices)},
        "pi": p.pi.to_strs(),
        "out": p.out.to_strs(),
        "cutpoint": rat_str(p.cutpoint),
        "mode": p.mode,
    }


def pfa_from_json(data: dict) -> Pfa:
    alphabet = tuple(data["alphabet"])
    mats = data["matrices"]
    missing = [s for s in alphabet if s not in mats]
    if missing:
        raise ValueError(f"matrices missing for symbols {missing}")
    return Pfa(
        alphabet=alphabet,
        matrices=tuple(Mat.from_strs(mats[s]) for s in alphabet),
        pi=Vec.from_strs(data["pi"]),
        out=Vec.from_strs(data["out"]),
        cutpoint=rat(data["cutpoint"]),
        mode=data["mode"],
    )
