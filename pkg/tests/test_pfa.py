import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cutpoint.binary import B, bin_fraction
from cutpoint.linalg import Mat, Vec
from cutpoint.pfa import (
    Pfa,
    Witness,
    add_start_state,
    bounded_search,
    complement,
    mixture,
    pfa_from_json,
    pfa_to_json,
    product_pfa,
)


def coin_pfa(cutpoint="1/2", mode="weak"):
    """Two-state automaton whose value on a word is the binary fraction of the
    reversed word under a->1, b->0."""
    return Pfa(
        alphabet=("a", "b"),
        matrices=(B("1"), B("0")),
        pi=Vec.unit(2, 0),
        out=Vec.unit(2, 1),
        cutpoint=cutpoint,
        mode=mode,
    )


def reversed_fraction(word):
    return bin_fraction("".join("1" if s == "a" else "0" for s in reversed(word)))


words = st.lists(st.sampled_from(["a", "b"]), max_size=8).map(tuple)


# --- construction and validation --------------------------------------------


def test_valid_pfa_builds():
    p = coin_pfa()
    assert p.dim == 2
    assert p.matrix("a") == B("1")
    with pytest.raises(ValueError):
        p.matrix("c")


def test_rejects_non_stochastic_matrix():
    with pytest.raises(ValueError):
        Pfa(("a",), (Mat([[1, 1], [0, 1]]),), Vec.unit(2, 0), Vec.unit(2, 1), 0)


def test_rejects_bad_pi_and_out():
    m = (Mat.identity(2),)
    with pytest.raises(ValueError):
        Pfa(("a",), m, Vec(["1/2", "1/3"]), Vec.unit(2, 1), 0)
    with pytest.raises(ValueError):
        Pfa(("a",), m, Vec.unit(2, 0), Vec([1, 2]), 0)
    with pytest.raises(ValueError):
        Pfa(("a",), m, Vec.unit(2, 0), Vec.unit(2, 1), "3/2")
    with pytest.raises(ValueError):
        Pfa(("a",), m, Vec.unit(2, 0), Vec.unit(2, 1), 0, mode="maybe")


def test_rejects_alphabet_matrix_mismatch():
    with pytest.raises(ValueError):
        Pfa(("a", "b"), (Mat.identity(2),), Vec.unit(2, 0), Vec.unit(2, 1), 0)
    with pytest.raises(ValueError):
        Pfa(("a", "a"), (Mat.identity(2),) * 2, Vec.unit(2, 0), Vec.unit(2, 1), 0)


# --- acceptance probability -------------------------------------------------


def test_empty_word_is_pi_dot_out():
    p = coin_pfa()
    assert p.accept_prob(()) == 0
    q = Pfa(("a",), (Mat.identity(2),), Vec(["1/3", "2/3"]), Vec(["1/2", 1]), 0)
    assert q.accept_prob("") == Fraction(1, 3) * Fraction(1, 2) + Fraction(2, 3)


def test_accept_prob_is_reversed_binary_fraction():
    p = coin_pfa()
    assert p.accept_prob("ab") == Fraction(1, 4)
    rng = random.Random(7)
    for _ in range(100):
        w = tuple(rng.choice("ab") for _ in range(rng.randint(0, 10)))
        assert p.accept_prob(w) == reversed_fraction(w)


def test_all_ones_output_accepts_everything():
    p = Pfa(("a", "b"), (B("1"), B("0")), Vec.unit(2, 0), Vec.ones(2), 1, "weak")
    for w in ["", "a", "ba", "abba"]:
        assert p.accept_prob(w) == 1


@given(words)
def test_accept_prob_in_unit_interval(w):
    p = coin_pfa()
    assert 0 <= p.accept_prob(w) <= 1


def test_unknown_symbol_raises():
    with pytest.raises(ValueError):
        coin_pfa().accept_prob("ax")


def test_accepts_uses_mode():
    strict = coin_pfa(cutpoint="1/2", mode="strict")
    weak = coin_pfa(cutpoint="1/2", mode="weak")
    assert not strict.accepts("a")  # exactly 1/2
    assert weak.accepts("a")
    assert strict.accepts("aa")  # 3/4


def test_word_matrix_matches_accept_prob():
    p = coin_pfa()
    for w in ["", "a", "ab", "bab"]:
        assert (p.pi @ p.word_matrix(w)).dot(p.out) == p.accept_prob(w)
    assert p.word_matrix("") == Mat.identity(2)


# --- combinators ------------------------------------------------------------


@given(words)
def test_product_multiplies_probabilities(w):
    p = coin_pfa()
    q = complement(p)
    pq = product_pfa(p, q)
    assert pq.accept_prob(w) == p.accept_prob(w) * q.accept_prob(w)
    assert pq.dim == 4


def test_product_requires_same_alphabet():
    p = coin_pfa()
    q = Pfa(("x",), (Mat.identity(1),), Vec([1]), Vec([1]), 0)
    with pytest.raises(ValueError):
        product_pfa(p, q)


@given(words)
def test_complement_flips_probability(w):
    p = coin_pfa()
    c = complement(p)
    assert c.accept_prob(w) == 1 - p.accept_prob(w)
    assert c.mode == "strict" and c.cutpoint == Fraction(1, 2)
    cc = complement(c)
    assert cc.accept_prob(w) == p.accept_prob(w)


@given(words)
def test_mixture_is_affine(w):
    p = coin_pfa()
    q = complement(p)
    r = product_pfa(p, complement(p))
    mix = mixture(["1/2", "1/4", "1/4"], [p, q, r], cutpoint="1/2", mode="weak")
    expected = (
        Fraction(1, 2) * p.accept_prob(w)
        + Fraction(1, 4) * q.accept_prob(w)
        + Fraction(1, 4) * r.accept_prob(w)
    )
    assert mix.accept_prob(w) == expected
    assert mix.dim == p.dim + q.dim + r.dim


def test_mixture_validations():
    p = coin_pfa()
    with pytest.raises(ValueError):
        mixture(["1/2", "1/4"], [p, p])  # weights don't sum to 1
    with pytest.raises(ValueError):
        mixture(["3/2", "-1/2"], [p, p])
    with pytest.raises(ValueError):
        mixture(["1/2"], [p, p])
    with pytest.raises(ValueError):
        mixture(["1/2", "1/2"], [p, complement(p)])  # modes differ, none given


def test_mixture_default_cutpoint_and_mode():
    p = coin_pfa(cutpoint="1/4")
    q = coin_pfa(cutpoint="3/4")
    mix = mixture(["1/2", "1/2"], [p, q])
    assert mix.cutpoint == Fraction(1, 2)
    assert mix.mode == "weak"


def test_add_start_state_preserves_nonempty_words():
    p = Pfa(
        ("a", "b"),
        (B("1"), B("0")),
        Vec(["1/3", "2/3"]),
        Vec(["1/5", "4/5"]),
        "1/2",
        "weak",
    )
    folded = add_start_state(p)
    assert folded.dim == p.dim + 1
    assert folded.accept_prob("") == 0
    rng = random.Random(3)
    for _ in range(50):
        w = tuple(rng.choice("ab") for _ in range(rng.randint(1, 8)))
        assert folded.accept_prob(w) == p.accept_prob(w)


def test_add_start_state_empty_out_override():
    p = coin_pfa()
    folded = add_start_state(p, empty_out="1/3")
    assert folded.accept_prob("") == Fraction(1, 3)
    # start state is never re-entered
    for m in folded.matrices:
        assert m.col(0) == Vec.zeros(folded.dim)


# --- bounded search ---------------------------------------------------------


def test_search_never_accepting():
    p = Pfa(("a",), (Mat.identity(1),), Vec([1]), Vec([0]), 0)
    report = bounded_search(p, 5, want="above", value=0)
    assert report.witness is None
    assert not report.found
    assert report.max_prob == 0
    assert report.words_checked == 6


def test_search_finds_first_witness_in_order():
    p = coin_pfa(cutpoint="1/2", mode="strict")
    report = bounded_search(p, 3, want="above")
    assert report.witness == Witness(("a", "a"), Fraction(3, 4))
    report2 = bounded_search(p, 3, want="at_least")
    assert report2.witness == Witness(("a",), Fraction(1, 2))


def test_search_exactly_value():
    p = coin_pfa()
    report = bounded_search(p, 3, want="exactly", value="1/4")
    assert report.witness == Witness(("a", "b"), Fraction(1, 4))


def test_search_report_is_exhaustive():
    p = coin_pfa()
    report = bounded_search(p, 4, want="above", value=2)  # impossible target
    assert report.witness is None
    assert report.words_checked == 1 + 2 + 4 + 8 + 16
    assert report.max_prob == Fraction(15, 16)  # word aaaa
    assert report.max_word == ("a",) * 4
    lengths = [s.length for s in report.by_length]
    assert lengths == [0, 1, 2, 3, 4]
    s2 = report.by_length[2]
    assert (s2.count, s2.max_prob, s2.max_word, s2.min_prob) == (
        4,
        Fraction(3, 4),
        ("a", "a"),
        Fraction(0),
    )


def test_search_agrees_with_naive_evaluation():
    p = coin_pfa()
    report = bounded_search(p, 3, want="above", value=2)
    for stats in report.by_length:
        probs = []
        for w in all_words(("a", "b"), stats.length):
            probs.append(p.accept_prob(w))
        assert stats.count == len(probs)
        assert stats.max_prob == max(probs)
        assert stats.min_prob == min(probs)


def all_words(alphabet, length):
    if length == 0:
        yield ()
        return
    for w in all_words(alphabet, length - 1):
        for s in alphabet:
            yield w + (s,)


def test_search_rejects_bad_arguments():
    p = coin_pfa()
    with pytest.raises(ValueError):
        bounded_search(p, -1)
    with pytest.raises(ValueError):
        bounded_search(p, 2, want="near")


# --- JSON -------------------------------------------------------------------


def test_json_roundtrip():
    p = coin_pfa(cutpoint="1/4", mode="strict")
    data = pfa_to_json(p)
    assert data["cutpoint"] == "1/4"
    assert data["matrices"]["a"] == [["1/2", "1/2"], ["0", "1"]]
    q = pfa_from_json(data)
    assert q == p


def test_json_missing_matrix_raises():
    data = pfa_to_json(coin_pfa())
    del data["matrices"]["b"]
    with pytest.raises(ValueError):
        pfa_from_json(data)
