import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutpoint.pcp import (
    PcpInstance,
    antizero,
    as_word,
    binarize,
    brute_solve,
    check_solution,
    classic_instance,
    concatenations,
    ensure_initial_one,
    is_uniquely_decodable,
    pcp_from_json,
    pcp_to_json,
    reverse_instance,
    word_str,
)


def mpcp_toy():
    # Solution (1,2,3): 1+01+1 == 101+1+"" == 1011.
    return PcpInstance((("1", "101"), ("01", "1"), ("1", "")), variant="mpcp")


# --- instance basics --------------------------------------------------------


def test_as_word_and_word_str():
    assert as_word("0110") == ("0", "1", "1", "0")
    assert as_word(["q0", "#"]) == ("q0", "#")
    assert word_str(("1", "0")) == "10"


def test_instance_basics():
    inst = classic_instance()
    assert inst.k == 3
    assert inst.variant == "plain"
    assert inst.pair(1) == (("0",), ("1", "0", "0"))
    assert inst.alphabet() == ("0", "1")
    assert inst.is_binary()
    assert inst.max_word_len() == 3
    with pytest.raises(ValueError):
        inst.pair(4)


def test_instance_validation():
    with pytest.raises(ValueError):
        PcpInstance(())
    with pytest.raises(ValueError):
        PcpInstance((("0", "1"),), variant="sideways")
    # binary rmpcp/twompcp require the special pair to end with 1
    with pytest.raises(ValueError):
        PcpInstance((("10", "0"),), variant="rmpcp")
    with pytest.raises(ValueError):
        PcpInstance((("11", "1"), ("10", "1")), variant="twompcp")
    PcpInstance((("11", "1"), ("11", "11")), variant="twompcp")  # fine


def test_nonbinary_variants_skip_final_one_check():
    inst = PcpInstance(((("q0",), ("q0", "#")),), variant="rmpcp")
    assert not inst.is_binary()


# --- check_solution ---------------------------------------------------------


def test_classic_solution():
    inst = classic_instance()
    assert check_solution(inst, [3, 2, 3, 1])
    v, w = concatenations(inst, [3, 2, 3, 1])
    assert word_str(v) == word_str(w) == "110011100"


def test_empty_solution_rejected():
    assert not check_solution(classic_instance(), [])


def test_single_index_mismatch():
    assert not check_solution(classic_instance(), [3])


def test_out_of_range_index_raises():
    with pytest.raises(ValueError):
        check_solution(classic_instance(), [4])
    with pytest.raises(ValueError):
        check_solution(classic_instance(), [0])


def test_mpcp_constraints():
    inst = mpcp_toy()
    assert check_solution(inst, [1, 2, 3])
    with pytest.raises(ValueError):
        check_solution(inst, [2, 3])  # must start with pair 1
    with pytest.raises(ValueError):
        check_solution(inst, [1, 2, 1])  # pair 1 must not recur


def test_rmpcp_reversed_concatenation():
    inst = reverse_instance(mpcp_toy())
    assert inst.variant == "rmpcp"
    assert check_solution(inst, [1, 2, 3])
    v, w = concatenations(inst, [1, 2, 3])
    assert v == w == as_word("1101")


def test_twompcp_constraints():
    inst = PcpInstance((("10", "1"), ("1", "01"), ("0", "0")), variant="twompcp")
    assert check_solution(inst, [1, 2])
    assert check_solution(inst, [1, 3, 2])
    with pytest.raises(ValueError):
        check_solution(inst, [1, 2, 3])  # must end with pair 2
    with pytest.raises(ValueError):
        check_solution(inst, [1])


# --- brute_solve ------------------------------------------------------------


def test_brute_solve_classic():
    assert brute_solve(classic_instance(), 4) == (3, 2, 3, 1)
    assert brute_solve(classic_instance(), 3) is None


def test_brute_solve_unsolvable():
    inst = PcpInstance((("0", "1"),))
    assert brute_solve(inst, 8) is None


def test_brute_solve_mpcp_and_rmpcp():
    assert brute_solve(mpcp_toy(), 4) == (1, 2, 3)
    assert brute_solve(reverse_instance(mpcp_toy()), 4) == (1, 2, 3)


def test_brute_solve_twompcp():
    inst = PcpInstance((("10", "1"), ("1", "01"), ("0", "0")), variant="twompcp")
    assert brute_solve(inst, 3) == (1, 2)


def test_brute_solve_requires_positive_bound():
    with pytest.raises(ValueError):
        brute_solve(classic_instance(), 0)


short_word = st.text(alphabet="01", max_size=3)
random_instances = st.lists(
    st.tuples(short_word, short_word), min_size=1, max_size=3
).map(lambda pairs: PcpInstance(tuple(pairs)))


@settings(max_examples=60, deadline=None)
@given(random_instances)
def test_brute_solve_result_checks_out(inst):
    sol = brute_solve(inst, 5)
    if sol is not None:
        assert check_solution(inst, sol)


# --- transforms -------------------------------------------------------------


def test_antizero_by_definition():
    inst = PcpInstance((("0", "00"),))
    out = antizero(inst)
    assert out.pairs[0] == (as_word("01"), as_word("0101"))


def test_antizero_preserves_solution_sets():
    before = classic_instance()
    after = antizero(before)

    def all_solutions(inst, bound):
        found = []
        seqs = [()]
        for _ in range(bound):
            seqs = [s + (i,) for s in seqs for i in range(1, inst.k + 1)]
            found.extend(s for s in seqs if check_solution(inst, s))
        return found

    assert all_solutions(before, 5) == all_solutions(after, 5)


def test_antizero_rejects_nonbinary():
    with pytest.raises(ValueError):
        antizero(PcpInstance(((("q0",), ("q0",)),)))


def test_unique_decodability():
    assert is_uniquely_decodable({"a": "0", "b": "10", "c": "11"})
    assert is_uniquely_decodable({"a": "1", "b": "101"})  # suffix code
    assert not is_uniquely_decodable({"a": "0", "b": "01", "c": "10"})
    assert not is_uniquely_decodable({"a": "0", "b": "0"})  # collision
    assert not is_uniquely_decodable({"a": ""})


def test_binarize_example():
    inst = PcpInstance(((("#", "S"), ("#",)),))
    out = binarize(inst, {"#": "101", "S": "100"})
    assert out.pairs[0] == (as_word("101100"), as_word("101"))


def test_binarize_validations():
    inst = PcpInstance(((("#", "S"), ("#",)),))
    with pytest.raises(ValueError):
        binarize(inst, {"#": "101"})  # missing S
    with pytest.raises(ValueError):
        binarize(inst, {"#": "101", "S": "10x"})
    with pytest.raises(ValueError):
        binarize(inst, {"#": "0", "S": "01", "T": "10"})


def test_binarize_preserves_solutions():
    inst = mpcp_toy()
    coded = binarize(inst, {"0": "10", "1": "11"})
    assert coded.variant == "mpcp"
    assert check_solution(coded, [1, 2, 3])
    assert brute_solve(coded, 4) == (1, 2, 3)


def test_reverse_instance_round_trip():
    inst = mpcp_toy()
    assert reverse_instance(reverse_instance(inst)) == inst
    with pytest.raises(ValueError):
        reverse_instance(
            PcpInstance((("11", "1"), ("11", "11")), variant="twompcp")
        )


def test_ensure_initial_one():
    # (1,2) solves before and after: 0+0 == 00, and 10+0 == 100.
    inst = PcpInstance((("0", "00"), ("0", "")), variant="mpcp")
    fixed = ensure_initial_one(inst)
    assert fixed.pair(1) == (as_word("10"), as_word("100"))
    assert check_solution(inst, [1, 2]) and check_solution(fixed, [1, 2])
    assert brute_solve(inst, 4) == brute_solve(fixed, 4) == (1, 2)
    assert ensure_initial_one(fixed) == fixed  # already starts with 1
    with pytest.raises(ValueError):
        ensure_initial_one(classic_instance())
    # the reversed result is a valid rmpcp instance
    assert reverse_instance(fixed).variant == "rmpcp"


# --- JSON -------------------------------------------------------------------


def test_json_roundtrip_binary():
    inst = classic_instance()
    data = pcp_to_json(inst)
    assert data == {"variant": "plain", "pairs": [["0", "100"], ["01", "00"], ["110", "11"]]}
    assert pcp_from_json(data) == inst


def test_json_roundtrip_symbolic():
    inst = PcpInstance(((("q0", "#"), ("#",)),), variant="mpcp")
    data = pcp_to_json(inst)
    assert data["pairs"] == [[["q0", "#"], "#"]]
    assert pcp_from_json(data) == inst
